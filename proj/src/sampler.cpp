#include "gbn/sampler.hpp"

#include <cmath>

#include <boost/math/special_functions/erf.hpp>

namespace gbn {

std::uint64_t stream_seed(std::uint64_t master, std::uint64_t stream) noexcept {
    std::uint64_t z = master + (stream + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

NormalStream::NormalStream(std::uint64_t master, std::uint64_t stream)
    : engine_(stream_seed(master, stream)) {}

double NormalStream::operator()() {
    // u in (0, 1), never 0 or 1.
    const double u = (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    return -M_SQRT2 * boost::math::erfc_inv(2.0 * u);
}

std::size_t DesignSpec::total_rows() const {
    std::size_t n = 0;
    for (const auto& c : conditions) n += static_cast<std::size_t>(c.reps);
    return n;
}

std::vector<InterventionTarget> DesignSpec::row_targets() const {
    std::vector<InterventionTarget> out;
    out.reserve(total_rows());
    for (const auto& c : conditions) out.insert(out.end(), static_cast<std::size_t>(c.reps), c.target);
    return out;
}

void DesignSpec::validate(int p) const {
    if (conditions.empty()) throw InputError("design has no conditions");
    for (const auto& c : conditions) {
        if (c.reps < 1) throw InputError("design condition has reps < 1");
        for (const auto& [node, value] : c.target) {
            if (node < 0 || node >= p)
                throw IndexOutOfRange("design target " + std::to_string(node + 1) + " out of range");
            if (!std::isfinite(value)) throw InputError("design target value is not finite");
        }
    }
}

DesignSpec DesignSpec::scaled(int factor) const {
    DesignSpec out = *this;
    for (auto& c : out.conditions) c.reps *= factor;
    return out;
}

DesignSpec observational_design(int n) { return DesignSpec{{Condition{{}, n}}}; }

bool Dataset::observational() const {
    for (const auto& t : targets)
        if (!t.empty()) return false;
    return true;
}

std::vector<int> Dataset::unclamped_counts() const {
    std::vector<int> n(static_cast<std::size_t>(p()), static_cast<int>(rows()));
    for (const auto& t : targets)
        for (const auto& entry : t) --n[static_cast<std::size_t>(entry.first)];
    return n;
}

void Dataset::validate(double tol) const {
    if (static_cast<Eigen::Index>(targets.size()) != rows())
        throw InputError("dataset needs one intervention target per row");
    for (Eigen::Index k = 0; k < rows(); ++k) {
        for (const auto& [node, value] : targets[static_cast<std::size_t>(k)]) {
            if (node < 0 || node >= p())
                throw IndexOutOfRange("row " + std::to_string(k + 1) + ": clamp index " +
                                      std::to_string(node + 1) + " out of range");
            if (!(std::abs(x(k, node) - value) <= tol))
                throw InputError("row " + std::to_string(k + 1) + ": x" + std::to_string(node + 1) +
                                 " does not equal its clamped value");
        }
    }
}

Dataset observational_dataset(MatrixXd x) {
    Dataset d;
    d.targets.assign(static_cast<std::size_t>(x.rows()), {});
    d.x = std::move(x);
    return d;
}

Dataset sample(const Params& params, const DesignSpec& design, std::uint64_t seed) {
    design.validate(params.p());
    Dataset data;
    data.targets = design.row_targets();
    const auto n = static_cast<Eigen::Index>(data.targets.size());
    data.x.resize(n, params.p());

    NormalStream normal(seed, 0);
    const auto topo = params.dag.topological_order();
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto& target = data.targets[static_cast<std::size_t>(k)];
        for (int j : topo) {
            // One variate per node per row, clamped or not.
            const double z = normal();
            if (auto it = target.find(j); it != target.end()) {
                data.x(k, j) = it->second;
                continue;
            }
            double v = params.m(j) + params.sigma(j) * z;
            const std::size_t off = params.dag.incoming_offset(j);
            const auto in = params.dag.incoming(j);
            for (std::size_t e = 0; e < in.size(); ++e)
                v += params.w(static_cast<Eigen::Index>(off + e)) * data.x(k, in[e].parent);
            data.x(k, j) = v;
        }
    }
    return data;
}

}  // namespace gbn
