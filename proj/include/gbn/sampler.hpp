#ifndef GBN_SAMPLER_HPP
#define GBN_SAMPLER_HPP

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "gbn/model.hpp"
#include "gbn/types.hpp"

namespace gbn {

/// Identifier written into dataset metadata. Streams are std::mt19937_64
/// seeded from SplitMix64(seed, stream id); normals use the inverse CDF.
inline constexpr std::string_view kRngAlgorithm = "mt19937_64+splitmix64-streams/normal-inverse-cdf";

/// SplitMix64 finaliser applied to master ^ golden-ratio-spaced stream id.
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t stream) noexcept;

/// Standard-normal generator over one derived stream.
class NormalStream {
public:
    NormalStream(std::uint64_t master, std::uint64_t stream);
    double operator()();

private:
    std::mt19937_64 engine_;
};

struct Condition {
    InterventionTarget target;
    int reps = 1;
};

/// Ordered list of (target, reps); rows are laid out condition by condition.
struct DesignSpec {
    std::vector<Condition> conditions;

    std::size_t total_rows() const;
    /// Targets of each row in order.
    std::vector<InterventionTarget> row_targets() const;
    void validate(int p) const;
    /// Same conditions with reps multiplied by `factor`.
    DesignSpec scaled(int factor) const;
};

DesignSpec observational_design(int n);

struct Dataset {
    MatrixXd x;                               // N x p
    std::vector<InterventionTarget> targets;  // J_k for each row

    Eigen::Index rows() const noexcept { return x.rows(); }
    Eigen::Index p() const noexcept { return x.cols(); }
    bool observational() const;
    /// N_j: number of rows where node j is not clamped.
    std::vector<int> unclamped_counts() const;
    /// Throws InputError if a row disagrees with its clamp or has a bad index.
    void validate(double tol = 1e-12) const;
};

Dataset observational_dataset(MatrixXd x);

/// Ancestral sampling in topological order; clamped nodes take their value.
/// Deterministic in (params, design, seed).
Dataset sample(const Params& params, const DesignSpec& design, std::uint64_t seed);

}  // namespace gbn

#endif  // GBN_SAMPLER_HPP
