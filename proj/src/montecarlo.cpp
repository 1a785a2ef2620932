#include "gbn/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <thread>

#include "gbn/error.hpp"
#include "gbn/likelihood.hpp"
#include "gbn/mle.hpp"

namespace gbn {

namespace {

// Runs body(i) for i in [0, n) on up to `threads` workers.
template <typename Body>
void parallel_for(int n, unsigned threads, Body body) {
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
    if (workers == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t)
        pool.emplace_back([&] {
            for (int i = next++; i < n; i = next++) body(i);
        });
    for (auto& th : pool) th.join();
}

constexpr int kBlock = 256;

}  // namespace

unsigned thread_count() {
    if (const char* env = std::getenv("GBN_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

McReport run_mc(const Params& params, const DesignSpec& design, int reps, std::uint64_t seed,
                unsigned threads) {
    if (reps < 2) throw InputError("Monte Carlo needs at least 2 replicates");
    design.validate(params.p());
    if (threads == 0) threads = thread_count();

    std::vector<std::optional<VectorXd>> theta(static_cast<std::size_t>(reps));
    parallel_for(reps, threads, [&](int r) {
        const Dataset data = sample(params, design, stream_seed(seed, static_cast<std::uint64_t>(r)));
        try {
            theta[static_cast<std::size_t>(r)] = fit(params.dag, data).theta();
        } catch (const FitError&) {
        }
    });

    McReport report;
    report.reps = reps;
    report.seed = seed;
    report.params_order = parameter_names(params.dag);
    const Eigen::Index dim = static_cast<Eigen::Index>(params.dag.num_edges()) + params.p();
    VectorXd sum = VectorXd::Zero(dim);
    int ok = 0;
    for (const auto& t : theta) {
        if (!t) {
            ++report.failures;
            continue;
        }
        sum += *t;
        ++ok;
    }
    if (ok == 0) throw AllReplicatesFailed("every Monte Carlo replicate failed to fit");
    if (report.failures * 100 > reps)
        throw ReplicateFailures(std::to_string(report.failures) + " of " + std::to_string(reps) +
                                " replicates failed to fit (limit 1%)");

    report.estimator_mean = sum / ok;
    MatrixXd cov = MatrixXd::Zero(dim, dim);
    for (const auto& t : theta) {
        if (!t) continue;
        const VectorXd d = *t - report.estimator_mean;
        cov += d * d.transpose();
    }
    report.estimator_cov = ok > 1 ? MatrixXd(cov / (ok - 1)) : MatrixXd(cov);
    report.estimator_sd = report.estimator_cov.diagonal().array().sqrt();
    return report;
}

ExpectedInformation expected_information_mc(const Params& params, const DesignSpec& design, int reps,
                                            std::uint64_t seed, unsigned threads) {
    if (reps < 2) throw InputError("Monte Carlo needs at least 2 replicates");
    design.validate(params.p());
    if (threads == 0) threads = thread_count();
    const Eigen::Index dim = static_cast<Eigen::Index>(params.dag.num_edges()) + params.p();

    // Fixed-size blocks reduced in index order keep the sums thread-independent.
    const int n_blocks = (reps + kBlock - 1) / kBlock;
    std::vector<MatrixXd> sums(static_cast<std::size_t>(n_blocks));
    std::vector<MatrixXd> sq_sums(static_cast<std::size_t>(n_blocks));
    parallel_for(n_blocks, threads, [&](int b) {
        MatrixXd s = MatrixXd::Zero(dim, dim);
        MatrixXd s2 = MatrixXd::Zero(dim, dim);
        const int end = std::min(reps, (b + 1) * kBlock);
        for (int r = b * kBlock; r < end; ++r) {
            const Dataset data = sample(params, design, stream_seed(seed, static_cast<std::uint64_t>(r)));
            const MatrixXd neg_h = -hessian(params.dag, params.sigma, params.w, center(data));
            s += neg_h;
            s2 += neg_h.cwiseAbs2();
        }
        sums[static_cast<std::size_t>(b)] = std::move(s);
        sq_sums[static_cast<std::size_t>(b)] = std::move(s2);
    });

    MatrixXd total = MatrixXd::Zero(dim, dim);
    MatrixXd total_sq = MatrixXd::Zero(dim, dim);
    for (int b = 0; b < n_blocks; ++b) {
        total += sums[static_cast<std::size_t>(b)];
        total_sq += sq_sums[static_cast<std::size_t>(b)];
    }
    ExpectedInformation out;
    out.reps = reps;
    out.mean = total / reps;
    const MatrixXd var = ((total_sq / reps) - out.mean.cwiseAbs2()) * (double(reps) / (reps - 1));
    out.se = (var.cwiseMax(0.0) / reps).cwiseSqrt();
    return out;
}

}  // namespace gbn
