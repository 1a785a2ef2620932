#ifndef GBN_MONTECARLO_HPP
#define GBN_MONTECARLO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "gbn/model.hpp"
#include "gbn/sampler.hpp"
#include "gbn/types.hpp"

namespace gbn {

/// Worker count: GBN_THREADS if set and positive, else hardware concurrency.
unsigned thread_count();

/// Moments of theta_hat = (w_hat, sigma_hat) over successful replicates.
struct McReport {
    int reps = 0;
    int failures = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> params_order;
    VectorXd estimator_mean;
    VectorXd estimator_sd;
    MatrixXd estimator_cov;  // unbiased (divisor successes - 1)
};

/// Simulates `reps` datasets under the design, fits each and aggregates in
/// replicate order. Replicate r draws from stream_seed(seed, r), so the
/// result does not depend on the thread count.
///
/// Replicates whose fit fails are counted; more than 1% failures throws
/// ReplicateFailures, all failing throws AllReplicatesFailed.
McReport run_mc(const Params& params, const DesignSpec& design, int reps, std::uint64_t seed,
                unsigned threads = 0);

/// Monte Carlo estimate of -E[Hessian] of the profiled log-likelihood at the
/// true parameters, with the standard error of each entry.
struct ExpectedInformation {
    MatrixXd mean;
    MatrixXd se;
    int reps = 0;
};

ExpectedInformation expected_information_mc(const Params& params, const DesignSpec& design, int reps,
                                            std::uint64_t seed, unsigned threads = 0);

}  // namespace gbn

#endif  // GBN_MONTECARLO_HPP
