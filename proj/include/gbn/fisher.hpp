#ifndef GBN_FISHER_HPP
#define GBN_FISHER_HPP

#include <string>
#include <vector>

#include "gbn/model.hpp"
#include "gbn/sampler.hpp"
#include "gbn/types.hpp"

namespace gbn {

/// Moments of the centered rows y^{k,j} for each design condition c (all rows
/// of a condition share them) and node j. Empty entries where j is clamped.
struct CenteredMoments {
    // [condition][node]
    std::vector<std::vector<VectorXd>> mean;
    std::vector<std::vector<MatrixXd>> cov;
    std::vector<VectorXd> condition_mu;   // mutilated mean per condition
    std::vector<MatrixXd> condition_cov;  // mutilated covariance per condition
    std::vector<int> n_unclamped;         // N_j
};

CenteredMoments centered_moments(const Params& params, const DesignSpec& design);

/// Expected information of the profiled likelihood over (w, sigma), in the
/// canonical order w[i,j] by (j, i) then sigma[1..p].
struct FisherMatrix {
    std::vector<std::string> params_order;
    MatrixXd info;
};

/// N iid observational rows: w-block (N-1) Sigma_{i,i'} / sigma_j^2 within a
/// child, sigma diagonal (2N-3) / sigma_j^2. Requires n >= 2.
FisherMatrix fisher_observational(const Params& params, int n);

/// Mixed design. For edges (i,j), (i',j):
///   sigma_j^-2 [ (N_j-1)/N_j sum_{k in K_j} Sigma_k(i,i') + sum_{k in K_j} m^{k,j}_i m^{k,j}_{i'} ]
/// and (2N_j-3)/sigma_j^2 on the sigma diagonal. Nodes clamped in every row
/// carry no information (zero rows); N_j = 1 throws InsufficientReplication.
FisherMatrix fisher_intervention(const Params& params, const DesignSpec& design);

struct CramerRao {
    MatrixXd cov;
    VectorXd sd;
};

/// Inverse information. Throws SingularInformation when not positive definite.
CramerRao cramer_rao(const FisherMatrix& fisher, double pivot_tol = 1e-10);

enum class DesignCriterion { DOptimal, AOptimal };

/// d-opt: log det I. a-opt: -trace(I^{-1}). Larger is better.
double design_score(const Params& params, const DesignSpec& design, DesignCriterion criterion);

}  // namespace gbn

#endif  // GBN_FISHER_HPP
