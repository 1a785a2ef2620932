#ifndef GBN_MLE_HPP
#define GBN_MLE_HPP

#include <optional>
#include <string>
#include <vector>

#include "gbn/error.hpp"
#include "gbn/graph.hpp"
#include "gbn/likelihood.hpp"
#include "gbn/sampler.hpp"
#include "gbn/types.hpp"

namespace gbn {

/// Normal equations of one child node: A = (Y_{i,i'}) over its parents and
/// b = (Y_{i,j}), with Y_{a,b} = sum_{k in K_j} y_a y_b.
struct NodeScatter {
    MatrixXd a;
    VectorXd b;
    double yjj = 0.0;
};

struct ScatterMatrices {
    std::vector<NodeScatter> nodes;
};

ScatterMatrices scatter(const DagStructure& dag, const CenteredData& cdata);

/// All per-node systems assembled block-diagonally in canonical edge order.
struct NormalSystem {
    MatrixXd a;
    VectorXd b;
};

NormalSystem normal_system(const DagStructure& dag, const ScatterMatrices& s);

struct FitOptions {
    /// Minimum-norm solution for singular systems; affected edges are flagged
    /// instead of failing the fit.
    bool least_squares = false;
    /// Also report sigma_hat * sqrt(N_j / (N_j - 1)). Not the MLE.
    bool bias_correct = false;
    /// Return a flagged result instead of throwing FitError.
    bool allow_partial = false;
    /// A_j is degenerate when its smallest LDLT pivot falls below
    /// pivot_tol * trace(A_j) / dim(A_j).
    double pivot_tol = 1e-10;
};

struct FitResult {
    VectorXd m_hat;
    VectorXd sigma_hat;
    VectorXd w_hat;  // canonical edge order
    std::optional<VectorXd> sigma_hat_bias_corrected;
    double loglik_at_max = 0.0;

    std::vector<bool> m_identified;
    std::vector<bool> sigma_identified;
    std::vector<bool> w_identified;
    std::vector<FitIssue> issues;
    std::vector<std::string> warnings;

    /// (w_hat, sigma_hat) in canonical parameter order.
    VectorXd theta() const;
    bool fully_identified() const { return issues.empty(); }
};

/// Closed-form MLE. Unclamped rows of each node give its intercept, noise
/// and incoming weights. Throws FitError when a node is unidentifiable or its
/// normal equations are degenerate, unless options allow a partial result.
FitResult fit(const DagStructure& dag, const Dataset& data, const FitOptions& options = {});

/// m_hat(w) = mean over K_j of x_j - x W e_j. Throws FitError for N_j = 0.
VectorXd profile_m(const DagStructure& dag, const VectorXd& w, const Dataset& data);

/// log det of the full scatter matrix (Y_{i,i'}) of observational data.
double log_det_scatter(const Dataset& data);

/// Maximised log-likelihood of the complete DAG on observational data,
/// (Np/2)(log N - log 2pi - 1) - (N/2) log det A. Independent of variable order.
double max_loglik_full(const Dataset& data);

}  // namespace gbn

#endif  // GBN_MLE_HPP
