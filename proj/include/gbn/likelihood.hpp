#ifndef GBN_LIKELIHOOD_HPP
#define GBN_LIKELIHOOD_HPP

#include <string>
#include <vector>

#include "gbn/graph.hpp"
#include "gbn/model.hpp"
#include "gbn/sampler.hpp"
#include "gbn/types.hpp"

namespace gbn {

/// Rows informative about node j (those where j is not clamped), centered by
/// their own column means.
struct NodeBlock {
    std::vector<Eigen::Index> rows;  // K_j
    VectorXd mean;                   // column means of x over K_j (empty if N_j = 0)
    MatrixXd y;                      // N_j x p, row r is x^{rows[r]} - mean
    int n() const noexcept { return static_cast<int>(rows.size()); }
};

struct CenteredData {
    std::vector<NodeBlock> nodes;  // one per node
    int p() const noexcept { return static_cast<int>(nodes.size()); }
    int n(int j) const { return nodes.at(static_cast<std::size_t>(j)).n(); }
    const MatrixXd& y(int j) const { return nodes.at(static_cast<std::size_t>(j)).y; }
};

CenteredData center(const Dataset& data);

/// Every row of x centered with node j's K_j means, including rows outside
/// K_j. This is the full-height display form of y^{.,j}.
MatrixXd centered_all_rows(const Dataset& data, const CenteredData& cdata, int j);

/// Canonical parameter names: w[i,j] in edge order, then sigma[1..p].
std::vector<std::string> parameter_names(const DagStructure& dag);

/// Full log-likelihood over the unclamped coordinates of every row.
double loglik(const Params& params, const Dataset& data);

/// Dense matrix form for purely observational data (x is N x p).
double loglik_observational(const Params& params, const MatrixXd& x);

/// Per-node sum of squared centered residuals S_j = sum_{K_j} (y_j - y W e_j)^2.
VectorXd residual_sums(const DagStructure& dag, const VectorXd& w, const CenteredData& cdata);

/// Log-likelihood maximised over the intercepts m.
double profiled_loglik(const DagStructure& dag, const VectorXd& sigma, const VectorXd& w,
                       const CenteredData& cdata);

/// Dense matrix form of profiled_loglik for observational data; y is the
/// N x p centered matrix.
double profiled_loglik_observational(const DagStructure& dag, const VectorXd& sigma,
                                     const VectorXd& w, const MatrixXd& y);

/// d(profiled loglik)/d(w, sigma) in canonical order.
VectorXd gradient(const DagStructure& dag, const VectorXd& sigma, const VectorXd& w,
                  const CenteredData& cdata);

/// Second derivatives in canonical order. Entries coupling different child
/// nodes are exactly zero.
MatrixXd hessian(const DagStructure& dag, const VectorXd& sigma, const VectorXd& w,
                 const CenteredData& cdata);

}  // namespace gbn

#endif  // GBN_LIKELIHOOD_HPP
