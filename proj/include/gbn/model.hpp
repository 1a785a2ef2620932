#ifndef GBN_MODEL_HPP
#define GBN_MODEL_HPP

// Dense Gaussian algebra of a linear Gaussian Bayesian network:
//
//   X_j = m_j + sum_{i in pa(j)} w_ij X_i + eps_j,   eps_j ~ N(0, sigma_j^2)
//
// With W = (w_ij) and L = (I - W)^{-1}, X ~ N(mu, Sigma) where (row-vector
// convention) mu = m L and Sigma = L^T diag(sigma^2) L. Column vectors are
// used in code, so mu = L^T m.

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gbn/error.hpp"
#include "gbn/graph.hpp"
#include "gbn/types.hpp"

namespace gbn {

/// theta = (m, sigma, w). `w` is aligned with dag.edges().
template <typename Scalar>
struct GbnParams {
    DagStructure dag;
    Vector<Scalar> m;
    Vector<Scalar> sigma;
    Vector<Scalar> w;

    GbnParams() = default;

    GbnParams(DagStructure dag_, Vector<Scalar> m_, Vector<Scalar> sigma_, Vector<Scalar> w_)
        : dag(std::move(dag_)), m(std::move(m_)), sigma(std::move(sigma_)), w(std::move(w_)) {
        validate();
    }

    int p() const noexcept { return dag.p(); }

    Scalar weight(int parent, int child) const {
        auto idx = dag.edge_index(parent, child);
        return idx ? w(static_cast<Eigen::Index>(*idx)) : Scalar(0);
    }

    void validate() const {
        const auto p = static_cast<Eigen::Index>(dag.p());
        if (m.size() != p || sigma.size() != p)
            throw InputError("m and sigma must have one entry per node");
        if (w.size() != static_cast<Eigen::Index>(dag.num_edges()))
            throw InputError("w must have one entry per edge");
        for (Eigen::Index j = 0; j < p; ++j)
            if (!(sigma(j) > Scalar(0)))
                throw NonPositiveSigma("sigma[" + std::to_string(j + 1) + "] must be positive");
    }
};

using Params = GbnParams<double>;

/// Builds params from an explicit weight per edge; every edge must be present.
template <typename Scalar>
GbnParams<Scalar> make_params(const DagStructure& dag, Vector<Scalar> m, Vector<Scalar> sigma,
                              const std::map<Edge, Scalar>& weights) {
    Vector<Scalar> w(static_cast<Eigen::Index>(dag.num_edges()));
    for (const auto& [edge, value] : weights)
        if (!dag.edge_index(edge.parent, edge.child))
            throw InputError("weight given for " + weight_name(edge) + ", which is not an edge");
    Eigen::Index k = 0;
    for (const Edge& e : dag.edges()) {
        auto it = weights.find(e);
        if (it == weights.end()) throw InputError("missing weight for " + weight_name(e));
        w(k++) = it->second;
    }
    return GbnParams<Scalar>(dag, std::move(m), std::move(sigma), std::move(w));
}

template <typename Scalar>
struct JointGaussian {
    Vector<Scalar> mu;
    Matrix<Scalar> cov;
};

/// Post-intervention model for do(X_J = x_J): incoming edges of J removed
/// and clamped nodes deterministic.
template <typename Scalar>
struct MutilatedModel {
    Intervention<Scalar> target;
    Matrix<Scalar> w_j;    // W with columns in J zeroed
    Matrix<Scalar> l_j;    // (I - W_J)^{-1}
    Vector<Scalar> d_j;    // 0 at J, 1 elsewhere
    Vector<Scalar> nu;     // x_j on J, m_j elsewhere
    Vector<Scalar> mu_j;
    Matrix<Scalar> cov_j;  // rows/cols at J exactly zero
};

template <typename Scalar>
Matrix<Scalar> weight_matrix(const GbnParams<Scalar>& params) {
    const auto p = static_cast<Eigen::Index>(params.p());
    Matrix<Scalar> w = Matrix<Scalar>::Zero(p, p);
    Eigen::Index k = 0;
    for (const Edge& e : params.dag.edges()) w(e.parent, e.child) = params.w(k++);
    return w;
}

/// L = (I - W)^{-1} for strictly upper-triangular W, by unit-triangular
/// back-substitution. Throws NotTriangularError otherwise.
template <typename Derived>
Matrix<typename Derived::Scalar> path_matrix(const Eigen::MatrixBase<Derived>& w) {
    using Scalar = typename Derived::Scalar;
    using std::abs;
    if (w.rows() != w.cols()) throw NotTriangularError("weight matrix must be square");
    const Eigen::Index p = w.rows();
    for (Eigen::Index j = 0; j < p; ++j)
        for (Eigen::Index i = j; i < p; ++i)
            if (abs(w(i, j)) > Scalar(1e-14))
                throw NotTriangularError("weight matrix has a nonzero entry on or below the diagonal at (" +
                                         std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
    Matrix<Scalar> a = Matrix<Scalar>::Identity(p, p) - w;
    return a.template triangularView<Eigen::UnitUpper>().solve(Matrix<Scalar>::Identity(p, p));
}

/// Path matrix for a W indexed by node label; permutes to the dag's
/// topological order, solves, and permutes back.
template <typename Derived>
Matrix<typename Derived::Scalar> path_matrix(const DagStructure& dag,
                                             const Eigen::MatrixBase<Derived>& w) {
    if (dag.identity_order()) return path_matrix(w);
    const std::vector<int> topo(dag.topological_order().begin(), dag.topological_order().end());
    Matrix<typename Derived::Scalar> sorted = w(topo, topo);
    Matrix<typename Derived::Scalar> l_sorted = path_matrix(sorted);
    Matrix<typename Derived::Scalar> l(w.rows(), w.cols());
    l(topo, topo) = l_sorted;
    return l;
}

/// L^T diag(var) L, symmetric to the last bit.
template <typename Scalar>
Matrix<Scalar> congruence(const Matrix<Scalar>& l, const Vector<Scalar>& var) {
    const Matrix<Scalar> scaled = var.cwiseSqrt().asDiagonal() * l;
    Matrix<Scalar> lower = Matrix<Scalar>::Zero(l.cols(), l.cols());
    lower.template selfadjointView<Eigen::Lower>().rankUpdate(scaled.transpose());
    return lower.template selfadjointView<Eigen::Lower>();
}

template <typename Scalar>
JointGaussian<Scalar> joint_distribution(const GbnParams<Scalar>& params) {
    const Matrix<Scalar> l = path_matrix(params.dag, weight_matrix(params));
    const Vector<Scalar> var = params.sigma.array().square();
    JointGaussian<Scalar> out;
    out.mu = l.transpose() * params.m;
    out.cov = congruence(l, var);
    return out;
}

template <typename Scalar>
MutilatedModel<Scalar> mutilate(const GbnParams<Scalar>& params, const Intervention<Scalar>& target) {
    const auto p = static_cast<Eigen::Index>(params.p());
    MutilatedModel<Scalar> out;
    out.target = target;
    out.w_j = weight_matrix(params);
    out.d_j = Vector<Scalar>::Ones(p);
    out.nu = params.m;
    for (const auto& [node, value] : target) {
        if (node < 0 || node >= params.p())
            throw IndexOutOfRange("intervention target " + std::to_string(node + 1) + " out of range");
        out.w_j.col(node).setZero();
        out.d_j(node) = Scalar(0);
        out.nu(node) = value;
    }
    out.l_j = path_matrix(params.dag, out.w_j);
    const Vector<Scalar> var = params.sigma.array().square() * out.d_j.array();
    out.mu_j = out.l_j.transpose() * out.nu;
    out.cov_j = congruence(out.l_j, var);
    // Clamped coordinates are deterministic.
    for (const auto& [node, value] : target) {
        out.cov_j.row(node).setZero();
        out.cov_j.col(node).setZero();
        out.mu_j(node) = value;
    }
    return out;
}

}  // namespace gbn

#endif  // GBN_MODEL_HPP
