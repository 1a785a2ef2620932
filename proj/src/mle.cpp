#include "gbn/mle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>

namespace gbn {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string m_name(int j) { return "m[" + std::to_string(j + 1) + "]"; }
std::string sigma_name(int j) { return "sigma[" + std::to_string(j + 1) + "]"; }

struct NodeSolve {
    VectorXd w;
    std::vector<bool> identified;
    bool degenerate = false;
};

// Solves A w = b via LDLT; on a small pivot either reports degeneracy or,
// with least_squares, returns the minimum-norm solution and flags the
// coordinates touched by the null space.
NodeSolve solve_node(const NodeScatter& s, const FitOptions& options) {
    const Eigen::Index q = s.a.rows();
    NodeSolve out;
    out.identified.assign(static_cast<std::size_t>(q), true);
    const double scale = s.a.trace() / static_cast<double>(q);
    const double tol = options.pivot_tol * scale;

    Eigen::LDLT<MatrixXd> ldlt(s.a);
    const bool singular = !(scale > 0.0) || ldlt.info() != Eigen::Success ||
                          ldlt.vectorD().minCoeff() < tol;
    if (!singular) {
        out.w = ldlt.solve(s.b);
        return out;
    }
    out.degenerate = true;

    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(s.a);
    const VectorXd& lambda = eig.eigenvalues();
    const MatrixXd& v = eig.eigenvectors();
    const double eig_tol = std::max(tol, 0.0);
    VectorXd w = VectorXd::Zero(q);
    for (Eigen::Index c = 0; c < q; ++c) {
        if (lambda(c) > eig_tol && scale > 0.0) {
            w += v.col(c) * (v.col(c).dot(s.b) / lambda(c));
        } else {
            for (Eigen::Index r = 0; r < q; ++r)
                if (std::abs(v(r, c)) > 1e-8) out.identified[static_cast<std::size_t>(r)] = false;
        }
    }
    out.w = options.least_squares ? w : VectorXd::Constant(q, kNaN);
    return out;
}

}  // namespace

ScatterMatrices scatter(const DagStructure& dag, const CenteredData& cdata) {
    if (cdata.p() != dag.p()) throw InputError("centered data does not match the graph");
    ScatterMatrices out;
    out.nodes.resize(static_cast<std::size_t>(dag.p()));
    for (int j = 0; j < dag.p(); ++j) {
        const MatrixXd& y = cdata.y(j);
        const std::vector<int> pa = dag.parents(j);
        NodeScatter& s = out.nodes[static_cast<std::size_t>(j)];
        const MatrixXd yp = y(Eigen::all, pa);
        s.a = yp.transpose() * yp;
        s.b = yp.transpose() * y.col(j);
        s.yjj = y.col(j).squaredNorm();
    }
    return out;
}

NormalSystem normal_system(const DagStructure& dag, const ScatterMatrices& s) {
    const auto n = static_cast<Eigen::Index>(dag.num_edges());
    NormalSystem out{MatrixXd::Zero(n, n), VectorXd::Zero(n)};
    for (int j = 0; j < dag.p(); ++j) {
        const auto off = static_cast<Eigen::Index>(dag.incoming_offset(j));
        const NodeScatter& node = s.nodes[static_cast<std::size_t>(j)];
        const Eigen::Index q = node.a.rows();
        out.a.block(off, off, q, q) = node.a;
        out.b.segment(off, q) = node.b;
    }
    return out;
}

VectorXd FitResult::theta() const {
    VectorXd t(w_hat.size() + sigma_hat.size());
    t << w_hat, sigma_hat;
    return t;
}

FitResult fit(const DagStructure& dag, const Dataset& data, const FitOptions& options) {
    if (data.p() != dag.p()) throw InputError("dataset width does not match the graph");
    const int p = dag.p();
    const auto n_edges = static_cast<Eigen::Index>(dag.num_edges());
    const CenteredData cdata = center(data);
    const ScatterMatrices scat = scatter(dag, cdata);

    FitResult res;
    res.m_hat = VectorXd::Constant(p, kNaN);
    res.sigma_hat = VectorXd::Constant(p, kNaN);
    res.w_hat = VectorXd::Constant(n_edges, kNaN);
    res.m_identified.assign(static_cast<std::size_t>(p), false);
    res.sigma_identified.assign(static_cast<std::size_t>(p), false);
    res.w_identified.assign(static_cast<std::size_t>(n_edges), false);

    bool hard_failure = false;
    double loglik = 0.0;
    for (int j = 0; j < p; ++j) {
        const NodeBlock& block = cdata.nodes[static_cast<std::size_t>(j)];
        const auto in = dag.incoming(j);
        const auto off = static_cast<Eigen::Index>(dag.incoming_offset(j));
        const auto q = static_cast<Eigen::Index>(in.size());
        const int n_j = block.n();

        if (n_j == 0) {
            FitIssue issue{FitIssue::Kind::Unidentifiable, j, {}};
            for (const Edge& e : in) issue.parameters.push_back(weight_name(e));
            issue.parameters.push_back(m_name(j));
            issue.parameters.push_back(sigma_name(j));
            res.issues.push_back(std::move(issue));
            hard_failure = true;
            continue;
        }

        VectorXd w_j(0);
        std::vector<bool> w_ok;
        if (q > 0) {
            NodeSolve solved = solve_node(scat.nodes[static_cast<std::size_t>(j)], options);
            w_j = solved.w;
            w_ok = solved.identified;
            if (solved.degenerate) {
                FitIssue issue{FitIssue::Kind::DegenerateSystem, j, {}};
                for (Eigen::Index a = 0; a < q; ++a)
                    if (!w_ok[static_cast<std::size_t>(a)])
                        issue.parameters.push_back(weight_name(in[static_cast<std::size_t>(a)]));
                if (!options.least_squares) {
                    issue.parameters.push_back(m_name(j));
                    issue.parameters.push_back(sigma_name(j));
                    res.issues.push_back(std::move(issue));
                    hard_failure = true;
                    continue;
                }
                res.issues.push_back(std::move(issue));
            }
            res.w_hat.segment(off, q) = w_j;
            for (Eigen::Index a = 0; a < q; ++a)
                res.w_identified[static_cast<std::size_t>(off + a)] = w_ok[static_cast<std::size_t>(a)];
        }

        double s_j = block.y.col(j).squaredNorm();
        double m_j = block.mean(j);
        if (q > 0) {
            VectorXd r = block.y.col(j);
            for (Eigen::Index a = 0; a < q; ++a) {
                const int parent = in[static_cast<std::size_t>(a)].parent;
                r -= w_j(a) * block.y.col(parent);
                m_j -= w_j(a) * block.mean(parent);
            }
            s_j = r.squaredNorm();
        }
        const bool all_w = std::all_of(w_ok.begin(), w_ok.end(), [](bool b) { return b; });
        res.m_hat(j) = m_j;
        res.sigma_hat(j) = std::sqrt(s_j / n_j);
        res.m_identified[static_cast<std::size_t>(j)] = all_w;
        res.sigma_identified[static_cast<std::size_t>(j)] = true;
        if (n_j <= q + 1)
            res.warnings.push_back("ZeroVarianceWarning: node " + std::to_string(j + 1) + " has N_j = " +
                                   std::to_string(n_j) + " <= " + std::to_string(q + 1) +
                                   " free mean parameters; sigma_hat may be 0");

        // At the MLE each node contributes -N_j/2 (log 2pi + 1) - N_j log sigma_hat_j.
        loglik += -0.5 * n_j * (std::log(2.0 * std::numbers::pi) + 1.0) -
                  n_j * std::log(res.sigma_hat(j));
    }
    res.loglik_at_max = hard_failure ? kNaN : loglik;

    if (options.bias_correct) {
        VectorXd corrected = res.sigma_hat;
        for (int j = 0; j < p; ++j) {
            const int n_j = cdata.n(j);
            corrected(j) = n_j > 1 ? res.sigma_hat(j) * std::sqrt(double(n_j) / (n_j - 1)) : kNaN;
        }
        res.sigma_hat_bias_corrected = corrected;
    }

    if (!res.issues.empty() && !options.allow_partial && hard_failure) throw FitError(res.issues);
    return res;
}

VectorXd profile_m(const DagStructure& dag, const VectorXd& w, const Dataset& data) {
    if (data.p() != dag.p()) throw InputError("dataset width does not match the graph");
    if (w.size() != static_cast<Eigen::Index>(dag.num_edges()))
        throw InputError("w must have one entry per edge");
    VectorXd m(dag.p());
    std::vector<FitIssue> issues;
    for (int j = 0; j < dag.p(); ++j) {
        const auto off = dag.incoming_offset(j);
        const auto in = dag.incoming(j);
        double sum = 0.0;
        int n_j = 0;
        for (Eigen::Index k = 0; k < data.rows(); ++k) {
            if (data.targets[static_cast<std::size_t>(k)].contains(j)) continue;
            double v = data.x(k, j);
            for (std::size_t e = 0; e < in.size(); ++e)
                v -= w(static_cast<Eigen::Index>(off + e)) * data.x(k, in[e].parent);
            sum += v;
            ++n_j;
        }
        if (n_j == 0) {
            issues.push_back({FitIssue::Kind::Unidentifiable, j, {m_name(j)}});
            continue;
        }
        m(j) = sum / n_j;
    }
    if (!issues.empty()) throw FitError(std::move(issues));
    return m;
}

double log_det_scatter(const Dataset& data) {
    if (!data.observational())
        throw NotObservational("full-model likelihood requires purely observational data");
    MatrixXd y = data.x;
    y.rowwise() -= y.colwise().mean();
    const MatrixXd a = y.transpose() * y;
    const double scale = a.trace() / static_cast<double>(a.rows());
    Eigen::LDLT<MatrixXd> ldlt(a);
    if (!(scale > 0.0) || ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() < 1e-10 * scale)
        throw SingularScatter("sample scatter matrix is singular");
    return ldlt.vectorD().array().log().sum();
}

double max_loglik_full(const Dataset& data) {
    const double log_det = log_det_scatter(data);
    const auto n = static_cast<double>(data.rows());
    const auto p = static_cast<double>(data.p());
    return 0.5 * n * p * (std::log(n) - std::log(2.0 * std::numbers::pi) - 1.0) - 0.5 * n * log_det;
}

}  // namespace gbn
