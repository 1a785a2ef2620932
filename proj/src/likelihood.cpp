#include "gbn/likelihood.hpp"

#include <cmath>
#include <numbers>

#include "gbn/error.hpp"

namespace gbn {

namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

void require_positive_sigma(const VectorXd& sigma, const CenteredData& cdata) {
    if (sigma.size() != cdata.p()) throw InputError("sigma must have one entry per node");
    for (int j = 0; j < cdata.p(); ++j)
        if (cdata.n(j) > 0 && !(sigma(j) > 0.0))
            throw NonPositiveSigma("sigma[" + std::to_string(j + 1) + "] must be positive");
}

void require_shapes(const DagStructure& dag, const VectorXd& w, const CenteredData& cdata) {
    if (cdata.p() != dag.p()) throw InputError("centered data does not match the graph");
    if (w.size() != static_cast<Eigen::Index>(dag.num_edges()))
        throw InputError("w must have one entry per edge");
}

// y_j - y W e_j over the rows of node j's block.
VectorXd node_residual(const DagStructure& dag, const VectorXd& w, const NodeBlock& block, int j) {
    VectorXd r = block.y.col(j);
    const std::size_t off = dag.incoming_offset(j);
    const auto in = dag.incoming(j);
    for (std::size_t e = 0; e < in.size(); ++e)
        r -= w(static_cast<Eigen::Index>(off + e)) * block.y.col(in[e].parent);
    return r;
}

}  // namespace

CenteredData center(const Dataset& data) {
    const auto p = data.p();
    CenteredData out;
    out.nodes.resize(static_cast<std::size_t>(p));
    for (Eigen::Index j = 0; j < p; ++j) {
        NodeBlock& block = out.nodes[static_cast<std::size_t>(j)];
        for (Eigen::Index k = 0; k < data.rows(); ++k)
            if (!data.targets[static_cast<std::size_t>(k)].contains(static_cast<int>(j)))
                block.rows.push_back(k);
        if (block.rows.empty()) {
            block.y.resize(0, p);
            continue;
        }
        block.y = data.x(block.rows, Eigen::all);
        block.mean = block.y.colwise().mean().transpose();
        block.y.rowwise() -= block.mean.transpose();
    }
    return out;
}

MatrixXd centered_all_rows(const Dataset& data, const CenteredData& cdata, int j) {
    const NodeBlock& block = cdata.nodes.at(static_cast<std::size_t>(j));
    if (block.rows.empty()) throw InputError("node " + std::to_string(j + 1) + " has no unclamped rows");
    MatrixXd y = data.x;
    y.rowwise() -= block.mean.transpose();
    return y;
}

std::vector<std::string> parameter_names(const DagStructure& dag) {
    std::vector<std::string> names;
    for (const Edge& e : dag.edges()) names.push_back(weight_name(e));
    for (int j = 0; j < dag.p(); ++j) names.push_back("sigma[" + std::to_string(j + 1) + "]");
    return names;
}

double loglik(const Params& params, const Dataset& data) {
    if (data.p() != params.p()) throw InputError("dataset width does not match the model");
    params.validate();
    const auto& dag = params.dag;
    double total = 0.0;
    for (int j = 0; j < params.p(); ++j) {
        const std::size_t off = dag.incoming_offset(j);
        const auto in = dag.incoming(j);
        double ss = 0.0;
        int n_j = 0;
        for (Eigen::Index k = 0; k < data.rows(); ++k) {
            if (data.targets[static_cast<std::size_t>(k)].contains(j)) continue;
            double r = data.x(k, j) - params.m(j);
            for (std::size_t e = 0; e < in.size(); ++e)
                r -= params.w(static_cast<Eigen::Index>(off + e)) * data.x(k, in[e].parent);
            ss += r * r;
            ++n_j;
        }
        const double s = params.sigma(j);
        total += -0.5 * kLog2Pi * n_j - n_j * std::log(s) - 0.5 * ss / (s * s);
    }
    return total;
}

double loglik_observational(const Params& params, const MatrixXd& x) {
    if (x.cols() != params.p()) throw InputError("dataset width does not match the model");
    params.validate();
    const auto n = static_cast<double>(x.rows());
    const auto p = static_cast<double>(params.p());
    const MatrixXd i_minus_w = MatrixXd::Identity(params.p(), params.p()) - weight_matrix(params);
    MatrixXd r = x * i_minus_w;
    r.rowwise() -= params.m.transpose();
    const VectorXd ss = r.colwise().squaredNorm().transpose();
    return -0.5 * n * p * kLog2Pi - n * params.sigma.array().log().sum() -
           0.5 * (ss.array() / params.sigma.array().square()).sum();
}

VectorXd residual_sums(const DagStructure& dag, const VectorXd& w, const CenteredData& cdata) {
    require_shapes(dag, w, cdata);
    VectorXd s = VectorXd::Zero(dag.p());
    for (int j = 0; j < dag.p(); ++j) {
        const NodeBlock& block = cdata.nodes[static_cast<std::size_t>(j)];
        if (block.n() > 0) s(j) = node_residual(dag, w, block, j).squaredNorm();
    }
    return s;
}

double profiled_loglik(const DagStructure& dag, const VectorXd& sigma, const VectorXd& w,
                       const CenteredData& cdata) {
    require_shapes(dag, w, cdata);
    require_positive_sigma(sigma, cdata);
    const VectorXd s = residual_sums(dag, w, cdata);
    double total = 0.0;
    for (int j = 0; j < dag.p(); ++j) {
        const int n_j = cdata.n(j);
        if (n_j == 0) continue;
        total += -0.5 * kLog2Pi * n_j - n_j * std::log(sigma(j)) - 0.5 * s(j) / (sigma(j) * sigma(j));
    }
    return total;
}

double profiled_loglik_observational(const DagStructure& dag, const VectorXd& sigma,
                                     const VectorXd& w, const MatrixXd& y) {
    if (y.cols() != dag.p() || sigma.size() != dag.p()) throw InputError("shape mismatch");
    if ((sigma.array() <= 0.0).any()) throw NonPositiveSigma("sigma must be positive");
    const Params shape(dag, VectorXd::Zero(dag.p()), sigma, w);
    const auto n = static_cast<double>(y.rows());
    const auto p = static_cast<double>(dag.p());
    const MatrixXd r = y * (MatrixXd::Identity(dag.p(), dag.p()) - weight_matrix(shape));
    const VectorXd ss = r.colwise().squaredNorm().transpose();
    return -0.5 * n * p * kLog2Pi - n * sigma.array().log().sum() -
           0.5 * (ss.array() / sigma.array().square()).sum();
}

VectorXd gradient(const DagStructure& dag, const VectorXd& sigma, const VectorXd& w,
                  const CenteredData& cdata) {
    require_shapes(dag, w, cdata);
    require_positive_sigma(sigma, cdata);
    const auto n_edges = static_cast<Eigen::Index>(dag.num_edges());
    VectorXd g = VectorXd::Zero(n_edges + dag.p());
    for (int j = 0; j < dag.p(); ++j) {
        const NodeBlock& block = cdata.nodes[static_cast<std::size_t>(j)];
        if (block.n() == 0) continue;
        const VectorXd r = node_residual(dag, w, block, j);
        const double s = sigma(j);
        const std::size_t off = dag.incoming_offset(j);
        const auto in = dag.incoming(j);
        for (std::size_t e = 0; e < in.size(); ++e)
            g(static_cast<Eigen::Index>(off + e)) = block.y.col(in[e].parent).dot(r) / (s * s);
        g(n_edges + j) = -block.n() / s + r.squaredNorm() / (s * s * s);
    }
    return g;
}

MatrixXd hessian(const DagStructure& dag, const VectorXd& sigma, const VectorXd& w,
                 const CenteredData& cdata) {
    require_shapes(dag, w, cdata);
    require_positive_sigma(sigma, cdata);
    const auto n_edges = static_cast<Eigen::Index>(dag.num_edges());
    const Eigen::Index dim = n_edges + dag.p();
    MatrixXd h = MatrixXd::Zero(dim, dim);
    for (int j = 0; j < dag.p(); ++j) {
        const NodeBlock& block = cdata.nodes[static_cast<std::size_t>(j)];
        if (block.n() == 0) continue;
        const VectorXd r = node_residual(dag, w, block, j);
        const double s = sigma(j);
        const double s2 = s * s;
        const auto off = static_cast<Eigen::Index>(dag.incoming_offset(j));
        const auto in = dag.incoming(j);
        const auto q = static_cast<Eigen::Index>(in.size());
        const Eigen::Index sj = n_edges + j;
        for (Eigen::Index a = 0; a < q; ++a) {
            const auto ya = block.y.col(in[static_cast<std::size_t>(a)].parent);
            for (Eigen::Index b = a; b < q; ++b) {
                const double v = -ya.dot(block.y.col(in[static_cast<std::size_t>(b)].parent)) / s2;
                h(off + a, off + b) = v;
                h(off + b, off + a) = v;
            }
            const double cross = -2.0 * ya.dot(r) / (s2 * s);
            h(off + a, sj) = cross;
            h(sj, off + a) = cross;
        }
        h(sj, sj) = block.n() / s2 - 3.0 * r.squaredNorm() / (s2 * s2);
    }
    return h;
}

}  // namespace gbn
