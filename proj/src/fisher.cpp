#include "gbn/fisher.hpp"

#include "gbn/error.hpp"
#include "gbn/likelihood.hpp"

namespace gbn {

namespace {

std::vector<int> unclamped_per_node(const DesignSpec& design, int p) {
    std::vector<int> n(static_cast<std::size_t>(p), 0);
    for (const auto& c : design.conditions)
        for (int j = 0; j < p; ++j)
            if (!c.target.contains(j)) n[static_cast<std::size_t>(j)] += c.reps;
    return n;
}

Eigen::LDLT<MatrixXd> factor_information(const MatrixXd& info, double pivot_tol) {
    if (info.rows() == 0) throw SingularInformation("information matrix is empty");
    const double scale = info.trace() / static_cast<double>(info.rows());
    Eigen::LDLT<MatrixXd> ldlt(info);
    if (!(scale > 0.0) || ldlt.info() != Eigen::Success ||
        ldlt.vectorD().minCoeff() < pivot_tol * scale)
        throw SingularInformation("information matrix is singular; some parameter is not informed by the design");
    return ldlt;
}

}  // namespace

CenteredMoments centered_moments(const Params& params, const DesignSpec& design) {
    design.validate(params.p());
    const int p = params.p();
    const std::size_t nc = design.conditions.size();
    CenteredMoments out;
    out.n_unclamped = unclamped_per_node(design, p);
    for (const auto& c : design.conditions) {
        const auto mm = mutilate(params, c.target);
        out.condition_mu.push_back(mm.mu_j);
        out.condition_cov.push_back(mm.cov_j);
    }
    out.mean.assign(nc, std::vector<VectorXd>(static_cast<std::size_t>(p)));
    out.cov.assign(nc, std::vector<MatrixXd>(static_cast<std::size_t>(p)));
    for (int j = 0; j < p; ++j) {
        const int n_j = out.n_unclamped[static_cast<std::size_t>(j)];
        if (n_j == 0) continue;
        VectorXd mu_bar = VectorXd::Zero(p);
        MatrixXd cov_sum = MatrixXd::Zero(p, p);
        for (std::size_t c = 0; c < nc; ++c) {
            const auto& cond = design.conditions[c];
            if (cond.target.contains(j)) continue;
            mu_bar += cond.reps * out.condition_mu[c];
            cov_sum += cond.reps * out.condition_cov[c];
        }
        mu_bar /= n_j;
        const double nj = n_j;
        for (std::size_t c = 0; c < nc; ++c) {
            if (design.conditions[c].target.contains(j)) continue;
            const MatrixXd& own = out.condition_cov[c];
            out.mean[c][static_cast<std::size_t>(j)] = out.condition_mu[c] - mu_bar;
            // (N_j-1)^2/N_j^2 Sigma_k + 1/N_j^2 sum_{k' != k} Sigma_k'
            out.cov[c][static_cast<std::size_t>(j)] =
                ((nj - 1) * (nj - 1) / (nj * nj)) * own + (cov_sum - own) / (nj * nj);
        }
    }
    return out;
}

FisherMatrix fisher_observational(const Params& params, int n) {
    if (n < 2) throw InsufficientReplication(0, n);
    const auto& dag = params.dag;
    const auto joint = joint_distribution(params);
    const auto n_edges = static_cast<Eigen::Index>(dag.num_edges());
    FisherMatrix out{parameter_names(dag), MatrixXd::Zero(n_edges + dag.p(), n_edges + dag.p())};
    for (int j = 0; j < dag.p(); ++j) {
        const double s2 = params.sigma(j) * params.sigma(j);
        const auto off = static_cast<Eigen::Index>(dag.incoming_offset(j));
        const std::vector<int> pa = dag.parents(j);
        const auto q = static_cast<Eigen::Index>(pa.size());
        out.info.block(off, off, q, q) = (n - 1) * joint.cov(pa, pa) / s2;
        out.info(n_edges + j, n_edges + j) = (2.0 * n - 3.0) / s2;
    }
    return out;
}

FisherMatrix fisher_intervention(const Params& params, const DesignSpec& design) {
    design.validate(params.p());
    const auto& dag = params.dag;
    const int p = dag.p();
    const auto n_edges = static_cast<Eigen::Index>(dag.num_edges());
    const std::vector<int> n_un = unclamped_per_node(design, p);
    for (int j = 0; j < p; ++j)
        if (n_un[static_cast<std::size_t>(j)] == 1) throw InsufficientReplication(j, 1);

    std::vector<VectorXd> mu;
    std::vector<MatrixXd> cov;
    for (const auto& c : design.conditions) {
        auto mm = mutilate(params, c.target);
        mu.push_back(std::move(mm.mu_j));
        cov.push_back(std::move(mm.cov_j));
    }

    FisherMatrix out{parameter_names(dag), MatrixXd::Zero(n_edges + p, n_edges + p)};
    for (int j = 0; j < p; ++j) {
        const int n_j = n_un[static_cast<std::size_t>(j)];
        if (n_j == 0) continue;
        const double s2 = params.sigma(j) * params.sigma(j);
        const std::vector<int> pa = dag.parents(j);
        const auto q = static_cast<Eigen::Index>(pa.size());
        if (q > 0) {
            VectorXd mu_bar = VectorXd::Zero(q);
            MatrixXd cov_sum = MatrixXd::Zero(q, q);
            for (std::size_t c = 0; c < design.conditions.size(); ++c) {
                const auto& cond = design.conditions[c];
                if (cond.target.contains(j)) continue;
                mu_bar += cond.reps * mu[c](pa);
                cov_sum += cond.reps * cov[c](pa, pa);
            }
            mu_bar /= n_j;
            MatrixXd offsets = MatrixXd::Zero(q, q);
            for (std::size_t c = 0; c < design.conditions.size(); ++c) {
                const auto& cond = design.conditions[c];
                if (cond.target.contains(j)) continue;
                const VectorXd d = mu[c](pa) - mu_bar;
                offsets += cond.reps * d * d.transpose();
            }
            const double coeff = (n_j - 1.0) / n_j;
            const auto off = static_cast<Eigen::Index>(dag.incoming_offset(j));
            const MatrixXd block = (coeff * cov_sum + offsets) / s2;
            out.info.block(off, off, q, q) = 0.5 * (block + block.transpose());
        }
        out.info(n_edges + j, n_edges + j) = (2.0 * n_j - 3.0) / s2;
    }
    return out;
}

CramerRao cramer_rao(const FisherMatrix& fisher, double pivot_tol) {
    const auto ldlt = factor_information(fisher.info, pivot_tol);
    CramerRao out;
    out.cov = ldlt.solve(MatrixXd::Identity(fisher.info.rows(), fisher.info.cols()));
    out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
    out.sd = out.cov.diagonal().array().sqrt();
    return out;
}

double design_score(const Params& params, const DesignSpec& design, DesignCriterion criterion) {
    const FisherMatrix fisher = fisher_intervention(params, design);
    if (criterion == DesignCriterion::DOptimal) {
        const auto ldlt = factor_information(fisher.info, 1e-10);
        return ldlt.vectorD().array().log().sum();
    }
    return -cramer_rao(fisher).cov.trace();
}

}  // namespace gbn
