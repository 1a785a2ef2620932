#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/tools/minima.hpp>

#include "gbn/error.hpp"
#include "gbn/likelihood.hpp"
#include "gbn/mle.hpp"
#include "test_support.hpp"

using namespace gbn;

namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("centering the observational fixture") {
    const Dataset d = test::observational_fixture();
    const CenteredData c = center(d);
    MatrixXd printed(5, 3);
    printed << 0.5388215, -1.30143445, 0.31849676,
               0.1084430, -0.60750058, -0.03356279,
              -0.2181985, 1.84742088, 0.29439582,
              -0.1497698, 0.04862127, -0.38769719,
              -0.2792962, 0.01289289, -0.19163260;
    for (int j = 0; j < 3; ++j) {
        CHECK(c.n(j) == 5);
        CHECK((c.y(j) - printed).cwiseAbs().maxCoeff() < 5e-7);
        CHECK(c.y(j).colwise().sum().cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("centering the intervention fixture uses per-node row sets") {
    const Dataset d = test::intervention_fixture();
    const CenteredData c = center(d);
    CHECK(c.nodes[0].rows == std::vector<Eigen::Index>{1, 2, 4});
    CHECK(c.nodes[1].rows == std::vector<Eigen::Index>{0, 2, 4});
    CHECK(c.nodes[2].rows == std::vector<Eigen::Index>{0, 1, 3, 4});
    CHECK(c.nodes[0].mean(0) == doctest::Approx(0.31387599).epsilon(1e-8));
    CHECK(c.y(0)(0, 0) == doctest::Approx(0.16267957).epsilon(1e-7));
    for (int j = 0; j < 3; ++j) CHECK(c.y(j).colwise().sum().cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("constant observational data centers to zero") {
    MatrixXd x(4, 2);
    x << 1.5, -2, 1.5, -2, 1.5, -2, 1.5, -2;
    const CenteredData c = center(observational_dataset(x));
    for (int j = 0; j < 2; ++j) CHECK(c.y(j).isZero(0.0));
}

TEST_CASE("a node clamped everywhere has an empty block") {
    Dataset d = test::intervention_fixture();
    for (auto& t : d.targets) t[1] = d.x(0, 1);
    d.x.col(1).setConstant(d.x(0, 1));
    const CenteredData c = center(d);
    CHECK(c.n(1) == 0);
    CHECK(c.y(1).rows() == 0);
}

TEST_CASE("toy log-likelihood matches dense multivariate-normal densities") {
    const Params params = test::toy_params();
    // Frozen from an independent scipy evaluation of the same densities.
    CHECK(loglik(params, test::observational_fixture()) == doctest::Approx(-10.862985081964352).epsilon(1e-12));
    CHECK(loglik(params, test::intervention_fixture()) == doctest::Approx(-5.261128693073595).epsilon(1e-12));

    const auto joint = joint_distribution(params);
    const Dataset d = test::observational_fixture();
    double oracle = 0.0;
    for (Eigen::Index k = 0; k < d.rows(); ++k)
        oracle += test::dense_mvn_logpdf(d.x.row(k).transpose(), joint.mu, joint.cov);
    CHECK(rel_err(loglik(params, d), oracle) < 1e-10);
    CHECK(rel_err(loglik(params, test::intervention_fixture()),
                  test::mixed_design_oracle(params, test::intervention_fixture())) < 1e-10);
}

TEST_CASE("single standardized residual") {
    const Params one(build_dag(1, {}), VectorXd::Constant(1, 0.3), VectorXd::Constant(1, 2.0), VectorXd(0));
    const Dataset d = observational_dataset(MatrixXd::Constant(1, 1, 0.3));
    CHECK(loglik(one, d) == doctest::Approx(-0.5 * kLog2Pi - std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("profiled likelihood equals the likelihood at the profiled intercepts") {
    const DagStructure dag = test::toy_dag();
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0), s(0.2, 2.0);
    for (const Dataset& d : {test::observational_fixture(), test::intervention_fixture()}) {
        const CenteredData c = center(d);
        for (int trial = 0; trial < 20; ++trial) {
            const Eigen::Vector3d w(u(rng), u(rng), u(rng));
            const Eigen::Vector3d sigma(s(rng), s(rng), s(rng));
            const Params at_profile(dag, profile_m(dag, w, d), sigma, w);
            CHECK(std::abs(profiled_loglik(dag, sigma, w, c) - loglik(at_profile, d)) < 1e-10);
        }
    }
}

TEST_CASE("profiled likelihood of a single zero column") {
    const DagStructure one = build_dag(1, {});
    const CenteredData c = center(observational_dataset(MatrixXd::Constant(7, 1, 2.0)));
    CHECK(profiled_loglik(one, VectorXd::Ones(1), VectorXd(0), c) == doctest::Approx(-3.5 * kLog2Pi));
    CHECK_THROWS_AS(profiled_loglik(one, VectorXd::Zero(1), VectorXd(0), c), NonPositiveSigma);
}

TEST_CASE("profiled likelihood at the MLE follows the residual-sum identity") {
    const Dataset d = test::observational_fixture();
    const DagStructure dag = test::toy_dag();
    const FitResult f = fit(dag, d);
    const CenteredData c = center(d);
    const VectorXd s = residual_sums(dag, f.w_hat, c);
    const double n = 5, p = 3;
    const double expected = 0.5 * n * p * (std::log(n) - kLog2Pi - 1.0) - 0.5 * n * s.array().log().sum();
    CHECK(profiled_loglik(dag, f.sigma_hat, f.w_hat, c) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("gradient vanishes at the MLE of both fixtures") {
    const DagStructure dag = test::toy_dag();
    for (const Dataset& d : {test::observational_fixture(), test::intervention_fixture()}) {
        const FitResult f = fit(dag, d);
        CHECK(gradient(dag, f.sigma_hat, f.w_hat, center(d)).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("gradient and hessian agree with finite differences on the fixtures") {
    const DagStructure dag = test::toy_dag();
    const auto ne = static_cast<Eigen::Index>(dag.num_edges());
    for (const Dataset& d : {test::observational_fixture(), test::intervention_fixture()}) {
        const CenteredData c = center(d);
        VectorXd theta(6);
        theta << -0.3, 0.7, 0.2, 0.5, 0.9, 0.4;
        auto split = [&](const VectorXd& t) { return std::pair<VectorXd, VectorXd>{t.head(ne), t.tail(3)}; };
        auto f = [&](const VectorXd& t) {
            auto [w, s] = split(t);
            return profiled_loglik(dag, s, w, c);
        };
        auto g = [&](const VectorXd& t) {
            auto [w, s] = split(t);
            return gradient(dag, s, w, c);
        };
        const auto [w, s] = split(theta);
        CHECK(test::close_rel(gradient(dag, s, w, c), test::fd_gradient(f, theta, 1e-5), 1e-5));
        CHECK(test::close_rel(hessian(dag, s, w, c), test::fd_jacobian(g, theta, 1e-5), 1e-4));
    }
}

TEST_CASE("sigma derivative of a parentless node with w = 0") {
    const DagStructure one = build_dag(1, {});
    const Dataset d = observational_dataset((MatrixXd(4, 1) << 1.0, 2.0, 4.0, 5.0).finished());
    const CenteredData c = center(d);
    const double sigma = 1.3;
    const double sum_sq = 10.0;  // centered at 3
    const VectorXd g = gradient(one, VectorXd::Constant(1, sigma), VectorXd(0), c);
    CHECK(g(0) == doctest::Approx(-4 / sigma + sum_sq / std::pow(sigma, 3)).epsilon(1e-14));
}

TEST_CASE("hessian structure") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        const int p = 2 + static_cast<int>(rng() % 4);
        const Params params = test::random_params(rng, p, 0.7);
        const Dataset d = sample(params, test::random_design(rng, p, 3, 10), rng());
        const CenteredData c = center(d);
        bool all_informed = true;
        for (int j = 0; j < p; ++j) all_informed = all_informed && c.n(j) > 0;
        const MatrixXd h = hessian(params.dag, params.sigma, params.w, c);
        CHECK((h - h.transpose()).cwiseAbs().maxCoeff() == 0.0);
        const auto ne = static_cast<Eigen::Index>(params.dag.num_edges());
        const auto edges = params.dag.edges();
        for (Eigen::Index a = 0; a < ne; ++a) {
            for (Eigen::Index b = 0; b < ne; ++b)
                if (edges[static_cast<std::size_t>(a)].child != edges[static_cast<std::size_t>(b)].child)
                    CHECK(h(a, b) == 0.0);
            for (int j = 0; j < p; ++j)
                if (edges[static_cast<std::size_t>(a)].child != j) CHECK(h(a, ne + j) == 0.0);
        }
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j)
                if (i != j) CHECK(h(ne + i, ne + j) == 0.0);
        if (ne > 0) {
            Eigen::SelfAdjointEigenSolver<MatrixXd> eig(h.topLeftCorner(ne, ne));
            CHECK(eig.eigenvalues().maxCoeff() <= 1e-10 * std::max(1.0, h.topLeftCorner(ne, ne).cwiseAbs().maxCoeff()));
        }
    }
}

TEST_CASE("property: profiled likelihood is the maximum over intercepts") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const int p = 2 + static_cast<int>(rng() % 3);
        const Params truth = test::random_params(rng, p);
        const Dataset d = sample(truth, test::random_design(rng, p, 3, 8), rng());
        const CenteredData c = center(d);
        bool informed = true;
        for (int j = 0; j < p; ++j) informed = informed && c.n(j) > 0;
        if (!informed) continue;

        // Coordinate-wise 1-D maximisation; the likelihood is separable in m.
        VectorXd m = VectorXd::Zero(p);
        for (int j = 0; j < p; ++j) {
            auto neg = [&](double mj) {
                VectorXd trial_m = m;
                trial_m(j) = mj;
                return -loglik(Params(truth.dag, trial_m, truth.sigma, truth.w), d);
            };
            m(j) = boost::math::tools::brent_find_minima(neg, -50.0, 50.0, 52).first;
        }
        const double numeric_max = loglik(Params(truth.dag, m, truth.sigma, truth.w), d);
        CHECK(numeric_max == doctest::Approx(profiled_loglik(truth.dag, truth.sigma, truth.w, c)).epsilon(1e-10));
    }
}

TEST_CASE("property: observational data through the intervention path equals the dense path") {
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 50; ++trial) {
        const int p = 1 + static_cast<int>(rng() % 6);
        const Params params = test::random_params(rng, p);
        const Dataset d = sample(params, observational_design(2 + static_cast<int>(rng() % 40)), rng());
        CHECK(rel_err(loglik(params, d), loglik_observational(params, d.x)) < 1e-12);
        const CenteredData c = center(d);
        CHECK(rel_err(profiled_loglik(params.dag, params.sigma, params.w, c),
                      profiled_loglik_observational(params.dag, params.sigma, params.w, c.y(0))) < 1e-12);
    }
}

TEST_CASE("property: loglik equals the dense density oracle on random mixed designs") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        const int p = 1 + static_cast<int>(rng() % 5);
        const Params params = test::random_params(rng, p);
        const Dataset d = sample(params, test::random_design(rng, p, 4, 12), rng());
        CHECK(rel_err(loglik(params, d), test::mixed_design_oracle(params, d)) < 1e-9);
    }
}

TEST_CASE("parameter names") {
    const auto names = parameter_names(test::toy_dag());
    CHECK(names == std::vector<std::string>{"w[1,2]", "w[1,3]", "w[2,3]", "sigma[1]", "sigma[2]", "sigma[3]"});
}
