#include "gbn/cli.hpp"

#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "gbn/error.hpp"
#include "gbn/fisher.hpp"
#include "gbn/io.hpp"
#include "gbn/likelihood.hpp"
#include "gbn/mle.hpp"
#include "gbn/montecarlo.hpp"
#include "gbn/sampler.hpp"

namespace gbn::cli {

namespace {

Params require_params(const io::ModelDocument& doc, const std::string& path) {
    if (!doc.params) throw ParseError(path, 0, "m/sigma/w", "model parameters are required");
    return *doc.params;
}

// DESIGN_OR_N: a positive integer means N observational rows.
DesignSpec design_or_n(const std::string& arg, int p) {
    int n = 0;
    auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), n);
    if (ec == std::errc() && ptr == arg.data() + arg.size()) {
        if (n < 1) throw ParseError(arg, 0, "N", "observational sample size must be positive");
        return observational_design(n);
    }
    return io::load_design(arg, p);
}

bool is_integer(const std::string& arg) {
    int n = 0;
    auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), n);
    return ec == std::errc() && ptr == arg.data() + arg.size();
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream ss;
    ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return ss.str();
}

struct SimulateArgs {
    std::string model, design, out;
    std::uint64_t seed = 0;
    bool no_timestamp = false;
};

int simulate(const SimulateArgs& a, std::ostream& out) {
    const Params params = require_params(io::load_model(a.model), a.model);
    const DesignSpec design = io::load_design(a.design, params.p());
    const Dataset data = sample(params, design, a.seed);

    std::vector<std::string> comments{"gbn simulate seed=" + std::to_string(a.seed),
                                      "rng=" + std::string(kRngAlgorithm)};
    if (!a.no_timestamp) comments.push_back("generated=" + utc_timestamp());
    std::ofstream file(a.out, std::ios::binary);
    if (!file) throw ParseError(a.out, 0, "", "cannot open output file");
    io::write_dataset(file, data, comments);

    out << "N=" << data.rows() << '\n';
    const auto n_j = data.unclamped_counts();
    for (std::size_t j = 0; j < n_j.size(); ++j) out << "N_" << (j + 1) << '=' << n_j[j] << '\n';
    return kOk;
}

struct FitArgs {
    std::string model, data;
    bool least_squares = false;
    bool bias_correct = false;
};

int fit_cmd(const FitArgs& a, std::ostream& out, std::ostream& err) {
    const io::ModelDocument doc = io::load_model(a.model);
    const Dataset data = io::load_dataset(a.data, doc.dag.p());
    FitOptions options;
    options.least_squares = a.least_squares;
    options.bias_correct = a.bias_correct;
    const FitResult res = fit(doc.dag, data, options);
    for (const auto& w : res.warnings) err << "warning: " << w << '\n';
    for (const auto& issue : res.issues) err << "warning: " << describe(issue) << '\n';
    out << io::fit_to_json(doc.dag, res).dump(2) << '\n';
    return kOk;
}

struct FisherArgs {
    std::string model, design;
    bool crbound = false;
    std::string score;
};

int fisher_cmd(const FisherArgs& a, std::ostream& out) {
    const Params params = require_params(io::load_model(a.model), a.model);
    const DesignSpec design = design_or_n(a.design, params.p());
    if (!a.score.empty()) {
        const auto crit = a.score == "d-opt" ? DesignCriterion::DOptimal : DesignCriterion::AOptimal;
        out << io::format_double(design_score(params, design, crit)) << '\n';
        return kOk;
    }
    const FisherMatrix fisher = is_integer(a.design)
                                    ? fisher_observational(params, static_cast<int>(design.total_rows()))
                                    : fisher_intervention(params, design);
    if (a.crbound) {
        const CramerRao bound = cramer_rao(fisher);
        out << io::fisher_to_json(fisher, &bound).dump(2) << '\n';
    } else {
        out << io::fisher_to_json(fisher).dump(2) << '\n';
    }
    return kOk;
}

struct McArgs {
    std::string model, design;
    int reps = 0;
    std::uint64_t seed = 0;
};

int mc_cmd(const McArgs& a, std::ostream& out) {
    if (a.reps < 2) throw InputError("--reps must be at least 2");
    const Params params = require_params(io::load_model(a.model), a.model);
    const DesignSpec design = design_or_n(a.design, params.p());
    const McReport report = run_mc(params, design, a.reps, a.seed);
    VectorXd cr_sd;
    bool have_cr = false;
    try {
        cr_sd = cramer_rao(fisher_intervention(params, design)).sd;
        have_cr = true;
    } catch (const DegeneracyError&) {
    }
    out << io::mc_to_json(report, have_cr ? &cr_sd : nullptr).dump(2) << '\n';
    return kOk;
}

struct LoglikArgs {
    std::string model, data;
};

int loglik_cmd(const LoglikArgs& a, std::ostream& out) {
    const Params params = require_params(io::load_model(a.model), a.model);
    const Dataset data = io::load_dataset(a.data, params.p());
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", loglik(params, data));
    out << buf << '\n';
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Gaussian Bayesian network likelihood, estimation and Fisher information", "gbn"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "Sample a dataset from a model under a design");
    c_sim->add_option("model", sim.model, "Model file (JSON)")->required();
    c_sim->add_option("design", sim.design, "Design file (JSON)")->required();
    c_sim->add_option("--seed", sim.seed, "Master seed")->required();
    c_sim->add_option("--out", sim.out, "Output dataset (CSV)")->required();
    c_sim->add_flag("--no-timestamp", sim.no_timestamp, "Omit the generation timestamp comment");

    FitArgs fa;
    auto* c_fit = app.add_subcommand("fit", "Closed-form maximum-likelihood fit");
    c_fit->add_option("model", fa.model, "Graph or model file (JSON)")->required();
    c_fit->add_option("data", fa.data, "Dataset (CSV)")->required();
    c_fit->add_flag("--least-squares", fa.least_squares, "Minimum-norm solution for degenerate systems");
    c_fit->add_flag("--bias-correct", fa.bias_correct, "Also report sigma_hat * sqrt(N_j/(N_j-1))");

    FisherArgs fi;
    auto* c_fisher = app.add_subcommand("fisher", "Fisher information of a design");
    c_fisher->add_option("model", fi.model, "Model file (JSON)")->required();
    c_fisher->add_option("design", fi.design, "Design file (JSON) or observational N")->required();
    c_fisher->add_flag("--crbound", fi.crbound, "Also print the Cramer-Rao covariance and sds");
    c_fisher->add_option("--score", fi.score, "Print one design score")->check(CLI::IsMember({"d-opt", "a-opt"}));

    McArgs mc;
    auto* c_mc = app.add_subcommand("mc", "Monte Carlo check of the estimator");
    c_mc->add_option("model", mc.model, "Model file (JSON)")->required();
    c_mc->add_option("design", mc.design, "Design file (JSON) or observational N")->required();
    c_mc->add_option("--reps", mc.reps, "Replicates")->required();
    c_mc->add_option("--seed", mc.seed, "Master seed")->required();

    LoglikArgs ll;
    auto* c_ll = app.add_subcommand("loglik", "Log-likelihood of a dataset");
    c_ll->add_option("model", ll.model, "Model file (JSON)")->required();
    c_ll->add_option("data", ll.data, "Dataset (CSV)")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }

    try {
        if (*c_sim) return simulate(sim, out);
        if (*c_fit) return fit_cmd(fa, out, err);
        if (*c_fisher) return fisher_cmd(fi, out);
        if (*c_mc) return mc_cmd(mc, out);
        if (*c_ll) return loglik_cmd(ll, out);
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const DegeneracyError& e) {
        err << "error: " << e.what() << '\n';
        return kDegenerate;
    }
    return kInputError;
}

}  // namespace gbn::cli
