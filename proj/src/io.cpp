#include "gbn/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <algorithm>
#include <sstream>

#include "gbn/error.hpp"
#include "gbn/likelihood.hpp"

namespace gbn::io {

using nlohmann::json;

namespace {

// Line of the first occurrence of "key" in a JSON text, 0 if absent.
int line_of_key(std::string_view text, const std::string& key) {
    const std::string quoted = "\"" + key + "\"";
    const auto pos = text.find(quoted);
    if (pos == std::string_view::npos) return 0;
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

int line_of_offset(std::string_view text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

json parse_json(std::string_view text, const std::string& source) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError(source, line_of_offset(text, e.byte), "", "invalid JSON");
    }
}

// Field-level validation errors carry the line where the key appears.
struct FieldContext {
    std::string_view text;
    const std::string& source;

    [[noreturn]] void fail(const std::string& key, const std::string& field, const std::string& what) const {
        throw ParseError(source, line_of_key(text, key), field, what);
    }
};

double as_number(const json& v, const FieldContext& ctx, const std::string& key, const std::string& field) {
    if (!v.is_number()) ctx.fail(key, field, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) ctx.fail(key, field, "expected a finite number");
    return d;
}

int as_index(const json& v, int p, const FieldContext& ctx, const std::string& key, const std::string& field) {
    if (!v.is_number_integer()) ctx.fail(key, field, "expected an integer node index");
    const auto i = v.get<long long>();
    if (i < 1 || i > p) ctx.fail(key, field, "node index " + std::to_string(i) + " outside 1.." + std::to_string(p));
    return static_cast<int>(i - 1);
}

int parse_index_string(std::string_view s, int p, const FieldContext& ctx, const std::string& key,
                       const std::string& field) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        ctx.fail(key, field, "expected an integer node index, got '" + std::string(s) + "'");
    if (v < 1 || v > p) ctx.fail(key, field, "node index " + std::to_string(v) + " outside 1.." + std::to_string(p));
    return v - 1;
}

VectorXd read_vector(const json& doc, const char* key, int p, const FieldContext& ctx) {
    const json& v = doc.at(key);
    if (!v.is_array() || static_cast<int>(v.size()) != p)
        ctx.fail(key, key, "expected an array of " + std::to_string(p) + " numbers");
    VectorXd out(p);
    for (int j = 0; j < p; ++j)
        out(j) = as_number(v[static_cast<std::size_t>(j)], ctx, key,
                           std::string(key) + "[" + std::to_string(j + 1) + "]");
    return out;
}

bool parse_double(std::string_view s, double& out) {
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

json vector_json(const VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

json matrix_json(const MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vector_json(m.row(i).transpose()));
    return rows;
}

std::string edge_key(const Edge& e) { return std::to_string(e.parent + 1) + "," + std::to_string(e.child + 1); }

}  // namespace

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path, 0, "", "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ModelDocument parse_model(std::string_view text, const std::string& source) {
    const json doc = parse_json(text, source);
    const FieldContext ctx{text, source};
    if (!doc.is_object()) ctx.fail("", "", "expected a JSON object");
    if (!doc.contains("p")) ctx.fail("p", "p", "missing");
    if (!doc.at("p").is_number_integer() || doc.at("p").get<long long>() < 1)
        ctx.fail("p", "p", "expected a positive integer");
    const int p = doc.at("p").get<int>();

    std::vector<Edge> edges;
    if (doc.contains("edges")) {
        const json& list = doc.at("edges");
        if (!list.is_array()) ctx.fail("edges", "edges", "expected a list of [i, j] pairs");
        for (std::size_t k = 0; k < list.size(); ++k) {
            const std::string field = "edges[" + std::to_string(k + 1) + "]";
            const json& pair = list[k];
            if (!pair.is_array() || pair.size() != 2) ctx.fail("edges", field, "expected an [i, j] pair");
            edges.push_back({as_index(pair[0], p, ctx, "edges", field), as_index(pair[1], p, ctx, "edges", field)});
        }
    }

    ModelDocument out;
    try {
        out.dag = build_dag(p, edges);
    } catch (const InputError& e) {
        ctx.fail("edges", "edges", e.what());
    }

    const bool has_m = doc.contains("m"), has_sigma = doc.contains("sigma"), has_w = doc.contains("w");
    if (!has_m && !has_sigma && !has_w) return out;
    if (!has_m) ctx.fail("m", "m", "missing");
    if (!has_sigma) ctx.fail("sigma", "sigma", "missing");
    if (!has_w && out.dag.num_edges() > 0) ctx.fail("w", "w", "missing");

    VectorXd m = read_vector(doc, "m", p, ctx);
    VectorXd sigma = read_vector(doc, "sigma", p, ctx);
    for (int j = 0; j < p; ++j)
        if (!(sigma(j) > 0.0)) ctx.fail("sigma", "sigma[" + std::to_string(j + 1) + "]", "must be positive");

    std::map<Edge, double> weights;
    if (has_w) {
        const json& w = doc.at("w");
        if (!w.is_object()) ctx.fail("w", "w", "expected an object keyed by \"i,j\"");
        for (const auto& [key, value] : w.items()) {
            const std::string field = "w[" + key + "]";
            const auto parts = split(key, ',');
            if (parts.size() != 2) ctx.fail("w", field, "key must look like \"i,j\"");
            const Edge e{parse_index_string(parts[0], p, ctx, "w", field),
                         parse_index_string(parts[1], p, ctx, "w", field)};
            if (!out.dag.edge_index(e.parent, e.child)) ctx.fail(key, field, "weight for a pair that is not an edge");
            if (!weights.emplace(e, as_number(value, ctx, key, field)).second)
                ctx.fail(key, field, "duplicate weight");
        }
    }
    for (const Edge& e : out.dag.edges())
        if (!weights.contains(e)) ctx.fail("w", "w[" + edge_key(e) + "]", "missing weight for edge");

    out.params = make_params(out.dag, std::move(m), std::move(sigma), weights);
    return out;
}

DesignSpec parse_design(std::string_view text, int p, const std::string& source) {
    const FieldContext ctx{text, source};
    if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) ctx.fail("", "", "design file is empty");
    const json doc = parse_json(text, source);
    const json* list = &doc;
    if (doc.is_object()) {
        if (!doc.contains("conditions")) ctx.fail("conditions", "conditions", "missing");
        list = &doc.at("conditions");
    }
    if (!list->is_array()) ctx.fail("conditions", "conditions", "expected a list of conditions");
    if (list->empty()) ctx.fail("conditions", "conditions", "design has no conditions");

    DesignSpec design;
    for (std::size_t c = 0; c < list->size(); ++c) {
        const json& cond = (*list)[c];
        const std::string prefix = "conditions[" + std::to_string(c + 1) + "]";
        if (!cond.is_object()) ctx.fail("conditions", prefix, "expected an object");
        Condition out;
        if (!cond.contains("reps")) ctx.fail("reps", prefix + ".reps", "missing");
        if (!cond.at("reps").is_number_integer() || cond.at("reps").get<long long>() < 1)
            ctx.fail("reps", prefix + ".reps", "must be an integer >= 1");
        out.reps = cond.at("reps").get<int>();
        if (cond.contains("targets")) {
            const json& targets = cond.at("targets");
            if (!targets.is_object()) ctx.fail("targets", prefix + ".targets", "expected an object index -> value");
            for (const auto& [key, value] : targets.items()) {
                const std::string field = prefix + ".targets[" + key + "]";
                const int node = parse_index_string(key, p, ctx, "targets", field);
                if (!out.target.emplace(node, as_number(value, ctx, "targets", field)).second)
                    ctx.fail("targets", field, "duplicate target");
            }
        }
        design.conditions.push_back(std::move(out));
    }
    return design;
}

Dataset parse_dataset(std::string_view text, int p, const std::string& source) {
    std::vector<std::vector<double>> rows;
    std::vector<InterventionTarget> targets;
    bool header_seen = false;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == '#') continue;

        const auto cells = split(line, ',');
        if (!header_seen) {
            if (static_cast<int>(cells.size()) != p + 1)
                throw ParseError(source, line_no, "header", "expected " + std::to_string(p + 1) + " columns x1..x" +
                                                                std::to_string(p) + ",do");
            for (int j = 0; j < p; ++j)
                if (cells[static_cast<std::size_t>(j)] != "x" + std::to_string(j + 1))
                    throw ParseError(source, line_no, "header", "column " + std::to_string(j + 1) +
                                                                    " must be named x" + std::to_string(j + 1));
            if (cells.back() != "do") throw ParseError(source, line_no, "header", "last column must be named do");
            header_seen = true;
            continue;
        }

        if (static_cast<int>(cells.size()) != p + 1)
            throw ParseError(source, line_no, "", "expected " + std::to_string(p + 1) + " cells, found " +
                                                      std::to_string(cells.size()));
        std::vector<double> row(static_cast<std::size_t>(p));
        for (int j = 0; j < p; ++j)
            if (!parse_double(cells[static_cast<std::size_t>(j)], row[static_cast<std::size_t>(j)]))
                throw ParseError(source, line_no, "x" + std::to_string(j + 1), "not a finite number");

        InterventionTarget target;
        const std::string_view cell = cells.back();
        if (!cell.empty()) {
            for (std::string_view item : split(cell, ';')) {
                const auto eq = item.find('=');
                if (eq == std::string_view::npos)
                    throw ParseError(source, line_no, "do", "expected INDEX=VALUE, got '" + std::string(item) + "'");
                int idx = 0;
                const auto key = item.substr(0, eq);
                auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), idx);
                if (ec != std::errc() || ptr != key.data() + key.size() || idx < 1 || idx > p)
                    throw ParseError(source, line_no, "do", "bad node index '" + std::string(key) + "'");
                double value = 0.0;
                if (!parse_double(item.substr(eq + 1), value))
                    throw ParseError(source, line_no, "do", "bad clamp value in '" + std::string(item) + "'");
                if (!target.emplace(idx - 1, value).second)
                    throw ParseError(source, line_no, "do", "duplicate index " + std::to_string(idx));
                if (!(std::abs(row[static_cast<std::size_t>(idx - 1)] - value) <= 1e-12))
                    throw ParseError(source, line_no, "x" + std::to_string(idx),
                                     "value disagrees with its clamp in the do cell");
            }
        }
        rows.push_back(std::move(row));
        targets.push_back(std::move(target));
    }
    if (!header_seen) throw ParseError(source, line_no, "header", "missing header line");

    Dataset data;
    data.x.resize(static_cast<Eigen::Index>(rows.size()), p);
    for (std::size_t k = 0; k < rows.size(); ++k)
        for (int j = 0; j < p; ++j) data.x(static_cast<Eigen::Index>(k), j) = rows[k][static_cast<std::size_t>(j)];
    data.targets = std::move(targets);
    return data;
}

ModelDocument load_model(const std::string& path) { return parse_model(read_file(path), path); }

DesignSpec load_design(const std::string& path, int p) { return parse_design(read_file(path), p, path); }

Dataset load_dataset(const std::string& path, int p) { return parse_dataset(read_file(path), p, path); }

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

void write_dataset(std::ostream& os, const Dataset& data, const std::vector<std::string>& comments) {
    for (const auto& c : comments) os << "# " << c << '\n';
    for (Eigen::Index j = 0; j < data.p(); ++j) os << 'x' << (j + 1) << ',';
    os << "do\n";
    for (Eigen::Index k = 0; k < data.rows(); ++k) {
        for (Eigen::Index j = 0; j < data.p(); ++j) os << format_double(data.x(k, j)) << ',';
        bool first = true;
        for (const auto& [node, value] : data.targets[static_cast<std::size_t>(k)]) {
            if (!first) os << ';';
            os << (node + 1) << '=' << format_double(value);
            first = false;
        }
        os << '\n';
    }
}

json model_to_json(const Params& params) {
    json doc;
    doc["p"] = params.p();
    doc["edges"] = json::array();
    doc["w"] = json::object();
    Eigen::Index k = 0;
    for (const Edge& e : params.dag.edges()) {
        doc["edges"].push_back({e.parent + 1, e.child + 1});
        doc["w"][edge_key(e)] = params.w(k++);
    }
    doc["m"] = vector_json(params.m);
    doc["sigma"] = vector_json(params.sigma);
    return doc;
}

json design_to_json(const DesignSpec& design) {
    json list = json::array();
    for (const auto& c : design.conditions) {
        json targets = json::object();
        for (const auto& [node, value] : c.target) targets[std::to_string(node + 1)] = value;
        list.push_back({{"targets", targets}, {"reps", c.reps}});
    }
    return {{"conditions", list}};
}

json fit_to_json(const DagStructure& dag, const FitResult& fit) {
    json doc;
    doc["m_hat"] = vector_json(fit.m_hat);
    doc["sigma_hat"] = vector_json(fit.sigma_hat);
    doc["w_hat"] = json::object();
    json identified = json::object();
    Eigen::Index k = 0;
    for (const Edge& e : dag.edges()) {
        doc["w_hat"][edge_key(e)] = fit.w_hat(k);
        identified[weight_name(e)] = static_cast<bool>(fit.w_identified[static_cast<std::size_t>(k)]);
        ++k;
    }
    for (int j = 0; j < dag.p(); ++j) {
        identified["m[" + std::to_string(j + 1) + "]"] = static_cast<bool>(fit.m_identified[static_cast<std::size_t>(j)]);
        identified["sigma[" + std::to_string(j + 1) + "]"] =
            static_cast<bool>(fit.sigma_identified[static_cast<std::size_t>(j)]);
    }
    doc["loglik"] = fit.loglik_at_max;
    doc["identified"] = identified;
    if (fit.sigma_hat_bias_corrected) {
        doc["sigma_hat_bias_corrected"] = vector_json(*fit.sigma_hat_bias_corrected);
        doc["sigma_hat_bias_corrected_note"] = "sigma_hat * sqrt(N_j/(N_j-1)); not the maximum-likelihood estimate";
    }
    json issues = json::array();
    for (const auto& issue : fit.issues) issues.push_back(describe(issue));
    doc["issues"] = issues;
    doc["warnings"] = fit.warnings;
    return doc;
}

json fisher_to_json(const FisherMatrix& fisher, const CramerRao* bound) {
    json doc;
    doc["params_order"] = fisher.params_order;
    doc["information"] = matrix_json(fisher.info);
    if (bound) {
        doc["cramer_rao"] = {{"covariance", matrix_json(bound->cov)}, {"sd", vector_json(bound->sd)}};
    }
    return doc;
}

json mc_to_json(const McReport& report, const VectorXd* cramer_rao_sd) {
    json doc;
    doc["reps"] = report.reps;
    doc["failures"] = report.failures;
    doc["seed"] = report.seed;
    doc["params_order"] = report.params_order;
    doc["estimator_mean"] = vector_json(report.estimator_mean);
    doc["estimator_sd"] = vector_json(report.estimator_sd);
    doc["estimator_cov"] = matrix_json(report.estimator_cov);
    doc["cramer_rao_sd"] = cramer_rao_sd ? vector_json(*cramer_rao_sd) : json(nullptr);
    return doc;
}

}  // namespace gbn::io
