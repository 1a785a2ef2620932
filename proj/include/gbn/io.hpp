#ifndef GBN_IO_HPP
#define GBN_IO_HPP

// File formats. All indices are 1-based on disk.
//
// Model (JSON):   {"p": 3, "edges": [[1,2],[1,3],[2,3]],
//                  "m": [...], "sigma": [...], "w": {"1,2": -0.8, ...}}
//                 m, sigma and w may be omitted together for a graph-only file.
// Design (JSON):  {"conditions": [{"targets": {"1": -0.5}, "reps": 40}, ...]}
//                 or the bare list of conditions.
// Dataset (CSV):  header x1,...,xp,do; each row p numbers then a do cell that
//                 is empty or INDEX=FLOAT(;INDEX=FLOAT)*. Lines starting with
//                 '#' are comments.

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "gbn/fisher.hpp"
#include "gbn/graph.hpp"
#include "gbn/mle.hpp"
#include "gbn/model.hpp"
#include "gbn/montecarlo.hpp"
#include "gbn/sampler.hpp"

namespace gbn::io {

struct ModelDocument {
    DagStructure dag;
    std::optional<Params> params;  // absent for graph-only files
};

std::string read_file(const std::string& path);

ModelDocument parse_model(std::string_view text, const std::string& source = "<model>");
DesignSpec parse_design(std::string_view text, int p, const std::string& source = "<design>");
Dataset parse_dataset(std::string_view text, int p, const std::string& source = "<dataset>");

ModelDocument load_model(const std::string& path);
DesignSpec load_design(const std::string& path, int p);
Dataset load_dataset(const std::string& path, int p);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

/// CSV with optional leading comment lines (each written as "# line").
void write_dataset(std::ostream& os, const Dataset& data, const std::vector<std::string>& comments = {});

nlohmann::json model_to_json(const Params& params);
nlohmann::json design_to_json(const DesignSpec& design);
nlohmann::json fit_to_json(const DagStructure& dag, const FitResult& fit);
nlohmann::json fisher_to_json(const FisherMatrix& fisher, const CramerRao* bound = nullptr);
nlohmann::json mc_to_json(const McReport& report, const VectorXd* cramer_rao_sd = nullptr);

}  // namespace gbn::io

#endif  // GBN_IO_HPP
