#include "gbn/error.hpp"

#include <algorithm>

namespace gbn {

std::string describe(const FitIssue& issue) {
    std::string msg = issue.kind == FitIssue::Kind::Unidentifiable
                          ? "node " + std::to_string(issue.node + 1) + " is clamped in every row"
                          : "degenerate normal equations at node " + std::to_string(issue.node + 1);
    msg += "; unidentified:";
    for (const auto& name : issue.parameters) msg += " " + name;
    return msg;
}

namespace {
std::string join_issues(const std::vector<FitIssue>& issues) {
    std::string msg = "fit failed";
    for (const auto& issue : issues) msg += "\n  " + describe(issue);
    return msg;
}
}  // namespace

FitError::FitError(std::vector<FitIssue> issues)
    : DegeneracyError(join_issues(issues)), issues_(std::move(issues)) {}

bool FitError::has(FitIssue::Kind kind) const {
    return std::any_of(issues_.begin(), issues_.end(),
                       [kind](const FitIssue& i) { return i.kind == kind; });
}

}  // namespace gbn
