#ifndef GBN_ERROR_HPP
#define GBN_ERROR_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace gbn {

// Two families matter at the process boundary: bad input (exit 2) and
// mathematical degeneracy (exit 3).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InputError : public Error {
public:
    using Error::Error;
};

class DegeneracyError : public Error {
public:
    using Error::Error;
};

class CycleError : public InputError {
public:
    using InputError::InputError;
};

class DuplicateEdgeError : public InputError {
public:
    using InputError::InputError;
};

class IndexOutOfRange : public InputError {
public:
    using InputError::InputError;
};

class NotTriangularError : public InputError {
public:
    using InputError::InputError;
};

class NonPositiveSigma : public InputError {
public:
    using InputError::InputError;
};

class NotObservational : public InputError {
public:
    using InputError::InputError;
};

/// Raised with file/line/field context by the readers in io.hpp.
class ParseError : public InputError {
public:
    ParseError(std::string file, int line, std::string field, const std::string& what)
        : InputError(format(file, line, field, what)),
          file_(std::move(file)),
          line_(line),
          field_(std::move(field)) {}

    const std::string& file() const noexcept { return file_; }
    int line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    static std::string format(const std::string& file, int line, const std::string& field,
                              const std::string& what) {
        std::string msg = file;
        if (line > 0) msg += ":" + std::to_string(line);
        if (!field.empty()) msg += ": field '" + field + "'";
        return msg + ": " + what;
    }

    std::string file_;
    int line_;
    std::string field_;
};

class SingularScatter : public DegeneracyError {
public:
    using DegeneracyError::DegeneracyError;
};

class SingularInformation : public DegeneracyError {
public:
    using DegeneracyError::DegeneracyError;
};

class InsufficientReplication : public DegeneracyError {
public:
    InsufficientReplication(int node, int n_j)
        : DegeneracyError("node " + std::to_string(node + 1) + " is unclamped in only " +
                          std::to_string(n_j) + " row(s); at least 2 are required"),
          node_(node) {}
    int node() const noexcept { return node_; }

private:
    int node_;
};

class AllReplicatesFailed : public DegeneracyError {
public:
    using DegeneracyError::DegeneracyError;
};

/// More than 1% of Monte Carlo replicates could not be fitted.
class ReplicateFailures : public DegeneracyError {
public:
    using DegeneracyError::DegeneracyError;
};

/// One identifiability problem found while fitting a node.
struct FitIssue {
    enum class Kind { Unidentifiable, DegenerateSystem };
    Kind kind;
    int node;                                 // 0-based child node
    std::vector<std::string> parameters;      // 1-based names, e.g. "w[1,2]", "sigma[2]"
};

std::string describe(const FitIssue& issue);

/// Thrown by mle::fit when at least one node cannot be estimated.
class FitError : public DegeneracyError {
public:
    explicit FitError(std::vector<FitIssue> issues);
    const std::vector<FitIssue>& issues() const noexcept { return issues_; }

    bool has(FitIssue::Kind kind) const;

private:
    std::vector<FitIssue> issues_;
};

}  // namespace gbn

#endif  // GBN_ERROR_HPP
