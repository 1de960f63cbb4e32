#pragma once

#include <stdexcept>
#include <string>

namespace speedscale {

/// Malformed input document. `path()` names the offending field, e.g. "jobs[2].deadline".
class ParseError : public std::runtime_error {
public:
    ParseError(std::string path, const std::string& what)
        : std::runtime_error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}
    [[nodiscard]] const std::string& path() const { return path_; }

private:
    std::string path_;
};

/// No feasible solution exists for the requested model (e.g. the landmark grid is too coarse).
class InfeasibleError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An internal post-condition failed. Indicates a bug or a violated upstream precondition.
class ContractViolation : public std::logic_error {
    using std::logic_error::logic_error;
};

/// An exhaustive search would exceed its configured state cap.
class SizeLimitError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace speedscale
