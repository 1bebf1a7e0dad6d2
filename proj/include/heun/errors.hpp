#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace heun {

// Exit codes the CLI maps each error category to.
inline constexpr int exit_parse = 2;
inline constexpr int exit_degeneracy = 3;
inline constexpr int exit_domain = 4;
inline constexpr int exit_no_convergence = 5;

// Base of all library errors. `tag()` is a stable machine-readable name
// ("Collinear", "OutsideDisc", ...); what() carries tag plus message.
class HeunError : public std::runtime_error {
public:
    HeunError(std::string tag, const std::string& message, int exit_code)
        : std::runtime_error(tag + ": " + message),
          tag_(std::move(tag)),
          exit_code_(exit_code) {}

    const std::string& tag() const noexcept { return tag_; }
    int cli_exit_code() const noexcept { return exit_code_; }

private:
    std::string tag_;
    int exit_code_;
};

struct ParseError : HeunError {
    explicit ParseError(const std::string& message)
        : HeunError("Parse", message, exit_parse) {}
};

// Inputs that collapse the construction: coincident points, equal angles,
// integer exponent differences, vanishing denominators.
struct DegeneracyError : HeunError {
    DegeneracyError(std::string tag, const std::string& message)
        : HeunError(std::move(tag), message, exit_degeneracy) {}
};

// Requests outside an operation's validity region: points outside
// convergence discs or on branch cuts, paths through singularities,
// feasibility conditions that do not hold.
struct DomainError : HeunError {
    DomainError(std::string tag, const std::string& message)
        : HeunError(std::move(tag), message, exit_domain) {}
};

// Failure to reach the requested numerical accuracy.
struct ConvergenceError : HeunError {
    ConvergenceError(std::string tag, const std::string& message)
        : HeunError(std::move(tag), message, exit_no_convergence) {}
};

}  // namespace heun
