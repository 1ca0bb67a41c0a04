#pragma once

#include <stdexcept>
#include <string>

namespace miocp {

/* Bad user-supplied data: malformed files, infeasible parameters, broken
 * invariants on inputs.  The CLI maps this to exit code 2. */
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/* Internal numerical failure: non-convergent substep refinement, singular
 * linear solves, line-search breakdown past the retry budget.  Exit code 1. */
class ComputationError : public std::runtime_error {
public:
    explicit ComputationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace miocp
