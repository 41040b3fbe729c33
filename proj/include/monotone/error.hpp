#pragma once

#include <stdexcept>
#include <string>

namespace monotone {

// Caller passed something that violates a documented precondition.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// An iterative solver stopped before meeting its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double final_mismatch)
        : std::runtime_error(what), final_mismatch_(final_mismatch) {}

    double final_mismatch() const noexcept { return final_mismatch_; }

private:
    double final_mismatch_;
};

// Internal failure of an exact solver. Carries a JSON dump of the instance
// so it can be replayed.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, std::string instance_dump)
        : std::runtime_error(what), instance_dump_(std::move(instance_dump)) {}

    const std::string& instance_dump() const noexcept { return instance_dump_; }

private:
    std::string instance_dump_;
};

}  // namespace monotone
