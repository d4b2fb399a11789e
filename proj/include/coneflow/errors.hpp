#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace coneflow {

// Bad argument or violated precondition; maps to exit code 2 in the CLI.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Linear solve failed or left a residual above tolerance.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, std::vector<double> ratios)
        : std::runtime_error(what), ratio_history(std::move(ratios)) {}
    std::vector<double> ratio_history;
};

}  // namespace coneflow
