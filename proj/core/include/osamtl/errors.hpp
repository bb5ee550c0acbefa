// Error hierarchy shared by all pipeline stages. The CLI maps these to
// process exit codes (config 2, data 3, constraint 4, divergence 5).
#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace osamtl {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid configuration: bad hyper-parameters, missing knowledge items,
// malformed alpha weights.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Invalid or malformed input data: empty samples, dimension mismatches,
// unparseable files.
class DataError : public Error {
public:
    using Error::Error;
};

// A structural constraint of the method was violated (pairwise diversity,
// target-count divisibility, single-target rearrangement).
class ConstraintError : public Error {
public:
    using Error::Error;
};

// Diversity validation failure; carries every offending sample-id pair.
class DiversityError : public ConstraintError {
public:
    DiversityError(std::string message, std::vector<std::pair<int, int>> pairs)
        : ConstraintError(std::move(message)), violating_pairs(std::move(pairs)) {}

    std::vector<std::pair<int, int>> violating_pairs;
};

// Training produced a non-finite loss or parameter.
class DivergenceError : public Error {
public:
    DivergenceError(std::string message, int epoch)
        : Error(std::move(message)), epoch(epoch) {}

    int epoch = -1;
};

// Internal invariant broken; indicates a bug, not bad user input.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace osamtl
