#pragma once

#include <stdexcept>
#include <string>

namespace convsarc {

// Error taxonomy used across the pipeline. The CLI maps these onto
// distinct exit codes (see tools/).

// Bad configuration: unknown mode strings, out-of-range hyperparameters,
// missing files named in a config.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or invalid data: unparseable corpus lines, empty responses,
// duplicate ids, unlabeled records where labels are required.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Contract violations at runtime: vocabulary mismatches, width mismatches,
// inputs exceeding their budget, incomplete checkpoints.
struct RuntimeFailure : std::runtime_error {
    explicit RuntimeFailure(const std::string& msg) : std::runtime_error(msg) {}
};

// Domain errors on pure numeric operations (nonpositive baseline, ratio
// outside (0,1), label integer outside {0,1}).
struct DomainError : std::invalid_argument {
    explicit DomainError(const std::string& msg) : std::invalid_argument(msg) {}
};

}  // namespace convsarc
