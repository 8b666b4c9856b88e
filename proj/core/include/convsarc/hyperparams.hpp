#pragma once

#include <cstdint>

#include "convsarc/errors.hpp"

namespace convsarc {

// Training constants. Defaults follow the fixed recipe: lr 1e-5 for 3
// epochs, sequence budgets 50 (response-only) and 256 (context modes),
// 90-10 train-validation split.
struct Hyperparams {
    double learning_rate = 1e-5;
    int epochs = 3;
    int max_seq_len_response = 50;
    int max_seq_len_context = 256;
    double split_ratio = 0.9;
    std::uint64_t seed = 42;
    int batch_size = 16;

    void validate() const {
        if (learning_rate <= 0.0) throw ConfigError("learning_rate must be positive");
        if (epochs <= 0) throw ConfigError("epochs must be positive");
        if (max_seq_len_response <= 0) throw ConfigError("max_seq_len_response must be positive");
        if (max_seq_len_context <= 0) throw ConfigError("max_seq_len_context must be positive");
        if (!(split_ratio > 0.0 && split_ratio < 1.0)) throw ConfigError("split_ratio must lie in (0,1)");
        if (batch_size <= 0) throw ConfigError("batch_size must be positive");
    }
};

}  // namespace convsarc
