#pragma once

#include <optional>
#include <string>

#include "convsarc/corpus.hpp"
#include "convsarc/hyperparams.hpp"
#include "convsarc/input_builder.hpp"

namespace convsarc {

// Declarative experiment configuration. Loaded from a "key = value" text
// file (one pair per line, '#' comments); command-line flags override file
// values. See docs in the README for the schema.
struct ExperimentConfig {
    std::string corpus_path;
    std::string second_corpus_path;  // stats-only: enables the mismatch ratio
    Source source = Source::Twitter;
    InputMode mode = InputMode::ResponseOnly;
    Hyperparams hyperparams;
    std::string encoder_id = "tiny-test";
    std::string weights_path;
    std::string output_dir = ".";
    bool normalize_tweets = false;
    int context_turns = 2;
    std::size_t tokenizer_vocab = 1000;
    int dump_inputs = 0;

    void validate() const;
};

ExperimentConfig load_config(const std::string& path);

// Applies one "key = value" assignment; unknown keys are a ConfigError.
void apply_config_entry(ExperimentConfig& config, const std::string& key,
                        const std::string& value);

// Serializes to the same key=value format load_config reads.
std::string dump_config(const ExperimentConfig& config);
void save_config(const ExperimentConfig& config, const std::string& path);

}  // namespace convsarc
