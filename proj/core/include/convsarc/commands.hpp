#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "convsarc/config.hpp"

namespace convsarc {

// Exit codes shared by the CLI and the command implementations.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitDataError = 3;
inline constexpr int kExitRuntimeError = 4;

// Command bodies behind the `convsarc` subcommands. Human-readable output
// goes to `out`, diagnostics to `err`; machine-readable artifacts land in
// config.output_dir. Each returns one of the exit codes above.

// Prints record count, average contexts per record and label balance for
// the corpus (and the mismatch ratio when a second corpus is configured);
// writes stats.json.
int run_stats(const ExperimentConfig& config, std::ostream& out, std::ostream& err);

// Splits, builds datasets in the configured mode, fine-tunes, and writes a
// checkpoint into config.output_dir. --dump-inputs N additionally writes
// the decoded inputs of the first N records to inputs_dump.txt.
int run_train(const ExperimentConfig& config, std::ostream& out, std::ostream& err);

// Scores one or more checkpoints against a labeled corpus; prints the
// results table and writes metrics.jsonl.
int run_evaluate(const std::vector<std::string>& checkpoint_dirs,
                 const ExperimentConfig& config, std::ostream& out, std::ostream& err);

// Writes predictions.csv: one "<id>,<label>" line per record, corpus order.
int run_predict(const std::string& checkpoint_dir, const ExperimentConfig& config,
                std::ostream& out, std::ostream& err);

}  // namespace convsarc
