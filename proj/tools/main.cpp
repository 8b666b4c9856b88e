#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "convsarc/commands.hpp"
#include "convsarc/config.hpp"
#include "convsarc/errors.hpp"

using namespace convsarc;

namespace {

// Flag values parsed by CLI11; only flags the user actually passed
// override the config file.
struct FlagSet {
    std::string config_path;
    std::string corpus;
    std::string second_corpus;
    std::string source;
    std::string mode;
    std::string encoder;
    std::string weights;
    std::string output_dir;
    std::uint64_t seed = 0;
    double lr = 0.0;
    int epochs = 0;
    int batch_size = 0;
    int max_seq_len_response = 0;
    int max_seq_len_context = 0;
    int context_turns = 0;
    int dump_inputs = 0;
    std::size_t tokenizer_vocab = 0;
    double split_ratio = 0.0;
    bool normalize_tweets = false;
};

void add_common_flags(CLI::App* cmd, FlagSet& f) {
    cmd->add_option("--config", f.config_path, "experiment config file (key = value)");
    cmd->add_option("--corpus", f.corpus, "corpus file (JSONL)");
    cmd->add_option("--source", f.source, "corpus source: twitter|reddit");
    cmd->add_option("--mode", f.mode,
                    "input mode: response_only|context_response|context_response_separated");
    cmd->add_option("--encoder", f.encoder, "encoder id (tiny-test|roberta-large)");
    cmd->add_option("--weights", f.weights, "pretrained weights file");
    cmd->add_option("--output-dir", f.output_dir, "output directory");
    cmd->add_option("--seed", f.seed, "random seed");
    cmd->add_option("--lr", f.lr, "learning rate");
    cmd->add_option("--epochs", f.epochs, "training epochs");
    cmd->add_option("--batch-size", f.batch_size, "mini-batch size");
    cmd->add_option("--split-ratio", f.split_ratio, "train fraction of the split");
    cmd->add_option("--max-seq-len-response", f.max_seq_len_response,
                    "token budget for response_only inputs");
    cmd->add_option("--max-seq-len-context", f.max_seq_len_context,
                    "token budget for the context modes");
    cmd->add_option("--context-turns", f.context_turns, "context turns to keep (last k)");
    cmd->add_option("--dump-inputs", f.dump_inputs,
                    "write decoded inputs for the first N records");
    cmd->add_option("--tokenizer-vocab", f.tokenizer_vocab, "tokenizer vocabulary size");
    cmd->add_flag("--normalize-tweets", f.normalize_tweets,
                  "minimal tweet normalization (URLs, @mentions)");
}

ExperimentConfig resolve_config(const CLI::App* cmd, const FlagSet& f) {
    ExperimentConfig config;
    if (!f.config_path.empty()) config = load_config(f.config_path);

    auto passed = [&](const std::string& name) { return cmd->count(name) > 0; };
    if (passed("--corpus")) config.corpus_path = f.corpus;
    if (passed("--source")) config.source = source_from_string(f.source);
    if (passed("--mode")) config.mode = mode_from_string(f.mode);
    if (passed("--encoder")) config.encoder_id = f.encoder;
    if (passed("--weights")) config.weights_path = f.weights;
    if (passed("--output-dir")) config.output_dir = f.output_dir;
    if (passed("--seed")) config.hyperparams.seed = f.seed;
    if (passed("--lr")) config.hyperparams.learning_rate = f.lr;
    if (passed("--epochs")) config.hyperparams.epochs = f.epochs;
    if (passed("--batch-size")) config.hyperparams.batch_size = f.batch_size;
    if (passed("--split-ratio")) config.hyperparams.split_ratio = f.split_ratio;
    if (passed("--max-seq-len-response"))
        config.hyperparams.max_seq_len_response = f.max_seq_len_response;
    if (passed("--max-seq-len-context"))
        config.hyperparams.max_seq_len_context = f.max_seq_len_context;
    if (passed("--context-turns")) config.context_turns = f.context_turns;
    if (passed("--dump-inputs")) config.dump_inputs = f.dump_inputs;
    if (passed("--tokenizer-vocab")) config.tokenizer_vocab = f.tokenizer_vocab;
    if (passed("--normalize-tweets")) config.normalize_tweets = f.normalize_tweets;
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"context-aware sarcasm classification pipeline"};
    app.require_subcommand(1);

    FlagSet stats_flags, train_flags, eval_flags, predict_flags;
    std::string stats_corpus;
    std::string stats_second;
    std::vector<std::string> eval_checkpoints;
    std::string predict_checkpoint;

    CLI::App* stats = app.add_subcommand("stats", "corpus statistics report");
    stats->add_option("corpus_file", stats_corpus, "corpus file");
    stats->add_option("second_corpus_file", stats_second,
                      "second corpus file (enables the mismatch ratio)");
    add_common_flags(stats, stats_flags);

    CLI::App* train = app.add_subcommand("train", "fine-tune and write a checkpoint");
    add_common_flags(train, train_flags);

    CLI::App* evaluate = app.add_subcommand("evaluate", "score checkpoints on a labeled corpus");
    evaluate->add_option("checkpoints", eval_checkpoints, "checkpoint directories")
        ->required();
    add_common_flags(evaluate, eval_flags);

    CLI::App* predict = app.add_subcommand("predict", "write predictions for a corpus");
    predict->add_option("checkpoint", predict_checkpoint, "checkpoint directory")
        ->required();
    add_common_flags(predict, predict_flags);

    CLI11_PARSE(app, argc, argv);

    try {
        if (stats->parsed()) {
            ExperimentConfig config = resolve_config(stats, stats_flags);
            if (!stats_corpus.empty()) config.corpus_path = stats_corpus;
            if (!stats_second.empty()) config.second_corpus_path = stats_second;
            return run_stats(config, std::cout, std::cerr);
        }
        if (train->parsed()) {
            return run_train(resolve_config(train, train_flags), std::cout, std::cerr);
        }
        if (evaluate->parsed()) {
            return run_evaluate(eval_checkpoints, resolve_config(evaluate, eval_flags),
                                std::cout, std::cerr);
        }
        if (predict->parsed()) {
            return run_predict(predict_checkpoint,
                               resolve_config(predict, predict_flags), std::cout,
                               std::cerr);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntimeError;
    }
    return kExitOk;
}
