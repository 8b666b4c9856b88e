#include "convsarc/checkpoint.hpp"

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "convsarc/errors.hpp"
#include "convsarc/weights_io.hpp"

namespace convsarc {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

void write_json(const fs::path& path, const json& obj) {
    std::ofstream out(path);
    if (!out) throw RuntimeFailure("cannot write " + path.string());
    out << obj.dump(2) << '\n';
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw RuntimeFailure("checkpoint incomplete: missing " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw RuntimeFailure("corrupt checkpoint file " + path.string() + ": " + e.what());
    }
}

}  // namespace

void save_checkpoint(const std::string& dir, TrainedModel& model) {
    fs::create_directories(dir);
    fs::path base(dir);

    json model_obj;
    model_obj["format_version"] = kFormatVersion;
    model_obj["spec"] = {{"encoder_id", model.spec.encoder_id},
                         {"parameter_count", model.spec.parameter_count},
                         {"vocabulary_size", model.spec.vocabulary_size},
                         {"hidden_width", model.spec.hidden_width}};
    model_obj["config"] = {{"vocab_size", model.config.vocab_size},
                           {"d_model", model.config.d_model},
                           {"n_heads", model.config.n_heads},
                           {"n_layers", model.config.n_layers},
                           {"d_ff", model.config.d_ff},
                           {"max_positions", model.config.max_positions},
                           {"head_dropout", model.config.head_dropout}};
    model_obj["input"] = {{"mode", to_string(model.mode)},
                          {"context_turns", model.context_turns}};
    write_json(base / "model.json", model_obj);

    const auto& hp = model.hyperparams;
    write_json(base / "hparams.json",
               json{{"learning_rate", hp.learning_rate},
                    {"epochs", hp.epochs},
                    {"max_seq_len_response", hp.max_seq_len_response},
                    {"max_seq_len_context", hp.max_seq_len_context},
                    {"split_ratio", hp.split_ratio},
                    {"seed", hp.seed},
                    {"batch_size", hp.batch_size}});

    json history = json::array();
    for (const auto& e : model.history) {
        history.push_back({{"train_loss", e.train_loss},
                           {"val_loss", e.val_loss},
                           {"val_f1", e.val_f1}});
    }
    write_json(base / "history.json", history);

    save_weights((base / "weights.bin").string(), model.params);
}

TrainedModel load_checkpoint(const std::string& dir) {
    fs::path base(dir);
    json model_obj = read_json(base / "model.json");
    if (model_obj.value("format_version", -1) != kFormatVersion) {
        throw RuntimeFailure("unsupported checkpoint format version in " + dir);
    }

    TrainedModel model;
    const auto& spec = model_obj.at("spec");
    model.spec.encoder_id = spec.at("encoder_id").get<std::string>();
    model.spec.parameter_count = spec.at("parameter_count").get<std::uint64_t>();
    model.spec.vocabulary_size = spec.at("vocabulary_size").get<std::size_t>();
    model.spec.hidden_width = spec.at("hidden_width").get<int>();

    const auto& cfg = model_obj.at("config");
    model.config.vocab_size = cfg.at("vocab_size").get<std::size_t>();
    model.config.d_model = cfg.at("d_model").get<int>();
    model.config.n_heads = cfg.at("n_heads").get<int>();
    model.config.n_layers = cfg.at("n_layers").get<int>();
    model.config.d_ff = cfg.at("d_ff").get<int>();
    model.config.max_positions = cfg.at("max_positions").get<int>();
    model.config.head_dropout = cfg.at("head_dropout").get<double>();

    const auto& input = model_obj.at("input");
    model.mode = mode_from_string(input.at("mode").get<std::string>());
    model.context_turns = input.at("context_turns").get<int>();

    json hp = read_json(base / "hparams.json");
    model.hyperparams.learning_rate = hp.at("learning_rate").get<double>();
    model.hyperparams.epochs = hp.at("epochs").get<int>();
    model.hyperparams.max_seq_len_response = hp.at("max_seq_len_response").get<int>();
    model.hyperparams.max_seq_len_context = hp.at("max_seq_len_context").get<int>();
    model.hyperparams.split_ratio = hp.at("split_ratio").get<double>();
    model.hyperparams.seed = hp.at("seed").get<std::uint64_t>();
    model.hyperparams.batch_size = hp.at("batch_size").get<int>();

    for (const auto& e : read_json(base / "history.json")) {
        model.history.push_back({e.at("train_loss").get<double>(),
                                 e.at("val_loss").get<double>(),
                                 e.at("val_f1").get<double>()});
    }

    model.params = EncoderParams::zeros(model.config);
    load_weights((base / "weights.bin").string(), model.params);
    return model;
}

}  // namespace convsarc
