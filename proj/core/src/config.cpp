#include "convsarc/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "convsarc/errors.hpp"

namespace convsarc {

namespace {

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("expected a boolean, got '" + v + "'");
}

template <typename T>
T parse_num(const std::string& v) {
    std::istringstream in(v);
    T out{};
    in >> out;
    if (in.fail() || !in.eof()) throw ConfigError("bad numeric value '" + v + "'");
    return out;
}

}  // namespace

void ExperimentConfig::validate() const {
    hyperparams.validate();
    if (context_turns < 1) throw ConfigError("context_turns must be >= 1");
    if (dump_inputs < 0) throw ConfigError("dump_inputs must be >= 0");
    if (!corpus_path.empty() && !std::filesystem::exists(corpus_path)) {
        throw ConfigError("corpus file does not exist: " + corpus_path);
    }
    if (!second_corpus_path.empty() && !std::filesystem::exists(second_corpus_path)) {
        throw ConfigError("corpus file does not exist: " + second_corpus_path);
    }
}

void apply_config_entry(ExperimentConfig& c, const std::string& key,
                        const std::string& value) {
    if (key == "corpus") c.corpus_path = value;
    else if (key == "second_corpus") c.second_corpus_path = value;
    else if (key == "source") c.source = source_from_string(value);
    else if (key == "mode") c.mode = mode_from_string(value);
    else if (key == "encoder") c.encoder_id = value;
    else if (key == "weights") c.weights_path = value;
    else if (key == "output_dir") c.output_dir = value;
    else if (key == "normalize_tweets") c.normalize_tweets = parse_bool(value);
    else if (key == "context_turns") c.context_turns = parse_num<int>(value);
    else if (key == "tokenizer_vocab") c.tokenizer_vocab = parse_num<std::size_t>(value);
    else if (key == "dump_inputs") c.dump_inputs = parse_num<int>(value);
    else if (key == "lr") c.hyperparams.learning_rate = parse_num<double>(value);
    else if (key == "epochs") c.hyperparams.epochs = parse_num<int>(value);
    else if (key == "batch_size") c.hyperparams.batch_size = parse_num<int>(value);
    else if (key == "seed") c.hyperparams.seed = parse_num<std::uint64_t>(value);
    else if (key == "split_ratio") c.hyperparams.split_ratio = parse_num<double>(value);
    else if (key == "max_seq_len_response")
        c.hyperparams.max_seq_len_response = parse_num<int>(value);
    else if (key == "max_seq_len_context")
        c.hyperparams.max_seq_len_context = parse_num<int>(value);
    else throw ConfigError("unknown config key: '" + key + "'");
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);

    ExperimentConfig config;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              " is not 'key = value'");
        }
        apply_config_entry(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return config;
}

std::string dump_config(const ExperimentConfig& c) {
    std::ostringstream os;
    os.precision(17);
    os << "corpus = " << c.corpus_path << '\n';
    if (!c.second_corpus_path.empty()) os << "second_corpus = " << c.second_corpus_path << '\n';
    os << "source = " << to_string(c.source) << '\n';
    os << "mode = " << to_string(c.mode) << '\n';
    os << "encoder = " << c.encoder_id << '\n';
    if (!c.weights_path.empty()) os << "weights = " << c.weights_path << '\n';
    os << "output_dir = " << c.output_dir << '\n';
    os << "normalize_tweets = " << (c.normalize_tweets ? "true" : "false") << '\n';
    os << "context_turns = " << c.context_turns << '\n';
    os << "tokenizer_vocab = " << c.tokenizer_vocab << '\n';
    os << "dump_inputs = " << c.dump_inputs << '\n';
    os << "lr = " << c.hyperparams.learning_rate << '\n';
    os << "epochs = " << c.hyperparams.epochs << '\n';
    os << "batch_size = " << c.hyperparams.batch_size << '\n';
    os << "seed = " << c.hyperparams.seed << '\n';
    os << "split_ratio = " << c.hyperparams.split_ratio << '\n';
    os << "max_seq_len_response = " << c.hyperparams.max_seq_len_response << '\n';
    os << "max_seq_len_context = " << c.hyperparams.max_seq_len_context << '\n';
    return os.str();
}

void save_config(const ExperimentConfig& config, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write config file: " + path);
    out << dump_config(config);
}

}  // namespace convsarc
