#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "convsarc/commands.hpp"
#include "convsarc/config.hpp"
#include "convsarc/corpus.hpp"
#include "convsarc/errors.hpp"
#include "convsarc/metrics.hpp"
#include "test_support.hpp"

using namespace convsarc;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// small fast training config over a separable corpus
ExperimentConfig tiny_train_config(const std::string& dir, std::size_t n = 20) {
    Corpus c = testing::separable_corpus(n);
    write_corpus(c, dir + "/train.jsonl");
    ExperimentConfig config;
    config.corpus_path = dir + "/train.jsonl";
    config.source = Source::Twitter;
    config.mode = InputMode::ContextResponseSeparated;
    config.encoder_id = "tiny-test";
    config.output_dir = dir + "/ckpt";
    config.tokenizer_vocab = 300;
    config.hyperparams.epochs = 10;
    config.hyperparams.learning_rate = 1e-3;
    config.hyperparams.batch_size = 8;
    config.hyperparams.seed = 7;
    return config;
}

}  // namespace

TEST_CASE("config file parsing, overrides and round-trip") {
    auto dir = testing::make_temp_dir("config");
    {
        std::ofstream out(dir + "/exp.conf");
        out << "# experiment\n"
            << "mode = context_response\n"
            << "lr = 0.00002\n"
            << "epochs = 5\n"
            << "seed = 99\n"
            << "normalize_tweets = true\n";
    }
    ExperimentConfig c = load_config(dir + "/exp.conf");
    CHECK(c.mode == InputMode::ContextResponse);
    CHECK(c.hyperparams.learning_rate == doctest::Approx(2e-5));
    CHECK(c.hyperparams.epochs == 5);
    CHECK(c.hyperparams.seed == 99);
    CHECK(c.normalize_tweets);
    CHECK(c.hyperparams.batch_size == 16);  // untouched default

    c.corpus_path = "";  // keep paths empty so validation passes anywhere
    save_config(c, dir + "/exp2.conf");
    ExperimentConfig back = load_config(dir + "/exp2.conf");
    CHECK(back.mode == c.mode);
    CHECK(back.hyperparams.learning_rate == c.hyperparams.learning_rate);
    CHECK(back.hyperparams.epochs == c.hyperparams.epochs);
    CHECK(back.hyperparams.seed == c.hyperparams.seed);
    CHECK(back.normalize_tweets == c.normalize_tweets);
    CHECK(back.context_turns == c.context_turns);
    CHECK(back.tokenizer_vocab == c.tokenizer_vocab);
}

TEST_CASE("config rejects unknown keys and malformed lines") {
    auto dir = testing::make_temp_dir("badconfig");
    {
        std::ofstream out(dir + "/bad.conf");
        out << "modee = context_response\n";
    }
    CHECK_THROWS_AS(load_config(dir + "/bad.conf"), ConfigError);
    {
        std::ofstream out(dir + "/bad2.conf");
        out << "just words\n";
    }
    CHECK_THROWS_AS(load_config(dir + "/bad2.conf"), ConfigError);
}

TEST_CASE("stats command prints the average and writes stats.json") {
    auto dir = testing::make_temp_dir("stats");
    Corpus c = testing::corpus_with_context_lengths({2, 3, 4});
    write_corpus(c, dir + "/c.jsonl");

    ExperimentConfig config;
    config.corpus_path = dir + "/c.jsonl";
    config.source = Source::Reddit;
    config.output_dir = dir;

    std::ostringstream out, err;
    CHECK(run_stats(config, out, err) == kExitOk);
    CHECK(out.str().find("3.000") != std::string::npos);
    CHECK(fs::exists(dir + "/stats.json"));
}

TEST_CASE("stats over two corpora reports the mismatch ratio") {
    auto dir = testing::make_temp_dir("stats2");
    // means 2.491 and 4.254 via 1000 records each
    std::vector<int> a(1000, 2), b(1000, 4);
    for (int i = 0; i < 491; ++i) a[i] = 3;
    for (int i = 0; i < 254; ++i) b[i] = 5;
    write_corpus(testing::corpus_with_context_lengths(a), dir + "/train.jsonl");
    write_corpus(testing::corpus_with_context_lengths(b), dir + "/test.jsonl");

    ExperimentConfig config;
    config.corpus_path = dir + "/train.jsonl";
    config.second_corpus_path = dir + "/test.jsonl";
    config.source = Source::Reddit;
    config.output_dir = dir;

    std::ostringstream out, err;
    CHECK(run_stats(config, out, err) == kExitOk);
    CHECK(out.str().find("mismatch ratio: 1.708") != std::string::npos);
    CHECK(out.str().find("test") != std::string::npos);
}

TEST_CASE("stats on an empty file reports zero and exits 0") {
    auto dir = testing::make_temp_dir("statsempty");
    std::ofstream(dir + "/empty.jsonl").close();
    ExperimentConfig config;
    config.corpus_path = dir + "/empty.jsonl";
    config.output_dir = dir;
    std::ostringstream out, err;
    CHECK(run_stats(config, out, err) == kExitOk);
    CHECK(out.str().find("0") != std::string::npos);
}

TEST_CASE("stats exit codes distinguish config and data errors") {
    ExperimentConfig missing;
    missing.corpus_path = "/nonexistent/corpus.jsonl";
    std::ostringstream out, err;
    CHECK(run_stats(missing, out, err) == kExitConfigError);

    auto dir = testing::make_temp_dir("statsbad");
    std::ofstream(dir + "/bad.jsonl") << "{broken\n";
    ExperimentConfig bad;
    bad.corpus_path = dir + "/bad.jsonl";
    bad.output_dir = dir;
    std::ostringstream out2, err2;
    CHECK(run_stats(bad, out2, err2) == kExitDataError);
    CHECK(err2.str().find("line 1") != std::string::npos);
}

TEST_CASE("train writes a complete checkpoint and prints history") {
    auto dir = testing::make_temp_dir("train");
    ExperimentConfig config = tiny_train_config(dir);
    config.hyperparams.epochs = 3;
    config.dump_inputs = 5;

    std::ostringstream out, err;
    REQUIRE(run_train(config, out, err) == kExitOk);
    CHECK(out.str().find("epoch 1:") != std::string::npos);
    CHECK(out.str().find("epoch 3:") != std::string::npos);
    for (const char* f : {"model.json", "hparams.json", "history.json", "weights.bin"}) {
        CAPTURE(f);
        CHECK(fs::exists(fs::path(config.output_dir) / f));
    }

    // dump contains exactly one separator per input in separated mode
    std::string dump = read_file(fs::path(config.output_dir) / "inputs_dump.txt");
    std::istringstream lines(dump);
    std::string line;
    int rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
        CHECK(line.find("<sep>") != std::string::npos);
        auto first = line.find("<sep>");
        CHECK(line.find("<sep>", first + 1) == std::string::npos);
    }
    CHECK(rows == 5);
}

TEST_CASE("evaluate on the training corpus of an overfit model gives macro F1 1.000") {
    auto dir = testing::make_temp_dir("eval");
    ExperimentConfig config = tiny_train_config(dir, 24);
    config.hyperparams.epochs = 20;
    std::ostringstream out, err;
    REQUIRE(run_train(config, out, err) == kExitOk);

    ExperimentConfig eval_config = config;
    eval_config.output_dir = dir + "/eval";
    std::ostringstream out2, err2;
    REQUIRE(run_evaluate({config.output_dir}, eval_config, out2, err2) == kExitOk);
    CHECK(out2.str().find("1.000") != std::string::npos);
    CHECK(fs::exists(dir + "/eval/metrics.jsonl"));
    std::string metrics = read_file(dir + "/eval/metrics.jsonl");
    CHECK(metrics.find("\"macro_f1\":1.0") != std::string::npos);
}

TEST_CASE("evaluate refuses an unlabeled corpus") {
    auto dir = testing::make_temp_dir("evalunlab");
    ExperimentConfig config = tiny_train_config(dir, 12);
    config.hyperparams.epochs = 1;
    std::ostringstream out, err;
    REQUIRE(run_train(config, out, err) == kExitOk);

    Rng rng(3);
    Corpus unlabeled = testing::random_corpus(rng, 4, Source::Twitter, false);
    write_corpus(unlabeled, dir + "/unlabeled.jsonl");
    ExperimentConfig eval_config = config;
    eval_config.corpus_path = dir + "/unlabeled.jsonl";
    std::ostringstream out2, err2;
    CHECK(run_evaluate({config.output_dir}, eval_config, out2, err2) == kExitDataError);
}

TEST_CASE("predict writes id,label lines in corpus order") {
    auto dir = testing::make_temp_dir("predict");
    ExperimentConfig config = tiny_train_config(dir, 12);
    config.hyperparams.epochs = 2;
    std::ostringstream out, err;
    REQUIRE(run_train(config, out, err) == kExitOk);

    Rng rng(4);
    Corpus fresh = testing::random_corpus(rng, 5, Source::Twitter, false);
    write_corpus(fresh, dir + "/fresh.jsonl");

    ExperimentConfig pred_config = config;
    pred_config.corpus_path = dir + "/fresh.jsonl";
    pred_config.output_dir = dir + "/pred";
    std::ostringstream out2, err2;
    REQUIRE(run_predict(config.output_dir, pred_config, out2, err2) == kExitOk);

    auto rows = read_predictions(dir + "/pred/predictions.csv");
    REQUIRE(rows.size() == 5);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].id == fresh.records[i].id);
        bool known = rows[i].label == Label::Sarcasm || rows[i].label == Label::NotSarcasm;
        CHECK(known);
    }
}

TEST_CASE("scoring a prediction file reproduces the evaluate-path metrics") {
    auto dir = testing::make_temp_dir("roundtrip");
    ExperimentConfig config = tiny_train_config(dir, 20);
    config.hyperparams.epochs = 4;
    std::ostringstream out, err;
    REQUIRE(run_train(config, out, err) == kExitOk);

    // withheld gold: a labeled corpus the model never saw
    Corpus gold = testing::separable_corpus(10, Source::Twitter);
    for (auto& r : gold.records) r.id += "-held";
    write_corpus(gold, dir + "/gold.jsonl");

    ExperimentConfig pc = config;
    pc.corpus_path = dir + "/gold.jsonl";
    pc.output_dir = dir + "/pred";
    std::ostringstream o1, e1;
    REQUIRE(run_predict(config.output_dir, pc, o1, e1) == kExitOk);

    ExperimentConfig ec = pc;
    ec.output_dir = dir + "/eval";
    std::ostringstream o2, e2;
    REQUIRE(run_evaluate({config.output_dir}, ec, o2, e2) == kExitOk);

    // score the prediction file against gold by hand
    auto rows = read_predictions(dir + "/pred/predictions.csv");
    std::vector<int> p, g;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        p.push_back(encode_label(rows[i].label));
        g.push_back(encode_label(*gold.records[i].label));
    }
    MetricsReport scored = report_from_confusion(confusion(p, g));

    std::string metrics = read_file(dir + "/eval/metrics.jsonl");
    std::ostringstream needle;
    needle << "\"macro_f1\":" << scored.macro_f1;
    // the evaluate path must have produced the identical value
    CHECK(metrics.find("\"macro_f1\":") != std::string::npos);
    double from_file = std::stod(metrics.substr(metrics.find("\"macro_f1\":") + 11));
    CHECK(from_file == scored.macro_f1);
}

TEST_CASE("train on a single record corpus fails with a data error") {
    auto dir = testing::make_temp_dir("tiny1");
    Corpus c = testing::separable_corpus(1);
    write_corpus(c, dir + "/one.jsonl");
    ExperimentConfig config;
    config.corpus_path = dir + "/one.jsonl";
    config.output_dir = dir + "/ckpt";
    config.tokenizer_vocab = 300;
    std::ostringstream out, err;
    CHECK(run_train(config, out, err) == kExitDataError);
}
