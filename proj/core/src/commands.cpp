#include "convsarc/commands.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "convsarc/checkpoint.hpp"
#include "convsarc/encoder.hpp"
#include "convsarc/errors.hpp"
#include "convsarc/metrics.hpp"
#include "convsarc/tokenizer.hpp"

namespace convsarc {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        fn();
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return kExitDataError;
    } catch (const DomainError& e) {
        err << "data error: " << e.what() << '\n';
        return kExitDataError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntimeError;
    }
}

std::string corpus_name(const std::string& path) {
    return fs::path(path).stem().string();
}

json stats_to_json(const std::string& name, const CorpusStats& s) {
    json counts = json::object();
    for (const auto& [label, n] : s.label_counts) counts[to_string(label)] = n;
    return {{"corpus", name},
            {"records", s.record_count},
            {"avg_contexts_per_record", s.avg_contexts_per_record},
            {"label_counts", counts}};
}

void ensure_output_dir(const ExperimentConfig& config) {
    if (!config.output_dir.empty()) fs::create_directories(config.output_dir);
}

void dump_inputs(const ExperimentConfig& config, const EncodedDataset& dataset,
                 const TokenizerHandle& tokenizer) {
    if (config.dump_inputs <= 0) return;
    fs::path path = fs::path(config.output_dir) / "inputs_dump.txt";
    std::ofstream out(path);
    std::size_t n = std::min<std::size_t>(dataset.size(),
                                          static_cast<std::size_t>(config.dump_inputs));
    for (std::size_t i = 0; i < n; ++i) {
        const auto& entry = dataset[i];
        std::vector<TokenId> real;
        std::size_t sep_count = 0;
        for (std::size_t j = 0; j < entry.input.token_ids.size(); ++j) {
            if (entry.input.attention_mask[j] == 1) {
                real.push_back(entry.input.token_ids[j]);
                if (entry.input.token_ids[j] == tokenizer.sep_id()) ++sep_count;
            }
        }
        out << entry.record_id << '\t' << real.size() << '\t' << sep_count << '\t'
            << tokenizer.decode(real) << '\n';
    }
}

EncodedDataset dataset_for_model(const TrainedModel& model, const Corpus& corpus,
                                 const TokenizerHandle& tokenizer) {
    Hyperparams hp = model.hyperparams;
    return build_dataset(corpus, model.mode, tokenizer, hp, model.context_turns);
}

}  // namespace

int run_stats(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        config.validate();
        if (config.corpus_path.empty()) throw ConfigError("stats needs a corpus file");

        Corpus a = load_corpus(config.corpus_path, config.source, config.normalize_tweets);
        CorpusStats sa = compute_stats(a);
        std::vector<std::pair<std::string, CorpusStats>> all;
        all.emplace_back(corpus_name(config.corpus_path), sa);
        if (!config.second_corpus_path.empty()) {
            Corpus b = load_corpus(config.second_corpus_path, config.source,
                                   config.normalize_tweets);
            all.emplace_back(corpus_name(config.second_corpus_path), compute_stats(b));
        }

        out << std::left << std::setw(24) << "";
        for (const auto& [name, _] : all) out << std::right << std::setw(16) << name;
        out << '\n';
        out << std::left << std::setw(24) << "records";
        for (const auto& [_, s] : all) out << std::right << std::setw(16) << s.record_count;
        out << '\n';
        out << std::left << std::setw(24) << "avg contexts/post";
        for (const auto& [_, s] : all) {
            std::ostringstream v;
            v << std::fixed << std::setprecision(3)
              << round_display(s.avg_contexts_per_record, 3);
            out << std::right << std::setw(16) << v.str();
        }
        out << '\n';
        for (Label l : {Label::Sarcasm, Label::NotSarcasm}) {
            out << std::left << std::setw(24) << to_string(l);
            for (const auto& [_, s] : all) {
                auto it = s.label_counts.find(l);
                out << std::right << std::setw(16)
                    << (it == s.label_counts.end() ? 0 : it->second);
            }
            out << '\n';
        }

        json report;
        report["corpora"] = json::array();
        for (const auto& [name, s] : all) report["corpora"].push_back(stats_to_json(name, s));

        if (all.size() == 2) {
            const auto& s0 = all[0].second;
            const auto& s1 = all[1].second;
            double ratio = mismatch_ratio(s0, s1);
            const std::string& larger =
                s0.avg_contexts_per_record >= s1.avg_contexts_per_record ? all[0].first
                                                                         : all[1].first;
            out << "mismatch ratio: " << std::fixed << std::setprecision(3)
                << round_display(ratio, 3) << " (" << larger
                << " has the deeper contexts)\n";
            report["mismatch_ratio"] = ratio;
            report["deeper_contexts"] = larger;
        }

        ensure_output_dir(config);
        std::ofstream jf(fs::path(config.output_dir) / "stats.json");
        jf << report.dump(2) << '\n';
    });
}

int run_train(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        config.validate();
        if (config.corpus_path.empty()) throw ConfigError("train needs a corpus file");

        Corpus corpus = load_corpus(config.corpus_path, config.source,
                                    config.normalize_tweets);
        auto [train, val] = train_val_split(corpus, config.hyperparams.split_ratio,
                                            config.hyperparams.seed);
        if (train.records.empty()) {
            throw DataError("training split is empty; corpus too small for ratio");
        }

        auto tokenizer = make_tokenizer(config.tokenizer_vocab);
        auto [spec, enc_cfg] = lookup_encoder(config.encoder_id,
                                              tokenizer->vocabulary_size());
        EncodedDataset train_ds = build_dataset(train, config.mode, *tokenizer,
                                                config.hyperparams, config.context_turns);
        EncodedDataset val_ds = build_dataset(val, config.mode, *tokenizer,
                                              config.hyperparams, config.context_turns);

        ensure_output_dir(config);
        dump_inputs(config, train_ds, *tokenizer);

        auto provider = make_weight_provider(config.encoder_id, config.weights_path);
        TrainedModel model = fine_tune(spec, enc_cfg, train_ds, val_ds,
                                       config.hyperparams, *provider);
        model.mode = config.mode;
        model.context_turns = config.context_turns;

        for (std::size_t e = 0; e < model.history.size(); ++e) {
            const auto& h = model.history[e];
            out << "epoch " << (e + 1) << ": train_loss=" << std::fixed
                << std::setprecision(6) << h.train_loss << " val_loss=" << h.val_loss
                << " val_macro_f1=" << h.val_f1 << '\n';
        }

        save_checkpoint(config.output_dir, model);
        out << "checkpoint written to " << config.output_dir << '\n';
    });
}

int run_evaluate(const std::vector<std::string>& checkpoint_dirs,
                 const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        config.validate();
        if (checkpoint_dirs.empty()) throw ConfigError("evaluate needs a checkpoint");
        if (config.corpus_path.empty()) throw ConfigError("evaluate needs a corpus file");

        Corpus corpus = load_corpus(config.corpus_path, config.source,
                                    config.normalize_tweets);
        if (!corpus.fully_labeled()) {
            throw DataError("evaluation corpus must be fully labeled");
        }

        std::vector<RunResult> results;
        for (const auto& dir : checkpoint_dirs) {
            TrainedModel model = load_checkpoint(dir);
            auto tokenizer = make_tokenizer(model.config.vocab_size);
            EncodedDataset ds = dataset_for_model(model, corpus, *tokenizer);
            auto preds = predict(model, ds);

            std::vector<int> p, g;
            for (std::size_t i = 0; i < preds.size(); ++i) {
                p.push_back(preds[i].label);
                g.push_back(*ds[i].label);
            }
            RunResult rr;
            rr.mode = model.mode;
            rr.source = corpus.source;
            rr.cm = confusion(p, g);
            rr.report = report_from_confusion(rr.cm);
            results.push_back(rr);
        }

        out << results_table(results);
        ensure_output_dir(config);
        std::ofstream mf(fs::path(config.output_dir) / "metrics.jsonl");
        mf << results_jsonl(results);
        out << "metrics written to "
            << (fs::path(config.output_dir) / "metrics.jsonl").string() << '\n';
    });
}

int run_predict(const std::string& checkpoint_dir, const ExperimentConfig& config,
                std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        config.validate();
        if (checkpoint_dir.empty()) throw ConfigError("predict needs a checkpoint");
        if (config.corpus_path.empty()) throw ConfigError("predict needs a corpus file");

        Corpus corpus = load_corpus(config.corpus_path, config.source,
                                    config.normalize_tweets);
        TrainedModel model = load_checkpoint(checkpoint_dir);
        auto tokenizer = make_tokenizer(model.config.vocab_size);
        EncodedDataset ds = dataset_for_model(model, corpus, *tokenizer);
        auto preds = predict(model, ds);

        std::vector<PredictionRow> rows;
        for (std::size_t i = 0; i < preds.size(); ++i) {
            rows.push_back({ds[i].record_id, decode_label(preds[i].label)});
        }
        ensure_output_dir(config);
        fs::path path = fs::path(config.output_dir) / "predictions.csv";
        write_predictions(rows, path.string());
        out << "predictions written to " << path.string() << '\n';
    });
}

}  // namespace convsarc
