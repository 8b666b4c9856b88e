#include <benchmark/benchmark.h>

#include "convsarc/encoder.hpp"
#include "convsarc/input_builder.hpp"
#include "convsarc/metrics.hpp"
#include "convsarc/rng.hpp"
#include "convsarc/tokenizer.hpp"

using namespace convsarc;

namespace {

DialogueRecord sample_record() {
    DialogueRecord rec;
    rec.id = "bench-1";
    rec.context = {"so how did the big presentation go today",
                   "they asked me to redo all forty slides by friday"};
    rec.response = "oh it went absolutely perfectly as you can imagine";
    rec.label = Label::Sarcasm;
    return rec;
}

void bm_tokenize(benchmark::State& state) {
    HashTokenizer tok(1000);
    auto rec = sample_record();
    for (auto _ : state) {
        benchmark::DoNotOptimize(tok.encode(rec.response));
    }
}
BENCHMARK(bm_tokenize);

void bm_build_input_separated(benchmark::State& state) {
    HashTokenizer tok(1000);
    auto rec = sample_record();
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            build_input(rec, InputMode::ContextResponseSeparated, tok, 256));
    }
}
BENCHMARK(bm_build_input_separated);

void bm_metrics_report(benchmark::State& state) {
    Rng rng(1);
    std::vector<int> preds, gold;
    for (int i = 0; i < 1000; ++i) {
        preds.push_back(static_cast<int>(rng.next_below(2)));
        gold.push_back(static_cast<int>(rng.next_below(2)));
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(report_from_confusion(confusion(preds, gold)));
    }
}
BENCHMARK(bm_metrics_report);

void bm_forward_tiny(benchmark::State& state) {
    EncoderConfig cfg;
    cfg.vocab_size = 1000;
    TinyTestWeightProvider provider;
    TinyEncoder model(cfg, provider.provide(cfg, 1));
    HashTokenizer tok(1000);
    auto in = build_input(sample_record(), InputMode::ContextResponseSeparated, tok, 256);
    DatasetEntry entry{in, 1, "bench-1"};
    Example ex = to_example(entry);
    for (auto _ : state) {
        benchmark::DoNotOptimize(model.prob_class1(ex.ids));
    }
}
BENCHMARK(bm_forward_tiny);

void bm_train_step_tiny(benchmark::State& state) {
    EncoderConfig cfg;
    cfg.vocab_size = 1000;
    TinyTestWeightProvider provider;
    TinyEncoder model(cfg, provider.provide(cfg, 1));
    HashTokenizer tok(1000);
    auto in = build_input(sample_record(), InputMode::ContextResponseSeparated, tok, 256);
    DatasetEntry entry{in, 1, "bench-1"};
    std::vector<Example> batch(16, to_example(entry));
    EncoderParams grads = EncoderParams::zeros(cfg);
    for (auto _ : state) {
        benchmark::DoNotOptimize(model.loss_and_gradients(batch, grads));
    }
}
BENCHMARK(bm_train_step_tiny);

}  // namespace

BENCHMARK_MAIN();
