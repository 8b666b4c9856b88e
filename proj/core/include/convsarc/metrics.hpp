#pragma once

#include <string>
#include <vector>

#include "convsarc/corpus.hpp"
#include "convsarc/input_builder.hpp"

namespace convsarc {

// Class 1 (SARCASM) is the positive class.
struct ConfusionMatrix {
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    std::size_t total() const { return tp + fp + fn + tn; }
};

struct MetricsReport {
    double precision_1 = 0, recall_1 = 0, f1_1 = 0;
    double precision_0 = 0, recall_0 = 0, f1_0 = 0;
    double macro_precision = 0, macro_recall = 0, macro_f1 = 0;
};

struct RunResult {
    InputMode mode = InputMode::ResponseOnly;
    Source source = Source::Twitter;
    MetricsReport report;
    ConfusionMatrix cm;
};

ConfusionMatrix confusion(const std::vector<int>& predictions,
                          const std::vector<int>& gold);

// Zero-denominator metrics are 0 by convention.
MetricsReport report_from_confusion(const ConfusionMatrix& cm);

// 100 * (improved - baseline) / baseline; negative when improved < baseline.
double relative_improvement(double baseline, double improved);

// Round-half-away-from-zero to `decimals` places.
double round_display(double value, int decimals = 3);

// Human-readable table: rows ordered Response-only, Context-Response,
// Context-Response (Separated); columns F1-score, Precision, Recall; three
// decimals. class1=true renders the positive-class triple instead of the
// macro averages.
std::string results_table(const std::vector<RunResult>& results, bool class1 = false);

// One JSON object per (source, mode) with all nine metric fields plus the
// confusion counts.
std::string results_jsonl(const std::vector<RunResult>& results);

// Prediction files: one "<id>,<label>" line per record, corpus order.
struct PredictionRow {
    std::string id;
    Label label = Label::NotSarcasm;
};
void write_predictions(const std::vector<PredictionRow>& rows, const std::string& path);
std::vector<PredictionRow> read_predictions(const std::string& path);

}  // namespace convsarc
