#include "convsarc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "convsarc/errors.hpp"

namespace convsarc {

using json = nlohmann::json;

ConfusionMatrix confusion(const std::vector<int>& predictions,
                          const std::vector<int>& gold) {
    if (predictions.size() != gold.size()) {
        throw DataError("prediction/gold length mismatch: " +
                        std::to_string(predictions.size()) + " vs " +
                        std::to_string(gold.size()));
    }
    if (predictions.empty()) throw DataError("nothing to score");

    ConfusionMatrix cm;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        int p = predictions[i], g = gold[i];
        if ((p != 0 && p != 1) || (g != 0 && g != 1)) {
            throw DataError("labels must be 0 or 1 (position " + std::to_string(i) + ")");
        }
        if (p == 1 && g == 1) ++cm.tp;
        else if (p == 1 && g == 0) ++cm.fp;
        else if (p == 0 && g == 1) ++cm.fn;
        else ++cm.tn;
    }
    return cm;
}

namespace {

double safe_div(double num, double den) { return den > 0.0 ? num / den : 0.0; }

double f1(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

}  // namespace

MetricsReport report_from_confusion(const ConfusionMatrix& cm) {
    if (cm.total() == 0) throw DataError("empty confusion matrix");
    MetricsReport rep;
    auto tp = static_cast<double>(cm.tp), fp = static_cast<double>(cm.fp);
    auto fn = static_cast<double>(cm.fn), tn = static_cast<double>(cm.tn);
    rep.precision_1 = safe_div(tp, tp + fp);
    rep.recall_1 = safe_div(tp, tp + fn);
    rep.f1_1 = f1(rep.precision_1, rep.recall_1);
    rep.precision_0 = safe_div(tn, tn + fn);
    rep.recall_0 = safe_div(tn, tn + fp);
    rep.f1_0 = f1(rep.precision_0, rep.recall_0);
    rep.macro_precision = 0.5 * (rep.precision_0 + rep.precision_1);
    rep.macro_recall = 0.5 * (rep.recall_0 + rep.recall_1);
    rep.macro_f1 = 0.5 * (rep.f1_0 + rep.f1_1);
    return rep;
}

double relative_improvement(double baseline, double improved) {
    if (baseline <= 0.0) throw DomainError("baseline must be positive");
    return 100.0 * (improved - baseline) / baseline;
}

double round_display(double value, int decimals) {
    double scale = std::pow(10.0, decimals);
    return std::copysign(std::floor(std::abs(value) * scale + 0.5), value) / scale;
}

namespace {

std::string mode_display(InputMode m) {
    switch (m) {
        case InputMode::ResponseOnly: return "Response-only";
        case InputMode::ContextResponse: return "Context-Response";
        case InputMode::ContextResponseSeparated: return "Context-Response (Separated)";
    }
    return "?";
}

int mode_rank(InputMode m) { return static_cast<int>(m); }

std::string fmt3(double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(3) << round_display(v, 3);
    return os.str();
}

}  // namespace

std::string results_table(const std::vector<RunResult>& results, bool class1) {
    std::vector<RunResult> ordered = results;
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const RunResult& a, const RunResult& b) {
                         return mode_rank(a.mode) < mode_rank(b.mode);
                     });

    std::ostringstream os;
    os << std::left << std::setw(30) << "Input" << std::right << std::setw(10)
       << "F1-score" << std::setw(12) << "Precision" << std::setw(10) << "Recall"
       << '\n';
    for (const auto& r : ordered) {
        double f = class1 ? r.report.f1_1 : r.report.macro_f1;
        double p = class1 ? r.report.precision_1 : r.report.macro_precision;
        double rec = class1 ? r.report.recall_1 : r.report.macro_recall;
        os << std::left << std::setw(30) << mode_display(r.mode) << std::right
           << std::setw(10) << fmt3(f) << std::setw(12) << fmt3(p) << std::setw(10)
           << fmt3(rec) << '\n';
    }
    return os.str();
}

std::string results_jsonl(const std::vector<RunResult>& results) {
    std::vector<RunResult> ordered = results;
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const RunResult& a, const RunResult& b) {
                         return mode_rank(a.mode) < mode_rank(b.mode);
                     });
    std::ostringstream os;
    for (const auto& r : ordered) {
        json obj;
        obj["source"] = to_string(r.source);
        obj["mode"] = to_string(r.mode);
        obj["precision_1"] = r.report.precision_1;
        obj["recall_1"] = r.report.recall_1;
        obj["f1_1"] = r.report.f1_1;
        obj["precision_0"] = r.report.precision_0;
        obj["recall_0"] = r.report.recall_0;
        obj["f1_0"] = r.report.f1_0;
        obj["macro_precision"] = r.report.macro_precision;
        obj["macro_recall"] = r.report.macro_recall;
        obj["macro_f1"] = r.report.macro_f1;
        obj["tp"] = r.cm.tp;
        obj["fp"] = r.cm.fp;
        obj["fn"] = r.cm.fn;
        obj["tn"] = r.cm.tn;
        obj["count"] = r.cm.total();
        os << obj.dump() << '\n';
    }
    return os.str();
}

void write_predictions(const std::vector<PredictionRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write prediction file: " + path);
    for (const auto& row : rows) {
        out << row.id << ',' << to_string(row.label) << '\n';
    }
}

std::vector<PredictionRow> read_predictions(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open prediction file: " + path);
    std::vector<PredictionRow> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto comma = line.rfind(',');
        if (comma == std::string::npos) {
            throw DataError("bad prediction line " + std::to_string(line_no));
        }
        rows.push_back({line.substr(0, comma), label_from_string(line.substr(comma + 1))});
    }
    return rows;
}

}  // namespace convsarc
