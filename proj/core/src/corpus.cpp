#include "convsarc/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "convsarc/errors.hpp"
#include "convsarc/rng.hpp"

namespace convsarc {

using json = nlohmann::json;

std::string to_string(Source s) {
    return s == Source::Twitter ? "twitter" : "reddit";
}

Source source_from_string(const std::string& s) {
    if (s == "twitter") return Source::Twitter;
    if (s == "reddit") return Source::Reddit;
    throw ConfigError("unknown source: '" + s + "' (expected twitter|reddit)");
}

std::string to_string(Label l) {
    return l == Label::Sarcasm ? "SARCASM" : "NOT_SARCASM";
}

Label label_from_string(const std::string& s) {
    if (s == "SARCASM") return Label::Sarcasm;
    if (s == "NOT_SARCASM") return Label::NotSarcasm;
    throw DataError("unknown label: '" + s + "'");
}

int encode_label(Label l) { return l == Label::Sarcasm ? 1 : 0; }

Label decode_label(int v) {
    if (v == 1) return Label::Sarcasm;
    if (v == 0) return Label::NotSarcasm;
    throw DomainError("label integer out of range: " + std::to_string(v));
}

bool Corpus::fully_labeled() const {
    return std::all_of(records.begin(), records.end(),
                       [](const DialogueRecord& r) { return r.label.has_value(); });
}

namespace {

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

std::string normalize_tweet(const std::string& text) {
    std::istringstream in(text);
    std::ostringstream out;
    std::string word;
    bool first = true;
    while (in >> word) {
        if (!first) out << ' ';
        first = false;
        if (word.rfind("http://", 0) == 0 || word.rfind("https://", 0) == 0) {
            out << "URL";
        } else if (word.size() > 1 && word[0] == '@') {
            out << "@USER";
        } else {
            out << word;
        }
    }
    return out.str();
}

Corpus load_corpus(const std::string& path, Source source) {
    return load_corpus(path, source, false);
}

Corpus load_corpus(const std::string& path, Source source, bool normalize) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open corpus file: " + path);

    Corpus corpus;
    corpus.source = source;
    std::unordered_set<std::string> seen_ids;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;

        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::exception& e) {
            throw DataError("parse error at line " + std::to_string(line_no) +
                            ": " + e.what());
        }
        if (!obj.is_object() || !obj.contains("response") || !obj.contains("context")) {
            throw DataError("parse error at line " + std::to_string(line_no) +
                            ": expected object with 'response' and 'context'");
        }

        DialogueRecord rec;
        rec.source = source;
        rec.id = obj.contains("id") ? obj["id"].get<std::string>()
                                    : to_string(source) + "-" + std::to_string(line_no);
        try {
            rec.response = obj["response"].get<std::string>();
            rec.context = obj["context"].get<std::vector<std::string>>();
        } catch (const json::exception& e) {
            throw DataError("parse error at line " + std::to_string(line_no) +
                            ": " + e.what());
        }
        if (obj.contains("label") && !obj["label"].is_null()) {
            rec.label = label_from_string(obj["label"].get<std::string>());
        }

        if (normalize) {
            rec.response = normalize_tweet(rec.response);
            for (auto& turn : rec.context) turn = normalize_tweet(turn);
        }

        if (trim(rec.response).empty()) {
            throw DataError("record '" + rec.id + "' (line " +
                            std::to_string(line_no) + ") has an empty response");
        }
        for (const auto& turn : rec.context) {
            if (trim(turn).empty()) {
                throw DataError("record '" + rec.id + "' (line " +
                                std::to_string(line_no) +
                                ") has an empty context turn");
            }
        }
        if (!seen_ids.insert(rec.id).second) {
            throw DataError("duplicate record id: '" + rec.id + "'");
        }
        corpus.records.push_back(std::move(rec));
    }
    return corpus;
}

void write_corpus(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write corpus file: " + path);
    for (const auto& rec : corpus.records) {
        json obj;
        obj["id"] = rec.id;
        obj["context"] = rec.context;
        obj["response"] = rec.response;
        if (rec.label) obj["label"] = to_string(*rec.label);
        out << obj.dump() << '\n';
    }
}

CorpusStats compute_stats(const Corpus& corpus) {
    CorpusStats stats;
    stats.record_count = corpus.records.size();
    if (stats.record_count == 0) return stats;

    std::size_t total_contexts = 0;
    for (const auto& rec : corpus.records) {
        total_contexts += rec.context.size();
        if (rec.label) ++stats.label_counts[*rec.label];
    }
    stats.avg_contexts_per_record =
        static_cast<double>(total_contexts) / static_cast<double>(stats.record_count);
    return stats;
}

double mismatch_ratio(const CorpusStats& a, const CorpusStats& b) {
    double x = a.avg_contexts_per_record;
    double y = b.avg_contexts_per_record;
    if (x <= 0.0 || y <= 0.0) {
        throw DomainError("mismatch_ratio requires strictly positive averages");
    }
    return std::max(x, y) / std::min(x, y);
}

std::pair<Corpus, Corpus> train_val_split(const Corpus& corpus, double ratio,
                                          std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio < 1.0)) {
        throw DomainError("split ratio must lie in (0,1)");
    }
    if (corpus.records.empty()) throw DataError("cannot split an empty corpus");
    for (const auto& rec : corpus.records) {
        if (!rec.label) {
            throw DataError("unlabeled record '" + rec.id + "' in training corpus");
        }
    }

    const std::size_t n = corpus.records.size();
    std::vector<std::size_t> indices(n);
    std::iota(indices.begin(), indices.end(), 0);
    Rng rng(seed);
    rng.shuffle(indices);

    const std::size_t train_n =
        static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n)));
    std::vector<bool> in_train(n, false);
    for (std::size_t i = 0; i < train_n; ++i) in_train[indices[i]] = true;

    Corpus train{{}, corpus.source, SplitTag::Train};
    Corpus val{{}, corpus.source, SplitTag::Validation};
    for (std::size_t i = 0; i < n; ++i) {
        (in_train[i] ? train : val).records.push_back(corpus.records[i]);
    }
    return {std::move(train), std::move(val)};
}

}  // namespace convsarc
