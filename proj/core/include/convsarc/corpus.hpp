#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace convsarc {

enum class Source { Twitter, Reddit };
enum class Label { NotSarcasm = 0, Sarcasm = 1 };
enum class SplitTag { Train, Validation, Test, Unsplit };

std::string to_string(Source s);
Source source_from_string(const std::string& s);
std::string to_string(Label l);
Label label_from_string(const std::string& s);

// SARCASM <-> 1, NOT_SARCASM <-> 0. The sarcastic class is the positive
// class throughout.
int encode_label(Label l);
Label decode_label(int v);

// One conversation thread: ordered prior turns (oldest first), the target
// response being classified, and the gold label when known.
struct DialogueRecord {
    std::string id;
    Source source = Source::Twitter;
    std::vector<std::string> context;
    std::string response;
    std::optional<Label> label;
};

struct Corpus {
    std::vector<DialogueRecord> records;
    Source source = Source::Twitter;
    SplitTag split_tag = SplitTag::Unsplit;

    bool fully_labeled() const;
};

struct CorpusStats {
    std::size_t record_count = 0;
    double avg_contexts_per_record = 0.0;
    std::map<Label, std::size_t> label_counts;
};

// Loads a JSONL corpus file: one object per line with keys "label"
// (optional), "response", "context" (array of strings, oldest first) and
// optionally "id". Records without an id get "<source>-<line>".
Corpus load_corpus(const std::string& path, Source source);

// Writes the same JSONL format load_corpus reads.
void write_corpus(const Corpus& corpus, const std::string& path);

CorpusStats compute_stats(const Corpus& corpus);

// Unordered train/test context-depth mismatch: max(avg_a, avg_b) divided
// by min(avg_a, avg_b). Always >= 1; callers report which side is larger.
double mismatch_ratio(const CorpusStats& a, const CorpusStats& b);

// Deterministic shuffled split. Indices are shuffled by Rng(seed)
// (Fisher-Yates over mt19937_64), the first floor(ratio * n) shuffled
// indices form the training portion, and each portion keeps the original
// corpus order. Requires a fully labeled, non-empty corpus.
std::pair<Corpus, Corpus> train_val_split(const Corpus& corpus, double ratio,
                                          std::uint64_t seed);

// Minimal tweet normalization: URLs -> "URL", @mentions -> "@USER".
// Off by default; applied at load time when requested.
std::string normalize_tweet(const std::string& text);
Corpus load_corpus(const std::string& path, Source source, bool normalize);

}  // namespace convsarc
