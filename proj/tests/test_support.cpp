#include "test_support.hpp"

#include <atomic>
#include <filesystem>
#include <iterator>

#include <unistd.h>

namespace convsarc::testing {

namespace fs = std::filesystem;

std::string make_temp_dir(const std::string& hint) {
    static std::atomic<unsigned> counter{0};
    fs::path dir = fs::temp_directory_path() /
                   ("convsarc_" + hint + "_" + std::to_string(::getpid()) + "_" +
                    std::to_string(counter++));
    fs::create_directories(dir);
    return dir.string();
}

namespace {

const char* kWords[] = {"the",  "game",   "was",   "great",  "sure",   "right",
                        "oh",   "really", "nice",  "went",   "totally", "fine",
                        "rain", "again",  "love",  "mondays", "exam",  "score",
                        "wow",  "helpful", "thanks", "a",     "lot",   "crowd"};
const char* kUnicode[] = {"caf\xc3\xa9", "na\xc3\xafve", "\xe2\x98\x83", "\xc3\xbcber"};

std::string random_turn(Rng& rng, int max_words) {
    int n = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(max_words)));
    std::string out;
    for (int i = 0; i < n; ++i) {
        if (!out.empty()) out += ' ';
        if (rng.next_below(12) == 0) {
            out += kUnicode[rng.next_below(std::size(kUnicode))];
        } else {
            out += kWords[rng.next_below(std::size(kWords))];
        }
    }
    return out;
}

}  // namespace

DialogueRecord random_record(Rng& rng, const std::string& id, Source source,
                             int max_depth, int max_turn_words, bool labeled) {
    DialogueRecord rec;
    rec.id = id;
    rec.source = source;
    int depth = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(max_depth + 1)));
    for (int i = 0; i < depth; ++i) rec.context.push_back(random_turn(rng, max_turn_words));
    rec.response = random_turn(rng, max_turn_words);
    if (labeled) {
        rec.label = rng.next_below(2) == 1 ? Label::Sarcasm : Label::NotSarcasm;
    }
    return rec;
}

Corpus random_corpus(Rng& rng, std::size_t n, Source source, bool labeled,
                     int max_depth, int max_turn_words) {
    Corpus corpus;
    corpus.source = source;
    for (std::size_t i = 0; i < n; ++i) {
        corpus.records.push_back(random_record(rng, to_string(source) + "-" +
                                                        std::to_string(i + 1),
                                               source, max_depth, max_turn_words,
                                               labeled));
    }
    return corpus;
}

Corpus separable_corpus(std::size_t n, Source source) {
    Corpus corpus;
    corpus.source = source;
    Rng rng(1234);
    for (std::size_t i = 0; i < n; ++i) {
        DialogueRecord rec;
        rec.id = to_string(source) + "-" + std::to_string(i + 1);
        rec.source = source;
        rec.context.push_back("previous turn " + std::to_string(rng.next_below(5)));
        bool sarcastic = i % 2 == 0;
        if (sarcastic) {
            rec.response = "zorp gleeb oh sure that went perfectly " +
                           std::to_string(rng.next_below(4));
            rec.label = Label::Sarcasm;
        } else {
            rec.response = "the meeting starts at nine " +
                           std::to_string(rng.next_below(4));
            rec.label = Label::NotSarcasm;
        }
        corpus.records.push_back(std::move(rec));
    }
    return corpus;
}

Corpus corpus_with_context_lengths(const std::vector<int>& lengths, Source source) {
    Corpus corpus;
    corpus.source = source;
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        DialogueRecord rec;
        rec.id = to_string(source) + "-" + std::to_string(i + 1);
        rec.source = source;
        for (int c = 0; c < lengths[i]; ++c) {
            rec.context.push_back("turn " + std::to_string(c));
        }
        rec.response = "response " + std::to_string(i);
        rec.label = i % 2 == 0 ? Label::Sarcasm : Label::NotSarcasm;
        corpus.records.push_back(std::move(rec));
    }
    return corpus;
}

}  // namespace convsarc::testing
