#include "convsarc/tokenizer.hpp"

#include <cctype>

#include "convsarc/errors.hpp"

namespace convsarc {

namespace {

constexpr std::size_t kNumSpecialTokens = 4;  // pad, bos, eos, sep

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace

HashTokenizer::HashTokenizer(std::size_t vocab_size) : vocab_size_(vocab_size) {
    if (vocab_size_ <= kNumSpecialTokens) {
        throw ConfigError("tokenizer vocabulary must exceed the special tokens");
    }
}

std::vector<std::string> HashTokenizer::split_pieces(const std::string& text) {
    std::vector<std::string> pieces;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) {
            pieces.push_back(current);
            current.clear();
        }
    };
    for (unsigned char c : text) {
        if (std::isspace(c)) {
            flush();
        } else if (std::ispunct(c)) {
            flush();
            pieces.emplace_back(1, static_cast<char>(c));
        } else {
            current.push_back(static_cast<char>(c));
        }
    }
    flush();
    return pieces;
}

TokenId HashTokenizer::bucket(const std::string& piece) const {
    std::uint64_t h = fnv1a(piece);
    return static_cast<TokenId>(kNumSpecialTokens +
                                h % (vocab_size_ - kNumSpecialTokens));
}

std::vector<TokenId> HashTokenizer::encode(const std::string& text) const {
    std::vector<TokenId> ids;
    for (const auto& piece : split_pieces(text)) {
        TokenId id = bucket(piece);
        ids.push_back(id);
        std::lock_guard<std::mutex> lock(memo_mutex_);
        memo_.emplace(id, piece);
    }
    return ids;
}

std::string HashTokenizer::decode(const std::vector<TokenId>& ids) const {
    std::string out;
    std::lock_guard<std::mutex> lock(memo_mutex_);
    for (TokenId id : ids) {
        std::string piece;
        if (id == pad_id()) {
            continue;
        } else if (id == bos_id()) {
            piece = "<s>";
        } else if (id == eos_id()) {
            piece = "</s>";
        } else if (id == sep_id()) {
            piece = "<sep>";
        } else if (auto it = memo_.find(id); it != memo_.end()) {
            piece = it->second;
        } else {
            piece = "<unk-" + std::to_string(id) + ">";
        }
        if (!out.empty()) out += ' ';
        out += piece;
    }
    return out;
}

std::shared_ptr<TokenizerHandle> make_tokenizer(std::size_t vocab_size) {
    return std::make_shared<HashTokenizer>(vocab_size);
}

}  // namespace convsarc
