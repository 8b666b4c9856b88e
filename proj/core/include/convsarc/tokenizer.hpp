#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

namespace convsarc {

using TokenId = std::int32_t;

// Tokenizer contract consumed by the input builder. Implementations must
// be safe to call concurrently for encoding.
class TokenizerHandle {
public:
    virtual ~TokenizerHandle() = default;

    virtual std::size_t vocabulary_size() const = 0;
    virtual TokenId bos_id() const = 0;
    virtual TokenId eos_id() const = 0;
    virtual TokenId sep_id() const = 0;
    virtual TokenId pad_id() const = 0;

    virtual std::vector<TokenId> encode(const std::string& text) const = 0;
    virtual std::string decode(const std::vector<TokenId>& ids) const = 0;
};

// Deterministic whitespace-plus-punctuation tokenizer with hash-bucketed
// ids. Words are split on whitespace; punctuation characters become their
// own tokens. Each word maps to a fixed bucket via FNV-1a, so encoding is
// reproducible across runs and platforms without a vocabulary file.
// decode() recovers the original words (up to whitespace normalization)
// through a memo populated on encode; never-encoded ids render as <unk-N>.
class HashTokenizer final : public TokenizerHandle {
public:
    explicit HashTokenizer(std::size_t vocab_size = 1000);

    std::size_t vocabulary_size() const override { return vocab_size_; }
    TokenId bos_id() const override { return 1; }
    TokenId eos_id() const override { return 2; }
    TokenId sep_id() const override { return 3; }
    TokenId pad_id() const override { return 0; }

    std::vector<TokenId> encode(const std::string& text) const override;
    std::string decode(const std::vector<TokenId>& ids) const override;

    // Splits text into word/punctuation pieces; exposed for tests.
    static std::vector<std::string> split_pieces(const std::string& text);

private:
    TokenId bucket(const std::string& piece) const;

    std::size_t vocab_size_;
    mutable std::mutex memo_mutex_;
    mutable std::unordered_map<TokenId, std::string> memo_;
};

std::shared_ptr<TokenizerHandle> make_tokenizer(std::size_t vocab_size);

}  // namespace convsarc
