#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "convsarc/corpus.hpp"
#include "convsarc/hyperparams.hpp"
#include "convsarc/tokenizer.hpp"

namespace convsarc {

enum class InputMode { ResponseOnly, ContextResponse, ContextResponseSeparated };

// Exact strings accepted wherever modes are configured.
std::string to_string(InputMode m);
InputMode mode_from_string(const std::string& s);

// Token-level input ready for the encoder. token_ids is padded to exactly
// `budget` entries; attention_mask is 1 on real tokens and 0 on the
// padding suffix.
struct EncodedInput {
    std::vector<TokenId> token_ids;
    std::vector<int> attention_mask;
    InputMode mode = InputMode::ResponseOnly;
    int budget = 0;

    std::size_t real_length() const;
};

// The final min(k, |context|) turns, original order. k defaults to 2: the
// last two turns are the context fed to the context modes.
std::vector<std::string> select_context(const DialogueRecord& record, int k = 2);

// Fits context + response into `budget - overhead` token slots. Context
// tokens are dropped from the front (oldest first) before any response
// token; an over-long response is tail-truncated but never emptied while
// at least one slot remains.
std::pair<std::vector<TokenId>, std::vector<TokenId>> truncate_to_budget(
    std::vector<TokenId> context_tokens, std::vector<TokenId> response_tokens,
    int overhead, int budget);

// Layouts by mode (before padding to budget):
//   response-only:               [BOS] response [EOS]
//   context_response:            [BOS] ctx-turns response [EOS]
//   context_response_separated:  [BOS] ctx-turns [SEP] response [EOS]
// Context turns are joined by a single space. An empty context collapses
// both context modes to the response-only layout; the separator is also
// dropped if truncation removes every context token.
EncodedInput build_input(const DialogueRecord& record, InputMode mode,
                         const TokenizerHandle& tokenizer, int budget,
                         int context_turns = 2);

struct DatasetEntry {
    EncodedInput input;
    std::optional<int> label;  // encode_label value when the record is labeled
    std::string record_id;
};

using EncodedDataset = std::vector<DatasetEntry>;

// One entry per record in corpus order. Budget comes from hp by mode:
// response-only uses max_seq_len_response, the context modes use
// max_seq_len_context.
EncodedDataset build_dataset(const Corpus& corpus, InputMode mode,
                             const TokenizerHandle& tokenizer,
                             const Hyperparams& hp, int context_turns = 2);

}  // namespace convsarc
