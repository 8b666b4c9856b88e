#include "convsarc/input_builder.hpp"

#include <algorithm>

#include "convsarc/errors.hpp"

namespace convsarc {

std::string to_string(InputMode m) {
    switch (m) {
        case InputMode::ResponseOnly: return "response_only";
        case InputMode::ContextResponse: return "context_response";
        case InputMode::ContextResponseSeparated: return "context_response_separated";
    }
    return "response_only";
}

InputMode mode_from_string(const std::string& s) {
    if (s == "response_only") return InputMode::ResponseOnly;
    if (s == "context_response") return InputMode::ContextResponse;
    if (s == "context_response_separated") return InputMode::ContextResponseSeparated;
    throw ConfigError("unknown input mode: '" + s +
                      "' (expected response_only|context_response|"
                      "context_response_separated)");
}

std::size_t EncodedInput::real_length() const {
    std::size_t n = 0;
    for (int m : attention_mask) n += static_cast<std::size_t>(m);
    return n;
}

std::vector<std::string> select_context(const DialogueRecord& record, int k) {
    if (k < 1) throw DomainError("context turn count must be >= 1");
    const auto& ctx = record.context;
    std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(k), ctx.size());
    return {ctx.end() - static_cast<std::ptrdiff_t>(keep), ctx.end()};
}

std::pair<std::vector<TokenId>, std::vector<TokenId>> truncate_to_budget(
    std::vector<TokenId> context_tokens, std::vector<TokenId> response_tokens,
    int overhead, int budget) {
    if (budget <= overhead) {
        throw DomainError("budget must exceed framing-token overhead");
    }
    const std::size_t room = static_cast<std::size_t>(budget - overhead);
    if (response_tokens.size() > room) {
        response_tokens.resize(room);  // tail-truncate, keep >= 1 token
        context_tokens.clear();
        return {std::move(context_tokens), std::move(response_tokens)};
    }
    const std::size_t ctx_room = room - response_tokens.size();
    if (context_tokens.size() > ctx_room) {
        // drop oldest context tokens from the front
        context_tokens.erase(context_tokens.begin(),
                             context_tokens.end() - static_cast<std::ptrdiff_t>(ctx_room));
    }
    return {std::move(context_tokens), std::move(response_tokens)};
}

namespace {

std::string join_turns(const std::vector<std::string>& turns) {
    std::string joined;
    for (const auto& t : turns) {
        if (!joined.empty()) joined += ' ';
        joined += t;
    }
    return joined;
}

}  // namespace

EncodedInput build_input(const DialogueRecord& record, InputMode mode,
                         const TokenizerHandle& tokenizer, int budget,
                         int context_turns) {
    if (budget < 8) {
        throw DomainError("budget must be >= 8 (framing plus content)");
    }

    std::vector<TokenId> response_tokens = tokenizer.encode(record.response);
    if (response_tokens.empty()) {
        throw DataError("record '" + record.id + "' tokenizes to an empty response");
    }

    std::vector<TokenId> context_tokens;
    if (mode != InputMode::ResponseOnly) {
        context_tokens = tokenizer.encode(join_turns(select_context(record, context_turns)));
    }

    bool separated = mode == InputMode::ContextResponseSeparated && !context_tokens.empty();
    int overhead = separated ? 3 : 2;  // BOS + EOS, plus SEP when present
    auto [ctx, resp] = truncate_to_budget(context_tokens, response_tokens, overhead, budget);
    if (separated && ctx.empty()) {
        // truncation consumed the whole context; reclaim the separator slot for
        // the response by re-truncating from the untrimmed tokens
        separated = false;
        std::tie(ctx, resp) = truncate_to_budget({}, std::move(response_tokens), 2, budget);
    }

    EncodedInput out;
    out.mode = mode;
    out.budget = budget;
    out.token_ids.reserve(static_cast<std::size_t>(budget));
    out.token_ids.push_back(tokenizer.bos_id());
    out.token_ids.insert(out.token_ids.end(), ctx.begin(), ctx.end());
    if (separated) out.token_ids.push_back(tokenizer.sep_id());
    out.token_ids.insert(out.token_ids.end(), resp.begin(), resp.end());
    out.token_ids.push_back(tokenizer.eos_id());

    out.attention_mask.assign(out.token_ids.size(), 1);
    out.token_ids.resize(static_cast<std::size_t>(budget), tokenizer.pad_id());
    out.attention_mask.resize(static_cast<std::size_t>(budget), 0);
    return out;
}

EncodedDataset build_dataset(const Corpus& corpus, InputMode mode,
                             const TokenizerHandle& tokenizer,
                             const Hyperparams& hp, int context_turns) {
    hp.validate();
    int budget = mode == InputMode::ResponseOnly ? hp.max_seq_len_response
                                                 : hp.max_seq_len_context;
    EncodedDataset dataset;
    dataset.reserve(corpus.records.size());
    for (const auto& rec : corpus.records) {
        DatasetEntry entry;
        try {
            entry.input = build_input(rec, mode, tokenizer, budget, context_turns);
        } catch (const std::exception& e) {
            throw DataError("record '" + rec.id + "': " + e.what());
        }
        if (rec.label) entry.label = encode_label(*rec.label);
        entry.record_id = rec.id;
        dataset.push_back(std::move(entry));
    }
    return dataset;
}

}  // namespace convsarc
