#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace faitheval {

using TokenId = std::uint32_t;

// An input text as vocabulary indices, in reading order.
struct TokenSequence {
    std::vector<TokenId> tokens;

    TokenSequence() = default;
    TokenSequence(std::initializer_list<TokenId> ids) : tokens(ids) {}
    explicit TokenSequence(std::vector<TokenId> ids) : tokens(std::move(ids)) {}

    std::size_t length() const { return tokens.size(); }
    bool empty() const { return tokens.empty(); }

    bool operator==(const TokenSequence&) const = default;
};

// One model input together with the model's cached output for it. The
// predicted class and probabilities are computed once and reused by every
// metric, so deleting tokens never recomputes the original prediction.
struct ClassificationInstance {
    TokenSequence input;
    std::size_t gold_label = 0;
    std::size_t predicted_class = 0;
    std::vector<double> predicted_probs;

    std::size_t length() const { return input.length(); }
    double predicted_prob() const { return predicted_probs[predicted_class]; }
};

// Per-token importance scores, aligned with the instance's token positions.
struct Interpretation {
    std::vector<double> scores;

    Interpretation() = default;
    Interpretation(std::initializer_list<double> s) : scores(s) {}
    explicit Interpretation(std::vector<double> s) : scores(std::move(s)) {}

    std::size_t size() const { return scores.size(); }

    bool operator==(const Interpretation&) const = default;
};

// Two interpretations of the same instance, compared for relative
// faithfulness. `faithful` is the method-generated side, `unfaithful` the
// random side.
struct InterpretationPair {
    ClassificationInstance instance;
    Interpretation faithful;
    Interpretation unfaithful;
};

// Token positions ordered most-important-first. Scores along `order` are
// non-increasing; equal scores keep their original relative position.
struct ImportanceRanking {
    std::vector<std::size_t> order;

    std::size_t size() const { return order.size(); }

    bool operator==(const ImportanceRanking&) const = default;
};

inline ImportanceRanking rank_tokens(const Interpretation& interpretation) {
    if (interpretation.scores.empty()) {
        throw std::invalid_argument("empty interpretation");
    }
    ImportanceRanking ranking;
    ranking.order.resize(interpretation.size());
    std::iota(ranking.order.begin(), ranking.order.end(), std::size_t{0});
    std::sort(ranking.order.begin(), ranking.order.end(),
              [&](std::size_t a, std::size_t b) {
                  if (interpretation.scores[a] != interpretation.scores[b]) {
                      return interpretation.scores[a] > interpretation.scores[b];
                  }
                  return a < b;
              });
    return ranking;
}

// Deletes the tokens at `positions`; the survivors keep their order. The
// result really shrinks (no mask token is substituted).
inline TokenSequence remove_tokens(const TokenSequence& seq,
                                   const std::vector<std::size_t>& positions) {
    std::vector<bool> removed(seq.length(), false);
    for (std::size_t p : positions) {
        if (p >= seq.length()) throw std::out_of_range("remove_tokens: position out of range");
        removed[p] = true;
    }
    TokenSequence out;
    out.tokens.reserve(seq.length());
    for (std::size_t i = 0; i < seq.length(); ++i) {
        if (!removed[i]) out.tokens.push_back(seq.tokens[i]);
    }
    return out;
}

// Deletes the top-k ranked tokens.
inline TokenSequence remove_top_k(const TokenSequence& seq,
                                  const ImportanceRanking& ranking, std::size_t k) {
    if (k > ranking.size()) throw std::out_of_range("remove_top_k: k out of range");
    return remove_tokens(seq, {ranking.order.begin(), ranking.order.begin() + static_cast<std::ptrdiff_t>(k)});
}

// Keeps only the top-k ranked tokens, in their original relative order.
inline TokenSequence retain_tokens(const TokenSequence& seq,
                                   const ImportanceRanking& ranking, std::size_t k) {
    if (k < 1 || k > seq.length() || ranking.size() != seq.length()) {
        throw std::out_of_range("retain_tokens: k out of range");
    }
    std::vector<bool> keep(seq.length(), false);
    for (std::size_t i = 0; i < k; ++i) keep[ranking.order[i]] = true;
    TokenSequence out;
    out.tokens.reserve(k);
    for (std::size_t i = 0; i < seq.length(); ++i) {
        if (keep[i]) out.tokens.push_back(seq.tokens[i]);
    }
    return out;
}

// Number of tokens covered by "top q%": round half away from zero, clamped
// to at least one token so retention is defined for short inputs.
inline std::size_t top_k_count(std::size_t token_count, double q_percent) {
    if (token_count == 0) throw std::invalid_argument("top_k_count: empty sequence");
    if (q_percent <= 0.0 || q_percent > 100.0) {
        throw std::invalid_argument("top_k_count: q must be in (0, 100]");
    }
    const auto k = static_cast<std::size_t>(std::llround(q_percent * static_cast<double>(token_count) / 100.0));
    return std::max<std::size_t>(1, std::min(k, token_count));
}

}  // namespace faitheval
