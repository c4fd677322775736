#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "estr/tokenizer.hpp"

namespace estr {

// Scores a sequence of content tokens (CJK chars and ASCII words; 'other'
// runs are not part of the sequence).
class ContextScorer {
 public:
  virtual ~ContextScorer() = default;
  virtual double log_probability(const std::vector<std::string>& content) const = 0;
};

// Token bigram model with add-one smoothing, begin/end sentinels and a single
// unknown bucket. ASCII words are lowercased before lookup.
//
//   p(w | h) = (c(h, w) + 1) / (c(h) + V)
//
// where V counts every predictable type: corpus tokens, </s> and <unk>.
// <s> only ever appears as history.
class BigramScorer final : public ContextScorer {
 public:
  static constexpr std::string_view kBegin = "<s>";
  static constexpr std::string_view kEnd = "</s>";
  static constexpr std::string_view kUnknown = "<unk>";

  // Throws estr::Error for an empty corpus.
  static BigramScorer train(const std::vector<std::string>& corpus);
  static BigramScorer train_file(const std::string& path);

  double log_probability(const std::vector<std::string>& content) const override;

  // Conditional probability by surface form; unseen forms map to <unk>.
  double probability(std::string_view history, std::string_view word) const;

  // Every type including <s>, </s> and <unk>.
  const std::vector<std::string>& vocabulary() const { return vocab_; }
  std::size_t predictable_size() const { return vocab_.size() - 1; }

 private:
  std::uint32_t id_of(std::string_view token) const;
  double prob_ids(std::uint32_t h, std::uint32_t w) const;

  std::vector<std::string> vocab_;
  std::unordered_map<std::string, std::uint32_t> ids_;
  std::unordered_map<std::uint64_t, std::uint64_t> bigrams_;
  std::vector<std::uint64_t> history_counts_;
};

// Normalized content tokens of a tokenized text, as the scorer sees them.
std::vector<std::string> content_tokens(const TokenizedText& text);

// Log-probability of the token sequence with tokens[position] replaced.
double score_context(const TokenizedText& tokens, std::size_t position, std::string_view replacement,
                     const ContextScorer& scorer);

}  // namespace estr
