#include "estr/context_scorer.hpp"

#include <cmath>
#include <fstream>

#include "estr/error.hpp"
#include "estr/utf8.hpp"

namespace estr {
namespace {

constexpr std::uint32_t kBeginId = 0;
constexpr std::uint32_t kEndId = 1;
constexpr std::uint32_t kUnknownId = 2;

std::uint64_t pair_key(std::uint32_t h, std::uint32_t w) { return (static_cast<std::uint64_t>(h) << 32) | w; }

std::string normalize(const Token& t) {
  return t.kind == TokenKind::ascii_word ? utf8::ascii_lower(t.surface) : t.surface;
}

}  // namespace

BigramScorer BigramScorer::train(const std::vector<std::string>& corpus) {
  if (corpus.empty()) throw Error("train_scorer: corpus is empty");
  BigramScorer s;
  for (std::string_view special : {kBegin, kEnd, kUnknown}) {
    s.ids_.emplace(std::string(special), static_cast<std::uint32_t>(s.vocab_.size()));
    s.vocab_.emplace_back(special);
  }
  for (const std::string& line : corpus) {
    std::uint32_t prev = kBeginId;
    const auto count = [&](std::uint32_t w) {
      ++s.bigrams_[pair_key(prev, w)];
      if (prev >= s.history_counts_.size()) s.history_counts_.resize(prev + 1, 0);
      ++s.history_counts_[prev];
      prev = w;
    };
    for (const std::string& tok : content_tokens(tokenize(line))) {
      auto [it, inserted] = s.ids_.emplace(tok, static_cast<std::uint32_t>(s.vocab_.size()));
      if (inserted) s.vocab_.push_back(tok);
      count(it->second);
    }
    count(kEndId);
  }
  s.history_counts_.resize(s.vocab_.size(), 0);
  return s;
}

BigramScorer BigramScorer::train_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return train(lines);
}

std::uint32_t BigramScorer::id_of(std::string_view token) const {
  const auto it = ids_.find(std::string(token));
  if (it == ids_.end() || it->second == kBeginId) return kUnknownId;
  return it->second;
}

double BigramScorer::prob_ids(std::uint32_t h, std::uint32_t w) const {
  const auto it = bigrams_.find(pair_key(h, w));
  const double pair = it == bigrams_.end() ? 0.0 : static_cast<double>(it->second);
  return (pair + 1.0) / (static_cast<double>(history_counts_[h]) + static_cast<double>(predictable_size()));
}

double BigramScorer::probability(std::string_view history, std::string_view word) const {
  const std::uint32_t h = history == kBegin ? kBeginId : id_of(utf8::ascii_lower(history));
  return prob_ids(h, id_of(utf8::ascii_lower(word)));
}

double BigramScorer::log_probability(const std::vector<std::string>& content) const {
  double total = 0.0;
  std::uint32_t prev = kBeginId;
  for (const std::string& tok : content) {
    const std::uint32_t w = id_of(tok);
    total += std::log(prob_ids(prev, w));
    prev = w;
  }
  return total + std::log(prob_ids(prev, kEndId));
}

std::vector<std::string> content_tokens(const TokenizedText& text) {
  std::vector<std::string> out;
  for (const Token& t : text.tokens) {
    if (is_content(t)) out.push_back(normalize(t));
  }
  return out;
}

double score_context(const TokenizedText& tokens, std::size_t position, std::string_view replacement,
                     const ContextScorer& scorer) {
  if (position >= tokens.tokens.size()) throw Error("score_context: position out of range");
  TokenizedText changed = tokens;
  Token& slot = changed.tokens[position];
  slot.surface = std::string(replacement);
  // Keep the replacement in the content sequence even if the slot was 'other'.
  const auto retyped = tokenize(replacement).tokens;
  if (retyped.size() == 1) slot.kind = retyped[0].kind;
  return scorer.log_probability(content_tokens(changed));
}

}  // namespace estr
