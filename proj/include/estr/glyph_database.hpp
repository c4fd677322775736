#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "estr/tokenizer.hpp"

namespace estr {

// Best candidate-count setting of the database size ablation.
inline constexpr std::size_t kDefaultMaxCandidates = 10;

// Token -> ordered list of visually confusable alternatives. ASCII word keys
// are stored lowercase; candidates keep their file spelling.
class GlyphDatabase {
 public:
  GlyphDatabase() = default;

  // One entry per line: key TAB comma-separated candidates; blank lines and
  // lines starting with # are skipped. Lists longer than max_candidates are
  // truncated; max_candidates = 0 yields an empty database. Throws estr::Error naming the 1-based line.
  static GlyphDatabase load(std::string_view text, std::size_t max_candidates = kDefaultMaxCandidates);
  static GlyphDatabase load_file(const std::string& path, std::size_t max_candidates = kDefaultMaxCandidates);

  // Empty span when absent. Word lookup is case-insensitive.
  const std::vector<std::string>& candidates(std::string_view token) const;

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::size_t max_candidates() const { return max_candidates_; }

 private:
  std::unordered_map<std::string, std::vector<std::string>> entries_;
  std::size_t max_candidates_ = kDefaultMaxCandidates;
};

struct TokenCandidates {
  Token token;
  std::vector<std::string> candidates;
};

// One entry per token; 'other' tokens always get an empty list.
std::vector<TokenCandidates> retrieve_candidates(std::string_view text, const GlyphDatabase& db);

// Unique candidates in first-occurrence order across tokens.
std::vector<std::string> flatten_candidates(const std::vector<TokenCandidates>& per_token);

}  // namespace estr
