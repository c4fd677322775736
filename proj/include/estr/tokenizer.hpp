#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace estr {

enum class TokenKind { cjk_char, ascii_word, other };

struct Token {
  TokenKind kind = TokenKind::other;
  std::string surface;
  std::size_t offset = 0;  // byte span in the source text
  std::size_t length = 0;

  friend bool operator==(const Token&, const Token&) = default;
};

struct TokenizedText {
  std::vector<Token> tokens;

  // Concatenation of all surfaces; equals the tokenized input.
  std::string reconstruct() const;
};

// Maximal ASCII-letter runs become words, each CJK ideograph its own token,
// and every other run of code points one 'other' token. Throws estr::Error
// on invalid UTF-8.
TokenizedText tokenize(std::string_view text);

inline bool is_content(const Token& t) { return t.kind != TokenKind::other; }

}  // namespace estr
