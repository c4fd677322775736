#include "estr/tokenizer.hpp"

#include "estr/utf8.hpp"

namespace estr {

std::string TokenizedText::reconstruct() const {
  std::string out;
  for (const Token& t : tokens) out += t.surface;
  return out;
}

TokenizedText tokenize(std::string_view text) {
  TokenizedText out;
  const auto cps = utf8::decode(text);
  const auto kind_of = [](char32_t cp) {
    if (utf8::is_ascii_letter(cp)) return TokenKind::ascii_word;
    if (utf8::is_cjk_ideograph(cp)) return TokenKind::cjk_char;
    return TokenKind::other;
  };
  std::size_t i = 0;
  while (i < cps.size()) {
    const TokenKind kind = kind_of(cps[i].value);
    std::size_t j = i + 1;
    if (kind != TokenKind::cjk_char) {
      while (j < cps.size() && kind_of(cps[j].value) == kind) ++j;
    }
    const std::size_t begin = cps[i].offset;
    const std::size_t end = cps[j - 1].offset + cps[j - 1].length;
    out.tokens.push_back({kind, std::string(text.substr(begin, end - begin)), begin, end - begin});
    i = j;
  }
  return out;
}

}  // namespace estr
