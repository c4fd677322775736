#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace estr::utf8 {

struct CodePoint {
  char32_t value;
  std::size_t offset;  // byte offset of the first code unit
  std::size_t length;  // 1..4
};

// Strict decoding: throws estr::Error on overlong forms, surrogates,
// truncated sequences and values above U+10FFFF.
std::vector<CodePoint> decode(std::string_view text);

// Lenient decoding: invalid bytes are skipped one at a time.
std::vector<CodePoint> decode_lenient(std::string_view text);

bool is_valid(std::string_view text);

std::string encode(char32_t cp);
std::string encode(std::u32string_view cps);

// CJK Unified Ideographs, the main block plus extensions A..H.
bool is_cjk_ideograph(char32_t cp);

inline bool is_ascii_letter(char32_t cp) { return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z'); }
inline bool is_ascii_digit(char32_t cp) { return cp >= '0' && cp <= '9'; }

std::string ascii_lower(std::string_view s);

}  // namespace estr::utf8
