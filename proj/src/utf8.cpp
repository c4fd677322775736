#include "estr/utf8.hpp"

#include "estr/error.hpp"
#include "estr/execution.hpp"

#ifdef ESTR_HAVE_OPENMP
#include <omp.h>
#endif

namespace estr {

int parallel_threads() {
#ifdef ESTR_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace estr

namespace estr::utf8 {
namespace {

// Returns the decoded code point and its length, or length 0 on error.
CodePoint decode_one(std::string_view text, std::size_t pos) {
  const auto byte = [&](std::size_t i) { return static_cast<unsigned char>(text[i]); };
  const unsigned char b0 = byte(pos);
  if (b0 < 0x80) return {b0, pos, 1};

  std::size_t len = 0;
  char32_t cp = 0;
  char32_t min = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
    min = 0x80;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
    min = 0x800;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
    min = 0x10000;
  } else {
    return {0, pos, 0};
  }
  if (pos + len > text.size()) return {0, pos, 0};
  for (std::size_t i = 1; i < len; ++i) {
    const unsigned char b = byte(pos + i);
    if ((b & 0xC0) != 0x80) return {0, pos, 0};
    cp = (cp << 6) | (b & 0x3F);
  }
  if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return {0, pos, 0};
  return {cp, pos, len};
}

}  // namespace

std::vector<CodePoint> decode(std::string_view text) {
  std::vector<CodePoint> out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    CodePoint cp = decode_one(text, pos);
    if (cp.length == 0) throw Error("invalid UTF-8 at byte " + std::to_string(pos));
    out.push_back(cp);
    pos += cp.length;
  }
  return out;
}

std::vector<CodePoint> decode_lenient(std::string_view text) {
  std::vector<CodePoint> out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    CodePoint cp = decode_one(text, pos);
    if (cp.length == 0) {
      ++pos;
      continue;
    }
    out.push_back(cp);
    pos += cp.length;
  }
  return out;
}

bool is_valid(std::string_view text) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    const CodePoint cp = decode_one(text, pos);
    if (cp.length == 0) return false;
    pos += cp.length;
  }
  return true;
}

std::string encode(char32_t cp) {
  std::string out;
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
  return out;
}

std::string encode(std::u32string_view cps) {
  std::string out;
  for (char32_t cp : cps) out += encode(cp);
  return out;
}

bool is_cjk_ideograph(char32_t cp) {
  return (cp >= 0x4E00 && cp <= 0x9FFF) ||    // main block
         (cp >= 0x3400 && cp <= 0x4DBF) ||    // ext A
         (cp >= 0x20000 && cp <= 0x2EBEF) ||  // ext B..F, I
         (cp >= 0x30000 && cp <= 0x323AF);    // ext G, H
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

}  // namespace estr::utf8
