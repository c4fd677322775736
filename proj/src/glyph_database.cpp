#include "estr/glyph_database.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <unordered_set>

#include "estr/error.hpp"
#include "estr/utf8.hpp"

namespace estr {
namespace {

std::string lookup_key(std::string_view token) {
  const bool word = !token.empty() && std::all_of(token.begin(), token.end(), [](char c) {
    return utf8::is_ascii_letter(static_cast<unsigned char>(c));
  });
  return word ? utf8::ascii_lower(token) : std::string(token);
}

Error line_error(std::size_t line, const std::string& what) {
  return Error("glyph database line " + std::to_string(line) + ": " + what);
}

}  // namespace

GlyphDatabase GlyphDatabase::load(std::string_view text, std::size_t max_candidates) {
  if (!utf8::is_valid(text)) throw Error("glyph database is not valid UTF-8");
  GlyphDatabase db;
  db.max_candidates_ = max_candidates;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;

    const std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos) throw line_error(line_no, "missing TAB separator");
    const std::string_view raw_key = line.substr(0, tab);
    const std::string_view rest = line.substr(tab + 1);
    if (raw_key.empty()) throw line_error(line_no, "empty key");
    if (rest.find('\t') != std::string_view::npos) throw line_error(line_no, "more than one TAB");

    const auto key_tokens = tokenize(raw_key).tokens;
    if (key_tokens.size() != 1 || !is_content(key_tokens[0])) {
      throw line_error(line_no, "key must be one CJK character or one ASCII word");
    }
    const std::string key = lookup_key(raw_key);
    std::vector<std::string> list;
    std::unordered_set<std::string> seen;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = rest.find(',', start);
      const std::string_view item =
          rest.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      if (item.empty()) throw line_error(line_no, "empty candidate");
      if (lookup_key(item) == key) throw line_error(line_no, "key '" + key + "' listed among its own candidates");
      if (!seen.insert(std::string(item)).second) throw line_error(line_no, "duplicate candidate '" + std::string(item) + "'");
      list.emplace_back(item);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (db.entries_.count(key) != 0) throw line_error(line_no, "duplicate key '" + key + "'");
    if (list.size() > max_candidates) list.resize(max_candidates);
    // Lists capped to nothing stay until the end so duplicates are still caught.
    db.entries_.emplace(key, std::move(list));
  }
  std::erase_if(db.entries_, [](const auto& kv) { return kv.second.empty(); });
  return db;
}

GlyphDatabase GlyphDatabase::load_file(const std::string& path, std::size_t max_candidates) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return load(text, max_candidates);
}

const std::vector<std::string>& GlyphDatabase::candidates(std::string_view token) const {
  static const std::vector<std::string> kNone;
  const auto it = entries_.find(lookup_key(token));
  return it == entries_.end() ? kNone : it->second;
}

std::vector<TokenCandidates> retrieve_candidates(std::string_view text, const GlyphDatabase& db) {
  std::vector<TokenCandidates> out;
  for (Token& tok : tokenize(text).tokens) {
    TokenCandidates tc{std::move(tok), {}};
    if (is_content(tc.token)) tc.candidates = db.candidates(tc.token.surface);
    out.push_back(std::move(tc));
  }
  return out;
}

std::vector<std::string> flatten_candidates(const std::vector<TokenCandidates>& per_token) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& tc : per_token) {
    for (const auto& c : tc.candidates) {
      if (seen.insert(c).second) out.push_back(c);
    }
  }
  return out;
}

}  // namespace estr
