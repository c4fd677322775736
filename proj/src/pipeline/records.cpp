#include "estr/pipeline/records.hpp"

#include <filesystem>
#include <fstream>
#include <iterator>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "estr/error.hpp"

namespace estr::pipeline {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename Fn>
void for_each_json_line(const std::string& text, const std::string& source, Fn&& fn) {
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(source + " line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!j.is_object()) throw Error(source + " line " + std::to_string(line_no) + ": expected a JSON object");
    fn(j, line_no);
  }
}

std::string string_field(const json& j, const std::string& key, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_string()) throw Error(where + ": missing string field \"" + key + "\"");
  return it->get<std::string>();
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << content;
  if (!out) throw Error("write failed for " + path);
}

std::vector<TextRecord> parse_text_records(const std::string& jsonl, const std::string& field) {
  std::vector<TextRecord> out;
  std::unordered_set<std::string> ids;
  for_each_json_line(jsonl, "records", [&](const json& j, std::size_t line) {
    const std::string where = "records line " + std::to_string(line);
    TextRecord r{string_field(j, "id", where), string_field(j, field, where)};
    if (!ids.insert(r.id).second) throw Error(where + ": duplicate id '" + r.id + "'");
    out.push_back(std::move(r));
  });
  return out;
}

std::vector<TextRecord> read_text_records(const std::string& path, const std::string& field) {
  return parse_text_records(read_text_file(path), field);
}

std::string format_text_records(const std::vector<TextRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["text"] = r.text;
    out += j.dump() + "\n";
  }
  return out;
}

void write_text_records(const std::string& path, const std::vector<TextRecord>& records) {
  write_text_file(path, format_text_records(records));
}

DatasetManifest load_manifest(const std::string& path) {
  DatasetManifest m;
  m.base_dir = fs::path(path).parent_path().string();
  std::unordered_set<std::string> ids;
  for_each_json_line(read_text_file(path), path, [&](const json& j, std::size_t line) {
    const std::string where = path + " line " + std::to_string(line);
    ManifestRecord r{string_field(j, "id", where), string_field(j, "events", where), string_field(j, "label", where)};
    if (!ids.insert(r.id).second) throw Error(where + ": duplicate id '" + r.id + "'");
    fs::path p(r.events);
    if (p.is_relative()) p = fs::path(m.base_dir) / p;
    if (!fs::exists(p)) throw Error(where + ": events file not found: " + p.string());
    r.events = p.string();
    m.records.push_back(std::move(r));
  });
  return m;
}

void write_manifest(const std::string& path, const DatasetManifest& manifest) {
  std::string out;
  for (const auto& r : manifest.records) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["events"] = r.events;
    j["label"] = r.label;
    out += j.dump() + "\n";
  }
  write_text_file(path, out);
}

std::vector<std::pair<std::string, std::string>> join_by_id(const std::vector<TextRecord>& predictions,
                                                            const std::vector<TextRecord>& references) {
  std::unordered_map<std::string, const std::string*> by_id;
  for (const auto& p : predictions) by_id.emplace(p.id, &p.text);
  std::vector<std::pair<std::string, std::string>> out;
  out.reserve(references.size());
  for (const auto& r : references) {
    const auto it = by_id.find(r.id);
    if (it == by_id.end()) throw Error("no prediction for id '" + r.id + "'");
    out.emplace_back(*it->second, r.text);
  }
  if (predictions.size() != references.size()) throw Error("predictions contain ids missing from the references");
  return out;
}

}  // namespace estr::pipeline
