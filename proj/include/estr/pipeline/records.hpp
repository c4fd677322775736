#pragma once

#include <string>
#include <vector>

namespace estr::pipeline {

// {"id", "text"} line of a prediction or label file.
struct TextRecord {
  std::string id;
  std::string text;
  friend bool operator==(const TextRecord&, const TextRecord&) = default;
};

struct ManifestRecord {
  std::string id;
  std::string events;  // resolved against the manifest directory
  std::string label;
};

struct DatasetManifest {
  std::vector<ManifestRecord> records;
  std::string base_dir;
};

// JSONL helpers. Blank lines are skipped; malformed lines throw estr::Error
// with the 1-based line number. Duplicate ids are rejected.
// field selects which string member becomes TextRecord::text, so the
// "corrected" column of correction output can be scored directly.
std::vector<TextRecord> parse_text_records(const std::string& jsonl, const std::string& field = "text");
std::vector<TextRecord> read_text_records(const std::string& path, const std::string& field = "text");
std::string format_text_records(const std::vector<TextRecord>& records);
void write_text_records(const std::string& path, const std::vector<TextRecord>& records);

// Relative event paths resolve against the manifest's directory; every
// referenced file must exist.
DatasetManifest load_manifest(const std::string& path);
void write_manifest(const std::string& path, const DatasetManifest& manifest);

// Pairs predictions with references by id, in reference order. Missing or
// extra ids throw estr::Error.
std::vector<std::pair<std::string, std::string>> join_by_id(const std::vector<TextRecord>& predictions,
                                                            const std::vector<TextRecord>& references);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace estr::pipeline
