#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "estr/pipeline/records.hpp"

namespace estr::pipeline {

// Glyph database holding the confusable sets quoted for the original model
// (the prompt example's characters and words, plus 枫/苍/吹/cap/deed).
std::string reference_glyph_tsv();

// Ground-truth sentences over confusable groups. Every group member lists
// the rest of its group as candidates, so any injected swap can be undone.
// Sentences alternate non-confusable anchor characters with group members;
// each anchor is followed by a fixed member, which gives a bigram model
// trained on the sentences clear context.
struct ConfusableCorpus {
  std::string glyph_tsv;
  std::vector<std::string> sentences;
  std::vector<std::string> anchors;
  std::vector<std::vector<std::string>> groups;
};

ConfusableCorpus make_confusable_corpus(std::size_t n_sentences, std::uint64_t seed);

struct FixtureDataset {
  std::string manifest_path;
  std::string glyph_path;
  std::string corpus_path;
};

// Writes a desk-scale dataset under dir: simulated evs1 recordings of
// rendered sentences, manifest.jsonl, glyphs.tsv and corpus.txt.
FixtureDataset write_fixture_dataset(const std::string& dir, std::size_t n_records, std::uint64_t seed);

}  // namespace estr::pipeline
