#include "estr/pipeline/synthetic.hpp"

#include <filesystem>
#include <random>
#include <set>

#include "estr/error.hpp"
#include "estr/event_simulator.hpp"
#include "estr/utf8.hpp"

namespace estr::pipeline {
namespace fs = std::filesystem;

namespace {

const std::vector<std::vector<std::string>> kSeedGroups = {
    {"枫", "松", "柏", "柳", "杨"},
    {"苍", "沧", "抢", "枪"},
    {"吹", "炊", "饮", "欢"},
    {"cap", "map", "nap", "lap"},
    {"deed", "need", "seed", "reed"},
};

constexpr std::size_t kAnchorCount = 40;
constexpr char32_t kAnchorBase = 0x5000;
constexpr std::size_t kGeneratedGroups = 10;
constexpr std::size_t kGeneratedGroupSize = 4;
constexpr char32_t kGeneratedBase = 0x7100;

bool is_word(const std::string& s) { return utf8::is_ascii_letter(static_cast<unsigned char>(s[0])); }

std::size_t draw(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>((rng() >> 11) * 0x1.0p-53 * static_cast<double>(n));
}

}  // namespace

std::string reference_glyph_tsv() {
  return "三\t王,兰,主,丰,二\n"
         "只\t兄,口,叶,叮\n"
         "枫\t松,柏,柳,杨\n"
         "three\tTree,There\n"
         "squirrels\tSquire,Squires,Squills\n"
         "苍\t沧,抢,枪\n"
         "吹\t炊,饮,欢\n"
         "cap\tmap,nap,lap\n"
         "deed\tneed,seed,reed\n";
}

ConfusableCorpus make_confusable_corpus(std::size_t n_sentences, std::uint64_t seed) {
  ConfusableCorpus c;
  c.groups = kSeedGroups;
  for (std::size_t g = 0; g < kGeneratedGroups; ++g) {
    std::vector<std::string> group;
    for (std::size_t i = 0; i < kGeneratedGroupSize; ++i) {
      group.push_back(utf8::encode(kGeneratedBase + static_cast<char32_t>(g * kGeneratedGroupSize + i)));
    }
    c.groups.push_back(std::move(group));
  }
  std::set<std::string> members;
  for (const auto& g : c.groups) members.insert(g.begin(), g.end());
  for (std::size_t i = 0; i < kAnchorCount; ++i) {
    std::string a = utf8::encode(kAnchorBase + static_cast<char32_t>(i));
    if (members.count(a) != 0) throw Error("confusable corpus: anchor collides with a group member");
    c.anchors.push_back(std::move(a));
  }

  for (const auto& g : c.groups) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      c.glyph_tsv += g[i] + "\t";
      bool first = true;
      for (std::size_t j = 0; j < g.size(); ++j) {
        if (j == i) continue;
        c.glyph_tsv += (first ? "" : ",") + g[j];
        first = false;
      }
      c.glyph_tsv += "\n";
    }
  }

  std::mt19937_64 rng(seed);
  std::vector<std::string> all_members(members.begin(), members.end());
  std::vector<std::string> follower(kAnchorCount);
  for (auto& f : follower) f = all_members[draw(rng, all_members.size())];

  for (std::size_t s = 0; s < n_sentences; ++s) {
    const std::size_t slots = 2 + draw(rng, 4);
    std::size_t anchor = draw(rng, kAnchorCount);
    std::string sentence = c.anchors[anchor];
    for (std::size_t j = 0; j < slots; ++j) {
      const std::string& member = follower[anchor];
      sentence += is_word(member) ? " " + member + " " : member;
      anchor = draw(rng, kAnchorCount);
      sentence += c.anchors[anchor];
    }
    c.sentences.push_back(std::move(sentence));
  }
  return c;
}

FixtureDataset write_fixture_dataset(const std::string& dir, std::size_t n_records, std::uint64_t seed) {
  fs::create_directories(fs::path(dir) / "events");
  const ConfusableCorpus corpus = make_confusable_corpus(n_records, seed);
  FixtureDataset out;
  out.manifest_path = (fs::path(dir) / "manifest.jsonl").string();
  out.glyph_path = (fs::path(dir) / "glyphs.tsv").string();
  out.corpus_path = (fs::path(dir) / "corpus.txt").string();

  DatasetManifest manifest;
  manifest.base_dir = dir;
  std::string corpus_text;
  for (std::size_t i = 0; i < corpus.sentences.size(); ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "rec%05zu", i);
    const std::string rel = std::string("events/") + id + ".evs1";
    const EventStream stream = simulate(render_text_sequence(corpus.sentences[i], Motion::horizontal_shift, 4));
    write_events_file((fs::path(dir) / rel).string(), stream);
    manifest.records.push_back({id, rel, corpus.sentences[i]});
    corpus_text += corpus.sentences[i] + "\n";
  }
  write_manifest(out.manifest_path, manifest);
  write_text_file(out.glyph_path, corpus.glyph_tsv);
  write_text_file(out.corpus_path, corpus_text);
  return out;
}

}  // namespace estr::pipeline
