#pragma once

// Closed-loop correction run shared by unit and acceptance tests. Truth
// sentences are corrupted by the stub recognizer, corrected with a bigram
// scorer trained on the truth, then checked against an independently
// computed recoverable set.

#include <set>

#include "estr/context_scorer.hpp"
#include "estr/corrector.hpp"
#include "estr/glyph_database.hpp"
#include "estr/pipeline/stub_recognizer.hpp"
#include "estr/pipeline/synthetic.hpp"
#include "oracles.hpp"

namespace oracle {

struct ClosedLoopResult {
  std::size_t substituted = 0;
  std::size_t recoverable = 0;
  std::size_t recovered = 0;           // recoverable slots restored to the truth
  std::size_t non_candidate_changes = 0;
  std::size_t clean_changes = 0;       // uncorrupted candidate slots altered
  double bleu1_before = 0.0;
  double bleu1_after = 0.0;
};

inline ClosedLoopResult run_closed_loop(std::size_t n, double rate, std::uint64_t seed) {
  const auto corpus = estr::pipeline::make_confusable_corpus(n, seed);
  const auto db = estr::GlyphDatabase::load(corpus.glyph_tsv);
  const auto scorer = estr::BigramScorer::train(corpus.sentences);
  const BigramCounts counts(corpus.sentences);

  std::map<std::string, const std::vector<std::string>*> group_of;
  for (const auto& g : corpus.groups) {
    for (const auto& m : g) group_of[m] = &g;
  }

  ClosedLoopResult r;
  std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> ob, oa;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string& truth = corpus.sentences[i];
    const auto noisy = estr::pipeline::inject_noise(truth, db, rate, seed, "s" + std::to_string(i));
    const auto fixed = estr::correct(noisy.text, db, scorer, 0.0);
    r.substituted += noisy.substituted.size();

    const auto t = content_units(truth), o = content_units(noisy.text), c = content_units(fixed.corrected);
    for (std::size_t j = 0; j < t.size(); ++j) {
      const auto g = group_of.find(o[j]);
      if (g == group_of.end()) {
        r.non_candidate_changes += c[j] != o[j];
        continue;
      }
      if (o[j] == t[j]) {
        r.clean_changes += c[j] != o[j];
        continue;
      }
      // Recoverable: the truth is a candidate of the observed unit and
      // strictly beats the observed unit and every other candidate.
      const auto& members = *g->second;
      if (std::find(members.begin(), members.end(), t[j]) == members.end()) continue;
      auto with = [&](const std::string& u) {
        auto v = o;
        v[j] = u;
        return counts.logp(v);
      };
      const double truth_score = with(t[j]);
      bool preferred = truth_score > with(o[j]);
      for (const auto& m : members) {
        if (m != t[j] && m != o[j]) preferred = preferred && truth_score > with(m);
      }
      if (!preferred) continue;
      ++r.recoverable;
      r.recovered += c[j] == t[j];
    }
    ob.push_back({o, t});
    oa.push_back({c, t});
  }
  r.bleu1_before = bleu_of(ob).bleu[0];
  r.bleu1_after = bleu_of(oa).bleu[0];
  return r;
}

}  // namespace oracle
