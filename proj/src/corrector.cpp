#include "estr/corrector.hpp"

#include <algorithm>

namespace estr {

std::size_t CorrectionReport::replacements() const {
  return static_cast<std::size_t>(
      std::count_if(decisions.begin(), decisions.end(), [](const TokenDecision& d) { return d.replaced(); }));
}

CorrectionReport correct(std::string_view text, const GlyphDatabase& db, const ContextScorer& scorer,
                         double margin) {
  CorrectionReport report;
  report.original = std::string(text);
  TokenizedText working = tokenize(text);

  for (std::size_t i = 0; i < working.tokens.size(); ++i) {
    const Token& tok = working.tokens[i];
    if (!is_content(tok)) continue;
    const auto& cands = db.candidates(tok.surface);
    if (cands.empty()) continue;

    TokenDecision d;
    d.position = i;
    d.surface = tok.surface;
    d.candidates = cands;
    d.chosen = tok.surface;
    d.original_score = score_context(working, i, tok.surface, scorer);
    double best = d.original_score;
    std::size_t best_idx = cands.size();
    for (std::size_t c = 0; c < cands.size(); ++c) {
      const double s = score_context(working, i, cands[c], scorer);
      d.candidate_scores.push_back(s);
      if (best_idx == cands.size() || s > best) {
        best = s;
        best_idx = c;
      }
    }
    if (best_idx < cands.size() && best > d.original_score + margin) {
      d.chosen = cands[best_idx];
      working.tokens[i].surface = d.chosen;
      if (const auto retyped = tokenize(d.chosen).tokens; retyped.size() == 1) working.tokens[i].kind = retyped[0].kind;
    }
    report.decisions.push_back(std::move(d));
  }
  report.corrected = working.reconstruct();
  return report;
}

CorrectionReport correct_via_llm(std::string_view text, const GlyphDatabase& db, PromptTemplate t,
                                 const RecognizerBackend& backend) {
  CorrectionReport report;
  report.original = std::string(text);
  const auto per_token = retrieve_candidates(text, db);
  report.prompt_used = build_prompt(text, flatten_candidates(per_token), t);
  try {
    report.corrected = backend.complete({report.original, *report.prompt_used});
  } catch (const TransportError& e) {
    report.corrected = report.original;
    throw BackendFailure(e, std::move(report));
  }
  return report;
}

}  // namespace estr
