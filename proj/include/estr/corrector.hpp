#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "estr/context_scorer.hpp"
#include "estr/error.hpp"
#include "estr/glyph_database.hpp"
#include "estr/prompt.hpp"

namespace estr {

struct TokenDecision {
  std::size_t position = 0;  // index into the token list
  std::string surface;
  std::vector<std::string> candidates;
  std::string chosen;
  double original_score = 0.0;
  std::vector<double> candidate_scores;  // parallel to candidates
  bool replaced() const { return chosen != surface; }
};

struct CorrectionReport {
  std::string original;
  std::string corrected;
  std::vector<TokenDecision> decisions;  // one per token that had candidates
  std::optional<std::string> prompt_used;

  std::size_t replacements() const;
};

// Greedy left-to-right correction. A token is replaced by its best-scoring
// candidate (first in list order on ties) only when that score beats the
// original's by more than margin, evaluated against the already corrected
// prefix.
CorrectionReport correct(std::string_view text, const GlyphDatabase& db, const ContextScorer& scorer,
                         double margin = 0.0);

struct BackendRequest {
  std::string text;    // the recognized text being corrected
  std::string prompt;  // the instantiated correction prompt
};

// Text-in/text-out generation boundary.
class RecognizerBackend {
 public:
  virtual ~RecognizerBackend() = default;
  // Throws estr::TransportError on failure.
  virtual std::string complete(const BackendRequest& request) const = 0;
};

// Returns the prompt unchanged.
class EchoBackend final : public RecognizerBackend {
 public:
  std::string complete(const BackendRequest& request) const override { return request.prompt; }
};

// Returns the text being corrected unchanged.
class IdentityBackend final : public RecognizerBackend {
 public:
  std::string complete(const BackendRequest& request) const override { return request.text; }
};

// Thrown by correct_via_llm; carries the report with the original text kept
// as the corrected output.
class BackendFailure : public TransportError {
 public:
  BackendFailure(const TransportError& cause, CorrectionReport report)
      : TransportError(cause), report_(std::move(report)) {}
  const CorrectionReport& report() const noexcept { return report_; }

 private:
  CorrectionReport report_;
};

CorrectionReport correct_via_llm(std::string_view text, const GlyphDatabase& db, PromptTemplate t,
                                 const RecognizerBackend& backend);

}  // namespace estr
