#include "estr/prompt.hpp"

#include "estr/error.hpp"

namespace estr {

PromptTemplate prompt_template_from_id(int id) {
  if (id < 1 || id > 3) throw Error("prompt template must be 1, 2 or 3 (got " + std::to_string(id) + ")");
  return static_cast<PromptTemplate>(id);
}

int prompt_template_id(PromptTemplate t) { return static_cast<int>(t); }

std::string join_candidates(const std::vector<std::string>& candidates) {
  std::string out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (i > 0) out += ", ";
    out += candidates[i];
  }
  return out;
}

std::string build_prompt(std::string_view text, const std::vector<std::string>& candidates, PromptTemplate t) {
  const std::string list = join_candidates(candidates);
  const std::string body(text);
  switch (t) {
    case PromptTemplate::explicit_errors:
      return "The following text may contain errors: " + body + ". Possible replacements include: " + list +
             ". Please make corrections.";
    case PromptTemplate::direct_instruction:
      return "Correct the text: '" + body + "'. Use these candidates for guidance: " + list + ".";
    case PromptTemplate::conversational:
      return "Original text: " + body + ", candidate words: " + list + ", please correct the incorrect words.";
  }
  throw Error("unknown prompt template");
}

}  // namespace estr
