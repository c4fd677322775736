#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace estr {

// The three correction prompt phrasings. Template 3 scored best and is the default.
enum class PromptTemplate { explicit_errors = 1, direct_instruction = 2, conversational = 3 };

inline constexpr PromptTemplate kDefaultPromptTemplate = PromptTemplate::conversational;

// Throws estr::Error unless id is 1, 2 or 3.
PromptTemplate prompt_template_from_id(int id);
int prompt_template_id(PromptTemplate t);

// Joins candidates with ", ".
std::string join_candidates(const std::vector<std::string>& candidates);

std::string build_prompt(std::string_view text, const std::vector<std::string>& candidates, PromptTemplate t);

}  // namespace estr
