#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>

namespace estr::pipeline {

// Defaults: 19 stacked frames per recording, top-64 memory retrieval,
// prompt template #3 and 10 candidates per glyph are the best settings
// reported for the original model; margin 0 demands strict improvement.
struct BenchConfig {
  std::uint32_t t_count = 19;
  std::size_t k = 64;
  int prompt_template = 3;
  std::size_t max_candidates = 10;
  double margin = 0.0;
  std::uint64_t seed = 0;
  double noise_rate = 0.2;
  std::size_t memory_patterns = 256;

  friend bool operator==(const BenchConfig&, const BenchConfig&) = default;
};

// Keys accepted in config files and as flag names (with '-' for '_').
// Env vars are the upper-cased key with prefix ESTR_.
inline constexpr const char* kConfigKeys[] = {"t_count", "k", "template", "max_candidates",
                                              "margin", "seed", "noise_rate", "memory_patterns"};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

// Reads the process environment.
std::optional<std::string> process_env(const std::string& name);

// Precedence: flags > env (ESTR_*) > file > defaults. The file is line-based
// "key = value" with '#' comments. Unknown keys or unparsable values throw
// estr::Error.
BenchConfig load_config(const std::optional<std::string>& path, const std::map<std::string, std::string>& flags,
                        const EnvLookup& env = process_env);

// Throws estr::Error when a value falls outside its operation's preconditions.
void validate(const BenchConfig& cfg);

}  // namespace estr::pipeline
