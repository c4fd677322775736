#include "estr/pipeline/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>

#include "estr/error.hpp"

namespace estr::pipeline {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

bool known(const std::string& key) {
  return std::any_of(std::begin(kConfigKeys), std::end(kConfigKeys), [&](const char* k) { return key == k; });
}

template <typename T>
T parse_number(const std::string& key, const std::string& value, const std::string& source) {
  T out{};
  const char* first = value.data();
  const char* last = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last || value.empty()) {
    throw Error("config: value '" + value + "' for key '" + key + "' from " + source + " has the wrong type");
  }
  return out;
}

void apply(BenchConfig& cfg, const std::string& key, const std::string& value, const std::string& source) {
  if (key == "t_count") {
    cfg.t_count = parse_number<std::uint32_t>(key, value, source);
  } else if (key == "k") {
    cfg.k = parse_number<std::size_t>(key, value, source);
  } else if (key == "template") {
    cfg.prompt_template = parse_number<int>(key, value, source);
  } else if (key == "max_candidates") {
    cfg.max_candidates = parse_number<std::size_t>(key, value, source);
  } else if (key == "margin") {
    cfg.margin = parse_number<double>(key, value, source);
  } else if (key == "seed") {
    cfg.seed = parse_number<std::uint64_t>(key, value, source);
  } else if (key == "noise_rate") {
    cfg.noise_rate = parse_number<double>(key, value, source);
  } else if (key == "memory_patterns") {
    cfg.memory_patterns = parse_number<std::size_t>(key, value, source);
  } else {
    throw Error("config: unknown key '" + key + "' from " + source);
  }
}

std::string env_name(std::string key) {
  std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return "ESTR_" + key;
}

}  // namespace

std::optional<std::string> process_env(const std::string& name) {
  const char* v = std::getenv(name.c_str());
  if (v == nullptr) return std::nullopt;
  return std::string(v);
}

BenchConfig load_config(const std::optional<std::string>& path, const std::map<std::string, std::string>& flags,
                        const EnvLookup& env) {
  BenchConfig cfg;
  if (path) {
    std::ifstream in(*path);
    if (!in) throw Error("cannot open config " + *path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      const std::string content = trim(line);
      if (content.empty()) continue;
      const auto eq = content.find('=');
      if (eq == std::string::npos) throw Error("config line " + std::to_string(line_no) + ": expected key = value");
      apply(cfg, trim(content.substr(0, eq)), trim(content.substr(eq + 1)),
            *path + ":" + std::to_string(line_no));
    }
  }
  if (env) {
    for (const char* key : kConfigKeys) {
      if (const auto v = env(env_name(key))) apply(cfg, key, trim(*v), env_name(key));
    }
  }
  for (const auto& [key, value] : flags) {
    if (!known(key)) throw Error("config: unknown flag '" + key + "'");
    apply(cfg, key, value, "flag --" + key);
  }
  validate(cfg);
  return cfg;
}

void validate(const BenchConfig& cfg) {
  if (cfg.t_count == 0) throw Error("config: t_count must be at least 1");
  if (cfg.k == 0) throw Error("config: k must be at least 1");
  if (cfg.memory_patterns == 0 || cfg.k > cfg.memory_patterns) {
    throw Error("config: k must not exceed memory_patterns");
  }
  if (cfg.prompt_template < 1 || cfg.prompt_template > 3) throw Error("config: template must be 1, 2 or 3");
  if (!(cfg.margin >= 0.0)) throw Error("config: margin must be non-negative");
  if (!(cfg.noise_rate >= 0.0 && cfg.noise_rate <= 1.0)) throw Error("config: noise_rate must lie in [0, 1]");
}

}  // namespace estr::pipeline
