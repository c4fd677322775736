#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "estr/corrector.hpp"

namespace estr::pipeline {

enum class BackendKind { oracle_with_noise, external_http, echo, identity };

struct BackendSpec {
  BackendKind kind = BackendKind::oracle_with_noise;
  double noise_rate = 0.0;
  std::uint64_t seed = 0;
  std::string endpoint;  // required iff kind == external_http
  int timeout_ms = 10000;
};

// Throws estr::Error on noise rate outside [0,1] or a misplaced endpoint.
void validate(const BackendSpec& spec);

BackendKind backend_kind_from_name(const std::string& name);

// POSTs {"prompt": ...} and expects {"text": ...}. Plain http:// only.
class HttpBackend final : public RecognizerBackend {
 public:
  HttpBackend(std::string endpoint, int timeout_ms);
  std::string complete(const BackendRequest& request) const override;
  // Exact request body sent for a prompt.
  static std::string request_body(const std::string& prompt);

 private:
  std::string endpoint_;
  std::string host_;  // scheme://host:port
  std::string path_;
  int timeout_ms_;
};

// Text-generation backends for correct_via_llm (echo, identity, external_http).
std::unique_ptr<RecognizerBackend> make_backend(const BackendSpec& spec);

}  // namespace estr::pipeline
