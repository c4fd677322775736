#include "estr/pipeline/backend.hpp"

#include <httplib.h>

#include <json.hpp>

#include "estr/error.hpp"

namespace estr::pipeline {

void validate(const BackendSpec& spec) {
  if (!(spec.noise_rate >= 0.0 && spec.noise_rate <= 1.0)) throw Error("backend: noise rate must lie in [0, 1]");
  const bool http = spec.kind == BackendKind::external_http;
  if (http && spec.endpoint.empty()) throw Error("backend: external_http requires an endpoint URL");
  if (!http && !spec.endpoint.empty()) throw Error("backend: endpoint URL only applies to external_http");
  if (spec.timeout_ms <= 0) throw Error("backend: timeout must be positive");
}

BackendKind backend_kind_from_name(const std::string& name) {
  if (name == "oracle_with_noise") return BackendKind::oracle_with_noise;
  if (name == "external_http" || name == "http") return BackendKind::external_http;
  if (name == "echo") return BackendKind::echo;
  if (name == "identity") return BackendKind::identity;
  throw Error("unknown backend '" + name + "'");
}

HttpBackend::HttpBackend(std::string endpoint, int timeout_ms)
    : endpoint_(std::move(endpoint)), timeout_ms_(timeout_ms) {
  const std::string scheme = "http://";
  if (endpoint_.rfind(scheme, 0) != 0) throw Error("backend: endpoint must start with http:// (" + endpoint_ + ")");
  const auto slash = endpoint_.find('/', scheme.size());
  host_ = endpoint_.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : endpoint_.substr(slash);
  if (host_.size() == scheme.size()) throw Error("backend: endpoint has no host (" + endpoint_ + ")");
}

std::string HttpBackend::request_body(const std::string& prompt) { return nlohmann::json{{"prompt", prompt}}.dump(); }

std::string HttpBackend::complete(const BackendRequest& request) const {
  httplib::Client client(host_);
  const auto sec = timeout_ms_ / 1000;
  const auto usec = (timeout_ms_ % 1000) * 1000;
  client.set_connection_timeout(sec, usec);
  client.set_read_timeout(sec, usec);
  client.set_write_timeout(sec, usec);

  const auto res = client.Post(path_, request_body(request.prompt), "application/json");
  if (!res) throw TransportError(endpoint_, 0, "request failed: " + httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300) throw TransportError(endpoint_, res->status, "non-2xx response");
  try {
    const auto j = nlohmann::json::parse(res->body);
    if (!j.is_object() || !j.contains("text") || !j["text"].is_string()) {
      throw TransportError(endpoint_, res->status, "response lacks a string \"text\" field");
    }
    return j["text"].get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw TransportError(endpoint_, res->status, "malformed JSON response");
  }
}

std::unique_ptr<RecognizerBackend> make_backend(const BackendSpec& spec) {
  validate(spec);
  switch (spec.kind) {
    case BackendKind::echo:
      return std::make_unique<EchoBackend>();
    case BackendKind::identity:
      return std::make_unique<IdentityBackend>();
    case BackendKind::external_http:
      return std::make_unique<HttpBackend>(spec.endpoint, spec.timeout_ms);
    case BackendKind::oracle_with_noise:
      break;
  }
  throw Error("backend: oracle_with_noise is a recognizer stub, not a text-generation backend");
}

}  // namespace estr::pipeline
