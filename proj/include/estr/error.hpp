#pragma once

#include <stdexcept>
#include <string>

namespace estr {

// Malformed input or violated precondition. Maps to CLI exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Failure talking to an external text-generation backend. Maps to exit code 3.
class TransportError : public std::runtime_error {
 public:
  TransportError(std::string endpoint, int status, const std::string& what)
      : std::runtime_error(what + " (endpoint " + endpoint + ", status " + std::to_string(status) + ")"),
        endpoint_(std::move(endpoint)),
        status_(status) {}

  const std::string& endpoint() const noexcept { return endpoint_; }
  // HTTP status, or 0 when no response was received.
  int status() const noexcept { return status_; }

 private:
  std::string endpoint_;
  int status_;
};

}  // namespace estr
