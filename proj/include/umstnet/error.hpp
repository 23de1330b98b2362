#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace umstnet {

enum class ErrorKind {
  InvalidInput,
  InvalidConfig,
  DisconnectedGraph,
  Unreachable,
  Construction,
  Generation,
  Setup,
  Validation,
  Comparison,
  Format,
  Usage,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::InvalidConfig: return "invalid-config";
    case ErrorKind::DisconnectedGraph: return "disconnected-graph";
    case ErrorKind::Unreachable: return "unreachable";
    case ErrorKind::Construction: return "construction";
    case ErrorKind::Generation: return "generation";
    case ErrorKind::Setup: return "setup";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Comparison: return "comparison";
    case ErrorKind::Format: return "format";
    case ErrorKind::Usage: return "usage";
  }
  return "unknown";
}

/// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace umstnet
