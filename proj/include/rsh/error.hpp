#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rsh {

enum class ErrorKind {
  InvalidArgument,
  DimensionMismatch,
  Parse,
  Version,
  Io,
  Config,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a category so the CLI can
// report it in a machine-parsable form.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) fail(kind, message);
}

}  // namespace rsh
