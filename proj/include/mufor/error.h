#pragma once

#include <stdexcept>
#include <string>

namespace mufor {

enum class ErrorKind {
  kInvalidArgument,
  kIo,
  kParse,
  kSchemaMismatch,
  kInternal,
};

// Base exception for everything the library throws on bad input or I/O.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

// Violated internal invariant; maps to exit code 3 in the CLI.
#define MUFOR_CHECK(cond, msg)                                              \
  do {                                                                      \
    if (!(cond)) ::mufor::fail(::mufor::ErrorKind::kInternal,               \
                               std::string("check failed: ") + #cond +      \
                                   " (" + (msg) + ")");                     \
  } while (false)

}  // namespace mufor
