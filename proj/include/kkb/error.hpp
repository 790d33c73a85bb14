#pragma once

#include <stdexcept>
#include <string>

namespace kkb {

enum class ErrorCode {
  kInvalidArgument,
  kParse,
  kIo,
  kDisconnected,
  kDegenerate,
  kGeneration,
  kMismatch,
};

// Single exception type for the library; the C API maps `code()` onto status
// values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace kkb
