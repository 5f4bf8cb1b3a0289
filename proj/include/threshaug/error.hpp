#pragma once

#include <stdexcept>
#include <string>

namespace threshaug {

enum class ErrorCode {
  InvalidArgument = 1,
  Dimension,
  Io,
  Parse,
  Dataset,
  Degenerate,
  NonInvertible,
  Config,
  NotFound,
  Runtime,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace threshaug
