#pragma once

#include <stdexcept>
#include <string>

namespace storenet {

// Exception carrying a stable machine-readable code (e.g. "INIT_OUTSIDE_S")
// next to the human-readable message.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

}  // namespace storenet
