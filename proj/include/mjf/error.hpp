#pragma once

#include <stdexcept>
#include <string>

namespace mjf {

// Every error raised by the library carries the module it came from and a
// short machine-readable code, so the CLI can attribute failures.
class Error : public std::runtime_error {
 public:
  Error(std::string module, std::string code, const std::string& message)
      : std::runtime_error(module + ": " + message),
        module_(std::move(module)),
        code_(std::move(code)) {}

  const std::string& module() const noexcept { return module_; }
  const std::string& code() const noexcept { return code_; }

 private:
  std::string module_;
  std::string code_;
};

}  // namespace mjf
