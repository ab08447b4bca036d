#pragma once
#include <stdexcept>
#include <string>
#include <utility>

namespace specmix {

// Stable kebab-case error codes; the CLI maps them to JSON error records
// and exit codes.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& msg)
      : std::runtime_error(code + ": " + msg), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

private:
  std::string code_;
};

[[noreturn]] inline void fail(std::string code, const std::string& msg) {
  throw Error(std::move(code), msg);
}

}  // namespace specmix
