#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace logmoment {

enum class ErrorCode {
  invalid_argument,
  domain,
  invalid_interval,
  non_convergence,
  non_finite,
  no_sign_change,
  not_centered,
  overflow,
  parse,
  io,
  unknown_check,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so the
/// C API can map it to a status value without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace logmoment
