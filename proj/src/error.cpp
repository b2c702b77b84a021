#include "logmoment/error.hpp"

namespace logmoment {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::domain: return "domain error";
    case ErrorCode::invalid_interval: return "invalid interval";
    case ErrorCode::non_convergence: return "non-convergence";
    case ErrorCode::non_finite: return "non-finite value";
    case ErrorCode::no_sign_change: return "no sign change";
    case ErrorCode::not_centered: return "distribution not centered";
    case ErrorCode::overflow: return "overflow";
    case ErrorCode::parse: return "parse error";
    case ErrorCode::io: return "i/o error";
    case ErrorCode::unknown_check: return "unknown check";
  }
  return "unknown error";
}

}  // namespace logmoment
