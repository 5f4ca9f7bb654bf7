#include "common/error.hpp"

namespace digirr {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::config: return "configuration error";
    case ErrorKind::range: return "range error";
    case ErrorKind::validation: return "validation error";
    case ErrorKind::auth: return "authentication error";
    case ErrorKind::session_expired: return "session expired";
    case ErrorKind::locked_out: return "account locked";
    case ErrorKind::not_found: return "not found";
    case ErrorKind::io: return "i/o error";
    case ErrorKind::parse: return "parse error";
  }
  return "error";
}

}  // namespace digirr
