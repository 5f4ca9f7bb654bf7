#pragma once

#include <stdexcept>
#include <string>

namespace digirr {

enum class ErrorKind {
  config,
  range,
  validation,
  auth,
  session_expired,
  locked_out,
  not_found,
  io,
  parse,
};

const char* to_string(ErrorKind kind) noexcept;

// All library failures are reported as digirr::Error; the C API maps kind()
// onto its status codes.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace digirr
