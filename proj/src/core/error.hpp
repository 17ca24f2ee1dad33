#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace deepvox {

enum class ErrorCode {
  invalid_argument,
  dimension_mismatch,
  io,
  format,
  size_mismatch,
  non_finite,
  numeric,
  unsupported,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

namespace detail {
inline void format_into(std::ostringstream&) {}
template <typename T, typename... Rest>
void format_into(std::ostringstream& os, const T& head, const Rest&... rest) {
  os << head;
  format_into(os, rest...);
}
}  // namespace detail

template <typename... Args>
[[noreturn]] void raise(ErrorCode code, const Args&... args) {
  std::ostringstream os;
  detail::format_into(os, args...);
  throw Error(code, os.str());
}

}  // namespace deepvox
