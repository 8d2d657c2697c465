#pragma once

#include <stdexcept>
#include <string>

namespace mrfseg {

enum class Errc {
  invalid_argument,
  dimension_mismatch,
  file_not_found,
  decode_failure,
  empty_image,
  io_failure,
  directory_not_found,
  empty_dataset,
};

// Every failure raised by the library. `code()` lets the CLI map failures to
// exit statuses without string matching.
class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

namespace detail {

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, Errc code, const char* what) {
  if (!cond) fail(code, what);
}

}  // namespace detail
}  // namespace mrfseg
