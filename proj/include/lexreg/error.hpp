#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lexreg {

enum class errc {
  empty_corpus,
  invalid_k,
  insufficient_units,
  order_mismatch,
  non_finite_input,
  invalid_argument,
  invalid_spec,
  empty_input,
  invalid_config,
  parse_error,
  io_error,
  missing_artifact,
};

std::string_view to_string(errc code);

// Every failure raised by the library carries one of the codes above so that
// callers (the CLI in particular) can map it to an exit status.
class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what);

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] void fail(errc code, const std::string& what);

inline void require(bool condition, errc code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace lexreg
