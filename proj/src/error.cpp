#include <lexreg/error.hpp>

namespace lexreg {

std::string_view to_string(errc code) {
  switch (code) {
    case errc::empty_corpus: return "EmptyCorpus";
    case errc::invalid_k: return "InvalidK";
    case errc::insufficient_units: return "InsufficientUnits";
    case errc::order_mismatch: return "OrderMismatch";
    case errc::non_finite_input: return "NonFiniteInput";
    case errc::invalid_argument: return "InvalidArgument";
    case errc::invalid_spec: return "InvalidSpec";
    case errc::empty_input: return "EmptyInput";
    case errc::invalid_config: return "InvalidConfig";
    case errc::parse_error: return "ParseError";
    case errc::io_error: return "IoError";
    case errc::missing_artifact: return "MissingArtifact";
  }
  return "Unknown";
}

error::error(errc code, const std::string& what)
  : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(errc code, const std::string& what) { throw error(code, what); }

}  // namespace lexreg
