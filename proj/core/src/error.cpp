#include "gsift/error.hpp"

namespace gsift {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "invalid argument";
    case Errc::missing_file: return "missing file";
    case Errc::malformed_header: return "malformed header";
    case Errc::truncated_payload: return "truncated payload";
    case Errc::unsupported_depth: return "unsupported depth";
    case Errc::io_error: return "i/o error";
    case Errc::dimension_mismatch: return "dimension mismatch";
    case Errc::out_of_bounds: return "out of bounds";
    case Errc::empty_input: return "empty input";
    case Errc::single_class: return "single class";
    case Errc::degenerate_split: return "degenerate split";
    case Errc::version_mismatch: return "version mismatch";
    case Errc::malformed_file: return "malformed file";
    case Errc::invariant_violation: return "invariant violation";
    case Errc::image_too_small: return "image too small";
  }
  return "unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace gsift
