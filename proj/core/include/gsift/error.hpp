#pragma once

#include <stdexcept>
#include <string>

namespace gsift {

/// Failure categories raised by the library. Each I/O and contract failure
/// maps to its own code so callers can tell them apart without parsing text.
enum class Errc {
  invalid_argument,
  missing_file,
  malformed_header,
  truncated_payload,
  unsupported_depth,
  io_error,
  dimension_mismatch,
  out_of_bounds,
  empty_input,
  single_class,
  degenerate_split,
  version_mismatch,
  malformed_file,
  invariant_violation,
  image_too_small,
};

const char* to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace gsift
