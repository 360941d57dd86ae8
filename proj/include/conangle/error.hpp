#pragma once

#include <stdexcept>
#include <string>

namespace conangle {

enum class Errc {
  zero_direction,
  dimension_mismatch,
  iteration_limit,
  unsupported_dimension,
  identity_not_applicable,
  hypothesis_violated,
  witness_not_found,
  dichotomy_failure,
  sign_condition_violated,
  insufficient_data,
  invalid_argument,
  parse_error,
  resolve_error,
};

const char* to_string(Errc code) noexcept;

// Single exception type for the library; callers switch on code().
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace conangle
