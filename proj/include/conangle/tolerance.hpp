#pragma once

#include <cstdint>

namespace conangle {

// Numerical knobs shared by every solver in the library.
struct ToleranceConfig {
  double tol_zero = 1e-12;  // treat-as-zero threshold
  double tol_feas = 1e-9;   // membership / certificate slack
  double tol_iter = 1e-10;  // iteration stopping
  int max_iters = 10000;
  int multistarts = 64;
  std::uint64_t rng_seed = 20210403;

  // Throws Error(invalid_argument) unless 0 < tol_zero <= tol_iter <= tol_feas < 1
  // and the integer budgets are positive.
  void validate() const;
};

}  // namespace conangle
