#include "conangle/tolerance.hpp"

#include "conangle/error.hpp"

namespace conangle {

void ToleranceConfig::validate() const {
  if (!(tol_zero > 0.0 && tol_zero <= tol_iter && tol_iter <= tol_feas && tol_feas < 1.0)) {
    throw Error(Errc::invalid_argument, "tolerances must satisfy 0 < tol_zero <= tol_iter <= tol_feas < 1");
  }
  if (max_iters <= 0 || multistarts <= 0) {
    throw Error(Errc::invalid_argument, "max_iters and multistarts must be positive");
  }
}

}  // namespace conangle
