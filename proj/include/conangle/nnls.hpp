#pragma once

#include "conangle/point.hpp"

namespace conangle {

struct NnlsResult {
  Eigen::VectorXd coeffs;  // lambda >= 0
  Point fit;               // A * lambda
  int iterations = 0;
};

// Lawson-Hanson active-set solver for min |A lambda - b| subject to lambda >= 0.
// The entering column is the one with the largest dual value until the
// iteration count passes 2n, after which the smallest eligible index is taken
// (Bland's rule) so the method cannot cycle. Throws Error(iteration_limit).
NnlsResult nnls(const Matrix& a, const Point& b, double tol, int max_iters);

}  // namespace conangle
