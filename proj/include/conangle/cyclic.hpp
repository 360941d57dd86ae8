#pragma once

#include <vector>

#include "conangle/cone.hpp"
#include "conangle/point.hpp"
#include "conangle/tolerance.hpp"

namespace conangle {

// base + anchor.
struct TranslatedSet {
  ConeExpr base;
  Point anchor;

  Point project(const Point& x, const ToleranceConfig& cfg = {}) const;
};

TranslatedSet translated(const ConeExpr& base);  // anchor 0

struct Trace {
  std::vector<Point> iterates;
  std::vector<double> errors;  // |x_k - anchor|
  Point limit_estimate;
  bool converged = false;
  bool monotone = true;  // errors nonincreasing within 1e-12 after the first iterate

  int iterations() const { return static_cast<int>(iterates.size()) - 1; }
  // errors[k + 1] / errors[k]; 0 where errors[k] is 0.
  std::vector<double> ratios() const;
};

// x_{k+1} = P_D P_C x_k until |x_k - anchor| <= tol_iter or the iterate stops
// moving. A start that is already a fixed point gives the one-element trace
// [x0]. Hitting max_iters returns the partial trace with converged = false.
// The anchors must coincide (Error(invalid_argument)).
Trace run_cyclic(const TranslatedSet& c, const TranslatedSet& d, const Point& x0, const ToleranceConfig& cfg = {});

// c(C, D); gamma^2 bounds the per-cycle error ratio.
double theoretical_rate(const ConeExpr& c, const ConeExpr& d, const ToleranceConfig& cfg = {});

// Geometric mean of consecutive error ratios over the last half of the
// leading run of errors > tol_zero, clipped to [0, 1]. Needs at least 5 such
// errors (Error(insufficient_data)).
double estimate_rate(const std::vector<double>& errors, double tol_zero = 1e-12);
double estimate_rate(const Trace& trace, double tol_zero = 1e-12);

}  // namespace conangle
