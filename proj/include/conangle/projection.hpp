#pragma once

#include <vector>

#include "conangle/cone.hpp"
#include "conangle/point.hpp"
#include "conangle/tolerance.hpp"

namespace conangle {

// Residuals of p = P_K x: p in K, x - p orthogonal to p, x - p in K^o.
struct ProjectionCertificate {
  double membership_residual = 0.0;
  double orthogonality_residual = 0.0;
  double polar_residual = 0.0;
  bool passed = false;
};

// Euclidean projection onto {(z, t) : |z| <= t} (axis last).
Point project_second_order(const Point& x);

// Metric projection onto K. Atoms are closed form (NNLS for generated and
// halfspace cones), neg/polar use the obvious identities, and composites with
// a polyhedral or single-SOC description are projected exactly; anything else
// falls back to Dykstra. Throws Error(iteration_limit / dimension_mismatch).
Point project(const ConeExpr& k, const Point& x, const ToleranceConfig& cfg = {});

// Dykstra's algorithm over the part projectors; stops when no step of a full
// cycle moves the iterate more than tol_iter * (1 + |x|).
Point dykstra(const std::vector<ConeExpr>& parts, const Point& x, const ToleranceConfig& cfg = {});

double distance(const ConeExpr& k, const Point& x, const ToleranceConfig& cfg = {});

// The polar condition is probed against the generators of atoms (the exact
// polar distance for second-order cones) and against 64 sampled unit members
// for composites.
ProjectionCertificate certify_projection(const ConeExpr& k, const Point& x, const Point& p,
                                         const ToleranceConfig& cfg = {});

}  // namespace conangle
