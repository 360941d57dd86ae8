#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "conangle/cone.hpp"
#include "conangle/point.hpp"
#include "conangle/tolerance.hpp"

namespace conangle {

enum class AngleKind { c0, c };
enum class AngleMethod { power, oracle, closed_form };

const char* to_string(AngleKind kind) noexcept;
const char* to_string(AngleMethod method) noexcept;

// Necessary conditions for (x, y) to be a principal pair of (C, D), rho = <x, y>:
//   y - rho x in C^o,  x - rho y in D^o,
//   x = P_C(x + l (y - rho x)) and l (y - rho x) = P_{C^o}(x + l (y - rho x)), same for D,
//   x + a (y - rho x) not in C (and symmetrically) for a in {0.1, 1, 10}.
struct PrincipalCertificate {
  double polar_residual_1 = 0.0;
  double polar_residual_2 = 0.0;
  std::vector<double> projection_identity_residuals;
  int boundary_violations = 0;
  bool passed = false;
};

struct AngleReport {
  double value = 0.0;
  AngleKind kind = AngleKind::c0;
  std::optional<std::pair<Point, Point>> pair;
  // sqrt(2 - 2 value) and half of it; empty when value <= tol_feas.
  std::optional<double> beta;
  std::optional<double> gamma;
  AngleMethod method = AngleMethod::power;
  int iterations = 0;
  std::optional<PrincipalCertificate> certificate;
  bool degenerate = false;  // one of the cones is {0}
};

// Cosine of the minimal angle, sup{<x, y> : x in C, y in D, |x|, |y| <= 1}.
// Closed form for ray/ray, ray/cone and subspace/subspace pairs; otherwise
// multistart power iteration x <- N(P_C y), y <- N(P_D x). A best value close
// to 1 is confirmed (and then reported as exactly 1) by projecting x + y onto
// C cap D and checking membership of the result in both cones.
AngleReport c0(const ConeExpr& c, const ConeExpr& d, const ToleranceConfig& cfg = {});

// Brute force over a sphere grid with resolution^(dim-1) directions s:
// c0 = max |P_C P_D s| (a 1-Lipschitz function of s, so whole grid cells are
// skipped when a center value plus the cell radius cannot beat the best grid
// value; the result equals the full-grid maximum). The same pass records the
// direct sphere distance d(C cap S, D cap S) and the infimum of
// |x - y| / (|x| + |y|) over the sampled pairs at scales {1/2, 1, 2}.
struct SphereSweep {
  double c0 = 0.0;
  std::optional<double> beta;   // empty when no sampled pair exists
  std::optional<double> gamma;
  long grid_size = 0;
  long evaluated = 0;
};

// dim <= 4, resolution >= 8. Throws Error(unsupported_dimension / invalid_argument).
SphereSweep sphere_sweep(const ConeExpr& c, const ConeExpr& d, int resolution, const ToleranceConfig& cfg = {});
double c0_oracle(const ConeExpr& c, const ConeExpr& d, int resolution);

// c(K1, K2) = c0(K1 cap E, K2 cap E) with E = (K1 cap K2)^o; 0 (degenerate)
// when either part is {0}.
AngleReport c_angle(const ConeExpr& k1, const ConeExpr& k2, const ToleranceConfig& cfg = {});

struct IdentityEstimate {
  double value = 0.0;  // from c0 through the identity
  double c0 = 0.0;
  std::optional<double> sampled;    // direct sphere estimate (dim <= 4)
  std::optional<double> deviation;  // |value - sampled|
};

// beta = sqrt(2 - 2 c0), gamma = beta / 2. Throws Error(identity_not_applicable)
// when c0 <= tol_feas. A positive resolution adds the sampled estimate.
IdentityEstimate beta(const ConeExpr& c, const ConeExpr& d, const ToleranceConfig& cfg = {}, int resolution = 200);
IdentityEstimate gamma(const ConeExpr& c, const ConeExpr& d, const ToleranceConfig& cfg = {}, int resolution = 200);

// c0 with the principal pair and its certificate; the pair is (0, 0) when the
// value is <= tol_feas.
AngleReport principal_vectors(const ConeExpr& c, const ConeExpr& d, const ToleranceConfig& cfg = {});

PrincipalCertificate certify_principal(const ConeExpr& c, const ConeExpr& d, const Point& x, const Point& y,
                                       const ToleranceConfig& cfg = {});

}  // namespace conangle
