#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "conangle/angles.hpp"
#include "conangle/cone.hpp"
#include "conangle/point.hpp"
#include "conangle/tolerance.hpp"

namespace conangle {

struct TrivialityResult {
  bool trivial = false;
  std::optional<Point> witness;  // unit vector of K1 cap K2 when not trivial
  double c0 = 0.0;
};

// K1 cap K2 = {0} iff c0(K1, K2) < 1 - tol_feas.
TrivialityResult check_trivial_intersection(const ConeExpr& k1, const ConeExpr& k2, const ToleranceConfig& cfg = {});

enum class ConditionId { c0_lt_1, sup_proj_lt_1, sphere_dist_pos, gamma_pos, trivial_intersection };

const char* to_string(ConditionId id) noexcept;

struct ConditionReport {
  ConditionId condition_id = ConditionId::c0_lt_1;
  bool holds = false;
  double numeric_value = 0.0;
  bool conclusion_sum_closed = false;
};

struct ClosednessReport {
  std::vector<ConditionReport> conditions;
  bool conclusion_sum_closed = false;  // some condition holds (sufficient only)
  bool consistent = false;             // all five agree
};

// Numeric band separating "< 1" / "> 0" from the boundary in the closedness
// conditions.
inline constexpr double kClosednessBand = 1e-6;

// Sufficient conditions for K1 + K2 to be closed, evaluated on (K1, -K2):
//   c0_lt_1               c0(K1, -K2) < 1
//   sup_proj_lt_1         sup{<P x, P' P x> : |x| = 1} < 1 (P onto K1, P' onto -K2)
//   sphere_dist_pos       d(K1 cap S, -K2 cap S) > 0
//   gamma_pos             inf |x - y| / (|x| + |y|) > 0
//   trivial_intersection  K1 cap -K2 = {0} (trivial_probe below 0.5 / sqrt(dim))
ClosednessReport check_sum_closedness(const ConeExpr& k1, const ConeExpr& k2, const ToleranceConfig& cfg = {});

struct ProbeSample {
  double t = 0.0;
  double distance = 0.0;
};

// d_{K1}(z - t m) for each t. A profile decreasing to 0 without attainment is
// evidence that z lies in the closure of K1 + R m but not in the sum.
std::vector<ProbeSample> nonclosedness_probe(const ConeExpr& k1, const Point& z, const Point& m,
                                             const std::vector<double>& t_grid, const ToleranceConfig& cfg = {});
// Same with m taken from K2 (unit direction of a ray, first basis vector of a subspace).
std::vector<ProbeSample> nonclosedness_probe(const ConeExpr& k1, const ConeExpr& k2, const Point& z,
                                             const std::vector<double>& t_grid, const ToleranceConfig& cfg = {});

struct PolarWitness {
  Point w1;  // unit, in K1^o cap K2^+
  Point w2;  // -w1, in K1^+ cap K2^o
};

// Requires K1 not a subspace and K1 cap K2 = {0} (Error(hypothesis_violated)
// otherwise). Error(witness_not_found) means a numerical failure.
PolarWitness polar_intersection_witness(const ConeExpr& k1, const ConeExpr& k2, const ToleranceConfig& cfg = {});

enum class Branch { primal_one, polar_one };

const char* to_string(Branch b) noexcept;

struct DichotomyResult {
  Branch branch = Branch::primal_one;
  double value = 0.0;  // the c0 that certified the branch
  Point witness;       // unit common direction of the certifying pair of cones
};

// primal_one when c0(K1, K2) >= 1 - tol_feas, otherwise polar_one when
// c0(K1^o, K2^+) >= 1 - tol_feas. Error(hypothesis_violated) for a subspace K1,
// Error(dichotomy_failure) when neither branch certifies.
DichotomyResult dichotomy_check(const ConeExpr& k1, const ConeExpr& k2, const ToleranceConfig& cfg = {});

struct IvtPoint {
  double t = 0.0;
  Point z;
};

// t x + (1 - t) y orthogonal to u; needs <x, u> > 0 > <y, u>.
IvtPoint ivt_orthogonal_point(const Point& u, const Point& x, const Point& y);

}  // namespace conangle
