#include "conangle/theorems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "conangle/error.hpp"
#include "conangle/projection.hpp"

namespace conangle {

const char* to_string(ConditionId id) noexcept {
  switch (id) {
    case ConditionId::c0_lt_1: return "c0_lt_1";
    case ConditionId::sup_proj_lt_1: return "sup_proj_lt_1";
    case ConditionId::sphere_dist_pos: return "sphere_dist_pos";
    case ConditionId::gamma_pos: return "gamma_pos";
    case ConditionId::trivial_intersection: return "trivial_intersection";
  }
  return "unknown";
}

const char* to_string(Branch b) noexcept { return b == Branch::primal_one ? "primal_one" : "polar_one"; }

TrivialityResult check_trivial_intersection(const ConeExpr& k1, const ConeExpr& k2, const ToleranceConfig& cfg) {
  const AngleReport r = c0(k1, k2, cfg);
  TrivialityResult out;
  out.c0 = r.value;
  out.trivial = r.value < 1.0 - cfg.tol_feas;
  if (!out.trivial && r.pair) {
    // At value 1 the principal pair collapses to one common direction.
    out.witness = normalized_or_zero(r.pair->first + r.pair->second, cfg.tol_zero);
  }
  return out;
}

namespace {

// sup over the unit sphere of <P1 x, P2 P1 x> = |P2 P1 x|^2, by iterating
// x <- N(P1 P2 P1 x) from several starts.
double sup_projection_form(const ConeExpr& k1, const ConeExpr& k2, const ToleranceConfig& cfg) {
  std::vector<Point> starts;
  std::mt19937_64 rng(cfg.rng_seed + 1);
  std::normal_distribution<double> gauss;
  const int n = k1.dim();
  for (int i = 0; i < std::max(16, cfg.multistarts / 4); ++i) {
    Point s(n);
    for (int j = 0; j < n; ++j) s(j) = gauss(rng);
    starts.push_back(s.normalized());
  }
  for (const Point& s : k1.seed_directions()) starts.push_back(s.normalized());
  for (const Point& s : k2.seed_directions()) starts.push_back(s.normalized());

  double best = 0.0;
  for (Point x : starts) {
    double prev = -1.0;
    int stable = 0;
    for (int it = 0; it < cfg.max_iters; ++it) {
      const Point u = project(k1, x, cfg);
      const Point v = project(k2, u, cfg);
      const double val = u.dot(v);
      best = std::max(best, val);
      stable = std::abs(val - prev) <= cfg.tol_iter ? stable + 1 : 0;
      if (stable >= 3 || val >= 1.0 - cfg.tol_zero) break;
      prev = val;
      const Point next = normalized_or_zero(project(k1, v, cfg), cfg.tol_zero);
      if (next.isZero(0.0)) break;
      x = next;
    }
  }
  return std::min(best, 1.0);
}

}  // namespace

ClosednessReport check_sum_closedness(const ConeExpr& k1, const ConeExpr& k2, const ToleranceConfig& cfg) {
  require_same_dim(k1, k2);
  const ConeExpr neg2 = negate(k2);
  const double band = kClosednessBand;
  const AngleReport r = c0(k1, neg2, cfg);

  ClosednessReport out;
  auto add = [&out](ConditionId id, bool holds, double value) {
    out.conditions.push_back(ConditionReport{id, holds, value, false});
  };

  add(ConditionId::c0_lt_1, r.value < 1.0 - band, r.value);

  const double sup = sup_projection_form(k1, neg2, cfg);
  add(ConditionId::sup_proj_lt_1, sup < (1.0 - band) * (1.0 - band), sup);

  // Without a pair every <x, y> on the spheres is <= 0, so the distance is at
  // least sqrt(2) (infinite when a section is empty).
  double dist = std::sqrt(2.0);
  double gam = std::sqrt(2.0) / 2.0;
  if (r.degenerate) {
    dist = std::numeric_limits<double>::infinity();
  } else if (r.pair) {
    const Point& x = r.pair->first;
    const Point& y = r.pair->second;
    dist = (x - y).norm();
    for (double a : {0.5, 1.0, 2.0}) gam = std::min(gam, (a * x - y).norm() / (a + 1.0));
  }
  add(ConditionId::sphere_dist_pos, dist > std::sqrt(2.0 * band), dist);
  add(ConditionId::gamma_pos, gam > std::sqrt(2.0 * band) / 2.0, gam);

  const double probe = trivial_probe(intersect({k1, neg2}), cfg);
  add(ConditionId::trivial_intersection, probe < 0.5 / std::sqrt(static_cast<double>(k1.dim())), probe);

  const bool first = out.conditions.front().holds;
  out.consistent = true;
  for (const ConditionReport& c : out.conditions) {
    out.conclusion_sum_closed = out.conclusion_sum_closed || c.holds;
    out.consistent = out.consistent && c.holds == first;
  }
  for (ConditionReport& c : out.conditions) c.conclusion_sum_closed = out.conclusion_sum_closed;
  return out;
}

std::vector<ProbeSample> nonclosedness_probe(const ConeExpr& k1, const Point& z, const Point& m,
                                             const std::vector<double>& t_grid, const ToleranceConfig& cfg) {
  require_same_dim(k1, z);
  require_same_dim(k1, m);
  std::vector<ProbeSample> out;
  for (double t : t_grid) out.push_back({t, distance(k1, z - t * m, cfg)});
  return out;
}

std::vector<ProbeSample> nonclosedness_probe(const ConeExpr& k1, const ConeExpr& k2, const Point& z,
                                             const std::vector<double>& t_grid, const ToleranceConfig& cfg) {
  require_same_dim(k1, k2);
  const bool has_direction = k2.kind() == ConeKind::ray || k2.kind() == ConeKind::subspace ||
                             (k2.kind() == ConeKind::generated && k2.vectors().cols() == 1);
  if (!has_direction) {
    throw Error(Errc::invalid_argument, "the second cone must be a ray or a subspace");
  }
  return nonclosedness_probe(k1, z, Point(k2.vectors().col(0)), t_grid, cfg);
}

PolarWitness polar_intersection_witness(const ConeExpr& k1, const ConeExpr& k2, const ToleranceConfig& cfg) {
  require_same_dim(k1, k2);
  if (is_linear_subspace(k1, cfg)) throw Error(Errc::hypothesis_violated, "K1 is a linear subspace");
  if (!check_trivial_intersection(k1, k2, cfg).trivial) {
    throw Error(Errc::hypothesis_violated, "K1 cap K2 is not {0}");
  }
  const ConeExpr p1 = polar(k1);
  const ConeExpr d2 = dual(k2);
  const TrivialityResult r = check_trivial_intersection(p1, d2, cfg);
  if (r.trivial || !r.witness) {
    throw Error(Errc::witness_not_found,
                "no common direction of K1^o and K2^+ found (c0 = " + std::to_string(r.c0) + ")");
  }
  PolarWitness w{*r.witness, -*r.witness};
  const bool ok = member(p1, w.w1, cfg.tol_feas) && member(d2, w.w1, cfg.tol_feas) &&
                  member(dual(k1), w.w2, cfg.tol_feas) && member(polar(k2), w.w2, cfg.tol_feas);
  if (!ok) throw Error(Errc::witness_not_found, "witness " + format_point(w.w1) + " failed membership re-validation");
  return w;
}

DichotomyResult dichotomy_check(const ConeExpr& k1, const ConeExpr& k2, const ToleranceConfig& cfg) {
  require_same_dim(k1, k2);
  if (is_linear_subspace(k1, cfg)) throw Error(Errc::hypothesis_violated, "K1 is a linear subspace");

  auto certify = [&cfg](const ConeExpr& a, const ConeExpr& b, Branch branch) -> std::optional<DichotomyResult> {
    const TrivialityResult r = check_trivial_intersection(a, b, cfg);
    if (r.trivial) return std::nullopt;
    if (!r.witness || !member(a, *r.witness, cfg.tol_feas) || !member(b, *r.witness, cfg.tol_feas)) {
      throw Error(Errc::dichotomy_failure,
                  std::string("branch ") + to_string(branch) + " reached 1 but no common direction validated");
    }
    return DichotomyResult{branch, r.c0, *r.witness};
  };

  if (auto r = certify(k1, k2, Branch::primal_one)) return *r;
  if (auto r = certify(polar(k1), dual(k2), Branch::polar_one)) return *r;
  throw Error(Errc::dichotomy_failure, "neither c0(K1, K2) nor c0(K1^o, K2^+) reached 1");
}

IvtPoint ivt_orthogonal_point(const Point& u, const Point& x, const Point& y) {
  if (u.size() != x.size() || u.size() != y.size()) {
    throw Error(Errc::dimension_mismatch, "u, x and y must share one dimension");
  }
  const double xu = x.dot(u);
  const double yu = y.dot(u);
  if (!(xu > 0.0 && yu < 0.0)) {
    throw Error(Errc::sign_condition_violated, "need <x, u> > 0 > <y, u>");
  }
  IvtPoint out;
  out.t = yu / (yu - xu);
  out.z = out.t * x + (1.0 - out.t) * y;
  return out;
}

}  // namespace conangle
