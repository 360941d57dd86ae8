#include "conangle/projection.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "conangle/error.hpp"
#include "conangle/nnls.hpp"
#include "detail/constraint_form.hpp"

namespace conangle {

namespace {

constexpr double kNnlsTol = 1e-14;

}  // namespace

Point project_second_order(const Point& x) {
  const auto n = x.size();
  const double t = x(n - 1);
  const auto z = x.head(n - 1);
  const double nz = z.norm();
  if (nz <= t) return x;
  if (nz <= -t) return Point::Zero(n);
  Point p(n);
  const double scale = 0.5 * (t + nz);
  p.head(n - 1) = (scale / nz) * z;
  p(n - 1) = scale;
  return p;
}

Point project(const ConeExpr& k, const Point& x, const ToleranceConfig& cfg) {
  require_same_dim(k, x);
  const auto d = x.size();
  if (x.isZero(0.0)) return Point::Zero(d);

  switch (k.kind()) {
    case ConeKind::zero:
      return Point::Zero(d);
    case ConeKind::ray: {
      const Point u = k.vectors().col(0);
      return std::max(0.0, u.dot(x)) * u;
    }
    case ConeKind::subspace:
      return k.vectors() * (k.vectors().transpose() * x);
    case ConeKind::second_order: {
      if (!k.rotation()) return project_second_order(x);
      const Matrix& r = *k.rotation();
      return r * project_second_order(r.transpose() * x);
    }
    case ConeKind::generated:
      return nnls(k.vectors(), x, kNnlsTol, cfg.max_iters).fit;
    case ConeKind::halfspace:
      return x - nnls(k.vectors(), x, kNnlsTol, cfg.max_iters).fit;
    case ConeKind::neg:
      return -project(k.inner(), -x, cfg);
    case ConeKind::polar:
      if (const detail::ConstraintForm* f = k.constraint_form()) return detail::project_form(*f, x, kNnlsTol);
      return x - project(k.inner(), x, cfg);
    case ConeKind::intersect:
      if (const detail::ConstraintForm* f = k.constraint_form()) return detail::project_form(*f, x, kNnlsTol);
      return dykstra(k.parts(), x, cfg);
  }
  return Point::Zero(d);
}

Point dykstra(const std::vector<ConeExpr>& parts, const Point& x, const ToleranceConfig& cfg) {
  if (parts.empty()) throw Error(Errc::invalid_argument, "dykstra needs at least one set");
  for (const ConeExpr& p : parts) require_same_dim(p, x);
  const double stop = cfg.tol_iter * (1.0 + x.norm());
  Point cur = x;
  std::vector<Point> corr(parts.size(), Point::Zero(x.size()));
  for (int cycle = 0; cycle < cfg.max_iters; ++cycle) {
    double moved = 0.0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      const Point y = cur + corr[i];
      const Point z = project(parts[i], y, cfg);
      corr[i] = y - z;
      moved = std::max(moved, (z - cur).norm());
      cur = z;
    }
    if (moved <= stop) return cur;
  }
  throw Error(Errc::iteration_limit, "dykstra did not settle within " + std::to_string(cfg.max_iters) + " cycles");
}

double distance(const ConeExpr& k, const Point& x, const ToleranceConfig& cfg) {
  return (x - project(k, x, cfg)).norm();
}

ProjectionCertificate certify_projection(const ConeExpr& k, const Point& x, const Point& p,
                                         const ToleranceConfig& cfg) {
  require_same_dim(k, x);
  require_same_dim(k, p);
  ProjectionCertificate cert;
  const Point r = x - p;
  cert.membership_residual = distance(k, p, cfg);
  cert.orthogonality_residual = std::abs(r.dot(p));

  double worst = 0.0;
  if (k.is_atom()) {
    if (k.kind() == ConeKind::second_order) {
      worst = distance(polar(k), r, cfg);
    } else if (auto gens = k.generator_list()) {
      for (const Point& g : *gens) worst = std::max(worst, g.normalized().dot(r));
    }
  } else {
    std::mt19937_64 rng(cfg.rng_seed);
    std::normal_distribution<double> gauss;
    for (int i = 0; i < 64; ++i) {
      Point v(x.size());
      for (Eigen::Index j = 0; j < v.size(); ++j) v(j) = gauss(rng);
      const Point y = project(k, v, cfg);
      const double ny = y.norm();
      if (ny <= cfg.tol_zero) continue;
      worst = std::max(worst, y.dot(r) / ny);
    }
  }
  cert.polar_residual = worst;

  const double bound = cfg.tol_feas * (1.0 + x.norm());
  cert.passed = cert.membership_residual <= bound && cert.orthogonality_residual <= bound && worst <= bound;
  return cert;
}

}  // namespace conangle
