#include "conangle/angles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <random>

#include "conangle/error.hpp"
#include "conangle/projection.hpp"

namespace conangle {

const char* to_string(AngleKind kind) noexcept { return kind == AngleKind::c0 ? "c0" : "c"; }

const char* to_string(AngleMethod method) noexcept {
  switch (method) {
    case AngleMethod::power: return "power";
    case AngleMethod::oracle: return "oracle";
    case AngleMethod::closed_form: return "closed_form";
  }
  return "unknown";
}

namespace {

constexpr double kCommonBand = 1e-3;
constexpr double kTiny = 1e-12;

bool lex_less(const Point& a, const Point& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

struct StartResult {
  double obj = 0.0;
  Point x;
  Point y;
  int iters = 0;
  bool converged = false;
};

StartResult run_start(const ConeExpr& c, const ConeExpr& d, const Point& s, const ToleranceConfig& cfg) {
  StartResult r;
  r.x = normalized_or_zero(project(c, s, cfg), cfg.tol_zero);
  if (r.x.isZero(0.0)) {
    r.converged = true;
    return r;
  }
  r.y = normalized_or_zero(project(d, r.x, cfg), cfg.tol_zero);
  if (r.y.isZero(0.0)) {
    r.converged = true;
    return r;
  }
  r.obj = r.x.dot(r.y);
  int stable = 0;
  for (r.iters = 1; r.iters <= cfg.max_iters; ++r.iters) {
    const Point x = normalized_or_zero(project(c, r.y, cfg), cfg.tol_zero);
    const Point y = x.isZero(0.0) ? x : normalized_or_zero(project(d, x, cfg), cfg.tol_zero);
    if (y.isZero(0.0)) {
      r.obj = 0.0;
      r.converged = true;
      return r;
    }
    const double obj = x.dot(y);
    stable = std::abs(obj - r.obj) <= cfg.tol_iter ? stable + 1 : 0;
    r.x = x;
    r.y = y;
    r.obj = obj;
    if (stable >= 3 || obj >= 1.0 - cfg.tol_zero) {
      r.converged = true;
      return r;
    }
  }
  return r;
}

void polish(const ConeExpr& c, const ConeExpr& d, StartResult& best, const ToleranceConfig& cfg) {
  for (int it = 0; it < cfg.max_iters; ++it) {
    const Point x = normalized_or_zero(project(c, best.y, cfg), cfg.tol_zero);
    if (x.isZero(0.0)) return;
    const Point y = normalized_or_zero(project(d, x, cfg), cfg.tol_zero);
    if (y.isZero(0.0)) return;
    const double moved = (x - best.x).norm() + (y - best.y).norm();
    best.x = x;
    best.y = y;
    best.obj = x.dot(y);
    ++best.iters;
    if (moved <= cfg.tol_iter) return;
  }
}

void fill_identities(AngleReport& r, const ToleranceConfig& cfg) {
  r.value = std::clamp(r.value, 0.0, 1.0);
  if (r.value > cfg.tol_feas) {
    r.beta = std::sqrt(std::max(0.0, 2.0 - 2.0 * r.value));
    r.gamma = *r.beta / 2.0;
  }
}

// Upgrades a near-1 value to exactly 1 when a common unit direction is found.
void confirm_common_direction(const ConeExpr& c, const ConeExpr& d, AngleReport& r, const ToleranceConfig& cfg) {
  if (!r.pair || r.value < 1.0 - kCommonBand) return;
  try {
    const Point sum = r.pair->first + r.pair->second;
    const Point w = project(intersect({c, d}), sum, cfg);
    if (w.norm() <= 1e-9 * (1.0 + sum.norm())) return;
    const Point u = w.normalized();
    if (member(c, u, cfg.tol_feas) && member(d, u, cfg.tol_feas)) {
      r.value = 1.0;
      r.pair = std::make_pair(u, u);
    }
  } catch (const Error& e) {
    if (e.code() != Errc::iteration_limit) throw;
  }
}

std::optional<Point> ray_direction(const ConeExpr& k) {
  if (k.kind() == ConeKind::ray || (k.kind() == ConeKind::generated && k.vectors().cols() == 1)) {
    return Point(k.vectors().col(0));
  }
  return std::nullopt;
}

std::optional<AngleReport> closed_form(const ConeExpr& c, const ConeExpr& d, const ToleranceConfig& cfg) {
  AngleReport r;
  r.method = AngleMethod::closed_form;
  if (is_trivial(c, cfg) || is_trivial(d, cfg)) {
    r.degenerate = true;
    return r;
  }
  const auto cu = ray_direction(c);
  const auto du = ray_direction(d);
  if (cu && du) {
    r.value = cu->dot(*du);
    r.pair = std::make_pair(*cu, *du);
    return r;
  }
  if (cu || du) {
    const bool ray_first = cu.has_value();
    const Point u = ray_first ? *cu : *du;
    const Point p = project(ray_first ? d : c, u, cfg);
    r.value = p.norm();
    if (r.value > cfg.tol_zero) {
      const Point q = p / r.value;
      r.pair = ray_first ? std::make_pair(u, q) : std::make_pair(q, u);
    }
    return r;
  }
  if (c.kind() == ConeKind::subspace && d.kind() == ConeKind::subspace) {
    Eigen::JacobiSVD<Matrix> svd(c.vectors().transpose() * d.vectors(), Eigen::ComputeThinU | Eigen::ComputeThinV);
    r.value = svd.singularValues()(0);
    r.pair = std::make_pair(Point(c.vectors() * svd.matrixU().col(0)), Point(d.vectors() * svd.matrixV().col(0)));
    return r;
  }
  return std::nullopt;
}

AngleReport power_iteration(const ConeExpr& c, const ConeExpr& d, const ToleranceConfig& cfg) {
  std::vector<Point> starts;
  std::mt19937_64 rng(cfg.rng_seed);
  std::normal_distribution<double> gauss;
  const int n = c.dim();
  for (int i = 0; i < cfg.multistarts; ++i) {
    Point s(n);
    for (int j = 0; j < n; ++j) s(j) = gauss(rng);
    starts.push_back(s);
  }
  for (const Point& s : c.seed_directions()) starts.push_back(s);
  for (const Point& s : d.seed_directions()) starts.push_back(s);

  AngleReport r;
  r.method = AngleMethod::power;
  std::optional<StartResult> best;
  bool any_converged = false;
  for (const Point& s : starts) {
    StartResult sr = run_start(c, d, s, cfg);
    r.iterations += sr.iters;
    if (!sr.converged) continue;
    any_converged = true;
    if (sr.x.size() == 0 || sr.x.isZero(0.0)) continue;
    if (!best || sr.obj > best->obj + cfg.tol_iter ||
        (sr.obj >= best->obj - cfg.tol_iter && lex_less(sr.x, best->x))) {
      best = std::move(sr);
    }
  }
  if (!any_converged) {
    throw Error(Errc::iteration_limit, "no power-iteration start converged within max_iters");
  }
  if (!best) return r;
  polish(c, d, *best, cfg);
  r.value = best->obj;
  r.pair = std::make_pair(best->x, best->y);
  return r;
}

double fibonacci_phi(long i) {
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  return std::fmod(static_cast<double>(i) * golden, 2.0 * std::numbers::pi);
}

// Point i of the n-point Fibonacci sphere, ordered by decreasing z.
Point fibonacci_point(long i, long n) {
  const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
  const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
  const double phi = fibonacci_phi(i);
  Point p(3);
  p << rho * std::cos(phi), rho * std::sin(phi), z;
  return p;
}

class Sweeper {
 public:
  Sweeper(const ConeExpr& c, const ConeExpr& d, const ToleranceConfig& cfg) : c_(c), d_(d), cfg_(cfg) {}

  // |P_C P_D s|, used for cell bounds only.
  double value(const Point& s) {
    const Point y = project(d_, s, cfg_);
    const double ny = y.norm();
    if (ny <= kTiny) return 0.0;
    const Point yhat = y / ny;
    const Point x = project(c_, yhat, cfg_);
    const double nx = x.norm();
    if (nx <= kTiny) return 0.0;
    return ny * nx;
  }

  void sample(const Point& s) {
    ++result.evaluated;
    const Point y = project(d_, s, cfg_);
    const double ny = y.norm();
    if (ny <= kTiny) return;
    const Point yhat = y / ny;
    const Point x = project(c_, yhat, cfg_);
    const double nx = x.norm();
    result.c0 = std::max(result.c0, ny * nx);
    if (nx <= kTiny) return;
    const Point xhat = x / nx;
    const double b = (xhat - yhat).norm();
    if (!result.beta || b < *result.beta) result.beta = b;
    for (double a : {0.5, 1.0, 2.0}) {
      const double g = (a * xhat - yhat).norm() / (a + 1.0);
      if (!result.gamma || g < *result.gamma) result.gamma = g;
    }
  }

  SphereSweep result;

 private:
  const ConeExpr& c_;
  const ConeExpr& d_;
  const ToleranceConfig& cfg_;
};

// Band b of the z-ordered Fibonacci grid: indices whose z lies in the b-th of
// `bands` equal slabs.
long band_of(long i, long n, long bands) { return ((2 * i + 1) * bands) / (2 * n); }

struct Cell {
  long b0, b1;  // fine bands [b0, b1)
  long s0, s1;  // fine sectors [s0, s1)
  double bound = 0.0;
};

// Grid indices grouped by fine cell (band-major), shared by every sweep of
// the same size.
struct FibonacciIndex {
  long fb = 0;
  long fs = 0;
  std::vector<std::int32_t> order;
  std::vector<std::int64_t> offsets;  // fb * fs + 1
};

std::shared_ptr<const FibonacciIndex> fibonacci_index(long n) {
  static std::mutex mu;
  static std::map<long, std::shared_ptr<const FibonacciIndex>> cache;
  std::lock_guard<std::mutex> lock(mu);
  if (auto it = cache.find(n); it != cache.end()) return it->second;

  auto idx = std::make_shared<FibonacciIndex>();
  idx->fb = std::max<long>(8, std::lround(std::sqrt(static_cast<double>(n) / 64.0)));
  idx->fs = 2 * idx->fb;
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<std::int64_t> cell_of(static_cast<std::size_t>(n));
  idx->offsets.assign(static_cast<std::size_t>(idx->fb * idx->fs + 1), 0);
  for (long i = 0; i < n; ++i) {
    const long b = band_of(i, n, idx->fb);
    const long sec = std::min(idx->fs - 1, static_cast<long>(fibonacci_phi(i) / two_pi * static_cast<double>(idx->fs)));
    cell_of[static_cast<std::size_t>(i)] = b * idx->fs + sec;
    ++idx->offsets[static_cast<std::size_t>(b * idx->fs + sec + 1)];
  }
  for (std::size_t k = 1; k < idx->offsets.size(); ++k) idx->offsets[k] += idx->offsets[k - 1];
  idx->order.resize(static_cast<std::size_t>(n));
  std::vector<std::int64_t> fill(idx->offsets.begin(), idx->offsets.end() - 1);
  for (long i = 0; i < n; ++i) {
    idx->order[static_cast<std::size_t>(fill[static_cast<std::size_t>(cell_of[static_cast<std::size_t>(i)])]++)] =
        static_cast<std::int32_t>(i);
  }
  cache.emplace(n, idx);
  return idx;
}

void sweep_fibonacci(Sweeper& sw, long n) {
  if (n <= 50000) {
    for (long i = 0; i < n; ++i) sw.sample(fibonacci_point(i, n));
    return;
  }
  const auto idx = fibonacci_index(n);
  const double two_pi = 2.0 * std::numbers::pi;
  const long fb = idx->fb;
  const long fs = idx->fs;
  const long group = 8;

  // Upper bound of |P_C P_D s| over the cell: center value plus the largest
  // arc from the center to a point of the cell (latitude move, then meridian).
  auto bound = [&](Cell& cell) {
    const double z_hi = 1.0 - 2.0 * static_cast<double>(cell.b0) / static_cast<double>(fb);
    const double z_lo = 1.0 - 2.0 * static_cast<double>(cell.b1) / static_cast<double>(fb);
    const double th_lo = std::acos(std::clamp(z_hi, -1.0, 1.0));
    const double th_hi = std::acos(std::clamp(z_lo, -1.0, 1.0));
    const double th_c = 0.5 * (th_lo + th_hi);
    const double ph_lo = two_pi * static_cast<double>(cell.s0) / static_cast<double>(fs);
    const double ph_hi = two_pi * static_cast<double>(cell.s1) / static_cast<double>(fs);
    const double ph_c = 0.5 * (ph_lo + ph_hi);
    Point center(3);
    center << std::sin(th_c) * std::cos(ph_c), std::sin(th_c) * std::sin(ph_c), std::cos(th_c);
    const double radius = 0.5 * (th_hi - th_lo) + std::sin(th_c) * 0.5 * (ph_hi - ph_lo);
    cell.bound = std::min(1.0, sw.value(center) + radius);
  };
  auto prunable = [&](const Cell& cell) { return cell.bound <= sw.result.c0 + kTiny; };
  auto by_bound = [](const Cell& a, const Cell& b) { return a.bound > b.bound; };

  std::vector<Cell> coarse;
  for (long b = 0; b < fb; b += group) {
    for (long s = 0; s < fs; s += group) {
      Cell cell{b, std::min(b + group, fb), s, std::min(s + group, fs)};
      bound(cell);
      coarse.push_back(cell);
    }
  }
  std::sort(coarse.begin(), coarse.end(), by_bound);

  std::vector<Cell> fine;
  for (const Cell& cc : coarse) {
    if (prunable(cc)) break;
    fine.clear();
    for (long b = cc.b0; b < cc.b1; ++b) {
      for (long s = cc.s0; s < cc.s1; ++s) {
        Cell cell{b, b + 1, s, s + 1};
        bound(cell);
        fine.push_back(cell);
      }
    }
    std::sort(fine.begin(), fine.end(), by_bound);
    for (const Cell& cell : fine) {
      if (prunable(cell)) break;
      const auto k = static_cast<std::size_t>(cell.b0 * fs + cell.s0);
      for (auto j = idx->offsets[k]; j < idx->offsets[k + 1]; ++j) {
        sw.sample(fibonacci_point(idx->order[static_cast<std::size_t>(j)], n));
      }
    }
  }
}

}  // namespace

SphereSweep sphere_sweep(const ConeExpr& c, const ConeExpr& d, int resolution, const ToleranceConfig& cfg) {
  require_same_dim(c, d);
  const int dim = c.dim();
  if (dim > 4) throw Error(Errc::unsupported_dimension, "sphere sweep supports dim <= 4, got " + std::to_string(dim));
  if (resolution < 8) throw Error(Errc::invalid_argument, "resolution must be at least 8");
  Sweeper sw(c, d, cfg);
  const double two_pi = 2.0 * std::numbers::pi;
  const long res = resolution;
  switch (dim) {
    case 1:
      sw.result.grid_size = 2;
      sw.sample(make_point({1.0}));
      sw.sample(make_point({-1.0}));
      break;
    case 2:
      sw.result.grid_size = res;
      for (long k = 0; k < res; ++k) {
        const double th = two_pi * static_cast<double>(k) / static_cast<double>(res);
        sw.sample(make_point({std::cos(th), std::sin(th)}));
      }
      break;
    case 3:
      sw.result.grid_size = res * res;
      sweep_fibonacci(sw, res * res);
      break;
    default: {
      sw.result.grid_size = res * res * res;
      for (long i = 0; i < res; ++i) {
        const double psi = std::numbers::pi * (static_cast<double>(i) + 0.5) / static_cast<double>(res);
        for (long j = 0; j < res; ++j) {
          const double th = std::numbers::pi * (static_cast<double>(j) + 0.5) / static_cast<double>(res);
          for (long k = 0; k < res; ++k) {
            const double ph = two_pi * static_cast<double>(k) / static_cast<double>(res);
            sw.sample(make_point({std::cos(psi), std::sin(psi) * std::cos(th),
                                  std::sin(psi) * std::sin(th) * std::cos(ph),
                                  std::sin(psi) * std::sin(th) * std::sin(ph)}));
          }
        }
      }
      break;
    }
  }
  sw.result.c0 = std::clamp(sw.result.c0, 0.0, 1.0);
  return sw.result;
}

double c0_oracle(const ConeExpr& c, const ConeExpr& d, int resolution) {
  return sphere_sweep(c, d, resolution).c0;
}

AngleReport c0(const ConeExpr& c_in, const ConeExpr& d_in, const ToleranceConfig& cfg) {
  cfg.validate();
  require_same_dim(c_in, d_in);
  const ConeExpr c = simplify(c_in);
  const ConeExpr d = simplify(d_in);
  AngleReport r;
  if (auto fast = closed_form(c, d, cfg)) {
    r = std::move(*fast);
  } else {
    r = power_iteration(c, d, cfg);
  }
  if (r.value <= 0.0) r.pair.reset();
  r.value = std::clamp(r.value, 0.0, 1.0);
  confirm_common_direction(c, d, r, cfg);
  fill_identities(r, cfg);
  return r;
}

AngleReport c_angle(const ConeExpr& k1, const ConeExpr& k2, const ToleranceConfig& cfg) {
  require_same_dim(k1, k2);
  AngleReport r = c0(k1, k2, cfg);
  // K1 cap K2 = {0} iff c0 < 1, and then E is the whole space.
  if (r.value >= 1.0 - cfg.tol_feas) {
    const ConeExpr both = simplify(intersect({k1, k2}));
    const ConeExpr e = polar(both);
    const ConeExpr a = simplify(intersect({k1, e}));
    const ConeExpr b = simplify(intersect({k2, e}));
    // Ki cap E = {0} iff c0(Ki, E) < 1. This needs only the exact projectors
    // onto Ki and E; Dykstra on Ki cap E can crawl when the part is {0} but
    // nearly tangent to E.
    auto part_trivial = [&](const ConeExpr& k) { return c0(k, e, cfg).value < 1.0 - cfg.tol_feas; };
    if (part_trivial(k1) || part_trivial(k2)) {
      r = AngleReport{};
      r.degenerate = true;
      r.method = AngleMethod::closed_form;
    } else {
      r = c0(a, b, cfg);
    }
  }
  r.kind = AngleKind::c;
  return r;
}

namespace {

IdentityEstimate identity_estimate(const ConeExpr& c, const ConeExpr& d, const ToleranceConfig& cfg, int resolution,
                                   bool want_gamma) {
  const AngleReport r = c0(c, d, cfg);
  if (r.value <= cfg.tol_feas) {
    throw Error(Errc::identity_not_applicable, "c0 = " + std::to_string(r.value) + " is not positive");
  }
  IdentityEstimate out;
  out.c0 = r.value;
  const double b = std::sqrt(std::max(0.0, 2.0 - 2.0 * r.value));
  out.value = want_gamma ? b / 2.0 : b;
  if (resolution > 0 && c.dim() <= 4) {
    const SphereSweep sw = sphere_sweep(c, d, resolution, cfg);
    out.sampled = want_gamma ? sw.gamma : sw.beta;
    if (out.sampled) out.deviation = std::abs(out.value - *out.sampled);
  }
  return out;
}

}  // namespace

IdentityEstimate beta(const ConeExpr& c, const ConeExpr& d, const ToleranceConfig& cfg, int resolution) {
  return identity_estimate(c, d, cfg, resolution, false);
}

IdentityEstimate gamma(const ConeExpr& c, const ConeExpr& d, const ToleranceConfig& cfg, int resolution) {
  return identity_estimate(c, d, cfg, resolution, true);
}

AngleReport principal_vectors(const ConeExpr& c, const ConeExpr& d, const ToleranceConfig& cfg) {
  AngleReport r = c0(c, d, cfg);
  if (r.value <= cfg.tol_feas || !r.pair) {
    const Point zero = Point::Zero(c.dim());
    r.pair = std::make_pair(zero, zero);
  }
  r.certificate = certify_principal(c, d, r.pair->first, r.pair->second, cfg);
  return r;
}

PrincipalCertificate certify_principal(const ConeExpr& c, const ConeExpr& d, const Point& x, const Point& y,
                                       const ToleranceConfig& cfg) {
  require_same_dim(c, x);
  require_same_dim(d, y);
  PrincipalCertificate cert;
  const double rho = x.dot(y);
  const Point v1 = y - rho * x;
  const Point v2 = x - rho * y;
  // Distance to the polar equals the norm of the projection onto the cone.
  cert.polar_residual_1 = project(c, v1, cfg).norm();
  cert.polar_residual_2 = project(d, v2, cfg).norm();

  const ConeExpr c_polar = polar(c);
  const ConeExpr d_polar = polar(d);
  for (double lambda : {0.5, 1.0, 2.0}) {
    const Point a = x + lambda * v1;
    const Point b = y + lambda * v2;
    cert.projection_identity_residuals.push_back((project(c, a, cfg) - x).norm());
    cert.projection_identity_residuals.push_back((project(c_polar, a, cfg) - lambda * v1).norm());
    cert.projection_identity_residuals.push_back((project(d, b, cfg) - y).norm());
    cert.projection_identity_residuals.push_back((project(d_polar, b, cfg) - lambda * v2).norm());
  }

  const bool unit_pair = std::abs(x.norm() - 1.0) <= cfg.tol_feas && std::abs(y.norm() - 1.0) <= cfg.tol_feas;
  if (unit_pair && std::abs(rho) < 1.0 - cfg.tol_feas) {
    for (double a : {0.1, 1.0, 10.0}) {
      if (member(c, x + a * v1, cfg.tol_feas)) ++cert.boundary_violations;
      if (member(d, y + a * v2, cfg.tol_feas)) ++cert.boundary_violations;
    }
  }

  double worst = std::max(cert.polar_residual_1, cert.polar_residual_2);
  for (double v : cert.projection_identity_residuals) worst = std::max(worst, v);
  cert.passed = worst <= cfg.tol_feas && cert.boundary_violations == 0;
  return cert;
}

}  // namespace conangle
