#include "conangle/cyclic.hpp"

#include <algorithm>
#include <cmath>

#include "conangle/angles.hpp"
#include "conangle/error.hpp"
#include "conangle/projection.hpp"

namespace conangle {

Point TranslatedSet::project(const Point& x, const ToleranceConfig& cfg) const {
  return anchor + conangle::project(base, x - anchor, cfg);
}

TranslatedSet translated(const ConeExpr& base) { return {base, Point::Zero(base.dim())}; }

std::vector<double> Trace::ratios() const {
  std::vector<double> out;
  for (std::size_t k = 0; k + 1 < errors.size(); ++k) {
    out.push_back(errors[k] > 0.0 ? errors[k + 1] / errors[k] : 0.0);
  }
  return out;
}

Trace run_cyclic(const TranslatedSet& c, const TranslatedSet& d, const Point& x0, const ToleranceConfig& cfg) {
  require_same_dim(c.base, d.base);
  require_same_dim(c.base, c.anchor);
  require_same_dim(d.base, d.anchor);
  require_same_dim(c.base, x0);
  if (c.anchor != d.anchor) throw Error(Errc::invalid_argument, "the two sets must share their anchor");

  Trace tr;
  const Point& a = c.anchor;
  tr.iterates.push_back(x0);
  tr.errors.push_back((x0 - a).norm());
  Point x = x0;
  while (true) {
    if (tr.errors.back() <= cfg.tol_iter) {
      tr.converged = true;
      break;
    }
    const Point next = d.project(c.project(x, cfg), cfg);
    if ((next - x).norm() <= cfg.tol_iter * (1.0 + tr.errors.back())) {
      // Fixed point: x already lies in C cap D.
      tr.converged = true;
      break;
    }
    if (tr.iterations() >= cfg.max_iters) break;
    x = next;
    tr.iterates.push_back(x);
    tr.errors.push_back((x - a).norm());
  }
  for (std::size_t k = 2; k < tr.errors.size(); ++k) {
    if (tr.errors[k] > tr.errors[k - 1] + 1e-12) tr.monotone = false;
  }
  tr.limit_estimate = tr.iterates.back();
  return tr;
}

double theoretical_rate(const ConeExpr& c, const ConeExpr& d, const ToleranceConfig& cfg) {
  return c_angle(c, d, cfg).value;
}

double estimate_rate(const std::vector<double>& errors, double tol_zero) {
  std::size_t n = 0;
  while (n < errors.size() && errors[n] > tol_zero) ++n;
  if (n < 5) {
    throw Error(Errc::insufficient_data, "need at least 5 positive errors, got " + std::to_string(n));
  }
  const std::size_t first = n / 2;
  const double steps = static_cast<double>(n - 1 - first);
  const double rate = std::pow(errors[n - 1] / errors[first], 1.0 / steps);
  return std::clamp(rate, 0.0, 1.0);
}

double estimate_rate(const Trace& trace, double tol_zero) { return estimate_rate(trace.errors, tol_zero); }

}  // namespace conangle
