#include "conangle/point.hpp"

#include <cstdio>

namespace conangle {

bool all_finite(const Point& p) { return p.allFinite(); }

Point normalized_or_zero(const Point& x, double tol) {
  const double n = x.norm();
  if (!(n > tol)) return Point::Zero(x.size());
  return x / n;
}

std::string format_point(const Point& p, int precision) {
  std::string out = "(";
  char buf[64];
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    double v = p(i);
    if (v == 0.0) v = 0.0;  // drop the sign of -0
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (i > 0) out += ", ";
    out += buf;
  }
  out += ")";
  return out;
}

}  // namespace conangle
