#pragma once

#include <initializer_list>
#include <span>
#include <string>

#include <Eigen/Dense>

namespace conangle {

// A point of R^n. The dimension tag is the vector size.
using Point = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline Point make_point(std::initializer_list<double> coords) {
  Point p(static_cast<Eigen::Index>(coords.size()));
  Eigen::Index i = 0;
  for (double c : coords) p(i++) = c;
  return p;
}

inline Point make_point(std::span<const double> coords) {
  return Eigen::Map<const Point>(coords.data(), static_cast<Eigen::Index>(coords.size()));
}

bool all_finite(const Point& p);

// x / |x|, or the zero vector when |x| <= tol.
Point normalized_or_zero(const Point& x, double tol);

// "(a, b, c)" with `precision` significant digits.
std::string format_point(const Point& p, int precision = 10);

}  // namespace conangle
