#include <doctest.h>

#include <cmath>

#include "conangle/error.hpp"
#include "conangle/projection.hpp"
#include "support/random_cones.hpp"

using namespace conangle;
using conangle::testing::Rng;

namespace {

bool close(const Point& a, const Point& b, double tol = 1e-12) { return (a - b).norm() <= tol; }

ConeExpr orthant2() { return ConeExpr::generated({make_point({1, 0}), make_point({0, 1})}); }

// Projection onto a generated cone by trying every face: for each generator
// subset, project onto its span and keep the closest result with nonnegative
// coefficients.
Point face_enumeration(const Matrix& g, const Point& x) {
  const int n = static_cast<int>(g.cols());
  Point best = Point::Zero(x.size());
  for (int mask = 1; mask < (1 << n); ++mask) {
    Matrix sub(g.rows(), 0);
    for (int j = 0; j < n; ++j) {
      if (mask & (1 << j)) {
        sub.conservativeResize(Eigen::NoChange, sub.cols() + 1);
        sub.col(sub.cols() - 1) = g.col(j);
      }
    }
    const Eigen::VectorXd lam = sub.completeOrthogonalDecomposition().solve(x);
    if (lam.minCoeff() < -1e-12) continue;
    const Point p = sub * lam;
    if ((x - p).norm() < (x - best).norm()) best = p;
  }
  return best;
}

}  // namespace

TEST_CASE("projection examples") {
  const ConeExpr k = ConeExpr::second_order(3);
  const Point x = make_point({0, 1, 0});
  SUBCASE("second-order cone") {
    const Point p = project(k, x);
    CHECK(close(p, make_point({0, 0.5, 0.5})));
    // p in K, x - p orthogonal to p, x - p = (0, 1/2, -1/2) in -K
    const Point r = x - p;
    CHECK(p.head(2).norm() <= p(2) + 1e-15);
    CHECK(std::abs(r.dot(p)) <= 1e-15);
    CHECK(r.head(2).norm() <= -r(2) + 1e-15);
  }
  SUBCASE("polar of the second-order cone") {
    const Point q = project(polar(k), x);
    CHECK(close(q, make_point({0, 0.5, -0.5})));
    CHECK(close(q, project(ConeExpr::neg_node(k), x)));
  }
  SUBCASE("ray with an obtuse point") {
    CHECK(project(make_ray(make_point({1, 0})), make_point({-3, 4})).norm() == 0.0);
  }
  SUBCASE("zero input") {
    Rng rng(1);
    for (int i = 0; i < 20; ++i) {
      const ConeExpr c = testing::random_atom(rng, 3);
      CHECK(project(c, Point::Zero(3)).norm() == 0.0);
    }
  }
}

TEST_CASE("dykstra examples") {
  CHECK(close(dykstra({orthant2(), orthant2()}, make_point({-1, 2})), make_point({0, 2}), 1e-9));
  CHECK(dykstra({orthant2(), ConeExpr::halfspace({make_point({1, 1})})}, make_point({3, 1})).norm() <= 1e-9);
  const ConeExpr m = ConeExpr::subspace(3, {make_point({1, 0, -1})});
  CHECK(dykstra({ConeExpr::second_order(3), m}, make_point({1, 0, -1})).norm() <= 1e-6);
  // the point (-1, 0, 1) spans K cap M, so it is its own projection
  CHECK(close(dykstra({ConeExpr::second_order(3), m}, make_point({-1, 0, 1})), make_point({-1, 0, 1}), 1e-6));
}

TEST_CASE("dykstra budget") {
  ToleranceConfig cfg;
  cfg.max_iters = 2;
  Matrix tilt = Matrix::Identity(3, 3);
  tilt(1, 1) = tilt(2, 2) = std::cos(0.3);
  tilt(2, 1) = std::sin(0.3);
  tilt(1, 2) = -std::sin(0.3);
  const ConeExpr a = ConeExpr::second_order(3);
  const ConeExpr b = ConeExpr::second_order(3, tilt);
  try {
    dykstra({a, b}, make_point({2, 1, 0.5}), cfg);
    FAIL("expected IterationLimit");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::iteration_limit);
  }
  CHECK_THROWS_AS(dykstra({}, make_point({1, 2})), Error);
}

TEST_CASE("distance examples") {
  const ConeExpr k = ConeExpr::second_order(3);
  CHECK(std::abs(distance(k, make_point({-10, 1, 10})) - (std::sqrt(101.0) - 10.0) / std::sqrt(2.0)) <= 1e-12);
  CHECK(distance(orthant2(), make_point({1, 1})) == 0.0);
  CHECK(std::abs(distance(make_ray(make_point({1, 0})), make_point({0, 5})) - 5.0) <= 1e-15);
}

TEST_CASE("certificate examples") {
  const ConeExpr k = ConeExpr::second_order(3);
  CHECK(certify_projection(k, make_point({0, 1, 0}), make_point({0, 0.5, 0.5})).passed);
  CHECK(certify_projection(make_ray(make_point({1, 0})), make_point({-3, 4}), Point::Zero(2)).passed);
  const ProjectionCertificate bad = certify_projection(orthant2(), make_point({1, 1}), make_point({1, 0}));
  CHECK_FALSE(bad.passed);
  CHECK(bad.membership_residual == 0.0);
  CHECK(bad.polar_residual > 0.5);
}

TEST_CASE("generated projection matches face enumeration") {
  Rng rng(21);
  for (int i = 0; i < 300; ++i) {
    const int dim = 2 + i % 4;
    const ConeExpr g = testing::random_generated(rng, dim);
    const Point x = testing::random_gaussian(rng, dim);
    CHECK(close(project(g, x), face_enumeration(g.vectors(), x), 1e-9));
  }
}

TEST_CASE("second-order projection in rotated coordinates") {
  Rng rng(22);
  for (int i = 0; i < 200; ++i) {
    const int dim = 2 + i % 5;
    const Matrix r = testing::random_rotation(rng, dim);
    const ConeExpr k = ConeExpr::second_order(dim, r);
    const Point x = testing::random_gaussian(rng, dim);
    const Point y = r.transpose() * x;
    // closed form on (z, t)
    const double nz = y.head(dim - 1).norm(), t = y(dim - 1);
    Point py = y;
    if (nz <= -t) {
      py.setZero();
    } else if (nz > t) {
      py.head(dim - 1) *= (t + nz) / (2.0 * nz);
      py(dim - 1) = (t + nz) / 2.0;
    }
    CHECK(close(project(k, x), r * py, 1e-12));
  }
}

TEST_CASE("exact composite projection matches dykstra") {
  Rng rng(23);
  for (int i = 0; i < 150; ++i) {
    const int dim = 2 + i % 3;
    std::vector<ConeExpr> parts{testing::random_atom(rng, dim, testing::AtomKind::soc),
                                testing::random_halfspace(rng, dim)};
    if (i % 2) parts.push_back(testing::random_generated(rng, dim));
    const ConeExpr k = ConeExpr::intersect_node(parts);
    const Point x = testing::random_gaussian(rng, dim);
    ToleranceConfig cfg;
    cfg.max_iters = 200000;
    cfg.tol_iter = 1e-12;
    cfg.tol_zero = 1e-13;
    CHECK(close(project(k, x), dykstra(parts, x, cfg), 1e-6));
  }
}

TEST_CASE("projection properties on random atoms") {
  Rng rng(24);
  const double tol = 1e-9;
  for (int i = 0; i < 1000; ++i) {
    const int dim = 2 + i % 5;
    const ConeExpr k = testing::random_atom(rng, dim, testing::kAtomKinds[(i / 5) % 5]);
    const Point x = 2.0 * testing::random_gaussian(rng, dim);
    const Point y = 2.0 * testing::random_gaussian(rng, dim);
    const Point p = project(k, x);
    const Point q = project(polar(k), x);
    const double nx = 1.0 + x.norm();
    // Moreau
    CHECK((x - p - q).norm() <= tol * nx);
    CHECK(std::abs(p.dot(q)) <= tol * nx * nx);
    // idempotence, nonexpansiveness, homogeneity
    CHECK(close(project(k, p), p, tol));
    CHECK((p - project(k, y)).norm() <= (x - y).norm() + tol);
    CHECK(close(project(k, 3.5 * x), 3.5 * p, tol * 3.5 * nx));
    CHECK(certify_projection(k, x, p).passed);
  }
}

TEST_CASE("composites project consistently") {
  Rng rng(25);
  for (int i = 0; i < 200; ++i) {
    const int dim = 2 + i % 3;
    const ConeExpr a = testing::random_atom(rng, dim);
    const ConeExpr b = testing::random_atom(rng, dim);
    const ConeExpr k = intersect({a, b});
    const Point x = testing::random_gaussian(rng, dim);
    const Point p = project(k, x);
    CHECK(distance(a, p) <= 1e-7);
    CHECK(distance(b, p) <= 1e-7);
    CHECK(close(project(negate(k), x), -project(k, -x), 1e-9));
    CHECK(close(project(polar(k), x), x - p, 1e-9));
  }
}

TEST_CASE("dimension mismatch") {
  try {
    project(orthant2(), make_point({1, 2, 3}));
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::dimension_mismatch);
  }
}
