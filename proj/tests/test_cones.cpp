#include <doctest.h>

#include <cmath>

#include "conangle/cone.hpp"
#include "conangle/error.hpp"
#include "conangle/projection.hpp"
#include "support/random_cones.hpp"

using namespace conangle;
using conangle::testing::Rng;

namespace {

const double kHalfSqrt2 = std::sqrt(2.0) / 2.0;

bool close(const Point& a, const Point& b, double tol = 1e-12) { return (a - b).norm() <= tol; }

ConeExpr positive_orthant2() { return ConeExpr::generated({make_point({1, 0}), make_point({0, 1})}); }

// Membership straight from the set definitions, independent of the library's
// member(): a ray by the angle, a subspace by the residual, a halfspace cone
// by the inequalities, a second-order cone by |z| <= t in rotated coordinates.
bool member_by_definition(const ConeExpr& k, const Point& x, double tol) {
  const Matrix& v = k.vectors();
  switch (k.kind()) {
    case ConeKind::zero:
      return x.norm() <= tol;
    case ConeKind::ray: {
      const double s = v.col(0).dot(x);
      return s >= -tol && (x - s * v.col(0)).norm() <= tol;
    }
    case ConeKind::subspace:
      return (x - v * (v.transpose() * x)).norm() <= tol;
    case ConeKind::halfspace:
      return (v.transpose() * x).maxCoeff() <= tol;
    case ConeKind::second_order: {
      const Point y = k.rotation_or_identity().transpose() * x;
      return y.head(y.size() - 1).norm() <= y(y.size() - 1) + tol;
    }
    default:
      FAIL("no definition oracle for this kind");
      return false;
  }
}

}  // namespace

TEST_CASE("make_ray normalizes its direction") {
  CHECK(close(make_ray(make_point({1, 0})).vectors().col(0), make_point({1, 0})));
  CHECK(close(make_ray(make_point({2, 0})).vectors().col(0), make_point({1, 0})));
  CHECK(close(make_ray(make_point({1, 0, -1})).vectors().col(0), make_point({kHalfSqrt2, 0, -kHalfSqrt2})));
}

TEST_CASE("zero directions are rejected") {
  try {
    make_ray(make_point({0, 1e-13}));
    FAIL("expected ZeroDirection");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::zero_direction);
  }
  CHECK_THROWS_AS(ConeExpr::generated({make_point({1, 0}), make_point({0, 0})}), Error);
  CHECK_THROWS_AS(ConeExpr::halfspace({make_point({0, 0, 0})}), Error);
}

TEST_CASE("mixed dimensions are rejected") {
  try {
    ConeExpr::generated({make_point({1, 0}), make_point({0, 1, 0})});
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::dimension_mismatch);
  }
  CHECK_THROWS_AS(intersect({positive_orthant2(), ConeExpr::second_order(3)}), Error);
  CHECK_THROWS_AS(member(positive_orthant2(), make_point({1, 1, 1}), 1e-9), Error);
}

TEST_CASE("polar rewrites") {
  SUBCASE("nonnegative orthant goes to the nonpositive orthant") {
    const ConeExpr p = polar(positive_orthant2());
    CHECK(p.kind() == ConeKind::halfspace);
    CHECK(member(p, make_point({-1, -1}), 1e-12));
    CHECK(member(p, make_point({-3, 0}), 1e-12));
    CHECK_FALSE(member(p, make_point({0.1, -1}), 1e-12));
  }
  SUBCASE("biduality of a ray") {
    const ConeExpr r = make_ray(make_point({1, 0}));
    CHECK(polar(polar(r)) == r);
  }
  SUBCASE("second-order cone goes to its negative") {
    const ConeExpr p = polar(ConeExpr::second_order(3));
    CHECK(p.kind() == ConeKind::neg);
    // y3 <= -sqrt(y1^2 + y2^2)
    CHECK(member(p, make_point({0.6, 0.8, -1.0}), 1e-12));
    CHECK(member(p, make_point({0, 0, -2}), 1e-12));
    CHECK_FALSE(member(p, make_point({0.6, 0.8, -0.9}), 1e-12));
  }
  SUBCASE("subspace goes to its orthocomplement") {
    const ConeExpr m = ConeExpr::subspace(3, {make_point({1, 0, -1})});
    const ConeExpr p = polar(m);
    CHECK(p.kind() == ConeKind::subspace);
    CHECK(p.vectors().cols() == 2);
    CHECK(std::abs((p.vectors().transpose() * m.vectors()).norm()) < 1e-12);
  }
  SUBCASE("halfspace cone goes to the generated cone of its normals") {
    const ConeExpr h = ConeExpr::halfspace({make_point({1, 1})});
    const ConeExpr p = polar(h);
    CHECK(member(p, make_point({2, 2}), 1e-12));
    CHECK_FALSE(member(p, make_point({-1, -1}), 1e-12));
  }
}

TEST_CASE("dual cones") {
  SUBCASE("dual of a single halfspace is the opposite ray") {
    const ConeExpr d = dual(ConeExpr::halfspace({make_point({1, 1})}));
    CHECK(d.kind() == ConeKind::ray);
    CHECK(close(d.vectors().col(0), make_point({-kHalfSqrt2, -kHalfSqrt2})));
  }
  SUBCASE("dual of a subspace is its orthocomplement") {
    const ConeExpr m = ConeExpr::subspace(3, {make_point({1, 0, -1})});
    const ConeExpr d = dual(m);
    CHECK(d.kind() == ConeKind::subspace);
    CHECK(member(d, make_point({1, 0, 1}), 1e-12));
    CHECK(member(d, make_point({0, -4, 0}), 1e-12));
    CHECK_FALSE(member(d, make_point({1, 0, -1}), 1e-12));
  }
  SUBCASE("double dual of a generated cone") {
    const ConeExpr g = ConeExpr::generated({make_point({1, 0, 0}), make_point({1, 1, 0}), make_point({0, 1, 1})});
    const ConeExpr dd = dual(dual(g));
    Rng rng(1);
    for (int i = 0; i < 200; ++i) {
      const Point x = testing::random_gaussian(rng, 3);
      CHECK(member(dd, x, 1e-9) == member(g, x, 1e-9));
    }
  }
}

TEST_CASE("member examples") {
  const ConeExpr k = ConeExpr::second_order(3);
  CHECK(member(k, make_point({-1, 0, 1}), 1e-12));  // sqrt(1 + 0) = 1 <= 1
  CHECK_FALSE(member(k, make_point({-1, 0, 0.99}), 1e-12));
  CHECK(member(positive_orthant2(), make_point({1, 1}), 1e-12));
  CHECK(member(polar(positive_orthant2()), make_point({-1, -1}), 1e-12));
  CHECK(member(ConeExpr::zero(2), make_point({0, 0}), 1e-12));
  CHECK_FALSE(member(ConeExpr::zero(2), make_point({0, 1e-3}), 1e-12));
}

TEST_CASE("is_linear_subspace and is_trivial") {
  CHECK(is_linear_subspace(ConeExpr::subspace(2, {make_point({1, 0})})));
  CHECK_FALSE(is_linear_subspace(positive_orthant2()));
  CHECK_FALSE(is_linear_subspace(make_ray(make_point({1, 2}))));
  CHECK_FALSE(is_linear_subspace(ConeExpr::second_order(3)));
  CHECK(is_linear_subspace(ConeExpr::generated({make_point({1, 0}), make_point({-1, 0})})));
  CHECK(is_linear_subspace(ConeExpr::zero(3)));

  CHECK(is_trivial(intersect({positive_orthant2(), ConeExpr::halfspace({make_point({1, 1})})})));
  CHECK_FALSE(is_trivial(intersect({ConeExpr::second_order(3), ConeExpr::subspace(3, {make_point({1, 0, -1})})})));
  CHECK(is_trivial(ConeExpr::halfspace({make_point({1, 0}), make_point({0, 1}), make_point({-1, -1})})));
  CHECK_FALSE(is_trivial(ConeExpr::halfspace({make_point({1, 0}), make_point({-1, 0})})));
  CHECK(is_trivial(ConeExpr::subspace(3, {})));
}

TEST_CASE("subspace bases are orthonormal") {
  Rng rng(2);
  for (int i = 0; i < 50; ++i) {
    const int dim = 2 + i % 5;
    std::vector<Point> raw;
    for (int j = 0; j < dim - 1; ++j) raw.push_back(testing::random_gaussian(rng, dim));
    raw.push_back(raw[0] + 2.0 * raw.back());  // dependent vector
    const Matrix b = ConeExpr::subspace(dim, raw).vectors();
    CHECK(b.cols() == dim - 1);
    CHECK((b.transpose() * b - Matrix::Identity(b.cols(), b.cols())).norm() <= 1e-12);
  }
}

TEST_CASE("polar(polar(K)) denotes K for every atom") {
  Rng rng(3);
  int disagreements = 0;
  for (int i = 0; i < 1000; ++i) {
    const int dim = 2 + i % 5;
    const ConeExpr k = testing::random_atom(rng, dim, testing::kAtomKinds[(i / 5) % 5]);
    const ConeExpr kk = polar(polar(k));
    const Point x = testing::random_gaussian(rng, dim);
    if (k.kind() == ConeKind::generated) {
      // generated cones are decided through their facets; compare with the
      // exact distance instead of the definition oracle
      if (member(kk, x, 1e-9) != (distance(k, x) <= 1e-9)) ++disagreements;
      continue;
    }
    if (member(kk, x, 1e-9) != member_by_definition(k, x, 1e-9)) ++disagreements;
  }
  CHECK(disagreements == 0);
}

TEST_CASE("member of the polar agrees with the generator-side definition") {
  Rng rng(4);
  for (int i = 0; i < 500; ++i) {
    const int dim = 2 + i % 5;
    const ConeExpr k = testing::random_atom(rng, dim, testing::kAtomKinds[i % 5]);
    const auto gens = k.generator_list();
    if (!gens) continue;  // second-order cones
    const Point x = testing::random_gaussian(rng, dim);
    double worst = -1e300;
    for (const Point& g : *gens) worst = std::max(worst, g.normalized().dot(x));
    if (gens->empty()) worst = 0.0;
    CHECK(member(polar(k), x, 1e-9) == (worst <= 1e-9 * std::max(1.0, x.norm())));
  }
}

TEST_CASE("dual agrees with the raw negated polar node") {
  Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    const int dim = 2 + i % 4;
    const ConeExpr k = testing::random_atom(rng, dim);
    const ConeExpr a = dual(k);
    const ConeExpr b = ConeExpr::neg_node(ConeExpr::polar_node(k));
    const Point x = testing::random_gaussian(rng, dim);
    CHECK(member(a, x, 1e-9) == member(b, x, 1e-9));
  }
}

TEST_CASE("simplify keeps the denoted set") {
  Rng rng(6);
  for (int i = 0; i < 200; ++i) {
    const int dim = 2 + i % 3;
    const ConeExpr k = intersect({testing::random_generated(rng, dim), testing::random_halfspace(rng, dim)});
    const ConeExpr s = simplify(k);
    const Point x = testing::random_gaussian(rng, dim);
    CHECK((project(k, x) - project(s, x)).norm() <= 1e-9);
  }
}
