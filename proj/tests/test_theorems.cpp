#include <doctest.h>

#include <cmath>

#include "conangle/error.hpp"
#include "conangle/nnls.hpp"
#include "conangle/projection.hpp"
#include "conangle/theorems.hpp"
#include "support/random_cones.hpp"

using namespace conangle;
using conangle::testing::Rng;

namespace {

const double kHalfSqrt2 = std::sqrt(2.0) / 2.0;

bool close(const Point& a, const Point& b, double tol = 1e-9) { return (a - b).norm() <= tol; }

ConeExpr orthant2() { return ConeExpr::generated({make_point({1, 0}), make_point({0, 1})}); }
ConeExpr k2() { return ConeExpr::halfspace({make_point({1, 1})}); }
ConeExpr soc3() { return ConeExpr::second_order(3); }
ConeExpr m3() { return ConeExpr::subspace(3, {make_point({1, 0, -1})}); }
ConeExpr k11() { return ConeExpr::generated({make_point({1, 0}), make_point({1, 1})}); }
ConeExpr m11() { return ConeExpr::subspace(2, {make_point({1, 0})}); }

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return Errc::invalid_argument;
}

}  // namespace

TEST_CASE("trivial intersection") {
  const TrivialityResult a = check_trivial_intersection(orthant2(), k2());
  CHECK(a.trivial);
  CHECK_FALSE(a.witness);

  const TrivialityResult b = check_trivial_intersection(soc3(), m3());
  CHECK_FALSE(b.trivial);
  REQUIRE(b.witness);
  const Point w = make_point({-kHalfSqrt2, 0, kHalfSqrt2});
  CHECK((close(*b.witness, w, 1e-6) || close(*b.witness, -w, 1e-6)));

  const ConeExpr r = make_ray(make_point({1, 0}));
  const TrivialityResult c = check_trivial_intersection(r, r);
  CHECK_FALSE(c.trivial);
  REQUIRE(c.witness);
  CHECK(close(*c.witness, make_point({1, 0})));
}

TEST_CASE("closedness conditions") {
  SUBCASE("second-order cone plus a line: none holds") {
    const ClosednessReport r = check_sum_closedness(soc3(), m3());
    REQUIRE(r.conditions.size() == 5);
    for (const ConditionReport& c : r.conditions) CHECK_FALSE(c.holds);
    CHECK_FALSE(r.conclusion_sum_closed);
    CHECK(r.consistent);
  }
  SUBCASE("orthant plus halfspace: closed sum but no condition holds") {
    const ClosednessReport r = check_sum_closedness(orthant2(), k2());
    for (const ConditionReport& c : r.conditions) CHECK_FALSE(c.holds);
    CHECK_FALSE(r.conclusion_sum_closed);
    CHECK(r.consistent);
  }
  SUBCASE("orthogonal rays: all hold") {
    const ClosednessReport r = check_sum_closedness(make_ray(make_point({1, 0})), make_ray(make_point({0, 1})));
    for (const ConditionReport& c : r.conditions) {
      CHECK(c.holds);
      CHECK(c.conclusion_sum_closed);
    }
    CHECK(r.conclusion_sum_closed);
    CHECK(r.consistent);
    CHECK(r.conditions[0].condition_id == ConditionId::c0_lt_1);
    CHECK(r.conditions[0].numeric_value == 0.0);
  }
}

TEST_CASE("nonclosedness probe follows the closed form") {
  const std::vector<double> ts{0, 1, 10, 100, 1000};
  const auto samples = nonclosedness_probe(soc3(), make_point({0, 1, 0}), make_point({1, 0, -1}), ts);
  REQUIRE(samples.size() == ts.size());
  for (const ProbeSample& s : samples) {
    // z - t m = (-t, 1, t): (|(-t, 1)| - t) / sqrt(2)
    const double expected = (std::sqrt(s.t * s.t + 1.0) - s.t) / std::sqrt(2.0);
    CHECK(std::abs(s.distance - expected) <= 1e-12);
  }
  for (std::size_t i = 1; i < samples.size(); ++i) CHECK(samples[i].distance < samples[i - 1].distance);

  // the cone form uses the unit direction of the line
  const auto unit = nonclosedness_probe(soc3(), m3(), make_point({0, 1, 0}), {10.0 * std::sqrt(2.0)});
  CHECK(std::abs(unit[0].distance - samples[2].distance) <= 1e-12);
  CHECK(code_of([] { nonclosedness_probe(soc3(), soc3(), make_point({0, 1, 0}), {1.0}); }) == Errc::invalid_argument);
  CHECK(code_of([] { nonclosedness_probe(soc3(), make_point({0, 1}), make_point({1, 0, -1}), {1.0}); }) ==
        Errc::dimension_mismatch);
}

TEST_CASE("polar intersection witness") {
  SUBCASE("orthant and halfspace") {
    const PolarWitness w = polar_intersection_witness(orthant2(), k2());
    CHECK(close(w.w1, make_point({-kHalfSqrt2, -kHalfSqrt2})));
    CHECK(close(w.w2, make_point({kHalfSqrt2, kHalfSqrt2})));
  }
  SUBCASE("nontrivial intersection violates the hypothesis") {
    CHECK(code_of([] { polar_intersection_witness(k11(), m11()); }) == Errc::hypothesis_violated);
  }
  SUBCASE("subspace K1 violates the hypothesis") {
    CHECK(code_of([] { polar_intersection_witness(m11(), make_ray(make_point({0, 1}))); }) ==
          Errc::hypothesis_violated);
  }
  SUBCASE("second-order cone and a downward ray") {
    const ConeExpr down = make_ray(make_point({0, 0, -1}));
    const PolarWitness w = polar_intersection_witness(soc3(), down);
    CHECK(std::abs(w.w1.norm() - 1.0) <= 1e-9);
    // w1 in -K with <w1, (0, 0, -1)> >= 0
    CHECK(w.w1.head(2).norm() <= -w.w1(2) + 1e-9);
    CHECK(w.w1(2) <= 1e-9);
    CHECK(close(w.w2, -w.w1, 0.0));
  }
}

TEST_CASE("polar witnesses on random pairs pass re-validation") {
  Rng rng(41);
  int found = 0;
  for (int i = 0; i < 60; ++i) {
    const int dim = 2 + i % 2;
    const ConeExpr a = testing::random_polyhedral_nonsubspace(rng, dim);
    const ConeExpr b = testing::random_atom(rng, dim);
    if (!check_trivial_intersection(a, b).trivial) continue;
    const PolarWitness w = polar_intersection_witness(a, b);
    ++found;
    CHECK(std::abs(w.w1.norm() - 1.0) <= 1e-9);
    CHECK(member(polar(a), w.w1, 1e-9));
    CHECK(member(dual(b), w.w1, 1e-9));
    CHECK(member(dual(a), w.w2, 1e-9));
    CHECK(member(polar(b), w.w2, 1e-9));
  }
  CHECK(found > 10);
}

TEST_CASE("dichotomy examples") {
  CHECK(dichotomy_check(orthant2(), k2()).branch == Branch::polar_one);
  CHECK(dichotomy_check(k11(), m11()).branch == Branch::primal_one);
  const DichotomyResult r = dichotomy_check(soc3(), m3());
  CHECK(r.branch == Branch::primal_one);
  CHECK(std::abs(r.value - 1.0) <= 1e-9);
  CHECK(code_of([] { dichotomy_check(m3(), soc3()); }) == Errc::hypothesis_violated);
}

TEST_CASE("sums are closed when c0(K1, -K2) < 1") {
  // For polyhedral pairs the sum is the cone generated by both generator sets;
  // project onto it and split the projection back into the two cones.
  Rng rng(42);
  int checked = 0;
  for (int i = 0; i < 40 && checked < 15; ++i) {
    const int dim = 2 + i % 2;
    const ConeExpr a = testing::random_generated(rng, dim);
    const ConeExpr b = testing::random_generated(rng, dim);
    if (c0(a, negate(b)).value >= 1.0 - 1e-3) continue;
    ++checked;
    std::vector<Point> all = a.vector_list();
    for (const Point& g : b.vector_list()) all.push_back(g);
    const ConeExpr sum = ConeExpr::generated(all);
    for (int j = 0; j < 100; ++j) {
      const Point z = testing::random_gaussian(rng, dim);
      const Point p = project(sum, z);
      // p = u + v with u in a, v in b: v = P_b(p - u) at u = P_a of the split
      const Matrix ga = a.vectors(), gb = b.vectors();
      Matrix g(dim, ga.cols() + gb.cols());
      g << ga, gb;
      const NnlsResult split = nnls(g, p, 1e-14, 10000);
      const Point u = ga * split.coeffs.head(ga.cols());
      const Point v = gb * split.coeffs.tail(gb.cols());
      CHECK(member(a, u, 1e-9));
      CHECK(member(b, v, 1e-9));
      CHECK((u + v - p).norm() <= 1e-6);
    }
  }
  CHECK(checked > 5);
}

TEST_CASE("ivt orthogonal point") {
  const IvtPoint a = ivt_orthogonal_point(make_point({0, 1}), make_point({1, 1}), make_point({1, -1}));
  CHECK(std::abs(a.t - 0.5) <= 1e-15);
  CHECK(close(a.z, make_point({1, 0}), 1e-15));
  const IvtPoint b = ivt_orthogonal_point(make_point({1, 0}), make_point({3, 0}), make_point({-1, 5}));
  CHECK(std::abs(b.t - 0.25) <= 1e-15);
  CHECK(close(b.z, make_point({0, 3.75}), 1e-15));
  const IvtPoint c = ivt_orthogonal_point(make_point({0, 0, 1}), make_point({1, 1, 2}), make_point({0, 1, -1}));
  CHECK(std::abs(c.t - 1.0 / 3.0) <= 1e-15);
  CHECK(close(c.z, make_point({1.0 / 3.0, 1, 0}), 1e-15));
  CHECK(code_of([] { ivt_orthogonal_point(make_point({0, 1}), make_point({1, -1}), make_point({1, 1})); }) ==
        Errc::sign_condition_violated);
  CHECK(code_of([] { ivt_orthogonal_point(make_point({0, 1}), make_point({1, 1, 0}), make_point({1, 1})); }) ==
        Errc::dimension_mismatch);
}
