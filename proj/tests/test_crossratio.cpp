#include <cmath>
#include <numbers>
#include <random>

#include "cpack/crossratio.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace cpack;

namespace {

CrossRatioVector Constant(const RotationSystem& rs, double x) {
  return CrossRatioVector(std::vector<double>(rs.num_edges(), x));
}

PartialProducts Synthetic(std::vector<Mat2> w) {
  PartialProducts p;
  p.x.assign(w.size(), 0.0);
  p.W = std::move(w);
  return p;
}

}  // namespace

TEST_CASE("edge matrices") {
  CHECK(edge_matrix(0.0) == Mat2{0.0, 1.0, -1.0, 0.0});
  CHECK(edge_matrix(2.0) == Mat2{0.0, 1.0, -1.0, 2.0});
  for (double x : {-5.0, 0.3, 10.0}) CHECK(edge_matrix(x).det() == 1.0);
  CHECK_THROWS_AS(edge_matrix(NAN), std::invalid_argument);
  CHECK_THROWS_AS(edge_matrix(INFINITY), std::invalid_argument);
}

TEST_CASE("symmetric point products follow the Chebyshev identity") {
  const RotationSystem rs = fixtures::genus2();
  const double y = std::cos(std::numbers::pi / 18.0);
  const PartialProducts w = partial_products(rs, symmetric_point(rs));
  REQUIRE(w.size() == 18);
  const std::vector<double> xs(18, 2.0 * y);
  for (int j = 1; j <= 18; ++j) {
    const Mat2& wj = w.at(j);
    CHECK(wj.a == doctest::Approx(-oracle::chebyshev_u(j - 2, y)).epsilon(1e-12));
    CHECK(wj.b == doctest::Approx(oracle::chebyshev_u(j - 1, y)).epsilon(1e-12));
    CHECK(wj.c == doctest::Approx(-oracle::chebyshev_u(j - 1, y)).epsilon(1e-12));
    CHECK(wj.d == doctest::Approx(oracle::chebyshev_u(j, y)).epsilon(1e-12));
    const oracle::Mat naive =
        oracle::naive_product({xs.begin(), xs.begin() + j});
    CHECK(std::abs(wj.a - naive[0]) < 1e-12);
    CHECK(std::abs(wj.d - naive[3]) < 1e-12);
  }
  const Mat2& last = w.at(18);
  CHECK(std::abs(last.a + 1.0) < 1e-13);
  CHECK(std::abs(last.b) < 1e-13);
  CHECK(std::abs(last.c) < 1e-13);
  CHECK(std::abs(last.d + 1.0) < 1e-13);
}

TEST_CASE("recursion for W_{j+1} and unit determinants") {
  const RotationSystem rs = fixtures::genus2();
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<double> vals;
  for (int e = 0; e < rs.num_edges(); ++e) vals.push_back(u(gen));
  const PartialProducts w = partial_products(rs, CrossRatioVector(vals));
  CHECK(w.at(1).a == 0.0);
  for (int j = 1; j < w.size(); ++j) {
    const Mat2& p = w.at(j);
    const double x = w.x[j];  // x_{j+1}
    const Mat2& q = w.at(j + 1);
    const double scale = 1.0 + std::abs(p.a) + std::abs(p.b) + std::abs(p.c) +
                         std::abs(p.d);
    CHECK(std::abs(q.a + p.b) < 1e-12 * scale * (1 + std::abs(x)));
    CHECK(std::abs(q.b - (p.a + p.b * x)) < 1e-12 * scale * (1 + std::abs(x)));
    CHECK(std::abs(q.c + p.d) < 1e-12 * scale * (1 + std::abs(x)));
    CHECK(std::abs(q.d - (p.c + p.d * x)) < 1e-12 * scale * (1 + std::abs(x)));
    // ad - bc cancels down from entries of size `scale`.
    CHECK(std::abs(q.det() - 1.0) < 1e-14 * scale * scale * (1 + x * x));
  }
  // The factors are read in rotation order starting at the given dart.
  const PartialProducts w5 = partial_products(rs, CrossRatioVector(vals), 5);
  for (int j = 0; j < 18; ++j) CHECK(w5.x[j] == vals[rs.edge_at(5 + j)]);
}

TEST_CASE("residual") {
  const RotationSystem rs = fixtures::genus2();
  CHECK(residual_norm(vertex_residual(rs, symmetric_point(rs))) < 1e-13);

  // All x = 3: W_18 = [[-U_16, U_17], [-U_17, U_18]] at y = 3/2.
  const auto r = vertex_residual(rs, Constant(rs, 3.0));
  CHECK(r[0] == doctest::Approx(1.0 - oracle::chebyshev_u(16, 1.5)));
  CHECK(r[1] == doctest::Approx(oracle::chebyshev_u(17, 1.5)));
  CHECK(oracle::chebyshev_u(18, 1.5) > 1e6);

  // Perturbation of size delta moves the residual by O(delta).
  CrossRatioVector c = symmetric_point(rs);
  c[3] += 1e-6;
  const double moved = residual_norm(vertex_residual(rs, c));
  CHECK(moved > 1e-9);
  CHECK(moved < 1e-3);
  CHECK_THROWS_AS(vertex_residual(rs, CrossRatioVector({1.0, 2.0})),
                  std::invalid_argument);
}

TEST_CASE("sign conditions at the symmetric point") {
  const RotationSystem rs = fixtures::genus2();
  const CrossRatioVector c = symmetric_point(rs);
  for (double v : c.values()) {
    CHECK(v == 2.0 * std::cos(std::numbers::pi / 18.0));
  }
  CHECK(c[0] == doctest::Approx(1.969615506024416));
  const ConditionReport s = check_strict(rs, c);
  CHECK(s.strict_ok);
  CHECK(s.nonstrict_ok);
  CHECK_FALSE(s.first_violation.has_value());
  // Smallest constrained entry: U_0 = 1 or U_{m-2} = 1.
  CHECK(s.min_margin == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(check_nonstrict(rs, c).nonstrict_ok);
  const Membership mem = membership(rs, c, 1e-10);
  CHECK(mem.member);
  CHECK_THROWS_AS(membership(rs, c, 0.0), std::invalid_argument);
}

TEST_CASE("non-members") {
  const RotationSystem rs = fixtures::genus2();
  const ConditionReport r3 = check_strict(rs, Constant(rs, 3.0));
  CHECK_FALSE(r3.strict_ok);
  REQUIRE(r3.first_violation.has_value());
  CHECK(r3.first_violation->j == 17);
  CHECK(r3.first_violation->entry == 'd');
  CHECK(r3.first_violation->value ==
        doctest::Approx(oracle::chebyshev_u(17, 1.5)));
  CHECK_FALSE(membership(rs, Constant(rs, 3.0), 1e-10).member);

  // A(0) has order 4 in SL2: W_18 = A(0)^18 = -I, but b_2 = 0 breaks signs.
  const CrossRatioVector zero = Constant(rs, 0.0);
  const oracle::Mat w = oracle::naive_product(std::vector<double>(18, 0.0));
  CHECK(w == oracle::Mat{-1, 0, 0, -1});
  const Membership m0 = membership(rs, zero, 1e-10);
  CHECK_FALSE(m0.member);
  CHECK_FALSE(m0.report.strict_ok);
}

TEST_CASE("classification on synthetic partial products") {
  // Only W_1..W_{m-1} matter for signs; a 3-factor example with m = 3.
  const Mat2 w1{0.0, 1.0, -1.0, 2.0};
  const Mat2 last{-1.0, 0.0, 0.0, -1.0};
  SUBCASE("interior") {
    const Mat2 w2{-1.0, 2.0, -2.0, 0.0};
    const auto r = check_conditions(Synthetic({w1, w2, last}), true);
    CHECK(r.strict_ok);
    CHECK(r.nonstrict_ok);
  }
  SUBCASE("b_j exactly zero passes non-strict and fails strict") {
    const Mat2 w2{-1.0, 0.0, -2.0, 0.0};
    const auto strict = check_conditions(Synthetic({w1, w2, last}), true);
    CHECK_FALSE(strict.strict_ok);
    CHECK(strict.nonstrict_ok);
    REQUIRE(strict.first_violation.has_value());
    CHECK(strict.first_violation->j == 2);
    CHECK(strict.first_violation->entry == 'b');
    const auto loose = check_conditions(Synthetic({w1, w2, last}), false);
    CHECK_FALSE(loose.first_violation.has_value());
  }
  SUBCASE("small negative entries within the zero tolerance") {
    const Mat2 w2{-1.0, -5e-10, -2.0, 0.0};
    const auto r = check_conditions(Synthetic({w1, w2, last}), true);
    CHECK_FALSE(r.strict_ok);
    CHECK(r.nonstrict_ok);
  }
  SUBCASE("a wrong sign fails both") {
    const Mat2 w2{-1.0, -0.5, -2.0, 0.0};
    const auto r = check_conditions(Synthetic({w1, w2, last}), false);
    CHECK_FALSE(r.strict_ok);
    CHECK_FALSE(r.nonstrict_ok);
    CHECK(r.first_violation->entry == 'b');
    CHECK(r.min_margin == -0.5);
  }
  SUBCASE("exceptional entries must vanish") {
    const Mat2 w2{-1.0, 2.0, -2.0, 0.1};
    const auto r = check_conditions(Synthetic({w1, w2, last}), true);
    CHECK_FALSE(r.strict_ok);
    CHECK_FALSE(r.nonstrict_ok);
    CHECK(r.first_violation->entry == 'd');
  }
}

TEST_CASE("conditions do not depend on the start dart") {
  const RotationSystem rs = fixtures::genus2();
  // Constant vectors here; solver-produced members are covered with the
  // solver tests.
  for (const CrossRatioVector& c :
       {symmetric_point(rs), Constant(rs, 3.0), Constant(rs, 1.0)}) {
    const Membership base = membership(rs, c, 1e-10);
    for (int s = 1; s < 18; ++s) {
      const Membership m = membership(rs, c, 1e-10, kDefaultZeroTol, s);
      CHECK(m.member == base.member);
      CHECK(m.report.strict_ok == base.report.strict_ok);
      CHECK(m.report.nonstrict_ok == base.report.nonstrict_ok);
    }
  }
}
