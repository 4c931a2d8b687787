#include <catch2/catch_amalgamated.hpp>

#include "coordcap/dsbs.hpp"
#include "coordcap/rate_region.hpp"
#include "oracles.hpp"

using namespace coordcap;

namespace {
std::vector<double> grid(std::size_t points) {
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i)
    g[i] = 0.5 * static_cast<double>(i) / static_cast<double>(points - 1);
  return g;
}
}  // namespace

TEST_CASE("dsbs source") {
  SECTION("a=0 complements") {
    const auto p = dsbs(0.0);
    CHECK(p.mass(std::vector<SymIdx>{0, 1}) == 0.5);
    CHECK(p.mass(std::vector<SymIdx>{0, 0}) == 0.0);
  }
  SECTION("a=1/2 independent") {
    const auto p = dsbs(0.5);
    CHECK(mutual_information(p, {"X"}, {"Y"}) == Catch::Approx(0.0).margin(1e-12));
  }
  SECTION("a=0.4 mutual information") {
    CHECK(mutual_information(dsbs(0.4), {"X"}, {"Y"}) ==
          Catch::Approx(0.0290494055453314).margin(1e-12));
    CHECK(oracle::conditional_mi(dsbs(0.4), {0}, {1}, {}) ==
          Catch::Approx(1.0 - binary_entropy(0.4)).margin(1e-12));
  }
  SECTION("uniform marginals") {
    const auto mx = marginalize(dsbs(0.37), std::vector<std::size_t>{0});
    CHECK(mx.mass(0) == Catch::Approx(0.5).margin(1e-15));
  }
  CHECK_THROWS_AS(dsbs(0.7), std::domain_error);
  CHECK_THROWS_AS(dsbs(-0.1), std::domain_error);
}

TEST_CASE("key distribution corner") {
  SECTION("a=0 gives r1 = 0") {
    for (double alpha : {0.0, 0.1, 0.3, 0.5})
      CHECK(key_dist_corner(0.0, alpha).r1 == Catch::Approx(0.0).margin(1e-12));
  }
  SECTION("a=1/2: relay case, r1 = 1 - Hb(alpha)") {
    for (double alpha : {0.0, 0.1, 0.3, 0.5})
      CHECK(key_dist_corner(0.5, alpha).r1 ==
            Catch::Approx(1.0 - binary_entropy(alpha)).margin(1e-12));
  }
  SECTION("alpha=1/2 gives (0,0,1)") {
    const auto t = key_dist_corner(0.3, 0.5);
    CHECK(t.r1 == Catch::Approx(0.0).margin(1e-12));
    CHECK(t.r2 == Catch::Approx(0.0).margin(1e-12));
    CHECK(t.r3 == Catch::Approx(1.0).margin(1e-12));
  }
  CHECK_THROWS_AS(key_dist_corner(0.6, 0.1), std::domain_error);
  CHECK_THROWS_AS(key_dist_corner(0.1, 0.6), std::domain_error);
}

TEST_CASE("key distribution corner matches the generic r2 evaluator") {
  for (double a : grid(11))
    for (double alpha : grid(11)) {
      const auto closed = key_dist_corner(a, alpha);
      const auto generic = inner_corner_r2(composed_key_dist_joint(a, alpha));
      CHECK(closed.r1 == Catch::Approx(generic.r1).margin(1e-10));
      CHECK(closed.r2 == Catch::Approx(generic.r2).margin(1e-10));
      CHECK(closed.r3 == Catch::Approx(generic.r3).margin(1e-10));
    }
}

TEST_CASE("encryptor sum-rate curve") {
  const auto a_grid = grid(26);
  const auto alpha_grid = grid(26);
  const auto curve = encryptor_sum_rate_curve(a_grid, alpha_grid);
  REQUIRE(curve.size() == a_grid.size());

  CHECK(curve.front().second == Catch::Approx(0.0).margin(1e-12));  // a = 0
  CHECK(curve.back().second == Catch::Approx(1.0).margin(1e-12));   // a = 1/2
  for (std::size_t i = 1; i < curve.size(); ++i)
    CHECK(curve[i].second >= curve[i - 1].second - 1e-12);
  // With alpha = 0 in the grid the minimum is exactly Hb(a).
  for (const auto& [a, s] : curve) CHECK(s == Catch::Approx(binary_entropy(a)).margin(1e-12));
  CHECK(curve[10].second == Catch::Approx(binary_entropy(0.2)).margin(1e-12));
  CHECK(binary_entropy(0.2) == Catch::Approx(0.7219280948873623).epsilon(1e-12));

  CHECK_THROWS_AS(encryptor_sum_rate_curve({}, alpha_grid), std::invalid_argument);
  CHECK_THROWS_AS(encryptor_sum_rate_curve(a_grid, {}), std::invalid_argument);
}

TEST_CASE("rd d1 corner") {
  SECTION("alpha = d = 1/2 collapses to the origin") {
    const auto c = rd_d1_corner(0.3, 0.5, 0.5, 0.5);
    CHECK(c.rates.r1 == Catch::Approx(0.0).margin(1e-12));
    CHECK(c.rates.r2 == Catch::Approx(0.0).margin(1e-12));
    CHECK(c.rates.r3 == 0.0);
    CHECK(c.feasible);  // a*d = 1/2 <= D = 1/2
    CHECK_FALSE(rd_d1_corner(0.3, 0.5, 0.5, 0.4).feasible);
  }
  SECTION("a=0, alpha=1/2: source described over C2 alone") {
    const auto c = rd_d1_corner(0.0, 0.5, 0.1, 0.1);
    CHECK(c.rates.r1 == Catch::Approx(0.0).margin(1e-12));
    CHECK(c.rates.r2 == Catch::Approx(1.0 - binary_entropy(0.1)).margin(1e-12));
    CHECK(c.feasible);  // 0*d = d <= D
    CHECK_FALSE(rd_d1_corner(0.0, 0.5, 0.2, 0.1).feasible);
  }
  SECTION("frozen interior example") {
    const auto c = rd_d1_corner(0.3, 0.1, 0.05, 0.5);
    CHECK(star(0.3, 0.05) == Catch::Approx(0.32).margin(1e-15));  // the feasibility quantity a*d
    CHECK(star(0.3, 0.1) == Catch::Approx(0.34).margin(1e-15));   // the r1 argument a*alpha
    CHECK(c.rates.r1 ==
          Catch::Approx(binary_entropy(0.34) - binary_entropy(0.1)).margin(1e-12));
    CHECK(c.rates.r2 ==
          Catch::Approx(2.0 - binary_entropy(0.1) - binary_entropy(0.05)).margin(1e-12));
    CHECK(c.rates.r3 == 0.0);
  }
}

TEST_CASE("rd d2 corner") {
  SECTION("a=0, alpha=1/2: (0, 0, 1-Hb(d)) feasible iff d <= D") {
    const auto c = rd_d2_corner(0.0, 0.5, 0.1, 0.1);
    CHECK(c.rates.r1 == Catch::Approx(0.0).margin(1e-12));
    CHECK(c.rates.r2 == Catch::Approx(0.0).margin(1e-12));
    CHECK(c.rates.r3 == Catch::Approx(1.0 - binary_entropy(0.1)).margin(1e-12));
    CHECK(c.feasible);
    CHECK_FALSE(rd_d2_corner(0.0, 0.5, 0.2, 0.1).feasible);
  }
  SECTION("d=1/2 kills r3") {
    for (double alpha : {0.0, 0.2, 0.5})
      CHECK(rd_d2_corner(0.3, alpha, 0.5, 0.5).rates.r3 == Catch::Approx(0.0).margin(1e-12));
  }
  SECTION("r3 vanishes exactly on the boundary cases") {
    CHECK(rd_d2_corner(0.3, 0.0, 0.2, 0.5).rates.r3 == Catch::Approx(0.0).margin(1e-12));
    CHECK(rd_d2_corner(0.3, 0.3, 0.2, 0.5).rates.r3 > 1e-3);
  }
}

TEST_CASE("rd d2 corner matches the generic r2 evaluator") {
  for (double a : grid(6))
    for (double alpha : grid(6))
      for (double d : grid(6)) {
        const auto closed = rd_d2_corner(a, alpha, d, 0.5).rates;
        const auto generic = inner_corner_r2(composed_d2_joint(a, alpha, d));
        CHECK(closed.r1 == Catch::Approx(generic.r1).margin(1e-10));
        CHECK(closed.r2 == Catch::Approx(generic.r2).margin(1e-10));
        CHECK(closed.r3 == Catch::Approx(generic.r3).margin(1e-10));
      }
}

TEST_CASE("rd d1 closed form: r1, r3 match the generic r1 evaluator; r2 gap is pinned") {
  // The closed-form r2 = 2 - Hb(alpha) - Hb(d) evaluates I(Y;Z|U) as if
  // H(Z|U) were 1. On the composed joint H(Z|U) = Hb(a*alpha*d), so the
  // closed form exceeds the generic corner by exactly 1 - Hb(a*alpha*d).
  // This test pins that documented gap.
  for (double a : grid(6))
    for (double alpha : grid(6))
      for (double d : grid(6)) {
        const auto closed = rd_d1_corner(a, alpha, d, 0.5).rates;
        const auto generic = inner_corner_r1(composed_d1_joint(a, alpha, d));
        CHECK(closed.r1 == Catch::Approx(generic.r1).margin(1e-10));
        CHECK(closed.r3 == Catch::Approx(generic.r3).margin(1e-10));
        const double gap = 1.0 - binary_entropy(star(star(a, alpha), d));
        CHECK(closed.r2 - generic.r2 == Catch::Approx(gap).margin(1e-10));
      }
}

TEST_CASE("rd region cloud") {
  SECTION("a=0, D=0.1 contains the two single-channel corners") {
    const auto cloud = rd_region(0.0, 0.1, grid(21), grid(21));
    const double r = 1.0 - binary_entropy(0.1);
    bool c2_only = false, c3_only = false;
    for (const auto& p : cloud.points()) {
      if (std::abs(p.rates.r1) <= 1e-9 && std::abs(p.rates.r2 - r) <= 1e-9 &&
          std::abs(p.rates.r3) <= 1e-9)
        c2_only = true;
      if (std::abs(p.rates.r1) <= 1e-9 && std::abs(p.rates.r2) <= 1e-9 &&
          std::abs(p.rates.r3 - r) <= 1e-9)
        c3_only = true;
    }
    CHECK(c2_only);
    CHECK(c3_only);
  }
  SECTION("D=1/2 admits the origin") {
    const auto cloud = rd_region(0.3, 0.5, grid(21), grid(21));
    CHECK(contains(cloud, {0.0, 0.0, 0.0}, 1e-9));
  }
  SECTION("a=1/2 with D<1/2: no D1 points") {
    const auto cloud = rd_region(0.5, 0.2, grid(21), grid(21));
    REQUIRE_FALSE(cloud.empty());
    for (const auto& p : cloud.points()) CHECK(p.provenance.scheme == Scheme::r2);
  }
  SECTION("empty grids are rejected") {
    CHECK_THROWS_AS(rd_region(0.3, 0.2, {}, grid(3)), std::invalid_argument);
  }
}

TEST_CASE("rd records carry infeasible rows for the csv export") {
  const auto records = rd_region_records(0.5, 0.2, grid(3), grid(3));
  bool any_infeasible = false;
  for (const auto& r : records)
    if (!r.feasible) any_infeasible = true;
  CHECK(any_infeasible);
  CHECK(records.size() == 2 * 3 * 3);
}
