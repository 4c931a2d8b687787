#include <catch2/catch_amalgamated.hpp>

#include "coordcap/dsbs.hpp"
#include "coordcap/rate_region.hpp"
#include "coordcap/region_search.hpp"
#include "coordcap/rng.hpp"
#include "oracles.hpp"

using namespace coordcap;

namespace {

Alphabet deg(const char* name) { return Alphabet(name, {"0"}); }

// Random joint factorized per scheme R1 with the given auxiliary sizes.
JointPmf random_r1_joint(Rng& rng, std::size_t nu, std::size_t nv, std::size_t nw,
                         std::size_t nx = 2, std::size_t ny = 2, std::size_t nz = 2) {
  const auto base = random_joint_pmf(rng, {indexed_alphabet("X", nx), indexed_alphabet("Y", ny)});
  const Alphabet x = base.variables()[0], y = base.variables()[1];
  const Alphabet u = indexed_alphabet("U", nu), v = indexed_alphabet("V", nv),
                 w = indexed_alphabet("W", nw), z = indexed_alphabet("Z", nz);
  std::vector<Kernel> ks;
  ks.push_back(random_kernel(rng, {x}, u));
  ks.push_back(random_kernel(rng, {u, x}, v));
  ks.push_back(random_kernel(rng, {u, x}, w));
  ks.push_back(random_kernel(rng, {y, u, v, w}, z));
  return compose_factorization(base, ks);
}

JointPmf random_r2_joint(Rng& rng, std::size_t nu, std::size_t nv, std::size_t nw) {
  const auto base = random_joint_pmf(rng, {binary_alphabet("X"), binary_alphabet("Y")});
  const Alphabet x = base.variables()[0], y = base.variables()[1];
  const Alphabet u = indexed_alphabet("U", nu), v = indexed_alphabet("V", nv),
                 w = indexed_alphabet("W", nw), z = binary_alphabet("Z");
  std::vector<Kernel> ks;
  ks.push_back(random_kernel(rng, {x}, u));
  ks.push_back(random_kernel(rng, {u, x}, v));
  ks.push_back(random_kernel(rng, {u, y}, w));
  ks.push_back(random_kernel(rng, {x, u, w}, z));
  return compose_factorization(base, ks);
}

RegionCloud cloud_of(std::vector<RateTriple> pts) {
  RegionCloud c;
  for (const auto& p : pts) c.add(p, AuxFactorization{});
  c.canonicalize();
  return c;
}

}  // namespace

TEST_CASE("r1 corner: degenerate W reduces to the cascade corner") {
  Rng rng(11);
  for (int rep = 0; rep < 25; ++rep) {
    const auto joint = random_r1_joint(rng, 2, 2, 1);
    RateTriple t;
    try {
      t = inner_corner_r1(joint);
    } catch (const std::domain_error&) {
      continue;  // negative composite component: not an operating point
    }
    const auto g = var_indices(joint, {"X", "Y", "U", "V", "W", "Z"});
    const double r1 = mutual_information(joint, {g[0]}, {g[2], g[3]}, {g[1]});
    const double r2 = mutual_information(joint, {g[0]}, {g[2]}) +
                      mutual_information(joint, {g[3], g[1]}, {g[5]}, {g[2]});
    CHECK(t.r1 == Catch::Approx(r1).margin(1e-10));
    CHECK(t.r2 == Catch::Approx(r2).margin(1e-10));
    CHECK(t.r3 == Catch::Approx(0.0).margin(1e-10));
  }
}

TEST_CASE("r1 corner components recompute via the oracle") {
  Rng rng(13);
  for (int rep = 0; rep < 15; ++rep) {
    const auto joint = random_r1_joint(rng, 2, 2, 2);
    RateTriple t;
    try {
      t = inner_corner_r1(joint);
    } catch (const std::domain_error&) {
      continue;
    }
    const auto g = var_indices(joint, {"X", "Y", "U", "V", "W", "Z"});
    CHECK(t.r1 == Catch::Approx(oracle::conditional_mi(joint, {g[0]}, {g[2], g[3]}, {g[1]}))
                      .margin(1e-10));
    const double r2 = oracle::conditional_mi(joint, {g[0]}, {g[2]}, {}) +
                      oracle::conditional_mi(joint, {g[3], g[1]}, {g[5]}, {g[2]}) -
                      oracle::conditional_mi(joint, {g[4]}, {g[5]}, {g[2]});
    CHECK(t.r2 == Catch::Approx(std::max(0.0, r2)).margin(1e-10));
    CHECK(t.r3 ==
          Catch::Approx(oracle::conditional_mi(joint, {g[0]}, {g[4]}, {g[2]})).margin(1e-10));
  }
}

TEST_CASE("r1 corner: all-uniform kernels give the origin") {
  const auto base = dsbs(0.3);
  const Alphabet x = base.variables()[0], y = base.variables()[1];
  const Alphabet u = binary_alphabet("U"), v = binary_alphabet("V"), w = binary_alphabet("W"),
                 z = binary_alphabet("Z");
  std::vector<Kernel> ks;
  ks.push_back(make_uniform({x}, u));
  ks.push_back(make_uniform({u, x}, v));
  ks.push_back(make_uniform({u, x}, w));
  ks.push_back(make_uniform({y, u, v, w}, z));
  const auto t = inner_corner_r1(compose_factorization(base, ks));
  CHECK(t.r1 == Catch::Approx(0.0).margin(1e-12));
  CHECK(t.r2 == Catch::Approx(0.0).margin(1e-12));
  CHECK(t.r3 == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("corner evaluators reject wrong factorizations") {
  Rng rng(21);
  bool r1_rejected = false, r2_rejected = false;
  for (int rep = 0; rep < 10 && !(r1_rejected && r2_rejected); ++rep) {
    const auto j2 = random_r2_joint(rng, 2, 2, 2);
    try {
      inner_corner_r1(j2);
    } catch (const std::invalid_argument&) {
      r1_rejected = true;
    } catch (const std::domain_error&) {
    }
    const auto j1 = random_r1_joint(rng, 2, 2, 2);
    try {
      inner_corner_r2(j1);
    } catch (const std::invalid_argument&) {
      r2_rejected = true;
    } catch (const std::domain_error&) {
    }
  }
  CHECK(r1_rejected);
  CHECK(r2_rejected);
}

TEST_CASE("r2 corner on the key-distribution configuration") {
  const double a = 0.3, alpha = 0.2;
  const auto t = inner_corner_r2(composed_key_dist_joint(a, alpha));
  CHECK(t.r1 ==
        Catch::Approx(binary_entropy(star(a, alpha)) - binary_entropy(alpha)).margin(1e-10));
  CHECK(t.r2 == Catch::Approx(1.0 - binary_entropy(alpha)).margin(1e-10));
  CHECK(t.r3 == Catch::Approx(binary_entropy(alpha)).margin(1e-10));
}

TEST_CASE("r2 corner on the d2 configuration") {
  const double a = 0.3, alpha = 0.1, d = 0.05;
  const auto t = inner_corner_r2(composed_d2_joint(a, alpha, d));
  CHECK(t.r1 ==
        Catch::Approx(binary_entropy(star(a, alpha)) - binary_entropy(alpha)).margin(1e-10));
  CHECK(t.r2 == Catch::Approx(1.0 - binary_entropy(alpha)).margin(1e-10));
  CHECK(t.r3 ==
        Catch::Approx(binary_entropy(star(alpha, d)) - binary_entropy(d)).margin(1e-10));
}

TEST_CASE("r2 corner: degenerate U with W = Y gives I(X;Z) - I(Y;Z)") {
  Rng rng(31);
  for (int rep = 0; rep < 10; ++rep) {
    const auto base = random_joint_pmf(rng, {binary_alphabet("X"), binary_alphabet("Y")});
    const Alphabet x = base.variables()[0], y = base.variables()[1];
    const Alphabet u = deg("U"), v = deg("V"), w = binary_alphabet("W"), z = binary_alphabet("Z");
    std::vector<Kernel> ks;
    ks.push_back(make_constant({x}, u));
    ks.push_back(make_constant({u, x}, v));
    ks.push_back(Kernel({u, y}, w, std::vector<double>{1, 0, 0, 1}));  // W = Y
    ks.push_back(random_kernel(rng, {x, u, w}, z));
    const auto joint = compose_factorization(base, ks);
    RateTriple t;
    try {
      t = inner_corner_r2(joint);
    } catch (const std::domain_error&) {
      continue;
    }
    const double expect =
        mutual_information(joint, {"X"}, {"Z"}) - mutual_information(joint, {"Y"}, {"Z"});
    CHECK(t.r3 == Catch::Approx(std::max(0.0, expect)).margin(1e-10));
  }
}

TEST_CASE("negative composite corner components raise instead of clamping") {
  // W is an independent coin and Z copies W:
  // I(X;Z|U) - I(W;Z|U) = 0 - 1 < 0 under scheme R2.
  const auto base = dsbs(0.3);
  const Alphabet x = base.variables()[0], y = base.variables()[1];
  const Alphabet u = deg("U"), v = deg("V"), w = binary_alphabet("W"), z = binary_alphabet("Z");
  std::vector<Kernel> ks;
  ks.push_back(make_constant({x}, u));
  ks.push_back(make_constant({u, x}, v));
  ks.push_back(Kernel({u, y}, w, std::vector<double>{0.5, 0.5, 0.5, 0.5}));
  std::vector<double> zw(2 * 1 * 2 * 2, 0.0);
  for (std::size_t cx = 0; cx < 2; ++cx)
    for (std::size_t cw = 0; cw < 2; ++cw) {
      const std::size_t cell = (cx * 1 + 0) * 2 + cw;  // inputs ordered (X,U,W)
      zw[cell * 2 + cw] = 1.0;
    }
  ks.push_back(Kernel({x, u, w}, z, zw));
  const auto joint = compose_factorization(base, ks);
  CHECK_THROWS_AS(inner_corner_r2(joint), std::domain_error);
}

TEST_CASE("outer corners") {
  const auto base = dsbs(0.3);
  const Alphabet x = base.variables()[0], y = base.variables()[1];
  const Alphabet z = binary_alphabet("Z");
  std::vector<Kernel> tk{detail::bsc_from_first({x, y}, z, 0.0)};
  const auto target = compose_factorization(base, tk);  // Z = X over the pair

  SECTION("all-degenerate auxiliaries give the origin") {
    std::vector<Kernel> ks;
    ks.push_back(make_constant({x, y, z}, deg("U")));
    ks.push_back(make_constant({x, y, z}, deg("V")));
    ks.push_back(make_constant({x, y, z}, deg("W")));
    const auto joint = compose_factorization(target, ks);
    const auto t = outer_corner(joint, target);
    CHECK(t.r1 == Catch::Approx(0.0).margin(1e-12));
    CHECK(t.r2 == Catch::Approx(0.0).margin(1e-12));
    CHECK(t.r3 == Catch::Approx(0.0).margin(1e-12));
  }

  SECTION("cascade specialization: U = Z, W degenerate") {
    Rng rng(5);
    const Alphabet u = binary_alphabet("U"), v = binary_alphabet("V");
    std::vector<Kernel> ks;
    ks.push_back(Kernel({z}, u, std::vector<double>{1, 0, 0, 1}));  // U = Z
    ks.push_back(random_kernel(rng, {x}, v));                      // V per p(v|x)
    ks.push_back(make_constant({x, y, z, u, v}, deg("W")));
    const auto joint = compose_factorization(target, ks);
    const auto t = outer_corner(joint, target);
    CHECK(t.r1 == Catch::Approx(mutual_information(joint, {"X"}, {"V", "Z"}, {"Y"})).margin(1e-10));
    CHECK(t.r2 == Catch::Approx(mutual_information(joint, {"X", "Y"}, {"Z"})).margin(1e-10));
    CHECK(t.r3 == Catch::Approx(0.0).margin(1e-10));
  }

  SECTION("U = (X,Y) yields R2 = H(X,Y)") {
    const Alphabet u4 = indexed_alphabet("U", 4);
    std::vector<double> rows(8 * 4, 0.0);
    for (std::size_t cx = 0; cx < 2; ++cx)
      for (std::size_t cy = 0; cy < 2; ++cy)
        for (std::size_t cz = 0; cz < 2; ++cz)
          rows[((cx * 2 + cy) * 2 + cz) * 4 + (cx * 2 + cy)] = 1.0;
    std::vector<Kernel> ks;
    ks.push_back(Kernel({x, y, z}, u4, rows));
    ks.push_back(make_constant({x, y, z, u4}, deg("V")));
    ks.push_back(make_constant({x, y, z, u4}, deg("W")));
    const auto joint = compose_factorization(target, ks);
    const auto t = outer_corner(joint, target);
    CHECK(t.r2 ==
          Catch::Approx(entropy(joint, var_indices(joint, {"X", "Y"}))).margin(1e-10));
  }

  SECTION("marginal mismatch is rejected") {
    std::vector<Kernel> ks;
    ks.push_back(make_constant({x, y, z}, deg("U")));
    ks.push_back(make_constant({x, y, z}, deg("V")));
    ks.push_back(make_constant({x, y, z}, deg("W")));
    const auto joint = compose_factorization(target, ks);
    std::vector<Kernel> tk2{detail::bsc_from_first({x, y}, z, 0.25)};
    const auto other = compose_factorization(base, tk2);
    CHECK_THROWS_AS(outer_corner(joint, other), std::invalid_argument);
  }
}

TEST_CASE("search: constant-Z target admits the origin") {
  const auto base = dsbs(0.4);
  const Alphabet x = base.variables()[0], y = base.variables()[1];
  std::vector<Kernel> tk{make_constant({x, y}, binary_alphabet("Z"), 0)};
  const auto target = compose_factorization(base, tk);
  const auto cloud = search_inner_bound(target, {1, 1, 1}, GridSampler{0.5}, 1e-9);
  REQUIRE_FALSE(cloud.empty());
  CHECK(contains(cloud, {0.0, 0.0, 0.0}, 1e-9));
}

TEST_CASE("search: key-distribution target contains the closed-form corners") {
  const double agree = 0.89;  // Pr(X=Y); printed-a 0.11 by Hb symmetry
  const auto base = binary_agreement_pair(agree);
  const Alphabet x = base.variables()[0], y = base.variables()[1];
  std::vector<Kernel> tk{detail::bsc_from_first({x, y}, binary_alphabet("Z"), 0.0)};
  const auto target = compose_factorization(base, tk);

  // Grid over scheme kernels with V, W degenerate: 6 free binary parameters.
  const auto cloud = search_inner_bound(target, {2, 1, 1}, GridSampler{0.25}, 1e-6);
  REQUIRE_FALSE(cloud.empty());
  for (double alpha : {0.0, 0.25, 0.5}) {
    const RateTriple corner{binary_entropy(star(1 - agree, alpha)) - binary_entropy(alpha),
                            1.0 - binary_entropy(alpha), binary_entropy(alpha)};
    bool found = false;
    for (const auto& p : cloud.points())
      if (std::abs(p.rates.r1 - corner.r1) <= 1e-3 && std::abs(p.rates.r2 - corner.r2) <= 1e-3 &&
          std::abs(p.rates.r3 - corner.r3) <= 1e-3)
        found = true;
    CHECK(found);
  }
}

TEST_CASE("search determinism and monotone growth") {
  const auto base = dsbs(0.35);
  const Alphabet x = base.variables()[0], y = base.variables()[1];
  std::vector<Kernel> tk{detail::bsc_from_first({x, y}, binary_alphabet("Z"), 0.1)};
  const auto target = compose_factorization(base, tk);

  const auto c1 = search_inner_bound(target, {2, 2, 2}, RandomSampler{2000, 1}, 0.5);
  const auto c2 = search_inner_bound(target, {2, 2, 2}, RandomSampler{2000, 1}, 0.5);
  REQUIRE(c1.size() == c2.size());
  for (std::size_t i = 0; i < c1.size(); ++i) {
    CHECK(c1.points()[i].rates.r1 == c2.points()[i].rates.r1);
    CHECK(c1.points()[i].rates.r2 == c2.points()[i].rates.r2);
    CHECK(c1.points()[i].rates.r3 == c2.points()[i].rates.r3);
  }

  // Growing the sample count only adds points (as a set).
  const auto c4 = search_inner_bound(target, {2, 2, 2}, RandomSampler{4000, 1}, 0.5);
  CHECK(c4.size() >= c1.size());
  for (const auto& p : c1.points()) {
    bool found = false;
    for (const auto& q : c4.points())
      if (std::abs(p.rates.r1 - q.rates.r1) <= 1e-12 &&
          std::abs(p.rates.r2 - q.rates.r2) <= 1e-12 &&
          std::abs(p.rates.r3 - q.rates.r3) <= 1e-12)
        found = true;
    CHECK(found);
  }

  // Thread partitioning must not change the cloud.
  const auto c1t = search_inner_bound(target, {2, 2, 2}, RandomSampler{2000, 1}, 0.5, 2);
  REQUIRE(c1t.size() == c1.size());
  for (std::size_t i = 0; i < c1.size(); ++i)
    CHECK(c1t.points()[i].rates.r2 == c1.points()[i].rates.r2);
}

TEST_CASE("search reports the best residual when nothing qualifies") {
  const auto base = dsbs(0.35);
  const Alphabet x = base.variables()[0], y = base.variables()[1];
  std::vector<Kernel> tk{detail::bsc_from_first({x, y}, binary_alphabet("Z"), 0.0)};
  const auto target = compose_factorization(base, tk);
  try {
    search_inner_bound(target, {2, 2, 2}, RandomSampler{50, 3}, 1e-12);
    FAIL("expected SearchEmptyError");
  } catch (const SearchEmptyError& e) {
    CHECK(e.best_residual() > 0.0);
    CHECK(std::string(e.what()).find("residual") != std::string::npos);
  }
}

TEST_CASE("region membership") {
  const auto cloud = cloud_of({{1.0, 0.5, 0.0}, {0.0, 1.0, 1.0}, {2.0, 2.0, 2.0}});

  SECTION("cloud points and dominating triples are members") {
    for (const auto& p : cloud.points()) {
      CHECK(contains(cloud, p.rates, 1e-9));
      CHECK(contains(cloud, {p.rates.r1 + 0.3, p.rates.r2 + 0.1, p.rates.r3 + 1.0}, 1e-9));
    }
  }
  SECTION("midpoints of cloud points are members") {
    CHECK(contains(cloud, {0.5, 0.75, 0.5}, 1e-9));
  }
  SECTION("points below every r2 are not members") {
    CHECK_FALSE(contains(cloud, {0.0, 0.0, 0.0}, 1e-9));
    CHECK_FALSE(contains(cloud, {5.0, 0.4, 5.0}, 1e-9));
  }
  SECTION("empty cloud contains nothing") {
    RegionCloud empty;
    CHECK_FALSE(contains(empty, {0.0, 0.0, 0.0}, 10.0));
  }
}

TEST_CASE("region membership agrees with a dense mixture scan") {
  Rng rng(77);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<RateTriple> pts;
    for (int j = 0; j < 3; ++j) pts.push_back({rng.u01(), rng.u01(), rng.u01()});
    const auto cloud = cloud_of(pts);
    const RateTriple q{rng.u01(), rng.u01(), rng.u01()};
    bool dominated = false;
    const int steps = 60;
    for (int i = 0; i <= steps && !dominated; ++i)
      for (int j = 0; i + j <= steps && !dominated; ++j) {
        const double l1 = static_cast<double>(i) / steps;
        const double l2 = static_cast<double>(j) / steps;
        const double l3 = 1.0 - l1 - l2;
        if (q.r1 >= l1 * pts[0].r1 + l2 * pts[1].r1 + l3 * pts[2].r1 - 1e-9 &&
            q.r2 >= l1 * pts[0].r2 + l2 * pts[1].r2 + l3 * pts[2].r2 - 1e-9 &&
            q.r3 >= l1 * pts[0].r3 + l2 * pts[1].r3 + l3 * pts[2].r3 - 1e-9)
          dominated = true;
      }
    // The dense scan is a one-sided certificate: anything it finds the LP
    // must also find.
    if (dominated) CHECK(contains(cloud, q, 1e-6));
  }
}

TEST_CASE("monotone closure of membership") {
  Rng rng(123);
  std::vector<RateTriple> pts;
  for (int j = 0; j < 20; ++j) pts.push_back({rng.u01(), rng.u01(), rng.u01()});
  const auto cloud = cloud_of(pts);
  for (int rep = 0; rep < 50; ++rep) {
    const RateTriple q{rng.u01() * 1.5, rng.u01() * 1.5, rng.u01() * 1.5};
    if (contains(cloud, q, 1e-9)) {
      CHECK(contains(cloud, {q.r1 + 0.1, q.r2, q.r3}, 1e-9));
      CHECK(contains(cloud, {q.r1, q.r2 + 0.2, q.r3 + 0.05}, 1e-9));
    }
  }
}

TEST_CASE("cloud dedup within 1e-9") {
  RegionCloud c;
  c.add({0.5, 0.5, 0.5}, {});
  c.add({0.5 + 2e-10, 0.5, 0.5 - 2e-10}, {});
  c.add({0.5, 0.5, 0.7}, {});
  c.canonicalize();
  CHECK(c.size() == 2);
}

TEST_CASE("remark 4 reduction: Y deterministic of X, V and W degenerate") {
  Rng rng(55);
  for (int rep = 0; rep < 25; ++rep) {
    const Alphabet x = indexed_alphabet("X", 3), y = binary_alphabet("Y");
    auto px = random_simplex_point(rng, 3);
    std::array<SymIdx, 3> f{static_cast<SymIdx>(rng.below(2)), static_cast<SymIdx>(rng.below(2)),
                            static_cast<SymIdx>(rng.below(2))};
    std::vector<double> mass(6, 0.0);
    for (std::size_t i = 0; i < 3; ++i) mass[i * 2 + f[i]] = px[i];
    const JointPmf base({x, y}, mass);
    const Alphabet u = binary_alphabet("U"), v = deg("V"), w = deg("W"), z = binary_alphabet("Z");
    std::vector<Kernel> ks;
    ks.push_back(random_kernel(rng, {x}, u));
    ks.push_back(make_constant({u, x}, v));
    ks.push_back(make_constant({u, x}, w));
    ks.push_back(random_kernel(rng, {y, u, v, w}, z));
    const auto joint = compose_factorization(base, ks);
    RateTriple t;
    try {
      t = inner_corner_r1(joint);
    } catch (const std::domain_error&) {
      continue;
    }
    CHECK(t.r3 == Catch::Approx(0.0).margin(1e-10));
    CHECK(t.r1 == Catch::Approx(mutual_information(joint, {"X"}, {"U"}, {"Y"})).margin(1e-10));
  }
}
