// Closed forms for the doubly symmetric binary source examples: the cipher
// key-distribution corner and sum-rate curve, and the rate-distortion corner
// families D1 (scheme R1) and D2 (scheme R2). Each closed form comes with a
// builder for the explicitly composed six-variable joint so the generic
// corner evaluators can be run against the same configuration.
#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "coordcap/info.hpp"
#include "coordcap/rate_region.hpp"

namespace coordcap {

namespace detail {
inline void check_unit_half(double v, const char* name) {
  if (v < 0.0 || v > 0.5)
    throw std::domain_error(std::string(name) + " must lie in [0, 1/2], got " +
                            std::to_string(v));
}
}  // namespace detail

struct DsbsParams {
  double a = 0.0;      // agreement mass: Pr(X=Y) = a
  double alpha = 0.0;  // BSC parameter of p(u|x)
  double d = 0.0;      // BSC parameter of the reconstruction kernel
  double D = 0.0;      // distortion budget

  void validate() const {
    detail::check_unit_half(a, "a");
    detail::check_unit_half(alpha, "alpha");
    detail::check_unit_half(d, "d");
    detail::check_unit_half(D, "D");
  }
};

// Binary pair with uniform marginals and Pr(X=Y) = agree. Unrestricted
// agreement range; dsbs() below applies the a <= 1/2 convention.
inline JointPmf binary_agreement_pair(double agree, const std::string& x_name = "X",
                                      const std::string& y_name = "Y") {
  if (agree < 0.0 || agree > 1.0) throw std::domain_error("agreement probability outside [0,1]");
  return JointPmf({binary_alphabet(x_name), binary_alphabet(y_name)},
                  {agree / 2, (1 - agree) / 2, (1 - agree) / 2, agree / 2});
}

// DSBS(a): Pr(0,0) = Pr(1,1) = a/2, Pr(0,1) = Pr(1,0) = (1-a)/2, a in [0,1/2].
inline JointPmf dsbs(double a) {
  detail::check_unit_half(a, "a");
  return binary_agreement_pair(a);
}

// Key-distribution corner (region R2 with V, W degenerate and Z = X):
//   ( H_b(a*alpha) - H_b(alpha), 1 - H_b(alpha), H_b(alpha) ).
inline RateTriple key_dist_corner(double a, double alpha) {
  detail::check_unit_half(a, "a");
  detail::check_unit_half(alpha, "alpha");
  return {binary_entropy(star(a, alpha)) - binary_entropy(alpha),
          1.0 - binary_entropy(alpha), binary_entropy(alpha)};
}

// Minimum encryptor output sum-rate r1 + r3 over the alpha grid, per a.
inline std::vector<std::pair<double, double>> encryptor_sum_rate_curve(
    const std::vector<double>& a_grid, const std::vector<double>& alpha_grid) {
  if (a_grid.empty() || alpha_grid.empty())
    throw std::invalid_argument("encryptor_sum_rate_curve: empty grid");
  std::vector<std::pair<double, double>> curve;
  curve.reserve(a_grid.size());
  for (double a : a_grid) {
    double best = std::numeric_limits<double>::infinity();
    for (double alpha : alpha_grid) {
      const RateTriple t = key_dist_corner(a, alpha);
      best = std::min(best, t.r1 + t.r3);
    }
    curve.emplace_back(a, best);
  }
  return curve;
}

struct RdCorner {
  RateTriple rates;
  bool feasible = false;
};

// D1 family (scheme R1, V = W degenerate, p(z|y) = BSC(d)), as printed:
//   ( H_b(a*alpha) - H_b(alpha), 2 - H_b(alpha) - H_b(d), 0 ),  a*d <= D.
// Note the printed r2 is looser than the generic R1 corner of the composed
// joint by exactly 1 - H_b(a*alpha*d); see the consistency tests.
inline RdCorner rd_d1_corner(double a, double alpha, double d, double D) {
  DsbsParams{a, alpha, d, D}.validate();
  return {{binary_entropy(star(a, alpha)) - binary_entropy(alpha),
           2.0 - binary_entropy(alpha) - binary_entropy(d), 0.0},
          star(a, d) <= D + 1e-12};
}

// D2 family (scheme R2, V = W degenerate, p(z|x) = BSC(d)):
//   ( H_b(a*alpha) - H_b(alpha), 1 - H_b(alpha), H_b(alpha*d) - H_b(d) ),  d <= D.
inline RdCorner rd_d2_corner(double a, double alpha, double d, double D) {
  DsbsParams{a, alpha, d, D}.validate();
  return {{binary_entropy(star(a, alpha)) - binary_entropy(alpha),
           1.0 - binary_entropy(alpha),
           binary_entropy(star(alpha, d)) - binary_entropy(d)},
          d <= D + 1e-12};
}

// --- explicitly composed six-variable joints for the configurations above ---

namespace detail {
inline Alphabet aux_u() { return binary_alphabet("U"); }
inline Alphabet deg(const char* name) { return Alphabet(name, {"0"}); }

// p(z|y,u,v,w) (or p(z|x,u,w)) that depends only on its first input through a
// BSC(d); d = 0 gives the deterministic copy.
inline Kernel bsc_from_first(std::vector<Alphabet> inputs, Alphabet output, double d) {
  std::size_t cells = 1;
  for (const auto& a : inputs) cells *= a.size();
  std::size_t first_stride = cells / inputs.front().size();
  std::vector<double> rows(cells * 2);
  for (std::size_t r = 0; r < cells; ++r) {
    const std::size_t first = r / first_stride;
    rows[r * 2 + 0] = first == 0 ? 1.0 - d : d;
    rows[r * 2 + 1] = first == 0 ? d : 1.0 - d;
  }
  return Kernel(std::move(inputs), std::move(output), std::move(rows));
}
}  // namespace detail

// Scheme R2 joint for the key-distribution example: U = BSC(alpha) of X,
// V, W degenerate, Z = X.
inline JointPmf composed_key_dist_joint(double a, double alpha) {
  const JointPmf base = dsbs(a);
  const Alphabet x = base.variables()[0], y = base.variables()[1];
  const Alphabet u = detail::aux_u(), v = detail::deg("V"), w = detail::deg("W");
  const Alphabet z = binary_alphabet("Z");
  std::vector<Kernel> kernels;
  kernels.push_back(make_bsc(alpha, x, u));
  kernels.push_back(make_constant({u, x}, v));
  kernels.push_back(make_constant({u, y}, w));
  kernels.push_back(detail::bsc_from_first({x, u, w}, z, 0.0));
  return compose_factorization(base, kernels);
}

// Scheme R1 joint for D1: U = BSC(alpha) of X, V, W degenerate, Z = BSC(d) of Y.
inline JointPmf composed_d1_joint(double a, double alpha, double d) {
  const JointPmf base = dsbs(a);
  const Alphabet x = base.variables()[0], y = base.variables()[1];
  const Alphabet u = detail::aux_u(), v = detail::deg("V"), w = detail::deg("W");
  const Alphabet z = binary_alphabet("Z");
  std::vector<Kernel> kernels;
  kernels.push_back(make_bsc(alpha, x, u));
  kernels.push_back(make_constant({u, x}, v));
  kernels.push_back(make_constant({u, x}, w));
  kernels.push_back(detail::bsc_from_first({y, u, v, w}, z, d));
  return compose_factorization(base, kernels);
}

// Scheme R2 joint for D2: U = BSC(alpha) of X, V, W degenerate, Z = BSC(d) of X.
inline JointPmf composed_d2_joint(double a, double alpha, double d) {
  const JointPmf base = dsbs(a);
  const Alphabet x = base.variables()[0], y = base.variables()[1];
  const Alphabet u = detail::aux_u(), v = detail::deg("V"), w = detail::deg("W");
  const Alphabet z = binary_alphabet("Z");
  std::vector<Kernel> kernels;
  kernels.push_back(make_bsc(alpha, x, u));
  kernels.push_back(make_constant({u, x}, v));
  kernels.push_back(make_constant({u, y}, w));
  kernels.push_back(detail::bsc_from_first({x, u, w}, z, d));
  return compose_factorization(base, kernels);
}

struct RdRecord {
  Scheme scheme;
  double alpha, d;
  RateTriple rates;
  bool feasible;
};

// All grid points of both corner families, feasible or not (the CSV export
// carries the flag).
inline std::vector<RdRecord> rd_region_records(double a, double D,
                                               const std::vector<double>& alpha_grid,
                                               const std::vector<double>& d_grid) {
  if (alpha_grid.empty() || d_grid.empty()) throw std::invalid_argument("rd_region: empty grid");
  std::vector<RdRecord> records;
  records.reserve(2 * alpha_grid.size() * d_grid.size());
  for (double alpha : alpha_grid)
    for (double d : d_grid) {
      const RdCorner c1 = rd_d1_corner(a, alpha, d, D);
      records.push_back({Scheme::r1, alpha, d, c1.rates, c1.feasible});
      const RdCorner c2 = rd_d2_corner(a, alpha, d, D);
      records.push_back({Scheme::r2, alpha, d, c2.rates, c2.feasible});
    }
  return records;
}

// Union cloud of the feasible D1 and D2 corners over the grids.
inline RegionCloud rd_region(double a, double D, const std::vector<double>& alpha_grid,
                             const std::vector<double>& d_grid) {
  RegionCloud cloud;
  for (const auto& rec : rd_region_records(a, D, alpha_grid, d_grid)) {
    if (!rec.feasible) continue;
    AuxFactorization fact;
    fact.scheme = rec.scheme;
    fact.aux_sizes = {2, 1, 1};
    const Alphabet x = binary_alphabet("X"), y = binary_alphabet("Y"),
                   z = binary_alphabet("Z");
    const Alphabet u = detail::aux_u(), v = detail::deg("V"), w = detail::deg("W");
    fact.kernels.emplace_back("u|x", make_bsc(rec.alpha, x, u));
    fact.kernels.emplace_back("v|u,x", make_constant({u, x}, v));
    if (rec.scheme == Scheme::r1) {
      fact.kernels.emplace_back("w|u,x", make_constant({u, x}, w));
      fact.kernels.emplace_back("z|y,u,v,w", detail::bsc_from_first({y, u, v, w}, z, rec.d));
    } else {
      fact.kernels.emplace_back("w|u,y", make_constant({u, y}, w));
      fact.kernels.emplace_back("z|x,u,w", detail::bsc_from_first({x, u, w}, z, rec.d));
    }
    cloud.add(rec.rates, std::move(fact));
  }
  cloud.canonicalize();
  return cloud;
}

}  // namespace coordcap
