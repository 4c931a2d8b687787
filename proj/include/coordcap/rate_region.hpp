// Corner-point evaluators for the inner and outer bounds on the empirical
// coordination capacity region of the triangular network, plus the sampled
// region-cloud representation and convex-hull membership.
//
// Conventions: the six-variable joint carries variables named X, Y, U, V, W,
// Z. Scheme R1 corresponds to the factorization
//   p(x,y) p(u|x) p(v|u,x) p(w|u,x) p(z|y,u,v,w)
// and scheme R2 to
//   p(x,y) p(u|x) p(v|u,x) p(w|u,y) p(z|x,u,w).
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "coordcap/info.hpp"
#include "coordcap/joint_pmf.hpp"
#include "coordcap/kernel.hpp"

namespace coordcap {

enum class Scheme { r1, r2, outer };

inline const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::r1: return "R1";
    case Scheme::r2: return "R2";
    case Scheme::outer: return "OUTER";
  }
  return "?";
}

inline Scheme scheme_from_name(const std::string& s) {
  if (s == "R1") return Scheme::r1;
  if (s == "R2") return Scheme::r2;
  if (s == "OUTER") return Scheme::outer;
  throw std::invalid_argument("unknown scheme '" + s + "'");
}

// A point (R1,R2,R3) in bits/symbol.
struct RateTriple {
  double r1 = 0.0, r2 = 0.0, r3 = 0.0;

  double operator[](std::size_t k) const { return k == 0 ? r1 : (k == 1 ? r2 : r3); }
  bool dominates(const RateTriple& o, double tol = 0.0) const {
    return r1 + tol >= o.r1 && r2 + tol >= o.r2 && r3 + tol >= o.r3;
  }
};

namespace detail {
// Negative components above -1e-9 are floating noise and clamp to zero.
// Anything more negative is a genuinely invalid operating point; clamping it
// would fabricate achievability, so it is reported instead.
inline double clamp_rate_component(double v, const char* what) {
  if (v < -1e-9)
    throw std::domain_error(std::string("corner component ") + what + " is negative (" +
                            std::to_string(v) + "); not a valid operating point");
  return v < 0.0 ? 0.0 : v;
}

struct Joint6View {
  const JointPmf* joint;
  std::size_t x, y, u, v, w, z;
};

inline Joint6View joint6_view(const JointPmf& joint6) {
  if (joint6.variables().size() != 6)
    throw std::invalid_argument("expected a six-variable joint over (X,Y,U,V,W,Z)");
  return {&joint6,         joint6.var_index("X"), joint6.var_index("Y"),
          joint6.var_index("U"), joint6.var_index("V"), joint6.var_index("W"),
          joint6.var_index("Z")};
}

inline double cmi(const Joint6View& g, std::vector<std::size_t> a, std::vector<std::size_t> b,
                  std::vector<std::size_t> c = {}) {
  return mutual_information(*g.joint, a, b, c);
}

inline void require_factorization(const Joint6View& g, Scheme scheme) {
  struct Check {
    const char* label;
    double value;
  };
  std::vector<Check> checks;
  // Shared prefix p(u|x) p(v|u,x).
  checks.push_back({"I(U;Y|X)", cmi(g, {g.u}, {g.y}, {g.x})});
  checks.push_back({"I(V;Y|U,X)", cmi(g, {g.v}, {g.y}, {g.u, g.x})});
  if (scheme == Scheme::r1) {
    checks.push_back({"I(W;V,Y|U,X)", cmi(g, {g.w}, {g.v, g.y}, {g.u, g.x})});
    checks.push_back({"I(Z;X|Y,U,V,W)", cmi(g, {g.z}, {g.x}, {g.y, g.u, g.v, g.w})});
  } else {
    checks.push_back({"I(W;X,V|U,Y)", cmi(g, {g.w}, {g.x, g.v}, {g.u, g.y})});
    checks.push_back({"I(Z;Y,V|X,U,W)", cmi(g, {g.z}, {g.y, g.v}, {g.x, g.u, g.w})});
  }
  for (const auto& c : checks)
    if (c.value > 1e-9)
      throw std::invalid_argument(std::string("joint does not factorize per scheme ") +
                                  scheme_name(scheme) + ": " + c.label + " = " +
                                  std::to_string(c.value));
}
}  // namespace detail

// Corner of region R1: ( I(X;U,V|Y), I(X;U)+I(V,Y;Z|U)-I(W;Z|U), I(X;W|U) ).
inline RateTriple inner_corner_r1(const JointPmf& joint6) {
  const auto g = detail::joint6_view(joint6);
  detail::require_factorization(g, Scheme::r1);
  const double r1 = detail::cmi(g, {g.x}, {g.u, g.v}, {g.y});
  const double r2 = detail::cmi(g, {g.x}, {g.u}) + detail::cmi(g, {g.v, g.y}, {g.z}, {g.u}) -
                    detail::cmi(g, {g.w}, {g.z}, {g.u});
  const double r3 = detail::cmi(g, {g.x}, {g.w}, {g.u});
  return {detail::clamp_rate_component(r1, "R1"), detail::clamp_rate_component(r2, "R2"),
          detail::clamp_rate_component(r3, "R3")};
}

// Corner of region R2: ( I(X;U,V|Y), I(X;U)+I(V,Y;W|U), I(X;Z|U)-I(W;Z|U) ).
inline RateTriple inner_corner_r2(const JointPmf& joint6) {
  const auto g = detail::joint6_view(joint6);
  detail::require_factorization(g, Scheme::r2);
  const double r1 = detail::cmi(g, {g.x}, {g.u, g.v}, {g.y});
  const double r2 = detail::cmi(g, {g.x}, {g.u}) + detail::cmi(g, {g.v, g.y}, {g.w}, {g.u});
  const double r3 = detail::cmi(g, {g.x}, {g.z}, {g.u}) - detail::cmi(g, {g.w}, {g.z}, {g.u});
  return {detail::clamp_rate_component(r1, "R1"), detail::clamp_rate_component(r2, "R2"),
          detail::clamp_rate_component(r3, "R3")};
}

// Outer-bound corner: ( I(X;U,V|Y), I(X,Y;U), I(X;W|U) ). Any joint whose
// (X,Y,Z) marginal equals the target is admissible.
inline RateTriple outer_corner(const JointPmf& joint6, const JointPmf& target) {
  const auto g = detail::joint6_view(joint6);
  const std::vector<std::size_t> xyz = {g.x, g.y, g.z};
  const JointPmf marg = marginalize(joint6, xyz);
  if (!marg.same_space(target))
    throw std::invalid_argument("outer_corner: target lives on a different (X,Y,Z) space");
  for (std::size_t c = 0; c < marg.size(); ++c)
    if (std::abs(marg.mass(c) - target.mass(c)) > 1e-9)
      throw std::invalid_argument("outer_corner: joint marginal does not match the target");
  const double r1 = detail::cmi(g, {g.x}, {g.u, g.v}, {g.y});
  const double r2 = detail::cmi(g, {g.x, g.y}, {g.u});
  const double r3 = detail::cmi(g, {g.x}, {g.w}, {g.u});
  return {detail::clamp_rate_component(r1, "R1"), detail::clamp_rate_component(r2, "R2"),
          detail::clamp_rate_component(r3, "R3")};
}

// One sampled factorization: the kernels that produced a corner, keyed by a
// human-readable signature such as "u|x".
struct AuxFactorization {
  Scheme scheme = Scheme::r1;
  std::vector<std::pair<std::string, Kernel>> kernels;
  std::array<std::size_t, 3> aux_sizes = {2, 2, 2};
};

struct CloudPoint {
  RateTriple rates;
  AuxFactorization provenance;
};

namespace detail {
// Pareto-minimal subset under componentwise <= (a staircase sweep). Removing
// dominated points does not change the upward-closed convex hull.
inline std::vector<std::array<double, 3>> pareto_minimal(
    std::vector<std::array<double, 3>> pts) {
  std::sort(pts.begin(), pts.end());
  std::vector<std::array<double, 3>> keep;
  std::map<double, double> frontier;  // r2 -> min r3 among kept points
  for (const auto& p : pts) {
    auto it = frontier.upper_bound(p[1]);
    bool dominated = false;
    if (it != frontier.begin()) {
      --it;
      if (it->second <= p[2]) dominated = true;
    }
    if (dominated) continue;
    keep.push_back(p);
    // Insert and prune entries that are no better than the new one.
    auto [pos, fresh] = frontier.emplace(p[1], p[2]);
    if (!fresh) pos->second = std::min(pos->second, p[2]);
    for (auto next = std::next(pos); next != frontier.end() && next->second >= pos->second;)
      next = frontier.erase(next);
  }
  return keep;
}

// Feasibility of: exists lambda in the simplex with sum_j lambda_j p_j <= q,
// solved as a phase-1 simplex (Bland's rule) with slack columns on the three
// inequality rows and one artificial on the convexity row.
inline bool dominates_hull_point(const std::vector<std::array<double, 3>>& pts,
                                 const std::array<double, 3>& q) {
  if (pts.empty()) return false;
  const std::size_t n = pts.size();
  const std::size_t cols = n + 4;  // lambda..., s0, s1, s2, artificial
  std::vector<std::vector<double>> t(4, std::vector<double>(cols, 0.0));
  std::array<double, 4> rhs{q[0], q[1], q[2], 1.0};
  for (std::size_t j = 0; j < n; ++j) {
    for (int k = 0; k < 3; ++k) t[k][j] = pts[j][k];
    t[3][j] = 1.0;
  }
  for (int k = 0; k < 3; ++k) t[k][n + k] = 1.0;
  t[3][n + 3] = 1.0;
  std::array<std::size_t, 4> basis{n, n + 1, n + 2, n + 3};

  // Phase-1 objective: minimize the artificial variable. Reduced costs start
  // as c - row3 (the artificial's basis row).
  std::vector<double> red(cols, 0.0);
  red[n + 3] = 1.0;
  for (std::size_t j = 0; j < cols; ++j) red[j] -= t[3][j];
  double objective = -rhs[3];

  constexpr double kPivotTol = 1e-11;
  for (std::size_t iter = 0; iter < 10000; ++iter) {
    std::size_t enter = cols;
    for (std::size_t j = 0; j < cols; ++j)  // Bland: first negative reduced cost
      if (red[j] < -kPivotTol) {
        enter = j;
        break;
      }
    if (enter == cols) break;  // optimal
    std::size_t leave = 4;
    double best_ratio = 0.0;
    for (std::size_t r = 0; r < 4; ++r) {
      if (t[r][enter] <= kPivotTol) continue;
      const double ratio = rhs[r] / t[r][enter];
      if (leave == 4 || ratio < best_ratio - 1e-15 ||
          (std::abs(ratio - best_ratio) <= 1e-15 && basis[r] < basis[leave])) {
        leave = r;
        best_ratio = ratio;
      }
    }
    if (leave == 4) break;  // unbounded (cannot happen: phase-1 is bounded below)
    const double piv = t[leave][enter];
    for (std::size_t j = 0; j < cols; ++j) t[leave][j] /= piv;
    rhs[leave] /= piv;
    for (std::size_t r = 0; r < 4; ++r) {
      if (r == leave) continue;
      const double f = t[r][enter];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < cols; ++j) t[r][j] -= f * t[leave][j];
      rhs[r] -= f * rhs[leave];
    }
    const double fr = red[enter];
    for (std::size_t j = 0; j < cols; ++j) red[j] -= fr * t[leave][j];
    objective -= fr * rhs[leave];
    basis[leave] = enter;
  }
  return -objective <= 1e-9;  // artificial driven to ~0 means feasible
}
}  // namespace detail

// A dominance-closed sampled region: every componentwise-larger triple of a
// stored point is treated as a member, and membership queries go through the
// convex hull of the stored points.
class RegionCloud {
 public:
  void add(RateTriple rates, AuxFactorization provenance) {
    points_.push_back({rates, std::move(provenance)});
  }

  // Canonical order plus dedup of triples within 1e-9 componentwise
  // (quantized to 1e-9 cells; the first point of each cell survives).
  void canonicalize() {
    auto key = [](const RateTriple& t) {
      return std::array<long long, 3>{std::llround(t.r1 * 1e9), std::llround(t.r2 * 1e9),
                                      std::llround(t.r3 * 1e9)};
    };
    std::stable_sort(points_.begin(), points_.end(), [&](const CloudPoint& a, const CloudPoint& b) {
      const auto ka = key(a.rates), kb = key(b.rates);
      if (ka != kb) return ka < kb;
      return std::array<double, 3>{a.rates.r1, a.rates.r2, a.rates.r3} <
             std::array<double, 3>{b.rates.r1, b.rates.r2, b.rates.r3};
    });
    std::vector<CloudPoint> out;
    std::array<long long, 3> last{};
    for (auto& p : points_) {
      const auto k = key(p.rates);
      if (!out.empty() && k == last) continue;
      last = k;
      out.push_back(std::move(p));
    }
    points_ = std::move(out);
  }

  const std::vector<CloudPoint>& points() const { return points_; }
  bool empty() const { return points_.empty(); }
  std::size_t size() const { return points_.size(); }

  void merge(RegionCloud other) {
    for (auto& p : other.points_) points_.push_back(std::move(p));
  }

 private:
  std::vector<CloudPoint> points_;
};

// True iff query + tolerance*(1,1,1) dominates some convex combination of
// cloud points. An empty cloud contains nothing.
inline bool contains(const RegionCloud& cloud, const RateTriple& query, double tolerance) {
  if (cloud.empty()) return false;
  std::vector<std::array<double, 3>> pts;
  pts.reserve(cloud.size());
  for (const auto& p : cloud.points())
    pts.push_back({p.rates.r1, p.rates.r2, p.rates.r3});
  pts = detail::pareto_minimal(std::move(pts));
  const std::array<double, 3> q{query.r1 + tolerance, query.r2 + tolerance,
                                query.r3 + tolerance};
  return detail::dominates_hull_point(pts, q);
}

}  // namespace coordcap
