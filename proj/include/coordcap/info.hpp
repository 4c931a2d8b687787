// Entropies, mutual informations and total variation over exact joint pmfs.
// All logarithms are base 2; all rates are bits/symbol. Total variation uses
// the full L1 convention (range [0,2]), not the halved one.
#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "coordcap/joint_pmf.hpp"

namespace coordcap {

// H_b(x) = -x log2 x - (1-x) log2(1-x), with 0 log 0 = 0.
inline double binary_entropy(double x) {
  if (x < 0.0 || x > 1.0) throw std::domain_error("binary_entropy: argument outside [0,1]");
  double h = 0.0;
  if (x > 0.0) h -= x * std::log2(x);
  if (x < 1.0) h -= (1.0 - x) * std::log2(1.0 - x);
  return h;
}

// Binary convolution x*y = x(1-y) + y(1-x).
inline double star(double x, double y) {
  if (x < 0.0 || x > 1.0 || y < 0.0 || y > 1.0)
    throw std::domain_error("star: argument outside [0,1]");
  return x * (1.0 - y) + y * (1.0 - x);
}

inline double total_variation(const JointPmf& p, const JointPmf& q) {
  if (!p.same_space(q))
    throw std::invalid_argument("total_variation: distributions live on different spaces");
  double tv = 0.0, comp = 0.0;
  for (std::size_t c = 0; c < p.size(); ++c) {
    const double x = std::abs(p.mass(c) - q.mass(c));
    const double t = tv + x;
    comp += (tv >= x) ? (tv - t) + x : (x - t) + tv;
    tv = t;
  }
  return tv + comp;
}

namespace detail {

// Entropy of the marginal over `vars` without materializing a JointPmf.
inline double subset_entropy(const JointPmf& joint, std::span<const std::size_t> vars) {
  if (vars.empty()) return 0.0;
  std::size_t cells = 1;
  std::vector<std::size_t> strides(vars.size());
  {
    std::size_t s = 1;
    for (std::size_t i = vars.size(); i-- > 0;) {
      strides[i] = s;
      s *= joint.variables()[vars[i]].size();
    }
    cells = s;
  }
  std::vector<double> acc(cells, 0.0);
  std::vector<SymIdx> tuple;
  for (std::size_t cell = 0; cell < joint.size(); ++cell) {
    const double p = joint.mass(cell);
    if (p == 0.0) continue;
    joint.decode(cell, tuple);
    std::size_t oc = 0;
    for (std::size_t i = 0; i < vars.size(); ++i) oc += tuple[vars[i]] * strides[i];
    acc[oc] += p;
  }
  double h = 0.0;
  for (double p : acc)
    if (p > 0.0) h -= p * std::log2(p);
  return h;
}

inline void check_groups(const JointPmf& joint, std::span<const std::size_t> a,
                         std::span<const std::size_t> b, std::span<const std::size_t> c) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("mutual_information: groups A and B must be nonempty");
  std::vector<int> hits(joint.variables().size(), 0);
  auto mark = [&](std::span<const std::size_t> g) {
    for (std::size_t v : g) {
      if (v >= hits.size()) throw std::invalid_argument("mutual_information: unknown variable");
      if (++hits[v] > 1) throw std::invalid_argument("mutual_information: overlapping groups");
    }
  };
  mark(a);
  mark(b);
  mark(c);
}

}  // namespace detail

inline double entropy(const JointPmf& joint, const std::vector<std::size_t>& vars) {
  for (std::size_t v : vars)
    if (v >= joint.variables().size()) throw std::invalid_argument("entropy: unknown variable");
  return detail::subset_entropy(joint, vars);
}

// I(A;B|C) = H(A,C) + H(B,C) - H(C) - H(A,B,C), by exact summation.
inline double mutual_information(const JointPmf& joint, const std::vector<std::size_t>& group_a,
                                 const std::vector<std::size_t>& group_b,
                                 const std::vector<std::size_t>& given = {}) {
  detail::check_groups(joint, group_a, group_b, given);
  std::vector<std::size_t> ac(group_a.begin(), group_a.end());
  ac.insert(ac.end(), given.begin(), given.end());
  std::vector<std::size_t> bc(group_b.begin(), group_b.end());
  bc.insert(bc.end(), given.begin(), given.end());
  std::vector<std::size_t> abc(group_a.begin(), group_a.end());
  abc.insert(abc.end(), group_b.begin(), group_b.end());
  abc.insert(abc.end(), given.begin(), given.end());
  return detail::subset_entropy(joint, ac) + detail::subset_entropy(joint, bc) -
         detail::subset_entropy(joint, given) - detail::subset_entropy(joint, abc);
}

// Name-based convenience overloads.
inline std::vector<std::size_t> var_indices(const JointPmf& joint,
                                            std::initializer_list<const char*> names) {
  std::vector<std::size_t> idx;
  idx.reserve(names.size());
  for (const char* n : names) idx.push_back(joint.var_index(n));
  return idx;
}

inline double mutual_information(const JointPmf& joint, std::initializer_list<const char*> a,
                                 std::initializer_list<const char*> b,
                                 std::initializer_list<const char*> c = {}) {
  return mutual_information(joint, var_indices(joint, a), var_indices(joint, b),
                            var_indices(joint, c));
}

}  // namespace coordcap
