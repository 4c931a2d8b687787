#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "coordcap/alphabet.hpp"
#include "coordcap/kernel.hpp"

namespace coordcap {

// Hard cap on the dense support size of any joint pmf. All the distributions
// this toolkit targets are tiny (binary alphabets, at most six variables);
// rejecting anything larger keeps behavior predictable.
inline constexpr std::size_t kMaxSupportCells = 1'000'000;

// Compensated (Neumaier) summation; keeps normalization checks meaningful
// even at the support-size cap.
inline double neumaier_sum(std::span<const double> xs) {
  double sum = 0.0, comp = 0.0;
  for (double x : xs) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  return sum + comp;
}

// Exact probability mass function over a product of named finite alphabets.
// Mass is stored densely, row-major over the variables in order. Immutable
// after construction.
class JointPmf {
 public:
  JointPmf(std::vector<Alphabet> variables, std::vector<double> mass)
      : vars_(std::move(variables)), mass_(std::move(mass)) {
    if (vars_.empty()) throw std::invalid_argument("joint pmf needs at least one variable");
    std::size_t cells = 1;
    for (const auto& v : vars_) {
      for (const auto& w : vars_)
        if (&v != &w && v.name() == w.name())
          throw std::invalid_argument("duplicate variable name '" + v.name() + "'");
      if (cells > kMaxSupportCells / v.size())
        throw std::length_error("joint support exceeds the 10^6 cell capacity");
      cells *= v.size();
    }
    if (mass_.size() != cells)
      throw std::invalid_argument("mass vector size does not match the product space");
    for (double p : mass_)
      if (p < 0.0) throw std::invalid_argument("joint pmf has a negative mass");
    const double sum = neumaier_sum(mass_);
    if (std::abs(sum - 1.0) > 1e-12)
      throw std::invalid_argument("joint pmf sums to " + std::to_string(sum) + ", expected 1");
    strides_.resize(vars_.size());
    std::size_t s = 1;
    for (std::size_t i = vars_.size(); i-- > 0;) {
      strides_[i] = s;
      s *= vars_[i].size();
    }
  }

  const std::vector<Alphabet>& variables() const { return vars_; }
  std::size_t size() const { return mass_.size(); }
  std::span<const double> mass() const { return mass_; }
  double mass(std::size_t cell) const { return mass_[cell]; }

  double mass(std::span<const SymIdx> tuple) const { return mass_[encode(tuple)]; }

  std::size_t encode(std::span<const SymIdx> tuple) const {
    if (tuple.size() != vars_.size()) throw std::invalid_argument("tuple arity mismatch");
    std::size_t cell = 0;
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (tuple[i] >= vars_[i].size())
        throw std::invalid_argument("tuple symbol out of range for '" + vars_[i].name() + "'");
      cell += tuple[i] * strides_[i];
    }
    return cell;
  }

  void decode(std::size_t cell, std::vector<SymIdx>& tuple) const {
    tuple.resize(vars_.size());
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      tuple[i] = static_cast<SymIdx>(cell / strides_[i]);
      cell %= strides_[i];
    }
  }

  std::size_t var_index(const std::string& name) const {
    for (std::size_t i = 0; i < vars_.size(); ++i)
      if (vars_[i].name() == name) return i;
    throw std::invalid_argument("unknown variable '" + name + "'");
  }
  bool has_var(const std::string& name) const {
    for (const auto& v : vars_)
      if (v.name() == name) return true;
    return false;
  }

  bool same_space(const JointPmf& other) const {
    return vars_ == other.vars_;
  }

 private:
  std::vector<Alphabet> vars_;
  std::vector<double> mass_;
  std::vector<std::size_t> strides_;
};

// Sums mass over the dropped variables. The result's variables follow the
// order of `keep`, so this doubles as a variable reordering.
inline JointPmf marginalize(const JointPmf& joint, std::span<const std::size_t> keep) {
  if (keep.empty()) throw std::invalid_argument("marginalize: keep set is empty");
  const auto& vars = joint.variables();
  std::vector<bool> seen(vars.size(), false);
  std::vector<Alphabet> out_vars;
  std::size_t out_cells = 1;
  for (std::size_t k : keep) {
    if (k >= vars.size()) throw std::invalid_argument("marginalize: unknown variable index");
    if (seen[k]) throw std::invalid_argument("marginalize: duplicate variable in keep set");
    seen[k] = true;
    out_vars.push_back(vars[k]);
    out_cells *= vars[k].size();
  }
  std::vector<std::size_t> out_strides(keep.size());
  std::size_t s = 1;
  for (std::size_t i = keep.size(); i-- > 0;) {
    out_strides[i] = s;
    s *= vars[keep[i]].size();
  }
  std::vector<double> acc(out_cells, 0.0), comp(out_cells, 0.0);
  std::vector<SymIdx> tuple;
  for (std::size_t cell = 0; cell < joint.size(); ++cell) {
    joint.decode(cell, tuple);
    std::size_t oc = 0;
    for (std::size_t i = 0; i < keep.size(); ++i) oc += tuple[keep[i]] * out_strides[i];
    const double x = joint.mass(cell);
    const double t = acc[oc] + x;
    if (std::abs(acc[oc]) >= std::abs(x))
      comp[oc] += (acc[oc] - t) + x;
    else
      comp[oc] += (x - t) + acc[oc];
    acc[oc] = t;
  }
  for (std::size_t i = 0; i < out_cells; ++i) acc[i] += comp[i];
  // Guard against compensated-arithmetic residue driving a cell negative.
  for (double& p : acc)
    if (p < 0.0 && p > -1e-15) p = 0.0;
  return JointPmf(std::move(out_vars), std::move(acc));
}

inline JointPmf marginalize(const JointPmf& joint, std::span<const std::string> keep_names) {
  std::vector<std::size_t> keep;
  keep.reserve(keep_names.size());
  for (const auto& n : keep_names) keep.push_back(joint.var_index(n));
  return marginalize(joint, keep);
}

// Conditional p(output | given) extracted from a joint. Rows conditioned on a
// zero-probability event are flagged unconstrained and filled uniformly.
inline Kernel conditional(const JointPmf& joint, std::size_t output,
                          std::span<const std::size_t> given) {
  const auto& vars = joint.variables();
  if (output >= vars.size()) throw std::invalid_argument("conditional: unknown output variable");
  for (std::size_t g : given)
    if (g == output) throw std::invalid_argument("conditional: output appears in given set");

  std::vector<std::size_t> keep(given.begin(), given.end());
  keep.push_back(output);
  const JointPmf sub = marginalize(joint, keep);  // (given..., output)

  std::vector<Alphabet> in_alphs;
  std::size_t in_cells = 1;
  for (std::size_t g : given) {
    in_alphs.push_back(vars[g]);
    in_cells *= vars[g].size();
  }
  const std::size_t out_n = vars[output].size();
  std::vector<double> rows(in_cells * out_n, 0.0);
  std::vector<bool> unconstrained(in_cells, false);
  for (std::size_t r = 0; r < in_cells; ++r) {
    double denom = 0.0;
    for (std::size_t o = 0; o < out_n; ++o) denom += sub.mass(r * out_n + o);
    if (denom <= 0.0) {
      unconstrained[r] = true;
      for (std::size_t o = 0; o < out_n; ++o) rows[r * out_n + o] = 1.0 / out_n;
    } else {
      double acc = 0.0;
      for (std::size_t o = 0; o + 1 < out_n; ++o) {
        double p = sub.mass(r * out_n + o) / denom;
        p = std::clamp(p, 0.0, 1.0);
        rows[r * out_n + o] = p;
        acc += p;
      }
      rows[r * out_n + out_n - 1] = std::max(0.0, 1.0 - acc);  // rows sum to 1 exactly
    }
  }
  return Kernel(std::move(in_alphs), vars[output], std::move(rows), std::move(unconstrained));
}

inline Kernel conditional(const JointPmf& joint, const std::string& output,
                          std::span<const std::string> given_names) {
  std::vector<std::size_t> given;
  given.reserve(given_names.size());
  for (const auto& n : given_names) given.push_back(joint.var_index(n));
  return conditional(joint, joint.var_index(output), given);
}

// Product-form joint: extends `base` by one new variable per kernel, in
// order. Each kernel's inputs must already be present; its output must be
// new. This is how the factorizations behind the bound regions are built.
inline JointPmf compose_factorization(const JointPmf& base, std::span<const Kernel> kernels) {
  JointPmf joint = base;
  for (const auto& k : kernels) {
    const auto& vars = joint.variables();
    if (joint.has_var(k.output().name()))
      throw std::invalid_argument("compose: duplicate output variable '" + k.output().name() +
                                  "'");
    std::vector<std::size_t> in_pos;
    in_pos.reserve(k.inputs().size());
    for (const auto& in : k.inputs()) {
      const std::size_t p = joint.var_index(in.name());  // throws if missing
      if (vars[p] != in)
        throw std::invalid_argument("compose: alphabet mismatch on '" + in.name() + "'");
      in_pos.push_back(p);
    }
    std::vector<Alphabet> out_vars = vars;
    out_vars.push_back(k.output());
    const std::size_t out_n = k.output().size();
    std::vector<double> mass(joint.size() * out_n);
    std::vector<SymIdx> tuple, in_tuple(in_pos.size());
    for (std::size_t cell = 0; cell < joint.size(); ++cell) {
      joint.decode(cell, tuple);
      for (std::size_t i = 0; i < in_pos.size(); ++i) in_tuple[i] = tuple[in_pos[i]];
      const auto row = k.row(k.input_cell(in_tuple));
      const double p = joint.mass(cell);
      for (std::size_t o = 0; o < out_n; ++o) mass[cell * out_n + o] = p * row[o];
    }
    joint = JointPmf(std::move(out_vars), std::move(mass));
  }
  return joint;
}

}  // namespace coordcap
