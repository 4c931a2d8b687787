#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "coordcap/joint_pmf.hpp"

namespace coordcap {

// Tuple counts along a block of equal-length sequences, one sequence per
// variable. Normalizing yields the empirical distribution (the type).
class EmpiricalCounter {
 public:
  explicit EmpiricalCounter(std::vector<Alphabet> variables)
      : vars_(std::move(variables)) {
    std::size_t cells = 1;
    strides_.resize(vars_.size());
    std::size_t s = 1;
    for (std::size_t i = vars_.size(); i-- > 0;) {
      strides_[i] = s;
      s *= vars_[i].size();
    }
    cells = s;
    if (cells > kMaxSupportCells)
      throw std::length_error("empirical counter support exceeds capacity");
    counts_.assign(cells, 0);
  }

  void add(std::span<const SymIdx> tuple) {
    if (tuple.size() != vars_.size())
      throw std::invalid_argument("empirical add: tuple arity mismatch");
    std::size_t cell = 0;
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (tuple[i] >= vars_[i].size())
        throw std::invalid_argument("empirical add: unknown symbol for '" + vars_[i].name() + "'");
      cell += tuple[i] * strides_[i];
    }
    ++counts_[cell];
    ++n_;
  }

  std::uint64_t n() const { return n_; }
  std::span<const std::uint64_t> counts() const { return counts_; }
  const std::vector<Alphabet>& variables() const { return vars_; }

  JointPmf normalize() const {
    if (n_ == 0) throw std::invalid_argument("empirical counter is empty");
    std::vector<double> mass(counts_.size());
    for (std::size_t c = 0; c < counts_.size(); ++c)
      mass[c] = static_cast<double>(counts_[c]) / static_cast<double>(n_);
    return JointPmf(vars_, std::move(mass));
  }

 private:
  std::vector<Alphabet> vars_;
  std::vector<std::size_t> strides_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t n_ = 0;
};

// p-hat: assigns count/n to each symbol tuple seen along the block.
inline JointPmf empirical_distribution(std::vector<Alphabet> variables,
                                       std::span<const std::vector<SymIdx>> sequences) {
  if (sequences.size() != variables.size())
    throw std::invalid_argument("empirical_distribution: one sequence per variable required");
  if (sequences.empty()) throw std::invalid_argument("empirical_distribution: no sequences");
  const std::size_t n = sequences.front().size();
  if (n == 0) throw std::invalid_argument("empirical_distribution: sequences must be nonempty");
  for (const auto& s : sequences)
    if (s.size() != n) throw std::invalid_argument("empirical_distribution: length mismatch");
  EmpiricalCounter counter(std::move(variables));
  std::vector<SymIdx> tuple(sequences.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t v = 0; v < sequences.size(); ++v) tuple[v] = sequences[v][i];
    counter.add(tuple);
  }
  return counter.normalize();
}

}  // namespace coordcap
