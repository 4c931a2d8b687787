#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "coordcap/alphabet.hpp"

namespace coordcap {

// Conditional pmf p(output | inputs) over finite alphabets. Rows are stored
// densely, one per input tuple (row-major over the input alphabets in order).
// Rows that condition on a zero-probability event may be flagged
// "unconstrained"; such rows are filled uniformly.
class Kernel {
 public:
  Kernel(std::vector<Alphabet> inputs, Alphabet output, std::vector<double> rows,
         std::vector<bool> unconstrained = {})
      : inputs_(std::move(inputs)),
        output_(std::move(output)),
        rows_(std::move(rows)),
        unconstrained_(std::move(unconstrained)) {
    in_cells_ = 1;
    for (const auto& a : inputs_) in_cells_ *= a.size();
    if (rows_.size() != in_cells_ * output_.size())
      throw std::invalid_argument("kernel row storage does not match input/output sizes");
    if (!unconstrained_.empty() && unconstrained_.size() != in_cells_)
      throw std::invalid_argument("kernel unconstrained flags do not match input space");
    for (std::size_t r = 0; r < in_cells_; ++r) {
      double sum = 0.0;
      for (std::size_t o = 0; o < output_.size(); ++o) {
        const double p = rows_[r * output_.size() + o];
        if (p < 0.0) throw std::invalid_argument("kernel has a negative probability");
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("kernel row " + std::to_string(r) + " sums to " +
                                    std::to_string(sum) + ", expected 1");
    }
  }

  const std::vector<Alphabet>& inputs() const { return inputs_; }
  const Alphabet& output() const { return output_; }
  std::size_t input_cells() const { return in_cells_; }

  std::span<const double> row(std::size_t input_cell) const {
    return {rows_.data() + input_cell * output_.size(), output_.size()};
  }

  std::size_t input_cell(std::span<const SymIdx> input_tuple) const {
    if (input_tuple.size() != inputs_.size())
      throw std::invalid_argument("kernel input tuple arity mismatch");
    std::size_t cell = 0;
    for (std::size_t i = 0; i < inputs_.size(); ++i) {
      if (input_tuple[i] >= inputs_[i].size())
        throw std::invalid_argument("kernel input symbol out of range");
      cell = cell * inputs_[i].size() + input_tuple[i];
    }
    return cell;
  }

  double prob(std::span<const SymIdx> input_tuple, SymIdx out) const {
    if (out >= output_.size()) throw std::invalid_argument("kernel output symbol out of range");
    return rows_[input_cell(input_tuple) * output_.size() + out];
  }

  bool row_unconstrained(std::size_t input_cell) const {
    return !unconstrained_.empty() && unconstrained_[input_cell];
  }
  bool has_unconstrained_rows() const {
    for (std::size_t r = 0; r < in_cells_; ++r)
      if (row_unconstrained(r)) return true;
    return false;
  }

 private:
  std::vector<Alphabet> inputs_;
  Alphabet output_;
  std::vector<double> rows_;  // in_cells x |output|
  std::vector<bool> unconstrained_;
  std::size_t in_cells_ = 0;
};

// --- common kernel builders ---

inline Kernel make_bsc(double alpha, Alphabet input, Alphabet output) {
  if (alpha < 0.0 || alpha > 1.0) throw std::domain_error("BSC crossover outside [0,1]");
  if (input.size() != 2 || output.size() != 2)
    throw std::invalid_argument("BSC requires binary alphabets");
  return Kernel({std::move(input)}, std::move(output),
                {1.0 - alpha, alpha, alpha, 1.0 - alpha});
}

// Deterministic copy of a single input variable.
inline Kernel make_identity(const Alphabet& input, Alphabet output) {
  if (input.size() != output.size())
    throw std::invalid_argument("identity kernel needs equal alphabet sizes");
  std::vector<double> rows(input.size() * output.size(), 0.0);
  for (std::size_t i = 0; i < input.size(); ++i) rows[i * output.size() + i] = 1.0;
  return Kernel({input}, std::move(output), std::move(rows));
}

// Constant output regardless of inputs.
inline Kernel make_constant(std::vector<Alphabet> inputs, Alphabet output, SymIdx symbol = 0) {
  std::size_t cells = 1;
  for (const auto& a : inputs) cells *= a.size();
  std::vector<double> rows(cells * output.size(), 0.0);
  for (std::size_t r = 0; r < cells; ++r) rows[r * output.size() + symbol] = 1.0;
  return Kernel(std::move(inputs), std::move(output), std::move(rows));
}

inline Kernel make_uniform(std::vector<Alphabet> inputs, Alphabet output) {
  std::size_t cells = 1;
  for (const auto& a : inputs) cells *= a.size();
  std::vector<double> rows(cells * output.size(), 1.0 / static_cast<double>(output.size()));
  return Kernel(std::move(inputs), std::move(output), std::move(rows));
}

}  // namespace coordcap
