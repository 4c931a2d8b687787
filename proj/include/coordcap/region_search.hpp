// Sampling search over auxiliary kernels: instantiates the existential
// quantifier of the inner bound by composing candidate factorizations and
// keeping those whose induced p(z|x,y) matches the target.
#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "coordcap/parallel.hpp"
#include "coordcap/rate_region.hpp"
#include "coordcap/rng.hpp"

namespace coordcap {

struct GridSampler {
  double step = 0.25;
};
struct RandomSampler {
  std::size_t count = 10000;
  std::uint64_t seed = 1;
};
using SamplerSpec = std::variant<GridSampler, RandomSampler>;

// Raised when no sampled kernel met the coordination constraint.
class SearchEmptyError : public std::runtime_error {
 public:
  explicit SearchEmptyError(double best_residual)
      : std::runtime_error("no sampled factorization met the coordination constraint"
                           " (best residual " +
                           std::to_string(best_residual) + ")"),
        best_residual_(best_residual) {}
  double best_residual() const { return best_residual_; }

 private:
  double best_residual_;
};

namespace detail {

struct KernelSlot {
  std::string key;                  // e.g. "u|x"
  std::vector<Alphabet> inputs;
  Alphabet output;
};

inline std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

inline std::string slot_key(const Alphabet& out, const std::vector<Alphabet>& ins) {
  std::string k = lower(out.name()) + "|";
  for (std::size_t i = 0; i < ins.size(); ++i) {
    if (i) k += ",";
    k += lower(ins[i].name());
  }
  return k;
}

inline std::vector<KernelSlot> scheme_slots(Scheme scheme, const Alphabet& x, const Alphabet& y,
                                            const Alphabet& z, const Alphabet& u,
                                            const Alphabet& v, const Alphabet& w) {
  std::vector<KernelSlot> slots;
  slots.push_back({slot_key(u, {x}), {x}, u});
  slots.push_back({slot_key(v, {u, x}), {u, x}, v});
  if (scheme == Scheme::r1) {
    slots.push_back({slot_key(w, {u, x}), {u, x}, w});
    slots.push_back({slot_key(z, {y, u, v, w}), {y, u, v, w}, z});
  } else {
    slots.push_back({slot_key(w, {u, y}), {u, y}, w});
    slots.push_back({slot_key(z, {x, u, w}), {x, u, w}, z});
  }
  return slots;
}

// All pmfs over `k` outcomes on the simplex lattice with the given number of
// increments (compositions of `increments` into k parts).
inline std::vector<std::vector<double>> simplex_lattice(std::size_t k, std::size_t increments) {
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> parts(k, 0);
  const double step = 1.0 / static_cast<double>(increments);
  // Odometer over the first k-1 parts; the last takes the remainder.
  while (true) {
    std::size_t used = 0;
    for (std::size_t i = 0; i + 1 < k; ++i) used += parts[i];
    if (used <= increments) {
      std::vector<double> row(k);
      for (std::size_t i = 0; i + 1 < k; ++i) row[i] = static_cast<double>(parts[i]) * step;
      row[k - 1] = static_cast<double>(increments - used) * step;
      rows.push_back(std::move(row));
    }
    std::size_t pos = 0;
    while (pos + 1 < k) {
      if (++parts[pos] <= increments) break;
      parts[pos] = 0;
      ++pos;
    }
    if (pos + 1 >= k) break;
    // Skip odometer states that already overflow the budget.
  }
  return rows;
}

}  // namespace detail

// Evaluates one fully specified factorization against the target: composes
// the joint, rejects it unless the induced (X,Y,Z) marginal is within
// `tolerance` of the target in L1 (equivalently, p(x,y)-weighted row-wise L1
// of p(z|x,y)), and returns the corner triple.
inline std::optional<CloudPoint> evaluate_factorization(const JointPmf& target,
                                                        const JointPmf& base, Scheme scheme,
                                                        AuxFactorization fact, double tolerance,
                                                        double* residual_out = nullptr) {
  std::vector<Kernel> kernels;
  kernels.reserve(fact.kernels.size());
  for (const auto& [key, k] : fact.kernels) kernels.push_back(k);
  const JointPmf joint6 = compose_factorization(base, kernels);
  const auto xyz = var_indices(joint6, {"X", "Y", "Z"});
  const double residual = total_variation(marginalize(joint6, xyz), target);
  if (residual_out) *residual_out = residual;
  if (residual > tolerance) return std::nullopt;
  try {
    RateTriple corner = scheme == Scheme::r1 ? inner_corner_r1(joint6) : inner_corner_r2(joint6);
    return CloudPoint{corner, std::move(fact)};
  } catch (const std::domain_error&) {
    // Negative corner component: not a valid operating point of the scheme.
    return std::nullopt;
  }
}

// Searches both schemes over sampled auxiliary factorizations and returns the
// union cloud. Deterministic given the sampler spec; the sample index space
// may be partitioned across workers without changing the result.
inline RegionCloud search_inner_bound(const JointPmf& target,
                                      std::array<std::size_t, 3> aux_sizes,
                                      const SamplerSpec& sampler, double tolerance,
                                      unsigned threads = 1) {
  if (tolerance <= 0.0) throw std::invalid_argument("search tolerance must be positive");
  if (target.variables().size() != 3)
    throw std::invalid_argument("search target must have exactly three variables (X,Y,Z)");
  for (const auto& v : target.variables())
    if (v.name() == "U" || v.name() == "V" || v.name() == "W")
      throw std::invalid_argument("target variable names collide with auxiliary names U/V/W");

  const Alphabet& x = target.variables()[0];
  const Alphabet& y = target.variables()[1];
  const Alphabet& z = target.variables()[2];
  const Alphabet u = indexed_alphabet("U", aux_sizes[0]);
  const Alphabet v = indexed_alphabet("V", aux_sizes[1]);
  const Alphabet w = indexed_alphabet("W", aux_sizes[2]);

  const std::vector<std::size_t> xy = {0, 1};
  const JointPmf base = marginalize(target, xy);
  for (std::size_t c = 0; c < base.size(); ++c)
    if (base.mass(c) <= 0.0)
      throw std::invalid_argument("search target needs a strictly positive (X,Y) marginal");

  RegionCloud cloud;
  double best_residual = std::numeric_limits<double>::infinity();

  for (const Scheme scheme : {Scheme::r1, Scheme::r2}) {
    const auto slots = detail::scheme_slots(scheme, x, y, z, u, v, w);

    auto assemble = [&](const std::vector<std::vector<std::vector<double>>>& rows_per_slot) {
      AuxFactorization fact;
      fact.scheme = scheme;
      fact.aux_sizes = aux_sizes;
      for (std::size_t s = 0; s < slots.size(); ++s) {
        std::vector<double> flat;
        for (const auto& row : rows_per_slot[s]) flat.insert(flat.end(), row.begin(), row.end());
        fact.kernels.emplace_back(slots[s].key,
                                  Kernel(slots[s].inputs, slots[s].output, std::move(flat)));
      }
      return fact;
    };

    std::vector<std::optional<CloudPoint>> results;
    std::vector<double> residuals;

    if (const auto* grid = std::get_if<GridSampler>(&sampler)) {
      const double inc_real = 1.0 / grid->step;
      const auto increments = static_cast<std::size_t>(std::llround(inc_real));
      if (grid->step <= 0.0 || increments == 0 || std::abs(inc_real - static_cast<double>(increments)) > 1e-9)
        throw std::invalid_argument("grid step must evenly divide 1");
      // Count free parameters; grids beyond 6 are combinatorially infeasible.
      std::size_t free_params = 0;
      for (const auto& s : slots) {
        std::size_t cells = 1;
        for (const auto& a : s.inputs) cells *= a.size();
        free_params += cells * (s.output.size() - 1);
      }
      if (free_params > 6)
        throw std::invalid_argument("grid sampling limited to factorizations with <= 6 free "
                                    "parameters (" +
                                    std::to_string(free_params) + " here); use random sampling");
      // Per-row candidate lists, then an odometer over all rows of all slots.
      std::vector<std::vector<std::vector<double>>> row_choices;  // flat list of rows
      std::vector<std::size_t> slot_of_row, row_in_slot;
      std::vector<std::size_t> rows_per_slot_count;
      for (std::size_t s = 0; s < slots.size(); ++s) {
        std::size_t cells = 1;
        for (const auto& a : slots[s].inputs) cells *= a.size();
        rows_per_slot_count.push_back(cells);
        const auto lattice = detail::simplex_lattice(slots[s].output.size(), increments);
        for (std::size_t r = 0; r < cells; ++r) {
          row_choices.push_back(lattice);
          slot_of_row.push_back(s);
          row_in_slot.push_back(r);
        }
      }
      std::size_t total = 1;
      for (const auto& rc : row_choices) total *= rc.size();
      results.resize(total);
      residuals.assign(total, std::numeric_limits<double>::infinity());
      parallel_for(total, threads, [&](std::size_t idx) {
        std::vector<std::vector<std::vector<double>>> rows(slots.size());
        for (std::size_t s = 0; s < slots.size(); ++s)
          rows[s].resize(rows_per_slot_count[s]);
        std::size_t rem = idx;
        for (std::size_t rr = row_choices.size(); rr-- > 0;) {
          const std::size_t choice = rem % row_choices[rr].size();
          rem /= row_choices[rr].size();
          rows[slot_of_row[rr]][row_in_slot[rr]] = row_choices[rr][choice];
        }
        results[idx] = evaluate_factorization(target, base, scheme, assemble(rows), tolerance,
                                              &residuals[idx]);
      });
    } else {
      const auto& random = std::get<RandomSampler>(sampler);
      results.resize(random.count);
      residuals.assign(random.count, std::numeric_limits<double>::infinity());
      const char* tag = scheme == Scheme::r1 ? "search_r1" : "search_r2";
      parallel_for(random.count, threads, [&](std::size_t i) {
        Rng rng(derive_seed(random.seed, tag, i));
        std::vector<std::vector<std::vector<double>>> rows(slots.size());
        for (std::size_t s = 0; s < slots.size(); ++s) {
          std::size_t cells = 1;
          for (const auto& a : slots[s].inputs) cells *= a.size();
          rows[s].reserve(cells);
          for (std::size_t r = 0; r < cells; ++r)
            rows[s].push_back(random_simplex_point(rng, slots[s].output.size()));
        }
        results[i] = evaluate_factorization(target, base, scheme, assemble(rows), tolerance,
                                            &residuals[i]);
      });
    }

    for (auto& r : results)
      if (r) cloud.add(r->rates, std::move(r->provenance));
    for (double r : residuals) best_residual = std::min(best_residual, r);
  }

  if (cloud.empty()) throw SearchEmptyError(best_residual);
  cloud.canonicalize();
  return cloud;
}

}  // namespace coordcap
