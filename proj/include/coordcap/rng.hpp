// Seedable, splittable randomness. Every stochastic choice in the toolkit
// derives its own stream from a parent seed and a tag, so components are
// independently reproducible and results do not depend on evaluation order.
// Sampling helpers avoid std::uniform_*_distribution on purpose: the engine
// sequence is pinned by the standard, the distributions are not.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "coordcap/alphabet.hpp"
#include "coordcap/joint_pmf.hpp"

namespace coordcap {

namespace detail {
inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}
inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}
}  // namespace detail

inline std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag,
                                 std::uint64_t index = 0) {
  std::uint64_t x = parent + 0x9e3779b97f4a7c15ULL;
  x = detail::mix64(x ^ detail::fnv1a(tag));
  x = detail::mix64(x ^ (index + 0x165667b19e3779f9ULL));
  return x;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t bits() { return eng_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double u01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). Multiply-shift; deterministic across stdlibs.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below(0)");
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(eng_()) * n) >> 64);
  }

  // Draw from a pmf given as cumulative sums (last entry must be >= 1-eps).
  SymIdx sample_cdf(std::span<const double> cdf) {
    const double u = u01();
    for (std::size_t i = 0; i + 1 < cdf.size(); ++i)
      if (u < cdf[i]) return static_cast<SymIdx>(i);
    return static_cast<SymIdx>(cdf.size() - 1);
  }

  // Standard exponential via inversion.
  double exponential() { return -std::log(1.0 - u01()); }

 private:
  std::mt19937_64 eng_;
};

inline std::vector<double> cumulative(std::span<const double> pmf) {
  std::vector<double> cdf(pmf.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    acc += pmf[i];
    cdf[i] = acc;
  }
  if (!cdf.empty()) cdf.back() = 1.0;
  return cdf;
}

// Uniform draw from the probability simplex (Dirichlet(1,...,1)).
inline std::vector<double> random_simplex_point(Rng& rng, std::size_t k) {
  std::vector<double> v(k);
  double sum = 0.0;
  for (double& x : v) {
    x = rng.exponential();
    sum += x;
  }
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < k; ++i) {
    v[i] /= sum;
    acc += v[i];
  }
  v[k - 1] = std::max(0.0, 1.0 - acc);
  return v;
}

inline JointPmf random_joint_pmf(Rng& rng, std::vector<Alphabet> vars) {
  std::size_t cells = 1;
  for (const auto& v : vars) cells *= v.size();
  return JointPmf(std::move(vars), random_simplex_point(rng, cells));
}

inline Kernel random_kernel(Rng& rng, std::vector<Alphabet> inputs, Alphabet output) {
  std::size_t cells = 1;
  for (const auto& a : inputs) cells *= a.size();
  const std::size_t out_n = output.size();
  std::vector<double> rows;
  rows.reserve(cells * out_n);
  for (std::size_t r = 0; r < cells; ++r) {
    auto row = random_simplex_point(rng, out_n);
    rows.insert(rows.end(), row.begin(), row.end());
  }
  return Kernel(std::move(inputs), std::move(output), std::move(rows));
}

}  // namespace coordcap
