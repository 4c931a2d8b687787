// Desk-scale three-terminal coordination simulator: random codebooks with
// binning, the two encoding/decoding schemes across terminals T_X, T_Y, T_Z,
// and measurement of the achieved empirical distribution against a target.
//
// Scheme 1 (achieves region R1): T_X covers U, V, W from x^n and sends the
// U/V bin indices on C1 and the full W index on C3; T_Y decodes U and V via
// side information, covers Z against (U,V,Y), and sends the decoded U index
// plus the Z bin index on C2; T_Z resolves W by index and decodes Z in its
// bin. Scheme 2 (region R2) swaps the roles: T_X covers Z against (U,X) and
// bins it on C3, while T_Y covers W against (U,V,Y) and sends its full index
// on C2.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "coordcap/empirical.hpp"
#include "coordcap/info.hpp"
#include "coordcap/parallel.hpp"
#include "coordcap/rate_region.hpp"
#include "coordcap/rng.hpp"

namespace coordcap {

// Largest number of sequences a single codebook may hold.
inline constexpr std::uint64_t kMaxBookSequences = std::uint64_t(1) << 22;

enum class Channel { c1, c2, c3 };

struct IndexedPayload {
  std::uint64_t index;
  std::uint64_t space;
};

struct ChannelMessage {
  Channel channel;
  std::vector<IndexedPayload> payload;

  double bits() const {
    double b = 0.0;
    for (const auto& p : payload) b += std::log2(static_cast<double>(p.space));
    return b;
  }
};

struct StageFlags {
  bool tx_cover_u = false;
  bool tx_cover_v = false;
  bool tx_cover_w_or_z = false;
  bool relay_decode_u = false;
  bool relay_decode_v = false;
  bool relay_cover = false;
  bool rx_decode = false;

  bool any() const {
    return tx_cover_u || tx_cover_v || tx_cover_w_or_z || relay_decode_u || relay_decode_v ||
           relay_cover || rx_decode;
  }
};

inline std::uint64_t code_count(int n, double rate) {
  const double v = std::exp2(static_cast<double>(n) * rate);
  if (!(v >= 0.0) || v > 9.0e18) throw std::length_error("codebook count overflows");
  return static_cast<std::uint64_t>(std::ceil(v - 1e-9));
}

// Covering rates (tilde) sit delta above their mutual-information lower
// bounds; bin rates sit delta inside the packing upper bounds, clamped into
// [0, tilde] (a clamped bin rate means the full index is sent, which always
// decodes). Channel budgets are derived from the realized integer codebook
// and bin counts so that every emitted message can be checked bit-for-bit.
struct CodeRates {
  Scheme scheme = Scheme::r2;
  int n = 0;
  double rU_tilde = 0, rU = 0, rV_tilde = 0, rV = 0, rW_tilde = 0, rZ_tilde = 0, rZ = 0;
  std::uint64_t count_u = 1, bins_u = 1, count_v = 1, bins_v = 1, count_w = 1, count_z = 1,
                bins_z = 1;
  double c1_budget_bits = 0, c2_budget_bits = 0, c3_budget_bits = 0;

  double budget_bits(Channel c) const {
    switch (c) {
      case Channel::c1: return c1_budget_bits;
      case Channel::c2: return c2_budget_bits;
      case Channel::c3: return c3_budget_bits;
    }
    return 0;
  }
  // Effective channel rates (R1,R2,R3) in bits/symbol.
  std::array<double, 3> channel_rates() const {
    const double dn = static_cast<double>(n);
    return {c1_budget_bits / dn, c2_budget_bits / dn, c3_budget_bits / dn};
  }
};

inline CodeRates derive_code_rates(const JointPmf& joint6, double delta, Scheme scheme, int n) {
  if (delta <= 0.0) throw std::invalid_argument("derive_code_rates: delta must be positive");
  if (n < 1) throw std::invalid_argument("derive_code_rates: block length must be >= 1");
  if (scheme == Scheme::outer) throw std::invalid_argument("derive_code_rates: coding scheme required");
  const auto g = detail::joint6_view(joint6);
  detail::require_factorization(g, scheme);

  const double i_ux = detail::cmi(g, {g.u}, {g.x});
  const double i_vx_u = detail::cmi(g, {g.v}, {g.x}, {g.u});
  const double i_uy = detail::cmi(g, {g.u}, {g.y});
  const double i_vy_u = detail::cmi(g, {g.v}, {g.y}, {g.u});
  const double i_uvy = detail::cmi(g, {g.u, g.v}, {g.y});
  const double i_zw_u = detail::cmi(g, {g.z}, {g.w}, {g.u});
  for (double v : {i_ux, i_vx_u, i_uy, i_vy_u, i_uvy, i_zw_u})
    if (!std::isfinite(v))
      throw std::runtime_error("derive_code_rates: infeasible constraint system");

  CodeRates r;
  r.scheme = scheme;
  r.n = n;
  r.rU_tilde = i_ux + delta;
  r.rV_tilde = i_vx_u + delta;
  if (scheme == Scheme::r1) {
    r.rW_tilde = detail::cmi(g, {g.w}, {g.x}, {g.u}) + delta;
    r.rZ_tilde = detail::cmi(g, {g.z}, {g.v, g.y}, {g.u}) + delta;
  } else {
    r.rW_tilde = detail::cmi(g, {g.w}, {g.v, g.y}, {g.u}) + delta;
    r.rZ_tilde = detail::cmi(g, {g.z}, {g.x}, {g.u}) + delta;
  }

  r.rU = std::clamp(r.rU_tilde - i_uy + delta, 0.0, r.rU_tilde);
  r.rV = std::clamp(r.rV_tilde - i_vy_u + delta, 0.0, r.rV_tilde);
  // Mutual packing: the combined bin deficits must fit inside I(U,V;Y) with
  // the same margin. Shrinking deficits (raising bin rates) is always
  // possible, at worst down to unbinned transmission.
  const double allowed = std::max(i_uvy - delta, 0.0);
  double deficit = (r.rU_tilde - r.rU) + (r.rV_tilde - r.rV);
  if (deficit > allowed) {
    double excess = deficit - allowed;
    const double du = std::min(excess, r.rU_tilde - r.rU);
    r.rU += du;
    excess -= du;
    r.rV = std::min(r.rV_tilde, r.rV + excess);
  }
  r.rZ = std::clamp(r.rZ_tilde - i_zw_u + delta, 0.0, r.rZ_tilde);

  r.count_u = code_count(n, r.rU_tilde);
  r.bins_u = code_count(n, r.rU);
  r.count_v = code_count(n, r.rV_tilde);
  r.bins_v = code_count(n, r.rV);
  r.count_w = code_count(n, r.rW_tilde);
  r.count_z = code_count(n, r.rZ_tilde);
  r.bins_z = code_count(n, r.rZ);

  auto lg = [](std::uint64_t c) { return std::log2(static_cast<double>(c)); };
  r.c1_budget_bits = lg(r.bins_u) + lg(r.bins_v);
  if (scheme == Scheme::r1) {
    r.c2_budget_bits = lg(r.count_u) + lg(r.bins_z);
    r.c3_budget_bits = lg(r.count_w);
  } else {
    r.c2_budget_bits = lg(r.count_u) + lg(r.count_w);
    r.c3_budget_bits = lg(r.bins_z);
  }
  return r;
}

// One codebook: `count` sequences of length n, optionally partitioned into
// bins (i.i.d. uniform bin assignment; bins may be empty at small n).
struct SeqBook {
  int n = 0;
  std::uint64_t count = 0;
  std::vector<SymIdx> flat;
  std::vector<std::uint32_t> bin_of;
  std::vector<std::vector<std::uint32_t>> bin_members;

  const SymIdx* seq(std::uint64_t i) const { return flat.data() + i * static_cast<std::uint64_t>(n); }
};

namespace detail {
inline SeqBook draw_book(int n, std::uint64_t count, std::uint64_t bins,
                         const std::vector<std::vector<double>>& row_cdfs, const SymIdx* given,
                         std::uint64_t book_seed, std::uint64_t bins_seed) {
  if (count > kMaxBookSequences)
    throw std::length_error("codebook exceeds the per-book memory budget");
  SeqBook book;
  book.n = n;
  book.count = count;
  book.flat.resize(count * static_cast<std::uint64_t>(n));
  Rng rng(book_seed);
  for (std::uint64_t i = 0; i < count; ++i)
    for (int j = 0; j < n; ++j) {
      const auto& cdf = row_cdfs[given ? given[j] : 0];
      book.flat[i * n + j] = rng.sample_cdf(cdf);
    }
  if (bins > 0) {
    book.bin_of.resize(count);
    book.bin_members.resize(bins);
    Rng brng(bins_seed);
    for (std::uint64_t i = 0; i < count; ++i) {
      const auto b = static_cast<std::uint32_t>(brng.below(bins));
      book.bin_of[i] = b;
      book.bin_members[b].push_back(static_cast<std::uint32_t>(i));
    }
  }
  return book;
}
}  // namespace detail

// The U-book with bins plus per-U conditional V/W/Z books. Sub-books are
// materialized on first access from seeds derived per (book, m_u), so the
// suite behaves as if fully generated up front while only paying for the
// indices a trial actually touches. Logically immutable; safe to share
// across threads.
class CodebookSuite {
 public:
  CodebookSuite(const CodeRates& rates, const JointPmf& joint6, std::uint64_t seed)
      : rates_(rates), seed_(seed) {
    const auto g = detail::joint6_view(joint6);
    const std::vector<std::size_t> uk{g.u};
    const JointPmf pu = marginalize(joint6, uk);
    u_cdf_.push_back(cumulative(pu.mass()));
    v_rows_ = row_cdfs(joint6, g.v, g.u);
    w_rows_ = row_cdfs(joint6, g.w, g.u);
    z_rows_ = row_cdfs(joint6, g.z, g.u);
    for (std::uint64_t c : {rates.count_u, rates.count_v, rates.count_w, rates.count_z})
      if (c > kMaxBookSequences)
        throw std::length_error("codebook exceeds the per-book memory budget");
    u_book_ = detail::draw_book(rates_.n, rates_.count_u, rates_.bins_u, u_cdf_, nullptr,
                                derive_seed(seed_, "u_book"), derive_seed(seed_, "u_bins"));
  }

  const CodeRates& rates() const { return rates_; }
  const SeqBook& u_book() const { return u_book_; }

  const SeqBook& v_book(std::uint64_t m_u) const {
    return cached(v_cache_, m_u, [&] {
      return detail::draw_book(rates_.n, rates_.count_v, rates_.bins_v, v_rows_,
                               u_book_.seq(m_u), derive_seed(seed_, "v_book", m_u),
                               derive_seed(seed_, "v_bins", m_u));
    });
  }
  const SeqBook& w_book(std::uint64_t m_u) const {
    return cached(w_cache_, m_u, [&] {
      return detail::draw_book(rates_.n, rates_.count_w, 0, w_rows_, u_book_.seq(m_u),
                               derive_seed(seed_, "w_book", m_u), 0);
    });
  }
  const SeqBook& z_book(std::uint64_t m_u) const {
    return cached(z_cache_, m_u, [&] {
      return detail::draw_book(rates_.n, rates_.count_z, rates_.bins_z, z_rows_,
                               u_book_.seq(m_u), derive_seed(seed_, "z_book", m_u),
                               derive_seed(seed_, "z_bins", m_u));
    });
  }

 private:
  static std::vector<std::vector<double>> row_cdfs(const JointPmf& joint6, std::size_t out,
                                                   std::size_t given) {
    const std::vector<std::size_t> g{given};
    const Kernel k = conditional(joint6, out, g);
    std::vector<std::vector<double>> rows;
    rows.reserve(k.input_cells());
    for (std::size_t r = 0; r < k.input_cells(); ++r) {
      const auto row = k.row(r);
      rows.push_back(cumulative(row));
    }
    return rows;
  }

  template <class Make>
  const SeqBook& cached(std::unordered_map<std::uint64_t, SeqBook>& cache, std::uint64_t key,
                        Make make) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, make()).first;
    return it->second;
  }

  CodeRates rates_;
  std::uint64_t seed_;
  std::vector<std::vector<double>> u_cdf_, v_rows_, w_rows_, z_rows_;
  SeqBook u_book_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<std::uint64_t, SeqBook> v_cache_, w_cache_, z_cache_;
};

// TV test of a tuple of sequences against a reference marginal of the design
// joint. The reference subset is fixed at construction; tests are O(n + cells).
class TypicalityTester {
 public:
  TypicalityTester(const JointPmf& joint, std::vector<std::size_t> vars) {
    const JointPmf marg = marginalize(joint, vars);
    ref_.assign(marg.mass().begin(), marg.mass().end());
    sizes_.reserve(vars.size());
    for (const auto& a : marg.variables()) sizes_.push_back(a.size());
  }

  double tv(std::span<const SymIdx* const> seqs, int n) const {
    thread_local std::vector<std::uint32_t> counts;
    counts.assign(ref_.size(), 0);
    for (int i = 0; i < n; ++i) {
      std::size_t cell = 0;
      for (std::size_t v = 0; v < seqs.size(); ++v) cell = cell * sizes_[v] + seqs[v][i];
      ++counts[cell];
    }
    double tv = 0.0;
    const double inv = 1.0 / static_cast<double>(n);
    for (std::size_t c = 0; c < ref_.size(); ++c)
      tv += std::abs(static_cast<double>(counts[c]) * inv - ref_[c]);
    return tv;
  }
  bool typical(std::span<const SymIdx* const> seqs, int n, double eps) const {
    return tv(seqs, n) <= eps;
  }

 private:
  std::vector<double> ref_;
  std::vector<std::size_t> sizes_;
};

// Lemma-style typical-set membership: TV between the block's empirical
// distribution and the reference is at most epsilon.
inline bool is_typical(std::span<const std::vector<SymIdx>> sequences, const JointPmf& reference,
                       double epsilon) {
  return total_variation(empirical_distribution(reference.variables(), sequences), reference) <=
         epsilon;
}

struct TxOutput {
  ChannelMessage c1, c3;
  std::uint64_t m_u = 0, m_v = 0, m_wz = 0;
  bool fail_u = false, fail_v = false, fail_wz = false;
};

struct RelayOutput {
  ChannelMessage c2;
  std::uint64_t u_hat = 0, v_hat = 0, m_cover = 0;
  bool fail_decode_u = false, fail_decode_v = false, fail_cover = false;
};

struct RxOutput {
  std::vector<SymIdx> z_seq;
  std::uint64_t z_hat = 0;
  bool fail_decode = false;
};

struct TrialResult {
  double tv_to_target = 0.0;
  StageFlags flags;
  JointPmf achieved_empirical;
  std::uint64_t seed = 0;
  bool u_hat_matches_tx = false;  // ground-truth diagnostics, not part of the protocol
  bool v_hat_matches_tx = false;
};

// Full pipeline for one (joint6, target, scheme, n, delta, epsilon)
// configuration. Construction derives the code rates and precomputes all
// typicality references; trials are then pure functions of their seed.
class CoordinationSim {
 public:
  CoordinationSim(const JointPmf& joint6, JointPmf target, Scheme scheme, int n, double delta,
                  double epsilon)
      : joint6_(canonical6(joint6)),
        target_(std::move(target)),
        scheme_(scheme),
        n_(n),
        epsilon_(epsilon),
        rates_(derive_code_rates(joint6_, delta, scheme, n)) {
    if (epsilon_ <= 0.0) throw std::invalid_argument("epsilon must be positive");
    if (target_.variables().size() != 3)
      throw std::invalid_argument("target must cover exactly (X,Y,Z)");
    const auto xyz = var_indices(joint6_, {"X", "Y", "Z"});
    const JointPmf marg = marginalize(joint6_, xyz);
    if (!marg.same_space(target_))
      throw std::invalid_argument("target alphabets do not match the joint");
    for (std::size_t c = 0; c < marg.size(); ++c)
      if (std::abs(marg.mass(c) - target_.mass(c)) > 1e-9)
        throw std::invalid_argument("joint (X,Y,Z) marginal does not equal the target");

    const JointPmf xy = marginalize(joint6_, std::vector<std::size_t>{0, 1});
    source_cdf_ = cumulative(xy.mass());
    x_size_ = joint6_.variables()[0].size();
    y_size_ = joint6_.variables()[1].size();

    tx_u_ = make_tester({0, 2});             // (X,U)
    tx_v_ = make_tester({0, 2, 3});          // (X,U,V)
    tx_wz_ = scheme == Scheme::r1 ? make_tester({0, 2, 4})   // (X,U,W)
                                  : make_tester({0, 2, 5});  // (X,U,Z)
    relay_u_ = make_tester({1, 2});          // (Y,U)
    relay_v_ = make_tester({1, 2, 3});       // (Y,U,V)
    relay_cover_ = scheme == Scheme::r1 ? make_tester({1, 2, 3, 5})   // (Y,U,V,Z)
                                        : make_tester({1, 2, 3, 4});  // (Y,U,V,W)
    rx_ = make_tester({2, 4, 5});            // (U,W,Z)
  }

  const CodeRates& rates() const { return rates_; }
  const JointPmf& joint6() const { return joint6_; }
  const JointPmf& target() const { return target_; }
  int block_length() const { return n_; }
  double epsilon() const { return epsilon_; }

  CodebookSuite make_suite(std::uint64_t trial_seed) const {
    return CodebookSuite(rates_, joint6_, derive_seed(trial_seed, "codebooks"));
  }

  std::pair<std::vector<SymIdx>, std::vector<SymIdx>> draw_source(std::uint64_t trial_seed) const {
    Rng rng(derive_seed(trial_seed, "source"));
    std::vector<SymIdx> x(n_), y(n_);
    for (int i = 0; i < n_; ++i) {
      const SymIdx cell = rng.sample_cdf(source_cdf_);
      x[i] = cell / static_cast<SymIdx>(y_size_);
      y[i] = cell % static_cast<SymIdx>(y_size_);
    }
    return {std::move(x), std::move(y)};
  }

  TxOutput tx_encode(std::span<const SymIdx> x, const CodebookSuite& suite) const {
    if (x.size() != static_cast<std::size_t>(n_))
      throw std::invalid_argument("tx_encode: wrong block length");
    TxOutput out;
    const SeqBook& ub = suite.u_book();
    out.m_u = cover_scan(tx_u_, {x.data()}, ub, out.fail_u);
    const SymIdx* useq = ub.seq(out.m_u);

    const SeqBook& vb = suite.v_book(out.m_u);
    out.m_v = cover_scan(tx_v_, {x.data(), useq}, vb, out.fail_v);

    const SeqBook& cb = scheme_ == Scheme::r1 ? suite.w_book(out.m_u) : suite.z_book(out.m_u);
    out.m_wz = cover_scan(tx_wz_, {x.data(), useq}, cb, out.fail_wz);

    const CodeRates& sr = suite.rates();
    out.c1 = ChannelMessage{Channel::c1,
                            {{ub.bin_of[out.m_u], sr.bins_u},
                             {vb.bin_of[out.m_v], sr.bins_v}}};
    if (scheme_ == Scheme::r1)
      out.c3 = ChannelMessage{Channel::c3, {{out.m_wz, sr.count_w}}};
    else
      out.c3 = ChannelMessage{Channel::c3, {{cb.bin_of[out.m_wz], sr.bins_z}}};
    return out;
  }

  // With `genie` set the relay is handed the transmitter's true (m_u, m_v)
  // instead of searching the received bins.
  RelayOutput relay_process(std::span<const SymIdx> y, const ChannelMessage& c1,
                            const CodebookSuite& suite,
                            const std::pair<std::uint64_t, std::uint64_t>* genie = nullptr) const {
    if (y.size() != static_cast<std::size_t>(n_))
      throw std::invalid_argument("relay_process: wrong block length");
    if (c1.payload.size() != 2) throw std::invalid_argument("relay_process: malformed C1 payload");
    RelayOutput out;
    const SeqBook& ub = suite.u_book();
    if (genie) {
      out.u_hat = genie->first;
      out.v_hat = genie->second;
    } else {
      out.u_hat = decode_scan(relay_u_, {y.data()}, ub,
                              static_cast<std::uint32_t>(c1.payload[0].index), out.fail_decode_u);
    }
    const SymIdx* useq = ub.seq(out.u_hat);
    const SeqBook& vb = suite.v_book(out.u_hat);
    if (!genie)
      out.v_hat = decode_scan(relay_v_, {y.data(), useq}, vb,
                              static_cast<std::uint32_t>(c1.payload[1].index), out.fail_decode_v);
    const SymIdx* vseq = vb.seq(out.v_hat);

    const SeqBook& cb = scheme_ == Scheme::r1 ? suite.z_book(out.u_hat) : suite.w_book(out.u_hat);
    out.m_cover = cover_scan(relay_cover_, {y.data(), useq, vseq}, cb, out.fail_cover);

    const CodeRates& sr = suite.rates();
    if (scheme_ == Scheme::r1)
      out.c2 = ChannelMessage{Channel::c2,
                              {{out.u_hat, sr.count_u},
                               {cb.bin_of[out.m_cover], sr.bins_z}}};
    else
      out.c2 = ChannelMessage{Channel::c2,
                              {{out.u_hat, sr.count_u}, {out.m_cover, sr.count_w}}};
    return out;
  }

  RxOutput rx_decode(const ChannelMessage& c2, const ChannelMessage& c3,
                     const CodebookSuite& suite) const {
    if (c2.payload.size() != 2 || c3.payload.size() != 1)
      throw std::invalid_argument("rx_decode: malformed payloads");
    const std::uint64_t u_hat = c2.payload[0].index;
    const std::uint64_t m_w = scheme_ == Scheme::r1 ? c3.payload[0].index : c2.payload[1].index;
    const std::uint32_t b_z = static_cast<std::uint32_t>(
        scheme_ == Scheme::r1 ? c2.payload[1].index : c3.payload[0].index);

    const SymIdx* useq = suite.u_book().seq(u_hat);
    const SymIdx* wseq = suite.w_book(u_hat).seq(m_w);
    const SeqBook& zb = suite.z_book(u_hat);
    RxOutput out;
    out.z_hat = decode_scan(rx_, {useq, wseq}, zb, b_z, out.fail_decode);
    const SymIdx* zseq = zb.seq(out.z_hat);
    out.z_seq.assign(zseq, zseq + n_);
    return out;
  }

  TrialResult run_trial(std::uint64_t seed) const {
    auto [x, y] = draw_source(seed);
    const CodebookSuite suite = make_suite(seed);

    const TxOutput tx = tx_encode(x, suite);
    enforce_budget(tx.c1);
    enforce_budget(tx.c3);
    const RelayOutput relay = relay_process(y, tx.c1, suite);
    enforce_budget(relay.c2);
    const RxOutput rx = rx_decode(relay.c2, tx.c3, suite);

    EmpiricalCounter counter(target_.variables());
    std::array<SymIdx, 3> tuple{};
    for (int i = 0; i < n_; ++i) {
      tuple = {x[i], y[i], rx.z_seq[i]};
      counter.add(tuple);
    }
    TrialResult result{0.0, {}, counter.normalize(), seed, false, false};
    result.tv_to_target = total_variation(result.achieved_empirical, target_);
    result.flags.tx_cover_u = tx.fail_u;
    result.flags.tx_cover_v = tx.fail_v;
    result.flags.tx_cover_w_or_z = tx.fail_wz;
    result.flags.relay_decode_u = relay.fail_decode_u;
    result.flags.relay_decode_v = relay.fail_decode_v;
    result.flags.relay_cover = relay.fail_cover;
    result.flags.rx_decode = rx.fail_decode;
    result.u_hat_matches_tx = relay.u_hat == tx.m_u;
    result.v_hat_matches_tx = relay.v_hat == tx.m_v;
    return result;
  }

 private:
  static JointPmf canonical6(const JointPmf& joint6) {
    const auto idx = var_indices(joint6, {"X", "Y", "U", "V", "W", "Z"});
    return marginalize(joint6, idx);
  }

  TypicalityTester make_tester(std::vector<std::size_t> vars) const {
    return TypicalityTester(joint6_, std::move(vars));
  }

  // First index whose sequence is typical together with the fixed prefix
  // sequences; ties break to the lowest index. Failure emits index 0.
  std::uint64_t cover_scan(const TypicalityTester& tester,
                           std::initializer_list<const SymIdx*> prefix, const SeqBook& book,
                           bool& fail) const {
    std::vector<const SymIdx*> seqs(prefix.begin(), prefix.end());
    seqs.push_back(nullptr);
    for (std::uint64_t i = 0; i < book.count; ++i) {
      seqs.back() = book.seq(i);
      if (tester.typical(seqs, n_, epsilon_)) return i;
    }
    fail = true;
    return 0;
  }

  // Unique typical candidate within a bin; several candidates count as a
  // decode ambiguity and resolve to the lowest index. Failure emits index 0.
  std::uint64_t decode_scan(const TypicalityTester& tester,
                            std::initializer_list<const SymIdx*> prefix, const SeqBook& book,
                            std::uint32_t bin, bool& fail) const {
    std::vector<const SymIdx*> seqs(prefix.begin(), prefix.end());
    seqs.push_back(nullptr);
    std::uint64_t found = 0;
    std::size_t matches = 0;
    for (const std::uint32_t i : book.bin_members.at(bin)) {
      seqs.back() = book.seq(i);
      if (tester.typical(seqs, n_, epsilon_)) {
        if (matches++ == 0) found = i;
      }
    }
    fail = matches != 1;
    return found;
  }

  void enforce_budget(const ChannelMessage& msg) const {
    for (const auto& p : msg.payload)
      if (p.index >= p.space) throw std::logic_error("channel payload index exceeds its space");
    const double budget = rates_.budget_bits(msg.channel) + 1e-9;
    if (msg.bits() > budget)
      throw std::logic_error("channel rate budget violated: " + std::to_string(msg.bits()) +
                             " bits > " + std::to_string(budget));
  }

  JointPmf joint6_;
  JointPmf target_;
  Scheme scheme_;
  int n_;
  double epsilon_;
  CodeRates rates_;
  std::vector<double> source_cdf_;
  std::size_t x_size_ = 0, y_size_ = 0;
  TypicalityTester tx_u_{joint6_, {0}}, tx_v_{joint6_, {0}}, tx_wz_{joint6_, {0}},
      relay_u_{joint6_, {0}}, relay_v_{joint6_, {0}}, relay_cover_{joint6_, {0}},
      rx_{joint6_, {0}};
};

struct MonteCarloSummary {
  std::size_t trials = 0;
  double mean_tv = 0.0, q10 = 0.0, q90 = 0.0;
  // Order: tx_cover_u, tx_cover_v, tx_cover_w_or_z, relay_decode_u,
  // relay_decode_v, relay_cover, rx_decode.
  std::array<double, 7> failure_rates{};
  std::vector<TrialResult> results;
};

inline double interpolated_quantile(std::vector<double> sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(h);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

// Aggregates run_trial over seeds base_seed .. base_seed+trials-1.
inline MonteCarloSummary monte_carlo(const CoordinationSim& sim, std::size_t trials,
                                     std::uint64_t base_seed, unsigned threads = 1) {
  if (trials < 1) throw std::invalid_argument("monte_carlo: at least one trial required");
  MonteCarloSummary summary;
  summary.trials = trials;
  summary.results.resize(trials, TrialResult{0.0, {}, sim.target(), 0, false, false});
  parallel_for(trials, threads,
               [&](std::size_t i) { summary.results[i] = sim.run_trial(base_seed + i); });

  std::vector<double> tvs(trials);
  std::array<std::size_t, 7> fails{};
  for (std::size_t i = 0; i < trials; ++i) {
    const auto& r = summary.results[i];
    tvs[i] = r.tv_to_target;
    summary.mean_tv += r.tv_to_target;
    const std::array<bool, 7> f{r.flags.tx_cover_u,     r.flags.tx_cover_v,
                                r.flags.tx_cover_w_or_z, r.flags.relay_decode_u,
                                r.flags.relay_decode_v,  r.flags.relay_cover,
                                r.flags.rx_decode};
    for (std::size_t k = 0; k < 7; ++k) fails[k] += f[k] ? 1 : 0;
  }
  summary.mean_tv /= static_cast<double>(trials);
  std::sort(tvs.begin(), tvs.end());
  summary.q10 = interpolated_quantile(tvs, 0.10);
  summary.q90 = interpolated_quantile(tvs, 0.90);
  for (std::size_t k = 0; k < 7; ++k)
    summary.failure_rates[k] = static_cast<double>(fails[k]) / static_cast<double>(trials);
  return summary;
}

}  // namespace coordcap
