#pragma once

#include <bit>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "blcs/bit_string.hpp"
#include "blcs/error.hpp"
#include "blcs/lcs.hpp"
#include "blcs/params.hpp"

// Oscillation-type classification of length-w blocks (the P properties), the
// hereditary Q properties over substrings of y, and the advantage witness
// that links them.

namespace blcs {

/// Classification label: coarse(ell, bit), fine(ell) or unclassified.
struct PType {
  enum class Kind : std::uint8_t { coarse, fine, unclassified };

  Kind kind = Kind::unclassified;
  std::size_t ell = 0;
  bool bit = false;

  static PType coarse(std::size_t ell, bool bit) { return {Kind::coarse, ell, bit}; }
  static PType fine(std::size_t ell) { return {Kind::fine, ell, false}; }
  static PType unclassified() { return {}; }

  bool is_coarse() const noexcept { return kind == Kind::coarse; }
  bool is_fine() const noexcept { return kind == Kind::fine; }
  bool classified() const noexcept { return kind != Kind::unclassified; }

  std::string_view kind_name() const noexcept {
    switch (kind) {
      case Kind::coarse: return "coarse";
      case Kind::fine: return "fine";
      default: return "unclassified";
    }
  }

  friend bool operator==(const PType&, const PType&) = default;
};

/// Integer thresholds derived once per (params, w). Every comparison against a
/// non-integer quantity such as eps*w goes through exact rational rounding.
struct StructureThresholds {
  std::size_t w = 0;
  std::size_t coarse_min_ell = 1;  // smallest power of two >= eps^2 w
  std::size_t fine_max_ell = 0;    // largest power of two < eps^2 w (0 if none)
  std::size_t min_flags = 0;       // ceil(eps w)
  std::size_t window = 0;          // ceil(4 eps^2 w), capped at w
  std::size_t window_flags = 0;    // ceil(2 eps^3 w)
  std::size_t extension = 0;       // ceil(11 eps^2 w)
  Rational eps;
  Rational eps2;

  StructureThresholds() = default;

  StructureThresholds(const Params& params, std::size_t block_width) : w(block_width), eps(params.eps) {
    if (w == 0 || !std::has_single_bit(w)) throw ContractError("block width must be a power of two");
    eps2 = eps * eps;
    const auto wi = static_cast<std::int64_t>(w);
    while (coarse_min_ell < w && Rational(static_cast<long long>(coarse_min_ell)) < eps2 * wi) coarse_min_ell *= 2;
    for (std::size_t ell = 1; Rational(static_cast<long long>(ell)) < eps2 * wi; ell *= 2) fine_max_ell = ell;
    min_flags = static_cast<std::size_t>(rational::ceil_mul(eps, wi));
    window = std::min<std::size_t>(w, static_cast<std::size_t>(rational::ceil_mul(eps2 * 4, wi)));
    window_flags = static_cast<std::size_t>(rational::ceil_mul(eps2 * eps * 2, wi));
    extension = static_cast<std::size_t>(rational::ceil_mul(eps2 * 11, wi));
    for (std::size_t ell = 1; ell <= w; ell *= 2) {
      per_ell_.push_back({exact_low_max(ell), exact_high_min(ell), exact_coarse_need(ell), exact_fine_p_reps(ell),
                          exact_fine_q_reps(ell)});
    }
  }

  /// Largest one-count that is still imbalanced toward zeros: c < (1/2 - eps^2) ell.
  std::int64_t low_max(std::size_t ell) const {
    const auto* e = lookup(ell);
    return e ? e->low_max : exact_low_max(ell);
  }
  /// Smallest one-count imbalanced toward ones: c > (1/2 + eps^2) ell.
  std::int64_t high_min(std::size_t ell) const {
    const auto* e = lookup(ell);
    return e ? e->high_min : exact_high_min(ell);
  }
  /// ceil((1 + eps^2) ell / 2): the b-count a coarse Q property demands.
  std::size_t coarse_need(std::size_t ell) const {
    const auto* e = lookup(ell);
    return e ? e->coarse_need : exact_coarse_need(ell);
  }
  /// ceil(eps w / ell): repetitions of 0^ell 1^ell a fine x must contain.
  std::size_t fine_p_reps(std::size_t ell) const {
    const auto* e = lookup(ell);
    return e ? e->fine_p_reps : exact_fine_p_reps(ell);
  }
  /// floor(eps w / (5 ell)): repetitions in the Q-string y_ell.
  std::size_t fine_q_reps(std::size_t ell) const {
    const auto* e = lookup(ell);
    return e ? e->fine_q_reps : exact_fine_q_reps(ell);
  }

 private:
  struct PerEll {
    std::int64_t low_max, high_min;
    std::size_t coarse_need, fine_p_reps, fine_q_reps;
  };
  std::vector<PerEll> per_ell_;  // indexed by log2(ell), ell <= w

  const PerEll* lookup(std::size_t ell) const {
    if (ell == 0 || !std::has_single_bit(ell)) return nullptr;
    const auto k = static_cast<std::size_t>(std::countr_zero(ell));
    return k < per_ell_.size() ? &per_ell_[k] : nullptr;
  }

  std::int64_t exact_low_max(std::size_t ell) const {
    return rational::ceil_mul(Rational(1, 2) - eps2, static_cast<std::int64_t>(ell)) - 1;
  }
  std::int64_t exact_high_min(std::size_t ell) const {
    return rational::floor_mul(Rational(1, 2) + eps2, static_cast<std::int64_t>(ell)) + 1;
  }
  std::size_t exact_coarse_need(std::size_t ell) const {
    return static_cast<std::size_t>(rational::ceil_mul((1 + eps2) / 2, static_cast<std::int64_t>(ell)));
  }
  std::size_t exact_fine_p_reps(std::size_t ell) const {
    return static_cast<std::size_t>(rational::ceil_mul(eps / static_cast<long long>(ell), static_cast<std::int64_t>(w)));
  }
  std::size_t exact_fine_q_reps(std::size_t ell) const {
    return static_cast<std::size_t>(
        rational::floor_mul(eps / (5 * static_cast<long long>(ell)), static_cast<std::int64_t>(w)));
  }
};

/// Thresholds for (params.eps, w), memoized per thread; they depend on nothing else.
inline const StructureThresholds& thresholds_for(const Params& params, std::size_t w) {
  // A deque keeps earlier references valid; distinct (eps, w) pairs are few.
  thread_local std::deque<StructureThresholds> cache;
  for (const auto& th : cache) {
    if (th.w == w && rational::same(th.eps, params.eps)) return th;
  }
  return cache.emplace_back(params, w);
}

/// (0^ell 1^ell)^reps
inline BitString periodic_string(std::size_t ell, std::size_t reps) {
  std::vector<std::uint8_t> bits;
  bits.reserve(2 * ell * reps);
  for (std::size_t r = 0; r < reps; ++r) {
    bits.insert(bits.end(), ell, 0);
    bits.insert(bits.end(), ell, 1);
  }
  return BitString::from_bits(bits);
}

/// y_ell for the block width in params.
inline BitString q_string(std::size_t ell, const Params& params) {
  return periodic_string(ell, thresholds_for(params, params.w).fine_q_reps(ell));
}

// ---------------------------------------------------------------------------
// Flags

/// True iff ones #i and #(i+ell) exist (1-based) and strictly more than
/// 10(ell-1) zeros lie between them.
inline bool is_ell_flag(const BitString& x, std::size_t i, std::size_t ell) {
  if (i == 0 || ell == 0) return false;
  if (i + ell > x.ones()) return false;
  const std::size_t p = x.one_position(i - 1);
  const std::size_t q = x.one_position(i + ell - 1);
  return q - p - ell > 10 * (ell - 1);
}

/// True iff i is a t-flag for some power of two t with ell <= t <= w.
inline bool is_ell_plus_flag(const BitString& x, std::size_t i, std::size_t ell, std::size_t w) {
  std::size_t t = std::bit_ceil(std::max<std::size_t>(ell, 1));
  for (; t <= w; t *= 2) {
    if (is_ell_flag(x, i, t)) return true;
  }
  return false;
}

/// Bit k of masks[i-1] is set iff one #i is a 2^k-flag (2^k <= max_t).
inline std::vector<std::uint64_t> flag_masks(const BitString& x, std::size_t max_t) {
  const std::size_t ones = x.ones();
  std::vector<std::uint64_t> masks(ones, 0);
  for (std::size_t i = 1; i <= ones; ++i) {
    std::uint64_t m = 0;
    for (unsigned k = 0; (std::size_t{1} << k) <= max_t && i + (std::size_t{1} << k) <= ones; ++k) {
      if (is_ell_flag(x, i, std::size_t{1} << k)) m |= std::uint64_t{1} << k;
    }
    masks[i - 1] = m;
  }
  return masks;
}

/// Mask selecting the flag scales t >= ell.
inline std::uint64_t plus_mask(std::size_t ell) {
  const unsigned k = static_cast<unsigned>(std::countr_zero(std::bit_ceil(std::max<std::size_t>(ell, 1))));
  return k >= 64 ? 0 : ~((std::uint64_t{1} << k) - 1);
}

// ---------------------------------------------------------------------------
// P properties

namespace detail {

// Leftmost start of a length-ell window imbalanced toward `bit`, if any.
inline std::optional<index_t> imbalanced_window(const BitString& x, std::size_t ell, bool bit,
                                                const StructureThresholds& th) {
  if (ell > x.size() || ell == 0) return std::nullopt;
  const std::int64_t lo_max = th.low_max(ell);
  const std::int64_t hi_min = th.high_min(ell);
  auto prefix = x.prefix_ones();
  for (std::size_t s = 0; s + ell <= x.size(); ++s) {
    const auto c = static_cast<std::int64_t>(prefix[s + ell] - prefix[s]);
    if (bit ? c >= hi_min : c <= lo_max) return static_cast<index_t>(s);
  }
  return std::nullopt;
}

// Does (0^ell 1^ell)^reps embed in x?
inline bool contains_periodic(const BitString& x, std::size_t ell, std::size_t reps) {
  const std::size_t need = 2 * reps;  // runs
  std::size_t run = 0;
  std::size_t got = 0;
  for (std::size_t i = 0; i < x.size() && run < need; ++i) {
    const bool want = run % 2 == 1;
    if (x[i] == want && ++got == ell) {
      ++run;
      got = 0;
    }
  }
  return run >= need || ell == 0;
}

inline std::size_t count_plus_flags(const std::vector<std::uint64_t>& masks, std::size_t ell) {
  const std::uint64_t sel = plus_mask(ell);
  std::size_t n = 0;
  for (auto m : masks) n += (m & sel) != 0;
  return n;
}

}  // namespace detail

/// True iff x is ell-coarse with an interval imbalanced toward `bit`.
inline bool is_coarse(const BitString& x, std::size_t ell, bool bit, const StructureThresholds& th) {
  if (ell < th.coarse_min_ell || ell > th.w) return false;
  return detail::imbalanced_window(x, ell, bit, th).has_value();
}

inline bool is_any_coarse(const BitString& x, const StructureThresholds& th) {
  for (std::size_t ell = th.w; ell >= th.coarse_min_ell && ell > 0; ell /= 2) {
    if (is_coarse(x, ell, false, th) || is_coarse(x, ell, true, th)) return true;
  }
  return false;
}

/// Definition of ell-fine; `masks` are flag_masks(x, w).
inline bool is_fine(const BitString& x, std::size_t ell, const StructureThresholds& th,
                    const std::vector<std::uint64_t>& masks, bool known_not_coarse = false) {
  if (ell == 0 || ell > th.fine_max_ell) return false;
  if (!known_not_coarse && is_any_coarse(x, th)) return false;
  if (detail::count_plus_flags(masks, ell) < th.min_flags) return false;
  return detail::contains_periodic(x, ell, th.fine_p_reps(ell));
}

/// Does x (of length params.w) have property P_t?
inline bool has_p_property(const BitString& x, const PType& t, const Params& params) {
  if (x.size() != params.w) throw ContractError("has_p_property: |x| must equal w");
  const StructureThresholds& th = thresholds_for(params, params.w);
  switch (t.kind) {
    case PType::Kind::coarse: return is_coarse(x, t.ell, t.bit, th);
    case PType::Kind::fine: return is_fine(x, t.ell, th, flag_masks(x, th.w));
    default: return false;
  }
}

/// First satisfied property in the canonical scan order: coarse with ell
/// descending (bit 0 before bit 1), then fine with ell ascending.
inline PType get_p_type(const BitString& x, const Params& params) {
  if (x.size() != params.w || params.w == 0) {
    throw ContractError("get_p_type: |x| = " + std::to_string(x.size()) + " but w = " + std::to_string(params.w));
  }
  const StructureThresholds& th = thresholds_for(params, params.w);
  for (std::size_t ell = th.w; ell >= th.coarse_min_ell && ell > 0; ell /= 2) {
    if (is_coarse(x, ell, false, th)) return PType::coarse(ell, false);
    if (is_coarse(x, ell, true, th)) return PType::coarse(ell, true);
  }
  if (th.fine_max_ell == 0) return PType::unclassified();
  const auto masks = flag_masks(x, th.w);
  for (std::size_t ell = 1; ell <= th.fine_max_ell; ell *= 2) {
    if (is_fine(x, ell, th, masks, /*known_not_coarse=*/true)) return PType::fine(ell);
  }
  return PType::unclassified();
}

// ---------------------------------------------------------------------------
// Q properties

/// Preprocessed y answering nxt_{b,ell}(j): the smallest j' such that y_[j,j']
/// holds at least ell b-bits. O(|y|) memory, O(1) per query via select.
class QTable {
 public:
  explicit QTable(const BitString& y) : y_(&y) {
    zeros_positions_.reserve(y.zeros());
    for (index_t i = 0; i < y.size(); ++i) {
      if (!y[i]) zeros_positions_.push_back(i);
    }
  }

  const BitString& source() const noexcept { return *y_; }

  std::optional<index_t> nxt(bool bit, std::size_t ell, index_t j) const {
    if (ell == 0) return j;
    const std::size_t before = bit ? y_->rank1(j) : y_->rank0(j);
    const std::size_t k = before + ell;
    const std::size_t total = bit ? y_->ones() : zeros_positions_.size();
    if (k > total) return std::nullopt;
    const index_t pos = bit ? y_->one_position(k - 1) : zeros_positions_[k - 1];
    return pos + 1;
  }

 private:
  const BitString* y_;
  std::vector<index_t> zeros_positions_;
};

inline QTable build_q_table(const BitString& y) { return QTable(y); }

/// Q_t on y_J. Coarse: at least ceil((1+eps^2) ell/2) b-bits. Fine: y_ell
/// embeds, checked by chaining nxt_0 / nxt_1 from imin J.
inline bool is_q(const QTable& q, Interval in_y, const PType& t, const StructureThresholds& th) {
  q.source().check(in_y);
  switch (t.kind) {
    case PType::Kind::coarse: return q.source().count(t.bit, in_y) >= th.coarse_need(t.ell);
    case PType::Kind::fine: {
      const std::size_t reps = th.fine_q_reps(t.ell);
      index_t pos = in_y.lo;
      for (std::size_t r = 0; r < reps; ++r) {
        auto a = q.nxt(false, t.ell, pos);
        if (!a || *a > in_y.hi) return false;
        auto b = q.nxt(true, t.ell, *a);
        if (!b || *b > in_y.hi) return false;
        pos = *b;
      }
      return pos <= in_y.hi;
    }
    default: throw ContractError("is_q: unclassified type has no Q property");
  }
}

inline bool is_q(const QTable& q, Interval in_y, const PType& t, const Params& params) {
  return is_q(q, in_y, t, thresholds_for(params, params.w));
}

// ---------------------------------------------------------------------------
// Advantage witness

struct AdvantageWitness {
  // Interval and common subsequence exactly as constructed (before alignment).
  Interval raw_interval;
  BitString raw_subsequence;
  // round_{gamma w}(raw_interval) and the part of the witness certified on
  // it: restricted to the rounded interval and, for fine types, cut to the
  // longest prefix that embeds in y_ell.
  Interval interval;
  BitString subsequence;
  // floor(|interval|/2 + (delta_code/2) w)
  std::int64_t kappa = 0;
};

namespace detail {

struct RawWitness {
  Interval interval;
  std::vector<std::uint8_t> bits;
  std::vector<index_t> positions;  // absolute position in x matched to each bit
};

inline RawWitness coarse_witness(const BitString& x, const PType& t, const StructureThresholds& th) {
  auto start = imbalanced_window(x, t.ell, t.bit, th);
  if (!start) throw ContractError("get_interval: x does not have the requested coarse property");
  RawWitness rw;
  rw.interval = {*start, static_cast<index_t>(*start + t.ell)};
  const std::size_t k = th.coarse_need(t.ell);
  for (index_t i = rw.interval.lo; i < rw.interval.hi && rw.bits.size() < k; ++i) {
    if (x[i] == t.bit) {
      rw.bits.push_back(t.bit ? 1 : 0);
      rw.positions.push_back(i);
    }
  }
  return rw;
}

inline RawWitness fine_witness(const BitString& x, const PType& t, const StructureThresholds& th) {
  const std::size_t w = x.size();
  const auto masks = flag_masks(x, w);
  const std::uint64_t sel = plus_mask(t.ell);

  // Per-position flag indicator prefix sums.
  std::vector<std::uint32_t> flag_prefix(w + 1, 0);
  {
    std::vector<std::uint8_t> flag_at(w, 0);
    for (std::size_t i = 0; i < masks.size(); ++i) {
      if (masks[i] & sel) flag_at[x.one_position(i)] = 1;
    }
    for (std::size_t p = 0; p < w; ++p) flag_prefix[p + 1] = flag_prefix[p] + flag_at[p];
  }

  const std::size_t len = th.window;
  std::optional<std::size_t> start;
  for (std::size_t a = 0; a + len <= w; ++a) {
    if (flag_prefix[a + len] - flag_prefix[a] >= th.window_flags) {
      start = a;
      break;
    }
  }
  if (!start) throw ContractError("get_interval: no flag-dense window; x is not fine at this scale");

  RawWitness rw;
  rw.interval = {static_cast<index_t>(*start), static_cast<index_t>(std::min(w, *start + len + th.extension))};
  const BitString sub = x.substr(rw.interval);
  const std::size_t ones = sub.ones();
  const auto sub_masks = flag_masks(sub, sub.size());
  const index_t base = rw.interval.lo;

  std::size_t i = 1;
  while (i <= ones) {
    const index_t p = sub.one_position(i - 1);
    rw.bits.push_back(1);
    rw.positions.push_back(base + p);
    const std::uint64_t scales = sub_masks[i - 1] & sel;
    if (scales != 0) {
      const std::size_t ell_prime = std::size_t{1} << (63 - std::countl_zero(scales));
      std::size_t zeros = 1 + 10 * (ell_prime - 1);
      for (index_t pos = p + 1; zeros > 0; ++pos) {
        if (!sub[pos]) {
          rw.bits.push_back(0);
          rw.positions.push_back(base + pos);
          --zeros;
        }
      }
      i += ell_prime;
    } else {
      ++i;
    }
  }
  return rw;
}

}  // namespace detail

/// Advantage interval and witness for a block x of type t (|x| = params.w).
/// The raw witness embeds in x_raw_interval; the certified witness embeds in
/// x_interval and in every y with property Q_t.
inline AdvantageWitness get_interval(const BitString& x, const PType& t, const Params& params) {
  if (x.size() != params.w) throw ContractError("get_interval: |x| must equal w");
  if (!t.classified()) throw ContractError("get_interval: unclassified type");
  const StructureThresholds& th = thresholds_for(params, params.w);
  if (!has_p_property(x, t, params)) throw ContractError("get_interval: x does not satisfy P_t");

  detail::RawWitness rw = t.is_coarse() ? detail::coarse_witness(x, t, th) : detail::fine_witness(x, t, th);

  AdvantageWitness out;
  out.raw_interval = rw.interval;
  out.raw_subsequence = BitString::from_bits(rw.bits);
  out.interval = round_w(rw.interval, params.gamma_w());

  std::vector<std::uint8_t> kept;
  for (std::size_t k = 0; k < rw.bits.size(); ++k) {
    if (rw.positions[k] >= out.interval.lo && rw.positions[k] < out.interval.hi) kept.push_back(rw.bits[k]);
  }
  BitString restricted = BitString::from_bits(kept);
  if (t.is_fine()) {
    const BitString y_ell = periodic_string(t.ell, th.fine_q_reps(t.ell));
    const std::size_t n = embeddable_prefix(restricted, y_ell);
    kept.resize(n);
    restricted = BitString::from_bits(kept);
  }
  out.subsequence = std::move(restricted);
  out.kappa = rational::floor_mul(Rational(static_cast<long long>(out.interval.length()), 2) +
                                      params.delta_code / 2 * static_cast<long long>(params.w),
                                  1);
  return out;
}

}  // namespace blcs
