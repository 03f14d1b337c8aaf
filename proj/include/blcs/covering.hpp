#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "blcs/bit_string.hpp"
#include "blcs/error.hpp"
#include "blcs/lcs.hpp"
#include "blcs/params.hpp"
#include "blcs/structure.hpp"

namespace blcs {

enum class Source : std::uint8_t { global, trivial, trivial_square, eq_lcs, structure };

inline std::string_view to_string(Source s) {
  switch (s) {
    case Source::global: return "global";
    case Source::trivial: return "trivial";
    case Source::trivial_square: return "trivial_square";
    case Source::eq_lcs: return "eq_lcs";
    case Source::structure: return "structure";
  }
  return "?";
}

/// (I x J, kappa) with LCS(x_I, y_J) >= kappa.
struct CertifiedRectangle {
  Interval I;
  Interval J;
  std::uint32_t kappa = 0;
  Source source = Source::global;

  /// Strictly earlier in both coordinates.
  bool before(const CertifiedRectangle& other) const noexcept {
    return I.before(other.I) && J.before(other.J);
  }
  bool comparable(const CertifiedRectangle& other) const noexcept {
    return before(other) || other.before(*this);
  }

  friend bool operator==(const CertifiedRectangle&, const CertifiedRectangle&) = default;
};

/// Canonical order: imax I, imax J, source, imin I, imin J, kappa.
inline bool canonical_less(const CertifiedRectangle& a, const CertifiedRectangle& b) {
  return std::tie(a.I.hi, a.J.hi, a.source, a.I.lo, a.J.lo, a.kappa) <
         std::tie(b.I.hi, b.J.hi, b.source, b.I.lo, b.J.lo, b.kappa);
}

// ---------------------------------------------------------------------------
// Equal-length LCS oracle

/// Stand-in for a (1/2 + delta_eq)-approximate LCS on nearly equal lengths.
class EqLcsOracle {
 public:
  virtual ~EqLcsOracle() = default;
  virtual std::string_view name() const = 0;

  /// Value for x_I against y_[lo, lo+len) for each requested len.
  virtual std::vector<std::size_t> lengths(const BitString& x, Interval in_x, const BitString& y, index_t lo,
                                           std::span<const index_t> lens) const = 0;

  /// Checked single query: |J| must lie in [(1-alpha)|I|, (1+alpha)|I|].
  std::size_t lcs(const BitString& x, Interval in_x, const BitString& y, Interval in_y, const Rational& alpha) const {
    x.check(in_x);
    y.check(in_y);
    const auto n = static_cast<long long>(in_x.length());
    const Rational len(static_cast<long long>(in_y.length()));
    if (len < (1 - alpha) * n || len > (1 + alpha) * n) {
      throw ContractError("eq_lcs: |J| = " + std::to_string(in_y.length()) + " is outside [(1-alpha)|I|, (1+alpha)|I|]"
                          " for |I| = " + std::to_string(in_x.length()));
    }
    const index_t l = in_y.length();
    return lengths(x, in_x, y, in_y.lo, std::span<const index_t>(&l, 1)).front();
  }
};

class ExactEqOracle final : public EqLcsOracle {
 public:
  std::string_view name() const override { return "exact"; }
  std::vector<std::size_t> lengths(const BitString& x, Interval in_x, const BitString& y, index_t lo,
                                   std::span<const index_t> lens) const override {
    if (lens.empty()) return {};
    const index_t max_len = *std::max_element(lens.begin(), lens.end());
    const auto row = exact_lcs_prefixes(x, in_x, y, lo, max_len);
    std::vector<std::size_t> out;
    out.reserve(lens.size());
    for (index_t l : lens) out.push_back(row[l]);
    return out;
  }
};

class TrivialEqOracle final : public EqLcsOracle {
 public:
  std::string_view name() const override { return "trivial"; }
  std::vector<std::size_t> lengths(const BitString& x, Interval in_x, const BitString& y, index_t lo,
                                   std::span<const index_t> lens) const override {
    std::vector<std::size_t> out;
    out.reserve(lens.size());
    for (index_t l : lens) out.push_back(trivial_lcs(x, in_x, y, {lo, lo + l}));
    return out;
  }
};

/// Wraps an external implementation. The hook must return a value in
/// [LCS/2, LCS]; it is trusted, not checked.
class HookEqOracle final : public EqLcsOracle {
 public:
  using Fn = std::function<std::size_t(const BitString&, Interval, const BitString&, Interval)>;

  explicit HookEqOracle(Fn fn, std::string name = "hook") : fn_(std::move(fn)), name_(std::move(name)) {}

  std::string_view name() const override { return name_; }
  std::vector<std::size_t> lengths(const BitString& x, Interval in_x, const BitString& y, index_t lo,
                                   std::span<const index_t> lens) const override {
    std::vector<std::size_t> out;
    out.reserve(lens.size());
    for (index_t l : lens) out.push_back(fn_(x, in_x, y, {lo, lo + l}));
    return out;
  }

 private:
  Fn fn_;
  std::string name_;
};

inline std::unique_ptr<EqLcsOracle> make_eq_oracle(std::string_view name) {
  if (name == "exact") return std::make_unique<ExactEqOracle>();
  if (name == "trivial") return std::make_unique<TrivialEqOracle>();
  throw ConfigError("unknown eq-lcs oracle '" + std::string(name) + "' (expected exact|trivial)");
}

// ---------------------------------------------------------------------------
// Covering

struct CoverOptions {
  bool trivial = true;
  bool squares = true;
  bool eq_lcs = true;
  bool structure = true;
  /// Refuse to materialize more rectangles than this.
  std::size_t max_rectangles = std::size_t{1} << 26;
};

/// Per-block classification result used by the structure family.
struct BlockStructure {
  PType type;
  Interval interval;  // absolute, gamma*w-aligned; empty if no rectangle
  std::uint32_t kappa = 0;
};

struct CoverCounts {
  std::size_t global = 0;
  std::size_t trivial = 0;
  std::size_t trivial_square = 0;
  std::size_t eq_lcs = 0;
  std::size_t structure = 0;

  std::size_t total() const noexcept { return global + trivial + trivial_square + eq_lcs + structure; }
  void add(Source s) noexcept {
    switch (s) {
      case Source::global: ++global; break;
      case Source::trivial: ++trivial; break;
      case Source::trivial_square: ++trivial_square; break;
      case Source::eq_lcs: ++eq_lcs; break;
      case Source::structure: ++structure; break;
    }
  }
};

/// Algorithm 1, generated one grid row (fixed imax I) at a time so the
/// rectangle DP can consume it without holding the whole set.
class CoverEngine {
 public:
  CoverEngine(const BitString& x, const BitString& y, const Params& params, const EqLcsOracle& eq,
              CoverOptions options = {})
      : x_(x), y_(y), params_(params), eq_(eq), options_(options), q_(y) {
    if (params.w == 0) throw ContractError("cover: params are not bound to a block width");
    w_ = params.w;
    if (x.size() % w_ != 0 || y.size() % w_ != 0) {
      throw ContractError("cover: |x| and |y| must be multiples of w = " + std::to_string(w_));
    }
    if (x.ones() != x.zeros() || x.ones() > std::min(y.ones(), y.zeros())) {
      throw ContractError("cover: requires 1(x) = 0(x) <= min(1(y), 0(y))");
    }
    gw_ = params.gamma_w();
    tw_ = params.theta_w();
    if (gw_ % tw_ != 0) throw ContractError("cover: theta*w must divide gamma*w");
    rows_ = x.size() / gw_;
    cols_ = y.size() / tw_;

    const Rational sd = params.sqrt_delta();
    thr_low_.assign(rows_ + 1, 0);
    thr_high_.assign(rows_ + 1, 0);
    for (std::size_t k = 1; k <= rows_; ++k) {
      const auto len = static_cast<std::int64_t>(k * gw_);
      thr_low_[k] = static_cast<std::size_t>(rational::ceil_mul(Rational(1, 2) - sd, len));
      thr_high_[k] = static_cast<std::size_t>(rational::ceil_mul(Rational(1, 2) + params.gamma / 2, len));
    }

    const auto wi = static_cast<std::int64_t>(w_);
    const auto eq_lo = static_cast<std::size_t>(rational::ceil_mul(1 - params.alpha, wi));
    const auto eq_hi = static_cast<std::size_t>(rational::floor_mul(1 + params.alpha, wi));
    for (std::size_t len = tw_; len <= eq_hi; len += tw_) {
      if (len >= eq_lo) eq_lens_.push_back(static_cast<index_t>(len));
    }
    q_need_ = static_cast<std::size_t>(rational::ceil_mul(1 + params.beta * 9 / 10, wi));

    const std::size_t m_x = x.size() / w_;
    using clock = std::chrono::steady_clock;
    auto t0 = clock::now();
    if (options_.structure) classify_blocks(m_x);
    auto t1 = clock::now();
    if (options_.eq_lcs) build_eq_table(m_x);
    auto t2 = clock::now();
    classify_us_ = static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0).count());
    eq_us_ = static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::microseconds>(t2 - t1).count());
  }

  /// Time spent classifying blocks and precomputing eq-lcs values.
  std::uint64_t classify_us() const noexcept { return classify_us_; }
  std::uint64_t eq_us() const noexcept { return eq_us_; }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t gamma_w() const noexcept { return gw_; }
  std::size_t theta_w() const noexcept { return tw_; }
  const std::vector<BlockStructure>& blocks() const noexcept { return blocks_; }

  /// Upper bound on the number of rectangles the enumeration may emit.
  std::size_t rectangle_cap() const noexcept {
    const std::size_t intervals = rows_ * (rows_ + 1) / 2;
    const std::size_t m_x = x_.size() / w_;
    return 1 + 3 * intervals * cols_ + m_x * cols_ * (eq_lens_.size() + 1);
  }

  /// Calls fn(j, cell) for j = 1..cols, where cell holds the rectangles with
  /// imax I = i * gamma*w and imax J = j * theta*w in canonical order.
  template <class Fn>
  void for_each_cell(std::size_t i, Fn&& fn) const {
    if (i == 0 || i > rows_) throw std::out_of_range("cover: row index out of range");
    const auto hi_i = static_cast<index_t>(i * gw_);
    RowCursors cur;
    cur.trivial.assign(2 * i, {});
    if (options_.structure) cur.q.assign(blocks_by_row_[i].size(), {});
    std::vector<CertifiedRectangle> cell, squares;
    for (std::size_t j = 1; j <= cols_; ++j) {
      cell.clear();
      squares.clear();
      const auto hi_j = static_cast<index_t>(j * tw_);
      if (i == rows_ && j == cols_) {
        const auto k = trivial_lcs(x_, y_);
        if (k > 0) cell.push_back({x_.full(), y_.full(), static_cast<std::uint32_t>(k), Source::global});
      }
      // Sources are appended in canonical order and each generator emits in
      // (imin I, imin J) order; only structure rectangles may need sorting.
      if (options_.trivial || options_.squares) trivial_cell(i, hi_i, hi_j, cur, cell, squares);
      cell.insert(cell.end(), squares.begin(), squares.end());
      if (options_.eq_lcs && hi_i % w_ == 0) eq_cell(hi_i, hi_j, cell);
      if (options_.structure) structure_cell(i, hi_j, cur, cell);
      if (!std::is_sorted(cell.begin(), cell.end(), canonical_less)) {
        std::sort(cell.begin(), cell.end(), canonical_less);
      }
      cell.erase(std::unique(cell.begin(), cell.end()), cell.end());
      fn(j, std::span<const CertifiedRectangle>(cell));
    }
  }

  /// Appends all rectangles with imax I = i * gamma*w, in canonical order.
  void row(std::size_t i, std::vector<CertifiedRectangle>& out) const {
    for_each_cell(i, [&](std::size_t, std::span<const CertifiedRectangle> cell) {
      out.insert(out.end(), cell.begin(), cell.end());
    });
  }

  /// Whole rectangle set in canonical order.
  std::vector<CertifiedRectangle> all() const {
    const std::size_t cap = rectangle_cap();
    std::vector<CertifiedRectangle> out;
    for (std::size_t i = 1; i <= rows_; ++i) {
      row(i, out);
      if (out.size() > options_.max_rectangles) {
        throw CapacityError("cover: more than " + std::to_string(options_.max_rectangles) + " rectangles");
      }
    }
    if (out.size() > cap) throw std::logic_error("cover: rectangle count exceeds the enumeration bound");
    return out;
  }

  /// Smallest theta*w-aligned J with imax J = hi_j and Trivial(I, J) >= threshold,
  /// by binary search over imin J (Trivial only grows as imin J decreases).
  std::optional<Interval> smallest_trivial(Interval in_x, index_t hi_j, std::size_t threshold) const {
    const std::size_t ox = x_.count_ones(in_x);
    const std::size_t zx = in_x.length() - ox;
    auto prefix = y_.prefix_ones();
    auto ok = [&](std::size_t lo_idx) {
      const std::size_t lo = lo_idx * tw_;
      const std::size_t oy = prefix[hi_j] - prefix[lo];
      const std::size_t zy = (hi_j - lo) - oy;
      return std::max(std::min(zx, zy), std::min(ox, oy)) >= threshold;
    };
    const std::size_t last = hi_j / tw_;  // lo index == last gives the empty interval
    if (!ok(0)) return std::nullopt;
    std::size_t good = 0;
    std::size_t bad = last + 1;
    while (bad - good > 1) {
      const std::size_t mid = good + (bad - good) / 2;
      if (mid <= last && ok(mid)) good = mid;
      else bad = mid;
    }
    return Interval{static_cast<index_t>(good * tw_), hi_j};
  }

  /// Smallest theta*w-aligned J with imax J = hi_j, |J| >= (1+0.9 beta)w and Q_t.
  std::optional<Interval> smallest_q(const PType& t, index_t hi_j) const {
    if (hi_j < q_need_) return std::nullopt;
    const std::size_t last = (hi_j - q_need_) / tw_;
    auto ok = [&](std::size_t lo_idx) {
      return is_q(q_, {static_cast<index_t>(lo_idx * tw_), hi_j}, t, th_);
    };
    if (!ok(0)) return std::nullopt;
    std::size_t good = 0;
    std::size_t bad = last + 1;
    while (bad - good > 1) {
      const std::size_t mid = good + (bad - good) / 2;
      if (ok(mid)) good = mid;
      else bad = mid;
    }
    return Interval{static_cast<index_t>(good * tw_), hi_j};
  }

 private:
  // Largest aligned imin J index whose window still satisfies a predicate.
  // The predicate holds on a prefix of imin J values and that prefix only
  // grows with imax J, so along a row the cursor moves right and the scan is
  // amortized constant per cell. Gives the same interval as the binary
  // searches above.
  struct Cursor {
    std::size_t lo = 0;
    bool found = false;
  };
  struct RowCursors {
    std::vector<Cursor> trivial;  // two thresholds per interval length
    std::vector<Cursor> q;        // one per structure block ending on the row
  };

  template <class Ok>
  static bool advance(Cursor& c, std::size_t last, Ok ok) {
    if (!c.found) {
      if (!ok(0)) return false;
      c.found = true;
    }
    while (c.lo < last && ok(c.lo + 1)) ++c.lo;
    return true;
  }

  // Longest I first so imin I ascends; the higher threshold first since its
  // J starts no later.
  void trivial_cell(std::size_t i, index_t hi_i, index_t hi_j, RowCursors& cur, std::vector<CertifiedRectangle>& cell,
                    std::vector<CertifiedRectangle>& squares) const {
    const auto prefix = y_.prefix_ones();
    for (std::size_t k = i; k >= 1; --k) {
      const Interval in_x{static_cast<index_t>(hi_i - k * gw_), hi_i};
      if (options_.trivial) {
        const std::size_t ox = x_.count_ones(in_x);
        const std::size_t zx = in_x.length() - ox;
        const std::size_t thresholds[2] = {thr_low_[k], thr_high_[k]};
        for (std::size_t h : {1, 0}) {
          const std::size_t thr = thresholds[h];
          auto ok = [&](std::size_t lo_idx) {
            const std::size_t lo = lo_idx * tw_;
            const std::size_t oy = prefix[hi_j] - prefix[lo];
            const std::size_t zy = (hi_j - lo) - oy;
            return std::max(std::min(zx, zy), std::min(ox, oy)) >= thr;
          };
          Cursor& c = cur.trivial[2 * (k - 1) + h];
          if (advance(c, hi_j / tw_, ok)) {
            const Interval in_y{static_cast<index_t>(c.lo * tw_), hi_j};
            const auto kappa = trivial_lcs(x_, in_x, y_, in_y);
            if (kappa > 0) cell.push_back({in_x, in_y, static_cast<std::uint32_t>(kappa), Source::trivial});
          }
        }
      }
      if (options_.squares && hi_j >= in_x.length()) {
        const Interval in_y{static_cast<index_t>(hi_j - in_x.length()), hi_j};
        const auto kappa = trivial_lcs(x_, in_x, y_, in_y);
        if (kappa > 0) squares.push_back({in_x, in_y, static_cast<std::uint32_t>(kappa), Source::trivial_square});
      }
    }
  }

  void eq_cell(index_t hi_i, index_t hi_j, std::vector<CertifiedRectangle>& cell) const {
    const std::size_t block = hi_i / w_ - 1;
    const Interval in_x{static_cast<index_t>(hi_i - w_), hi_i};
    for (std::size_t k = eq_lens_.size(); k-- > 0;) {
      if (eq_lens_[k] > hi_j) continue;
      const index_t lo = hi_j - eq_lens_[k];
      const std::uint32_t kappa = eq_table_[(block * (cols_ + 1) + lo / tw_) * eq_lens_.size() + k];
      if (kappa > 0) cell.push_back({in_x, {lo, hi_j}, kappa, Source::eq_lcs});
    }
  }

  void structure_cell(std::size_t i, index_t hi_j, RowCursors& cur, std::vector<CertifiedRectangle>& cell) const {
    if (hi_j < q_need_) return;
    const auto& row_blocks = blocks_by_row_[i];
    for (std::size_t n = 0; n < row_blocks.size(); ++n) {
      const BlockStructure& bs = blocks_[row_blocks[n]];
      auto ok = [&](std::size_t lo_idx) { return is_q(q_, {static_cast<index_t>(lo_idx * tw_), hi_j}, bs.type, th_); };
      Cursor& c = cur.q[n];
      if (advance(c, (hi_j - q_need_) / tw_, ok)) {
        cell.push_back({bs.interval, {static_cast<index_t>(c.lo * tw_), hi_j}, bs.kappa, Source::structure});
      }
    }
  }

  void build_eq_table(std::size_t m_x) {
    eq_table_.assign(m_x * (cols_ + 1) * eq_lens_.size(), 0);
    if (eq_lens_.empty()) return;
    std::vector<index_t> lens;
    for (std::size_t b = 0; b < m_x; ++b) {
      const Interval in_x{static_cast<index_t>(b * w_), static_cast<index_t>((b + 1) * w_)};
      for (std::size_t c = 0; c <= cols_; ++c) {
        const auto lo = static_cast<index_t>(c * tw_);
        lens.clear();
        for (index_t l : eq_lens_) {
          if (lo + l <= y_.size()) lens.push_back(l);
        }
        if (lens.empty()) continue;
        const auto vals = eq_.lengths(x_, in_x, y_, lo, lens);
        for (std::size_t k = 0; k < lens.size(); ++k) {
          eq_table_[(b * (cols_ + 1) + c) * eq_lens_.size() + k] = static_cast<std::uint32_t>(vals[k]);
        }
      }
    }
  }

  void classify_blocks(std::size_t m_x) {
    const Params block_params = params_.with_block_width(w_);
    th_ = thresholds_for(block_params, w_);
    blocks_.resize(m_x);
    blocks_by_row_.assign(rows_ + 1, {});
    const auto alpha_w = params_.alpha * static_cast<long long>(w_);
    for (std::size_t b = 0; b < m_x; ++b) {
      const Interval block{static_cast<index_t>(b * w_), static_cast<index_t>((b + 1) * w_)};
      const BitString xb = x_.substr(block);
      BlockStructure& bs = blocks_[b];
      bs.type = get_p_type(xb, block_params);
      if (!bs.type.classified()) continue;
      const AdvantageWitness wit = get_interval(xb, bs.type, block_params);
      const Interval abs = wit.interval.shifted(block.lo);
      const auto nominal = rational::floor_mul(Rational(static_cast<long long>(abs.length()), 2) + alpha_w, 1);
      const auto kappa = std::min<std::int64_t>(nominal, static_cast<std::int64_t>(wit.subsequence.size()));
      if (abs.empty() || kappa <= 0) continue;
      bs.interval = abs;
      bs.kappa = static_cast<std::uint32_t>(kappa);
      blocks_by_row_[abs.hi / gw_].push_back(b);
    }
  }

  const BitString& x_;
  const BitString& y_;
  Params params_;
  const EqLcsOracle& eq_;
  CoverOptions options_;
  QTable q_;
  StructureThresholds th_;

  std::size_t w_ = 0, gw_ = 0, tw_ = 0, rows_ = 0, cols_ = 0;
  std::vector<std::size_t> thr_low_, thr_high_;
  std::vector<index_t> eq_lens_;
  std::size_t q_need_ = 0;
  std::vector<std::uint32_t> eq_table_;
  std::vector<BlockStructure> blocks_;
  std::vector<std::vector<std::size_t>> blocks_by_row_;
  std::uint64_t classify_us_ = 0;
  std::uint64_t eq_us_ = 0;
};

/// Algorithm 1: the full certified-rectangle set in canonical order.
inline std::vector<CertifiedRectangle> cover(const BitString& x, const BitString& y, const Params& params,
                                             const EqLcsOracle& eq, CoverOptions options = {}) {
  return CoverEngine(x, y, params, eq, options).all();
}

inline CoverCounts count_sources(std::span<const CertifiedRectangle> rects) {
  CoverCounts c;
  for (const auto& r : rects) c.add(r.source);
  return c;
}

/// `cover --dump` format.
inline std::string rectangles_csv(std::span<const CertifiedRectangle> rects) {
  std::string out = "imin_i,imax_i,imin_j,imax_j,kappa,source\n";
  for (const auto& r : rects) {
    out += std::to_string(r.I.lo) + ',' + std::to_string(r.I.hi) + ',' + std::to_string(r.J.lo) + ',' +
           std::to_string(r.J.hi) + ',' + std::to_string(r.kappa) + ',' + std::string(to_string(r.source)) + '\n';
  }
  return out;
}

}  // namespace blcs
