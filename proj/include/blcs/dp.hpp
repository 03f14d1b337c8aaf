#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "blcs/bit_string.hpp"
#include "blcs/covering.hpp"
#include "blcs/error.hpp"
#include "blcs/lcs.hpp"
#include "blcs/params.hpp"
#include "blcs/structure.hpp"

namespace blcs {

/// Algorithm 2 over a (rows+1) x (cols+1) grid. Rectangles must arrive in
/// canonical order, one grid row at a time.
class DpSweep {
 public:
  DpSweep(std::size_t rows, std::size_t cols, std::size_t gamma_w, std::size_t theta_w, bool trace = false)
      : rows_(rows), cols_(cols), gw_(gamma_w), tw_(theta_w), trace_(trace) {
    if (gamma_w == 0 || theta_w == 0) throw ContractError("dp: grid widths must be positive");
    values_.assign((rows_ + 1) * (cols_ + 1), 0);
    if (trace_) {
      how_.assign(values_.size(), Step::none);
      chosen_.assign(values_.size(), CertifiedRectangle{});
    }
  }

  /// Processes grid row i. `rects` are exactly the rectangles with
  /// imax I = i * gamma_w, sorted canonically.
  void row(std::size_t i, std::span<const CertifiedRectangle> rects) {
    begin_row(i);
    std::size_t r = 0;
    for (std::size_t j = 1; j <= cols_; ++j) {
      const auto hi_j = static_cast<index_t>(j * tw_);
      if (r < rects.size() && rects[r].J.hi < hi_j) throw ContractError("dp: rectangles are not in canonical order");
      const std::size_t first = r;
      while (r < rects.size() && rects[r].J.hi == hi_j) ++r;
      cell(j, rects.subspan(first, r - first));
    }
    if (r != rects.size()) throw ContractError("dp: rectangle outside the grid row");
  }

  /// Row i one cell at a time: begin_row(i), then cell(j, ...) for j = 1..cols.
  void begin_row(std::size_t i) {
    if (i != next_row_ || i > rows_) throw ContractError("dp: rows must be processed in order");
    if (cur_row_ != 0 && next_col_ != cols_ + 1) throw ContractError("dp: previous row is incomplete");
    ++next_row_;
    cur_row_ = i;
    next_col_ = 1;
  }

  /// Cell (i, j) of the current row; `rects` all have imax J = j * theta_w.
  void cell(std::size_t j, std::span<const CertifiedRectangle> rects) {
    if (cur_row_ == 0 || j != next_col_) throw ContractError("dp: cells must be processed in order");
    ++next_col_;
    const std::size_t i = cur_row_;
    const std::size_t c = cell_index(i, j);
    const std::uint64_t up = values_[cell_index(i - 1, j)];
    const std::uint64_t left = values_[cell_index(i, j - 1)];
    values_[c] = std::max(up, left);
    if (trace_) how_[c] = up >= left ? Step::up : Step::left;
    for (const auto& r : rects) offer(i, j, c, r);
  }

  std::uint64_t value(std::size_t i, std::size_t j) const { return values_.at(cell_index(i, j)); }
  std::uint64_t result() const { return values_.back(); }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  /// One maximizing ordered collection, in increasing order.
  std::vector<CertifiedRectangle> chain() const {
    if (!trace_) throw ContractError("dp: tracing was not enabled");
    std::vector<CertifiedRectangle> out;
    std::size_t i = rows_;
    std::size_t j = cols_;
    while (i > 0 && j > 0) {
      const std::size_t c = cell_index(i, j);
      switch (how_[c]) {
        case Step::up: --i; break;
        case Step::left: --j; break;
        case Step::rect:
          out.push_back(chosen_[c]);
          i = chosen_[c].I.lo / gw_;
          j = chosen_[c].J.lo / tw_;
          break;
        default: i = 0; break;
      }
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

 private:
  enum class Step : std::uint8_t { none, up, left, rect };

  std::size_t cell_index(std::size_t i, std::size_t j) const noexcept { return i * (cols_ + 1) + j; }

  void offer(std::size_t i, std::size_t j, std::size_t c, const CertifiedRectangle& r) {
    if (r.I.hi != i * gw_ || r.J.hi != j * tw_ || r.I.lo % gw_ != 0 || r.J.lo % tw_ != 0 || r.I.lo > r.I.hi ||
        r.J.lo > r.J.hi) {
      throw ContractError("dp: misaligned rectangle [" + std::to_string(r.I.lo) + "," + std::to_string(r.I.hi) +
                          "]x[" + std::to_string(r.J.lo) + "," + std::to_string(r.J.hi) + "]");
    }
    const std::uint64_t cand = values_[cell_index(r.I.lo / gw_, r.J.lo / tw_)] + r.kappa;
    if (cand > values_[c]) {
      values_[c] = cand;
      if (trace_) {
        how_[c] = Step::rect;
        chosen_[c] = r;
      }
    }
  }

  std::size_t rows_, cols_, gw_, tw_;
  bool trace_;
  std::size_t next_row_ = 1;
  std::size_t cur_row_ = 0;
  std::size_t next_col_ = 1;
  std::vector<std::uint64_t> values_;
  std::vector<Step> how_;
  std::vector<CertifiedRectangle> chosen_;
};

struct FullLcsResult {
  std::uint64_t bound = 0;
  std::vector<CertifiedRectangle> chain;  // filled when tracing
};

/// DP over an explicit rectangle set on the grid of |x|/(gamma w) by
/// |y|/(theta w) cells. The set may be in any order.
inline FullLcsResult full_lcs(std::size_t x_len, std::size_t y_len, std::span<const CertifiedRectangle> rects,
                              const Params& params, bool trace = false) {
  const std::size_t gw = params.gamma_w();
  const std::size_t tw = params.theta_w();
  if (x_len % gw != 0 || y_len % tw != 0) throw ContractError("dp: string lengths are not grid-aligned");
  const std::size_t rows = x_len / gw;
  const std::size_t cols = y_len / tw;
  std::vector<CertifiedRectangle> sorted(rects.begin(), rects.end());
  for (const auto& r : sorted) {
    if (r.I.lo % gw != 0 || r.I.hi % gw != 0 || r.J.lo % tw != 0 || r.J.hi % tw != 0 || r.I.hi > x_len ||
        r.J.hi > y_len || r.I.lo > r.I.hi || r.J.lo > r.J.hi || r.I.empty() || r.J.empty()) {
      throw ContractError("dp: misaligned or out-of-range rectangle");
    }
  }
  std::stable_sort(sorted.begin(), sorted.end(), canonical_less);
  DpSweep sweep(rows, cols, gw, tw, trace);
  std::size_t a = 0;
  for (std::size_t i = 1; i <= rows; ++i) {
    std::size_t b = a;
    while (b < sorted.size() && sorted[b].I.hi == i * gw) ++b;
    sweep.row(i, std::span<const CertifiedRectangle>(sorted).subspan(a, b - a));
    a = b;
  }
  FullLcsResult out;
  out.bound = rows == 0 || cols == 0 ? 0 : sweep.result();
  if (trace && rows > 0 && cols > 0) out.chain = sweep.chain();
  return out;
}

inline FullLcsResult full_lcs(const BitString& x, const BitString& y, std::span<const CertifiedRectangle> rects,
                              const Params& params, bool trace = false) {
  return full_lcs(x.size(), y.size(), rects, params, trace);
}

struct PhaseTimes {
  std::uint64_t classify_us = 0;
  std::uint64_t cover_us = 0;
  std::uint64_t dp_us = 0;
};

struct PipelineResult {
  std::uint64_t bound = 0;
  CoverCounts counts;
  PhaseTimes times;
  std::vector<CertifiedRectangle> chain;
  std::size_t unclassified_blocks = 0;
};

/// Covering followed by FullLCS, interleaved row by row.
inline PipelineResult run_full_lcs(const BitString& x, const BitString& y, const Params& params,
                                   const EqLcsOracle& eq, bool trace = false, CoverOptions options = {}) {
  using clock = std::chrono::steady_clock;
  auto us = [](clock::duration d) {
    return static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::microseconds>(d).count());
  };
  PipelineResult out;
  CoverEngine engine(x, y, params, eq, options);
  out.times.classify_us = engine.classify_us();
  out.times.cover_us = engine.eq_us();
  for (const auto& b : engine.blocks()) out.unclassified_blocks += !b.type.classified();
  if (engine.rows() == 0 || engine.cols() == 0) return out;

  DpSweep sweep(engine.rows(), engine.cols(), engine.gamma_w(), engine.theta_w(), trace);
  // Each cell goes straight from the cover to the DP, so no row of
  // rectangles is ever materialized.
  clock::duration cover_time{}, dp_time{};
  for (std::size_t i = 1; i <= engine.rows(); ++i) {
    sweep.begin_row(i);
    auto mark = clock::now();
    engine.for_each_cell(i, [&](std::size_t j, std::span<const CertifiedRectangle> cell) {
      const auto t1 = clock::now();
      sweep.cell(j, cell);
      const auto t2 = clock::now();
      cover_time += t1 - mark;
      dp_time += t2 - t1;
      mark = t2;
      for (const auto& r : cell) out.counts.add(r.source);
    });
  }
  out.times.cover_us += us(cover_time);
  out.times.dp_us = us(dp_time);
  out.bound = sweep.result();
  if (trace) out.chain = sweep.chain();
  return out;
}

// ---------------------------------------------------------------------------
// Reconstruction

/// A common subsequence of x_I and y_J of length exactly r.kappa.
inline BitString rectangle_witness(const BitString& x, const BitString& y, const CertifiedRectangle& r,
                                   const Params& params) {
  std::vector<std::uint8_t> bits;
  switch (r.source) {
    case Source::global:
    case Source::trivial:
    case Source::trivial_square: {
      const bool b = trivial_bit(x, r.I, y, r.J);
      bits.assign(r.kappa, b ? 1 : 0);
      break;
    }
    case Source::eq_lcs: {
      bits = exact_lcs_witness(x, r.I, y, r.J).unpack();
      break;
    }
    case Source::structure: {
      const std::size_t w = params.w;
      const Interval block{static_cast<index_t>(r.I.lo / w * w), static_cast<index_t>(r.I.lo / w * w + w)};
      const Params bp = params.with_block_width(w);
      const BitString xb = x.substr(block);
      bits = get_interval(xb, get_p_type(xb, bp), bp).subsequence.unpack();
      break;
    }
  }
  if (bits.size() < r.kappa) throw std::logic_error("reconstruction: witness shorter than kappa");
  bits.resize(r.kappa);
  return BitString::from_bits(bits);
}

/// Concatenation of per-rectangle witnesses along an ordered chain.
inline BitString reconstruct(const BitString& x, const BitString& y, std::span<const CertifiedRectangle> chain,
                             const Params& params) {
  std::vector<std::uint8_t> bits;
  for (const auto& r : chain) {
    const auto part = rectangle_witness(x, y, r, params).unpack();
    bits.insert(bits.end(), part.begin(), part.end());
  }
  return BitString::from_bits(bits);
}

}  // namespace blcs
