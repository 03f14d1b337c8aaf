#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <utility>
#include <vector>

#include "blcs/bit_string.hpp"
#include "blcs/error.hpp"
#include "blcs/params.hpp"

namespace blcs {

inline constexpr std::size_t kDefaultTraceCellCap = 100'000'000;

/// max(min(zeros(x_I), zeros(y_J)), min(ones(x_I), ones(y_J))) in O(1).
inline std::size_t trivial_lcs(const BitString& x, Interval in_x, const BitString& y, Interval in_y) {
  const std::size_t ox = x.count_ones(in_x);
  const std::size_t oy = y.count_ones(in_y);
  const std::size_t zx = in_x.length() - ox;
  const std::size_t zy = in_y.length() - oy;
  return std::max(std::min(zx, zy), std::min(ox, oy));
}

inline std::size_t trivial_lcs(const BitString& x, const BitString& y) {
  return trivial_lcs(x, x.full(), y, y.full());
}

/// The bit whose constant run realizes trivial_lcs (0 on ties).
inline bool trivial_bit(const BitString& x, Interval in_x, const BitString& y, Interval in_y) {
  const std::size_t ox = x.count_ones(in_x);
  const std::size_t oy = y.count_ones(in_y);
  return std::min(ox, oy) > std::min(in_x.length() - ox, in_y.length() - oy);
}

namespace detail {

// Row recurrence of the LCS table packed 64 columns per word (the pattern a
// is the row). After push(c) for every character of some string b,
// length() == LCS(a, b). Bit i of v_ is clear iff row[i+1] > row[i].
class RowLcs {
 public:
  explicit RowLcs(const std::vector<std::uint8_t>& a) : n_(a.size()), words_((a.size() + 63) / 64) {
    match_[0].assign(words_, 0);
    match_[1].assign(words_, 0);
    for (std::size_t i = 0; i < n_; ++i) match_[a[i] ? 1 : 0][i >> 6] |= std::uint64_t{1} << (i & 63);
    v_.assign(words_, ~std::uint64_t{0});
    if (n_ % 64 != 0 && words_ > 0) v_.back() = (std::uint64_t{1} << (n_ % 64)) - 1;
  }

  void push(std::uint8_t c) {
    const auto& m = match_[c ? 1 : 0];
    std::uint64_t carry = 0;
    for (std::size_t k = 0; k < words_; ++k) {
      const std::uint64_t u = v_[k] & m[k];
      const std::uint64_t sum = v_[k] + u + carry;
      carry = (sum < v_[k] || (carry && sum == v_[k])) ? 1 : 0;
      v_[k] = sum | (v_[k] & ~u);
    }
    if (n_ % 64 != 0 && words_ > 0) v_.back() &= (std::uint64_t{1} << (n_ % 64)) - 1;
  }

  std::size_t length() const {
    std::size_t set = 0;
    for (std::uint64_t w : v_) set += static_cast<std::size_t>(std::popcount(w));
    return n_ - set;
  }

 private:
  std::size_t n_, words_;
  std::vector<std::uint64_t> match_[2];
  std::vector<std::uint64_t> v_;
};

inline std::size_t lcs_rows(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
  const auto& row_src = a.size() <= b.size() ? a : b;
  const auto& col_src = a.size() <= b.size() ? b : a;
  if (row_src.empty()) return 0;
  RowLcs r(row_src);
  for (std::uint8_t c : col_src) r.push(c);
  return r.length();
}

}  // namespace detail

/// Exact LCS length, O(|x||y|/64) time and O(min(|x|,|y|)) memory.
inline std::size_t exact_lcs(const BitString& x, Interval in_x, const BitString& y, Interval in_y) {
  return detail::lcs_rows(x.unpack(in_x), y.unpack(in_y));
}

inline std::size_t exact_lcs(const BitString& x, const BitString& y) {
  return exact_lcs(x, x.full(), y, y.full());
}

/// LCS(x_I, y_[lo, lo+k]) for every k in [0, max_len]; one DP pass.
inline std::vector<std::size_t> exact_lcs_prefixes(const BitString& x, Interval in_x, const BitString& y,
                                                   index_t lo, index_t max_len) {
  const auto a = x.unpack(in_x);
  const auto b = y.unpack({lo, lo + max_len});
  std::vector<std::size_t> out(b.size() + 1, 0);
  if (a.empty()) return out;
  detail::RowLcs r(a);
  for (std::size_t k = 0; k < b.size(); ++k) {
    r.push(b[k]);
    out[k + 1] = r.length();
  }
  return out;
}

/// Pairs (x-index, y-index), 0-based, strictly increasing in both coordinates.
struct MatchingTrace {
  std::vector<std::pair<index_t, index_t>> pairs;

  std::size_t size() const noexcept { return pairs.size(); }
};

struct TracedLcs {
  std::size_t length = 0;
  MatchingTrace trace;
};

/// Exact LCS together with the lexicographically earliest optimal matching
/// (pairs compared by x-index, then y-index). Builds the full suffix table;
/// throws CapacityError beyond `cell_cap` cells.
inline TracedLcs exact_lcs_traced(const BitString& x, const BitString& y,
                                  std::size_t cell_cap = kDefaultTraceCellCap) {
  const std::size_t n = x.size();
  const std::size_t m = y.size();
  if ((n + 1) > cell_cap / (m + 1)) {
    throw CapacityError("traced LCS needs " + std::to_string((n + 1) * (m + 1)) + " cells, cap is " +
                        std::to_string(cell_cap));
  }
  const auto a = x.unpack();
  const auto b = y.unpack();
  const std::size_t stride = m + 1;
  // suffix[i][j] = LCS(x[i:], y[j:])
  std::vector<std::uint32_t> suffix((n + 1) * stride, 0);
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = m; j-- > 0;) {
      const std::uint32_t skip = std::max(suffix[(i + 1) * stride + j], suffix[i * stride + j + 1]);
      const std::uint32_t take = a[i] == b[j] ? suffix[(i + 1) * stride + j + 1] + 1 : 0;
      suffix[i * stride + j] = std::max(skip, take);
    }
  }

  // next[c][j] = first position >= j holding bit c, or m.
  std::vector<index_t> next0(m + 1, static_cast<index_t>(m));
  std::vector<index_t> next1(m + 1, static_cast<index_t>(m));
  for (std::size_t j = m; j-- > 0;) {
    next0[j] = b[j] == 0 ? static_cast<index_t>(j) : next0[j + 1];
    next1[j] = b[j] == 1 ? static_cast<index_t>(j) : next1[j + 1];
  }

  TracedLcs out;
  out.length = suffix[0];
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < n && j < m && out.trace.size() < out.length) {
    const std::size_t f = a[i] ? next1[j] : next0[j];
    // x_i can start an optimal completion iff matching it to its first
    // occurrence at or after j keeps the total optimal.
    if (f < m && suffix[(i + 1) * stride + f + 1] + 1 == suffix[i * stride + j]) {
      out.trace.pairs.emplace_back(static_cast<index_t>(i), static_cast<index_t>(f));
      j = f + 1;
    }
    ++i;
  }
  return out;
}

/// Witness string for a traced matching.
inline BitString matched_string(const BitString& x, const MatchingTrace& trace) {
  std::vector<std::uint8_t> bits;
  bits.reserve(trace.size());
  for (auto [i, j] : trace.pairs) bits.push_back(x[i] ? 1 : 0);
  return BitString::from_bits(bits);
}

/// One optimal common subsequence of x_I and y_J.
inline BitString exact_lcs_witness(const BitString& x, Interval in_x, const BitString& y, Interval in_y) {
  const BitString xs = x.substr(in_x);
  return matched_string(xs, exact_lcs_traced(xs, y.substr(in_y)).trace);
}

/// True iff the one-density of x_I lies in [1/2 - gamma, 1/2 + gamma].
inline bool is_gamma_balanced(const BitString& x, Interval in, const Rational& gamma) {
  if (in.empty()) throw std::domain_error("is_gamma_balanced: empty interval");
  const Rational density(static_cast<long long>(x.count_ones(in)), static_cast<long long>(in.length()));
  const Rational half(1, 2);
  return density >= half - gamma && density <= half + gamma;
}

/// Greedy left-to-right embedding of s into y_J.
inline bool is_subsequence(const BitString& s, const BitString& y, Interval in_y) {
  y.check(in_y);
  std::size_t k = 0;
  for (index_t j = in_y.lo; j < in_y.hi && k < s.size(); ++j) {
    if (y[j] == s[k]) ++k;
  }
  return k == s.size();
}

inline bool is_subsequence(const BitString& s, const BitString& y) { return is_subsequence(s, y, y.full()); }

/// Length of the longest prefix of s that embeds greedily into y.
inline std::size_t embeddable_prefix(const BitString& s, const BitString& y) {
  std::size_t k = 0;
  for (std::size_t j = 0; j < y.size() && k < s.size(); ++j) {
    if (y[j] == s[k]) ++k;
  }
  return k;
}

}  // namespace blcs
