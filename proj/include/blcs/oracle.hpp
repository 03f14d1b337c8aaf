#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <span>
#include <vector>

#include "blcs/bit_string.hpp"
#include "blcs/covering.hpp"
#include "blcs/error.hpp"
#include "blcs/lcs.hpp"
#include "blcs/params.hpp"

// Exponential and quadratic ground-truth routines for tests and the dev CLI.

namespace blcs::oracle {

/// Smallest y-window holding the partners of the x-indices in I. Blocks with
/// no matched bit get the empty window right after the previous partner.
inline Interval matched_window(const MatchingTrace& trace, Interval in_x) {
  const auto& p = trace.pairs;
  auto first = std::lower_bound(p.begin(), p.end(), in_x.lo, [](const auto& e, index_t v) { return e.first < v; });
  auto last = std::lower_bound(first, p.end(), in_x.hi, [](const auto& e, index_t v) { return e.first < v; });
  if (first != last) return {first->second, static_cast<index_t>(std::prev(last)->second + 1)};
  const index_t anchor = first == p.begin() ? 0 : static_cast<index_t>(std::prev(first)->second + 1);
  return {anchor, anchor};
}

/// Maximum kappa-sum over pairwise comparable subsets (at most 20 rectangles).
inline std::uint64_t brute_ordered_max(std::span<const CertifiedRectangle> rects) {
  constexpr std::size_t kCap = 20;
  const std::size_t n = rects.size();
  if (n > kCap) throw CapacityError("brute_ordered_max: at most 20 rectangles");
  std::vector<std::uint32_t> compat(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && rects[i].comparable(rects[j])) compat[i] |= std::uint32_t{1} << j;
    }
  }
  std::uint64_t best = 0;
  // Clique search: `allowed` holds candidates comparable with everything chosen.
  auto dfs = [&](auto&& self, std::size_t i, std::uint32_t allowed, std::uint64_t sum) -> void {
    best = std::max(best, sum);
    for (std::size_t k = i; k < n; ++k) {
      if (allowed & (std::uint32_t{1} << k)) self(self, k + 1, allowed & compat[k], sum + rects[k].kappa);
    }
  };
  dfs(dfs, 0, (std::uint32_t{1} << n) - 1, 0);
  return best;
}

/// LCS by enumerating every subsequence of the shorter string (length <= 24).
inline std::size_t brute_force_lcs(const BitString& x, const BitString& y) {
  const BitString& s = x.size() <= y.size() ? x : y;
  const BitString& t = x.size() <= y.size() ? y : x;
  if (s.size() > 24) throw CapacityError("brute_force_lcs: shorter string longer than 24");
  std::size_t best = 0;
  const std::uint32_t limit = std::uint32_t{1} << s.size();
  for (std::uint32_t mask = 0; mask < limit; ++mask) {
    const auto k = static_cast<std::size_t>(std::popcount(mask));
    if (k <= best) continue;
    std::size_t pos = 0;
    bool ok = true;
    for (std::size_t i = 0; i < s.size() && ok; ++i) {
      if (!(mask >> i & 1u)) continue;
      while (pos < t.size() && t[pos] != s[i]) ++pos;
      if (pos == t.size()) ok = false;
      else ++pos;
    }
    if (ok) best = k;
  }
  return best;
}

struct BadLemmaReport {
  bool holds = true;
  bool vacuous = false;  // LCS(x, y) < (1 - delta)|x|
  std::size_t blocks = 0;
  std::size_t bad_blocks = 0;  // blocks with LCS(I, J_I) < (1 - sqrt(delta))|I|
  Rational limit;              // sqrt(delta) |x| / w'
};

/// If LCS(x, y) >= (1 - delta)|x|, all but at most sqrt(delta)|x|/w' blocks
/// of width w' satisfy LCS(I, J_I) >= (1 - sqrt(delta))|I| where J_I is the
/// matched window under the canonical matching.
inline BadLemmaReport lemma_bad_check(const BitString& x, const BitString& y, std::size_t block,
                                      const Params& params) {
  if (block == 0 || x.size() % block != 0) throw ContractError("lemma_bad_check: block width must divide |x|");
  BadLemmaReport rep;
  const Rational sd = params.sqrt_delta();
  const auto n = static_cast<long long>(x.size());
  rep.blocks = x.size() / block;
  rep.limit = sd * n / static_cast<long long>(block);
  const TracedLcs t = exact_lcs_traced(x, y);
  if (Rational(static_cast<long long>(t.length)) < (1 - params.delta) * n) {
    rep.vacuous = true;
    return rep;
  }
  for (std::size_t b = 0; b < rep.blocks; ++b) {
    const Interval in_x{static_cast<index_t>(b * block), static_cast<index_t>((b + 1) * block)};
    const Interval in_y = matched_window(t.trace, in_x);
    const auto v = static_cast<long long>(exact_lcs(x, in_x, y, in_y));
    if (Rational(v) < (1 - sd) * static_cast<long long>(block)) ++rep.bad_blocks;
  }
  rep.holds = Rational(static_cast<long long>(rep.bad_blocks)) <= rep.limit;
  return rep;
}

}  // namespace blcs::oracle
