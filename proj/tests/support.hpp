#pragma once

// Test-side helpers. Nothing here calls into the DP being tested: the LCS
// oracle below is an independent bit-vector formulation.

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "blcs/bench.hpp"
#include "blcs/bit_string.hpp"

namespace blcs::test {

/// Bit-vector LCS: the number of zero bits among the low |a| bits of V after
/// one pass over b. Multi-word, with the carry of V + U rippling upwards.
inline std::size_t bitvector_lcs(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
  const std::size_t n = a.size();
  if (n == 0) return 0;
  const std::size_t words = (n + 63) / 64;
  std::vector<std::uint64_t> match[2] = {std::vector<std::uint64_t>(words), std::vector<std::uint64_t>(words)};
  for (std::size_t i = 0; i < n; ++i) match[a[i]][i / 64] |= std::uint64_t{1} << (i % 64);
  std::vector<std::uint64_t> v(words, ~std::uint64_t{0});
  for (std::uint8_t c : b) {
    std::uint64_t carry = 0;
    for (std::size_t k = 0; k < words; ++k) {
      const std::uint64_t u = v[k] & match[c][k];
      const std::uint64_t sum = v[k] + u;
      const std::uint64_t out = sum + carry;
      const std::uint64_t next = (sum < v[k]) | (out < sum);
      v[k] = out | (v[k] & ~u);
      carry = next;
    }
  }
  std::size_t zeros = 0;
  for (std::size_t i = 0; i < n; ++i) zeros += !(v[i / 64] >> (i % 64) & 1u);
  return zeros;
}

inline std::size_t bitvector_lcs(const BitString& a, const BitString& b) {
  return a.size() <= b.size() ? bitvector_lcs(a.unpack(), b.unpack()) : bitvector_lcs(b.unpack(), a.unpack());
}

/// The n low bits of `mask` as a string, bit 0 first.
inline BitString from_mask(std::uint32_t mask, std::size_t n) {
  std::vector<std::uint8_t> bits(n);
  for (std::size_t i = 0; i < n; ++i) bits[i] = (mask >> i) & 1u;
  return BitString::from_bits(bits);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}

  std::uint64_t next() { return g_(); }
  /// Uniform in [0, n).
  std::size_t below(std::size_t n) { return n == 0 ? 0 : static_cast<std::size_t>(g_() % n); }
  std::size_t between(std::size_t lo, std::size_t hi) { return lo + below(hi - lo + 1); }
  bool coin() { return g_() & 1u; }

  BitString bits(std::size_t n, double p_one = 0.5) {
    std::vector<std::uint8_t> b(n);
    const auto thr = static_cast<std::uint64_t>(p_one * 18446744073709551615.0);
    for (auto& v : b) v = g_() < thr;
    return BitString::from_bits(b);
  }

 private:
  bench::SplitMix64 g_;
};

/// Up to `deletions` random deletions followed by up to `insertions` random
/// insertions of random bits.
inline BitString perturb(const BitString& s, std::size_t deletions, std::size_t insertions, Rng& rng) {
  std::vector<std::uint8_t> bits = s.unpack();
  const std::size_t d = rng.below(deletions + 1);
  for (std::size_t k = 0; k < d && !bits.empty(); ++k) bits.erase(bits.begin() + rng.below(bits.size()));
  const std::size_t ins = rng.below(insertions + 1);
  for (std::size_t k = 0; k < ins; ++k) {
    bits.insert(bits.begin() + rng.below(bits.size() + 1), static_cast<std::uint8_t>(rng.coin()));
  }
  return BitString::from_bits(bits);
}

/// A length-w block whose every length-4 window holds exactly two ones: a
/// shift of (01)* or (0011)*. These are the fine blocks at the desk constants.
inline BitString fine_block(std::size_t w, Rng& rng) {
  static const char* const units[] = {"01", "0011"};
  const std::string unit = units[rng.below(2)];
  const std::size_t shift = rng.below(unit.size());
  std::string s;
  while (s.size() < w + shift) s += unit;
  return BitString(std::string_view(s).substr(shift, w));
}

}  // namespace blcs::test
