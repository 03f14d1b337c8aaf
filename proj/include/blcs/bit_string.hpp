#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "blcs/error.hpp"

namespace blcs {

using index_t = std::uint32_t;

// Half-open index range. Interval{lo, hi} denotes positions lo+1..hi in the
// 1-based convention, i.e. the 0-based bits [lo, hi).
struct Interval {
  index_t lo = 0;
  index_t hi = 0;

  constexpr Interval() = default;
  constexpr Interval(index_t lo_, index_t hi_) : lo(lo_), hi(hi_) {}

  constexpr index_t length() const noexcept { return hi - lo; }
  constexpr bool empty() const noexcept { return hi == lo; }

  constexpr bool contains(Interval other) const noexcept {
    return lo <= other.lo && other.hi <= hi;
  }
  constexpr bool disjoint(Interval other) const noexcept {
    return other.hi <= lo || hi <= other.lo;
  }
  // Strict precedence of the interval partial order: every element of *this
  // comes before every element of other.
  constexpr bool before(Interval other) const noexcept { return hi <= other.lo; }

  constexpr bool is_aligned(std::size_t w) const noexcept {
    return lo % w == 0 && hi % w == 0;
  }

  constexpr Interval shifted(index_t by) const noexcept { return {lo + by, hi + by}; }

  friend constexpr bool operator==(Interval, Interval) = default;
  friend constexpr auto operator<=>(Interval, Interval) = default;
};

/// Largest w-aligned subinterval of I. Empty results are returned as [c, c]
/// with c = ceil(lo / w) * w clamped into I.
constexpr Interval round_w(Interval interval, std::size_t w) {
  if (w == 0) throw ContractError("round_w: width must be positive");
  const std::size_t lo = (interval.lo + w - 1) / w * w;
  const std::size_t hi = interval.hi / w * w;
  if (lo >= hi) {
    const auto anchor = static_cast<index_t>(std::min<std::size_t>(lo, interval.hi));
    return {anchor, anchor};
  }
  return {static_cast<index_t>(lo), static_cast<index_t>(hi)};
}

/// Immutable binary string with O(1) interval counting and O(1) select on
/// ones. Stores the packed bits, prefix one-counts and one positions.
class BitString {
 public:
  BitString() : prefix_ones_(1, 0) {}

  /// Strict constructor: every character must be '0' or '1'.
  explicit BitString(std::string_view text) {
    std::vector<std::uint8_t> bits;
    bits.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
      const char c = text[i];
      if (c != '0' && c != '1') {
        throw ParseError("invalid character in bit string at byte offset " + std::to_string(i), i);
      }
      bits.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    build(bits);
  }

  static BitString from_bits(std::span<const std::uint8_t> bits) {
    BitString s;
    s.build(bits);
    return s;
  }

  /// b^n
  static BitString repeat(bool bit, std::size_t n) {
    std::vector<std::uint8_t> bits(n, bit ? 1 : 0);
    return from_bits(bits);
  }

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }
  Interval full() const noexcept { return {0, static_cast<index_t>(size_)}; }

  bool operator[](std::size_t i) const noexcept { return (words_[i >> 6] >> (i & 63)) & 1u; }

  std::size_t ones() const noexcept { return prefix_ones_.back(); }
  std::size_t zeros() const noexcept { return size_ - ones(); }
  std::size_t count(bool bit) const noexcept { return bit ? ones() : zeros(); }

  /// Number of one bits among the first i bits.
  std::size_t rank1(std::size_t i) const noexcept { return prefix_ones_[i]; }
  std::size_t rank0(std::size_t i) const noexcept { return i - prefix_ones_[i]; }

  std::size_t count_ones(Interval in) const {
    check(in);
    return prefix_ones_[in.hi] - prefix_ones_[in.lo];
  }
  std::size_t count_zeros(Interval in) const { return in.length() - count_ones(in); }
  std::size_t count(bool bit, Interval in) const {
    return bit ? count_ones(in) : count_zeros(in);
  }

  /// 0-based position of the k-th one (k is 0-based).
  index_t one_position(std::size_t k) const noexcept { return ones_positions_[k]; }
  std::span<const index_t> ones_positions() const noexcept { return ones_positions_; }
  std::span<const index_t> prefix_ones() const noexcept { return prefix_ones_; }

  BitString substr(Interval in) const {
    check(in);
    std::vector<std::uint8_t> bits(in.length());
    for (index_t i = in.lo; i < in.hi; ++i) bits[i - in.lo] = (*this)[i];
    return from_bits(bits);
  }

  BitString complement() const {
    std::vector<std::uint8_t> bits = unpack();
    for (auto& b : bits) b ^= 1u;
    return from_bits(bits);
  }

  std::vector<std::uint8_t> unpack() const { return unpack(full()); }
  std::vector<std::uint8_t> unpack(Interval in) const {
    check(in);
    std::vector<std::uint8_t> bits(in.length());
    for (index_t i = in.lo; i < in.hi; ++i) bits[i - in.lo] = (*this)[i];
    return bits;
  }

  std::string to_string() const {
    std::string out(size_, '0');
    for (std::size_t i = 0; i < size_; ++i) {
      if ((*this)[i]) out[i] = '1';
    }
    return out;
  }

  void check(Interval in) const {
    if (in.lo > in.hi || in.hi > size_) [[unlikely]] out_of_range(in);
  }

  [[noreturn, gnu::cold, gnu::noinline]] void out_of_range(Interval in) const {
    throw std::out_of_range("interval [" + std::to_string(in.lo) + "," + std::to_string(in.hi) +
                            "] outside string of length " + std::to_string(size_));
  }

  friend bool operator==(const BitString& a, const BitString& b) {
    return a.size_ == b.size_ && a.words_ == b.words_;
  }

 private:
  void build(std::span<const std::uint8_t> bits) {
    if (bits.size() > UINT32_MAX - 1) throw CapacityError("bit strings are limited to 2^32-2 bits");
    size_ = bits.size();
    words_.assign((size_ + 63) / 64, 0);
    prefix_ones_.assign(size_ + 1, 0);
    ones_positions_.clear();
    for (std::size_t i = 0; i < size_; ++i) {
      const bool b = bits[i] != 0;
      if (b) {
        words_[i >> 6] |= std::uint64_t{1} << (i & 63);
        ones_positions_.push_back(static_cast<index_t>(i));
      }
      prefix_ones_[i + 1] = prefix_ones_[i] + (b ? 1u : 0u);
    }
  }

  std::vector<std::uint64_t> words_;
  std::size_t size_ = 0;
  std::vector<index_t> prefix_ones_;
  std::vector<index_t> ones_positions_;
};

/// Lenient parser for the text input format: surrounding whitespace is
/// trimmed, interior line breaks (and whitespace adjacent to them) are
/// ignored, and the remaining bits of all lines are concatenated.
inline BitString parse_bits(std::string_view text) {
  std::vector<std::uint8_t> bits;
  bits.reserve(text.size());
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    // One line: [i, eol)
    std::size_t eol = text.find('\n', i);
    if (eol == std::string_view::npos) eol = n;
    std::size_t a = i;
    std::size_t b = eol;
    auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; };
    while (a < b && is_space(text[a])) ++a;
    while (b > a && is_space(text[b - 1])) --b;
    for (std::size_t k = a; k < b; ++k) {
      const char c = text[k];
      if (c != '0' && c != '1') {
        throw ParseError("invalid character in bit string at byte offset " + std::to_string(k), k);
      }
      bits.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    i = eol + 1;
  }
  return BitString::from_bits(bits);
}

/// Removes the rightmost `k` occurrences of `bit`.
inline BitString delete_rightmost(const BitString& s, bool bit, std::size_t k) {
  if (k > s.count(bit)) throw ContractError("delete_rightmost: not enough bits to delete");
  std::vector<std::uint8_t> bits = s.unpack();
  std::vector<std::uint8_t> keep(bits.size(), 1);
  for (std::size_t i = bits.size(); i-- > 0 && k > 0;) {
    if ((bits[i] != 0) == bit) {
      keep[i] = 0;
      --k;
    }
  }
  std::vector<std::uint8_t> out;
  out.reserve(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (keep[i]) out.push_back(bits[i]);
  }
  return BitString::from_bits(out);
}

}  // namespace blcs
