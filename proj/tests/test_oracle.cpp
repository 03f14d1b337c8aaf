#include <gtest/gtest.h>

#include "blcs/oracle.hpp"
#include "support.hpp"

using namespace blcs;
using blcs::test::Rng;

namespace {

CertifiedRectangle rect(index_t a, index_t b, index_t c, index_t d, std::uint32_t k) {
  return {{a, b}, {c, d}, k, Source::trivial};
}

std::vector<Interval> block_windows(const MatchingTrace& t, std::size_t n, std::size_t w) {
  std::vector<Interval> out;
  for (std::size_t b = 0; b * w < n; ++b) {
    out.push_back(oracle::matched_window(t, {static_cast<index_t>(b * w), static_cast<index_t>((b + 1) * w)}));
  }
  return out;
}

}  // namespace

TEST(MatchedWindow, IdentityMatching) {
  const BitString x("0110100111");
  const auto t = exact_lcs_traced(x, x);
  ASSERT_EQ(t.length, x.size());
  const Interval j = oracle::matched_window(t.trace, {2, 5});
  EXPECT_EQ(j.lo, 2u);
  EXPECT_EQ(j.hi, 5u);
}

TEST(MatchedWindow, DisjointBlocksGetDisjointWindows) {
  Rng rng(7);
  for (int rep = 0; rep < 300; ++rep) {
    const BitString x = rng.bits(8 * rng.between(1, 8));
    const BitString y = rng.bits(rng.between(1, 80));
    const auto t = exact_lcs_traced(x, y);
    const auto wins = block_windows(t.trace, x.size(), 8);
    for (std::size_t a = 0; a + 1 < wins.size(); ++a) {
      ASSERT_LE(wins[a].hi, wins[a + 1].lo);
    }
    for (const auto& [i, j] : t.trace.pairs) {
      const Interval win = wins[i / 8];
      ASSERT_TRUE(win.lo <= j && j < win.hi);
    }
  }
}

TEST(MatchedWindow, UnmatchedBlockIsEmptyBetweenNeighbours) {
  // The ones block cannot be matched into an all-zeros y.
  const BitString x("000011110000"), y("00000000");
  const auto t = exact_lcs_traced(x, y);
  ASSERT_EQ(t.length, 8u);
  const auto wins = block_windows(t.trace, x.size(), 4);
  ASSERT_EQ(wins.size(), 3u);
  EXPECT_TRUE(wins[1].empty());
  EXPECT_EQ(wins[1].lo, wins[0].hi);
  EXPECT_LE(wins[1].hi, wins[2].lo);
}

TEST(BruteOrderedMax, Examples) {
  EXPECT_EQ(oracle::brute_ordered_max({}), 0u);
  const std::vector<CertifiedRectangle> one = {rect(0, 4, 0, 4, 5)};
  EXPECT_EQ(oracle::brute_ordered_max(one), 5u);

  std::vector<CertifiedRectangle> rs = {rect(0, 4, 0, 4, 2), rect(4, 8, 4, 8, 3), rect(8, 12, 8, 12, 4),
                                        rect(0, 12, 0, 12, 7)};
  // Subsets by hand: the heavy one crosses every chain member.
  std::uint64_t best = 0;
  for (std::uint32_t mask = 0; mask < 16; ++mask) {
    bool ok = true;
    std::uint64_t sum = 0;
    for (int a = 0; a < 4; ++a) {
      if (!(mask >> a & 1u)) continue;
      sum += rs[a].kappa;
      for (int b = 0; b < a; ++b) {
        if ((mask >> b & 1u) && !rs[a].comparable(rs[b])) ok = false;
      }
    }
    if (ok) best = std::max(best, sum);
  }
  EXPECT_EQ(best, 9u);
  EXPECT_EQ(oracle::brute_ordered_max(rs), 9u);
  rs[3].kappa = 11;
  EXPECT_EQ(oracle::brute_ordered_max(rs), 11u);
}

TEST(BruteOrderedMax, CapacityGuard) {
  std::vector<CertifiedRectangle> rs;
  for (index_t k = 0; k < 21; ++k) rs.push_back(rect(k, k + 1, k, k + 1, 1));
  EXPECT_THROW(oracle::brute_ordered_max(rs), CapacityError);
  rs.pop_back();
  EXPECT_EQ(oracle::brute_ordered_max(rs), 20u);
}

TEST(BruteForceLcs, AgreesWithBitVector) {
  Rng rng(11);
  for (int rep = 0; rep < 2000; ++rep) {
    const BitString x = rng.bits(rng.below(13)), y = rng.bits(rng.below(20));
    ASSERT_EQ(oracle::brute_force_lcs(x, y), test::bitvector_lcs(x, y));
  }
  EXPECT_THROW(oracle::brute_force_lcs(BitString(std::string(25, '0')), BitString(std::string(30, '1'))),
               CapacityError);
}

TEST(LemmaBad, IdenticalStringsHaveNoBadBlocks) {
  Rng rng(13);
  const BitString x = rng.bits(256);
  const auto rep = oracle::lemma_bad_check(x, x, 16, Params::desk());
  EXPECT_FALSE(rep.vacuous);
  EXPECT_TRUE(rep.holds);
  EXPECT_EQ(rep.bad_blocks, 0u);
  EXPECT_EQ(rep.blocks, 16u);
}

TEST(LemmaBad, ScatteredDeletionsStayWithinLimit) {
  Rng rng(17);
  const Params p = Params::desk();  // delta = 1/16, sqrt(delta) = 1/4
  for (int rep = 0; rep < 40; ++rep) {
    const BitString x = rng.bits(512);
    std::vector<std::uint8_t> bits = x.unpack();
    for (int k = 0; k < 512 / 16; ++k) bits.erase(bits.begin() + rng.below(bits.size()));
    const BitString y = BitString::from_bits(bits);
    const auto r = oracle::lemma_bad_check(x, y, 32, p);
    ASSERT_FALSE(r.vacuous);
    ASSERT_TRUE(r.holds);
    ASSERT_LE(Rational(static_cast<long long>(r.bad_blocks)), Rational(512, 4 * 32));

    // Recount independently from the trace.
    const auto t = exact_lcs_traced(x, y);
    std::size_t bad = 0;
    for (std::size_t b = 0; b < 16; ++b) {
      const Interval in_x{static_cast<index_t>(b * 32), static_cast<index_t>(b * 32 + 32)};
      const Interval in_y = oracle::matched_window(t.trace, in_x);
      if (4 * test::bitvector_lcs(x.substr(in_x), y.substr(in_y)) < 3 * 32) ++bad;
    }
    ASSERT_EQ(bad, r.bad_blocks);
  }
}

TEST(LemmaBad, VacuousWhenFarApart) {
  const BitString x(std::string(64, '0')), y(std::string(64, '1'));
  const auto r = oracle::lemma_bad_check(x, y, 8, Params::desk());
  EXPECT_TRUE(r.vacuous);
  EXPECT_TRUE(r.holds);
  EXPECT_THROW(oracle::lemma_bad_check(x, y, 7, Params::desk()), ContractError);
}
