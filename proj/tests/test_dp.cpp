#include <gtest/gtest.h>

#include "blcs/dp.hpp"
#include "blcs/oracle.hpp"
#include "support.hpp"

using namespace blcs;
using blcs::test::Rng;

namespace {

// gamma w = 4, theta w = 1 on w = 8.
Params grid_params() { return Params::desk().with_block_width(8); }

CertifiedRectangle rect(index_t a, index_t b, index_t c, index_t d, std::uint32_t k, Source s = Source::trivial) {
  return {{a, b}, {c, d}, k, s};
}

std::vector<CertifiedRectangle> random_rects(Rng& rng, std::size_t count, std::size_t rows, std::size_t cols,
                                             std::size_t gw, std::size_t tw) {
  std::vector<CertifiedRectangle> out;
  while (out.size() < count) {
    const std::size_t i0 = rng.below(rows), i1 = rng.between(i0 + 1, rows);
    const std::size_t j0 = rng.below(cols), j1 = rng.between(j0 + 1, cols);
    out.push_back(rect(static_cast<index_t>(i0 * gw), static_cast<index_t>(i1 * gw), static_cast<index_t>(j0 * tw),
                       static_cast<index_t>(j1 * tw), static_cast<std::uint32_t>(rng.between(1, 20))));
  }
  return out;
}

std::pair<BitString, BitString> balanced_pair(std::size_t n, std::size_t m, Rng& rng) {
  std::vector<std::uint8_t> xb(n);
  for (std::size_t i = 0; i < n / 2; ++i) xb[i] = 1;
  for (std::size_t i = n; i > 1; --i) std::swap(xb[i - 1], xb[rng.below(i)]);
  for (;;) {
    const BitString y = rng.bits(m);
    if (std::min(y.ones(), y.zeros()) >= n / 2) return {BitString::from_bits(xb), y};
  }
}

}  // namespace

TEST(FullLcs, Examples) {
  const Params p = grid_params();
  const BitString x("01100110"), y("0101010101");
  const std::vector<CertifiedRectangle> global = {rect(0, 8, 0, 10, static_cast<std::uint32_t>(trivial_lcs(x, y)), Source::global)};
  EXPECT_EQ(full_lcs(x, y, global, p).bound, trivial_lcs(x, y));
  EXPECT_EQ(full_lcs(x, y, {}, p).bound, 0u);

  const std::vector<CertifiedRectangle> chain = {rect(0, 4, 0, 3, 2), rect(4, 8, 3, 10, 3)};
  EXPECT_EQ(full_lcs(8, 10, chain, p).bound, 5u);
  const std::vector<CertifiedRectangle> crossing = {rect(0, 4, 0, 6, 2), rect(4, 8, 3, 10, 3)};
  EXPECT_EQ(full_lcs(8, 10, crossing, p).bound, 3u);
}

TEST(FullLcs, Errors) {
  const Params p = grid_params();
  EXPECT_THROW(full_lcs(8, 10, std::vector{rect(1, 4, 0, 3, 2)}, p), ContractError);
  EXPECT_THROW(full_lcs(8, 10, std::vector{rect(0, 4, 0, 11, 2)}, p), ContractError);
  EXPECT_THROW(full_lcs(9, 10, std::vector<CertifiedRectangle>{}, p), ContractError);
  DpSweep sweep(2, 10, 4, 1);
  EXPECT_THROW(sweep.row(2, {}), ContractError);
  EXPECT_THROW(sweep.chain(), ContractError);
  const std::vector<CertifiedRectangle> wrong_row = {rect(0, 8, 0, 3, 1)};
  EXPECT_THROW(sweep.row(1, wrong_row), ContractError);
}

TEST(FullLcs, EqualsOrderedMaximum) {
  Rng rng(101);
  const Params p = grid_params();
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t rows = rng.between(1, 4), cols = rng.between(1, 10);
    const auto rects = random_rects(rng, rng.below(16), rows, cols, 4, 1);
    const auto res = full_lcs(rows * 4, cols, rects, p, true);
    ASSERT_EQ(res.bound, oracle::brute_ordered_max(rects));
    std::uint64_t sum = 0;
    for (std::size_t k = 0; k < res.chain.size(); ++k) {
      sum += res.chain[k].kappa;
      if (k > 0) {
        ASSERT_TRUE(res.chain[k - 1].before(res.chain[k]));
      }
      ASSERT_NE(std::find(rects.begin(), rects.end(), res.chain[k]), rects.end());
    }
    ASSERT_EQ(sum, res.bound);
  }
}

TEST(FullLcs, OrderOfInputDoesNotMatter) {
  Rng rng(103);
  const Params p = grid_params();
  for (int rep = 0; rep < 200; ++rep) {
    auto rects = random_rects(rng, 12, 3, 8, 4, 1);
    const auto a = full_lcs(12, 8, rects, p, true);
    std::reverse(rects.begin(), rects.end());
    const auto b = full_lcs(12, 8, rects, p, true);
    ASSERT_EQ(a.bound, b.bound);
  }
}

TEST(FullLcs, GridSoundAndMonotone) {
  Rng rng(107);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t w = 16;
    auto [x, y] = balanced_pair(64, 16 * rng.between(4, 8), rng);
    const Params p = Params::desk().with_block_width(w);
    const CoverEngine engine(x, y, p, ExactEqOracle());
    DpSweep sweep(engine.rows(), engine.cols(), engine.gamma_w(), engine.theta_w());
    std::vector<CertifiedRectangle> buf;
    for (std::size_t i = 1; i <= engine.rows(); ++i) {
      buf.clear();
      engine.row(i, buf);
      sweep.row(i, buf);
    }
    for (std::size_t i = 0; i <= sweep.rows(); ++i) {
      for (std::size_t j = 0; j <= sweep.cols(); ++j) {
        if (i > 0) {
          ASSERT_GE(sweep.value(i, j), sweep.value(i - 1, j));
        }
        if (j > 0) {
          ASSERT_GE(sweep.value(i, j), sweep.value(i, j - 1));
        }
        const BitString xp = x.substr({0, static_cast<index_t>(i * engine.gamma_w())});
        const BitString yp = y.substr({0, static_cast<index_t>(j * engine.theta_w())});
        ASSERT_LE(sweep.value(i, j), test::bitvector_lcs(xp, yp));
      }
    }
    ASSERT_GE(sweep.result(), trivial_lcs(x, y));
  }
}

TEST(Pipeline, MatchesMaterializedCover) {
  Rng rng(109);
  for (int rep = 0; rep < 10; ++rep) {
    auto [x, y] = balanced_pair(256, 512, rng);
    const Params p = Params::desk().with_block_width(32);
    const ExactEqOracle eq;
    const auto rects = cover(x, y, p, eq);
    const auto a = full_lcs(x, y, rects, p, true);
    const auto b = run_full_lcs(x, y, p, eq, true);
    ASSERT_EQ(a.bound, b.bound);
    ASSERT_EQ(a.chain, b.chain);
    ASSERT_EQ(b.counts.total(), rects.size());
    ASSERT_LE(b.bound, exact_lcs(x, y));
    ASSERT_GE(b.bound, trivial_lcs(x, y));
  }
}

TEST(Pipeline, ReconstructionIsCommonSubsequence) {
  Rng rng(113);
  for (int rep = 0; rep < 20; ++rep) {
    auto [x, y] = balanced_pair(512, 1024, rng);
    const Params p = Params::desk().with_block_width(64);
    const auto res = run_full_lcs(x, y, p, ExactEqOracle(), true);
    const BitString z = reconstruct(x, y, res.chain, p);
    ASSERT_EQ(z.size(), res.bound);
    ASSERT_TRUE(is_subsequence(z, x));
    ASSERT_TRUE(is_subsequence(z, y));
    for (const auto& r : res.chain) {
      const BitString part = rectangle_witness(x, y, r, p);
      ASSERT_TRUE(is_subsequence(part, x, r.I));
      ASSERT_TRUE(is_subsequence(part, y, r.J));
    }
  }
}

TEST(Pipeline, Deterministic) {
  Rng rng(127);
  auto [x, y] = balanced_pair(512, 1024, rng);
  const Params p = Params::desk().with_block_width(64);
  const auto a = run_full_lcs(x, y, p, ExactEqOracle(), true);
  const auto b = run_full_lcs(x, y, p, ExactEqOracle(), true);
  EXPECT_EQ(a.bound, b.bound);
  EXPECT_EQ(a.chain, b.chain);
}
