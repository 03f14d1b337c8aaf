#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "blcs/bit_string.hpp"
#include "blcs/covering.hpp"
#include "blcs/dp.hpp"
#include "blcs/error.hpp"
#include "blcs/lcs.hpp"
#include "blcs/params.hpp"

namespace blcs {

// ---------------------------------------------------------------------------
// Imbalanced-case oracle

/// Stand-in for the linear-time (1/2 + delta)-approximation on pairs with
/// |x| <= |y| and 0(x) = 1(y) <= (1/2 - rho)|x|.
class ImbalancedOracle {
 public:
  virtual ~ImbalancedOracle() = default;
  virtual std::string_view name() const = 0;

  std::size_t lcs(const BitString& x, const BitString& y, const Rational& rho) const {
    check(x, y, rho);
    return compute(x, y);
  }

  /// A common subsequence of length lcs(x, y), if the implementation can
  /// produce one.
  virtual std::optional<BitString> witness(const BitString& x, const BitString& y) const = 0;

  static void check(const BitString& x, const BitString& y, const Rational& rho) {
    if (x.size() > y.size()) throw ContractError("imbalanced oracle: requires |x| <= |y|");
    if (x.zeros() != y.ones()) {
      throw ContractError("imbalanced oracle: requires 0(x) = 1(y), got " + std::to_string(x.zeros()) + " and " +
                          std::to_string(y.ones()));
    }
    if (Rational(static_cast<long long>(x.zeros())) > (Rational(1, 2) - rho) * static_cast<long long>(x.size())) {
      throw ContractError("imbalanced oracle: requires 0(x) <= (1/2 - rho)|x|");
    }
  }

 protected:
  virtual std::size_t compute(const BitString& x, const BitString& y) const = 0;
};

class ExactImbalancedOracle final : public ImbalancedOracle {
 public:
  std::string_view name() const override { return "exact"; }
  std::optional<BitString> witness(const BitString& x, const BitString& y) const override {
    return exact_lcs_witness(x, x.full(), y, y.full());
  }

 protected:
  std::size_t compute(const BitString& x, const BitString& y) const override { return exact_lcs(x, y); }
};

class TrivialImbalancedOracle final : public ImbalancedOracle {
 public:
  std::string_view name() const override { return "trivial"; }
  std::optional<BitString> witness(const BitString& x, const BitString& y) const override {
    return BitString::repeat(trivial_bit(x, x.full(), y, y.full()), trivial_lcs(x, y));
  }

 protected:
  std::size_t compute(const BitString& x, const BitString& y) const override { return trivial_lcs(x, y); }
};

class HookImbalancedOracle final : public ImbalancedOracle {
 public:
  using Fn = std::function<std::size_t(const BitString&, const BitString&)>;

  explicit HookImbalancedOracle(Fn fn, std::string name = "hook") : fn_(std::move(fn)), name_(std::move(name)) {}

  std::string_view name() const override { return name_; }
  std::optional<BitString> witness(const BitString&, const BitString&) const override { return std::nullopt; }

 protected:
  std::size_t compute(const BitString& x, const BitString& y) const override { return fn_(x, y); }

 private:
  Fn fn_;
  std::string name_;
};

inline std::unique_ptr<ImbalancedOracle> make_imbalanced_oracle(std::string_view name) {
  if (name == "exact") return std::make_unique<ExactImbalancedOracle>();
  if (name == "trivial") return std::make_unique<TrivialImbalancedOracle>();
  throw ConfigError("unknown imbalanced oracle '" + std::string(name) + "' (expected exact|trivial)");
}

struct Oracles {
  const EqLcsOracle* eq = nullptr;
  const ImbalancedOracle* imbalanced = nullptr;
};

/// Process-wide default stand-ins (both exact).
inline Oracles default_oracles() {
  static const ExactEqOracle eq;
  static const ExactImbalancedOracle imb;
  return {&eq, &imb};
}

// ---------------------------------------------------------------------------
// Trace

enum class StepKind : std::uint8_t { swap_xy, complement_bits, truncate_zeros, truncate_blocks, case_label };

struct ReductionStep {
  StepKind kind = StepKind::case_label;
  std::size_t x_count = 0;  // truncate_zeros: zeros removed; truncate_blocks: bits removed
  std::size_t y_count = 0;
  std::string label;  // case_label only

  static ReductionStep make(StepKind k, std::size_t x = 0, std::size_t y = 0) { return {k, x, y, {}}; }
  static ReductionStep named(std::string l) { return {StepKind::case_label, 0, 0, std::move(l)}; }

  std::string to_string() const {
    switch (kind) {
      case StepKind::swap_xy: return "swap_xy";
      case StepKind::complement_bits: return "complement_bits";
      case StepKind::truncate_zeros:
        return "truncate_zeros(" + std::to_string(x_count) + "," + std::to_string(y_count) + ")";
      case StepKind::truncate_blocks:
        return "truncate_blocks(" + std::to_string(x_count) + "," + std::to_string(y_count) + ")";
      case StepKind::case_label: return label;
    }
    return "?";
  }
};

struct ReductionTrace {
  std::vector<ReductionStep> steps;
  std::uint64_t final_bound = 0;

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    for (const auto& s : steps) out.push_back(s.to_string());
    return out;
  }
  std::optional<std::string> case_label() const {
    for (const auto& s : steps) {
      if (s.kind == StepKind::case_label) return s.label;
    }
    return std::nullopt;
  }
};

/// Trims x (balanced) and y to multiples of w. x loses equally many zeros and
/// ones from the right; y repeatedly loses its rightmost majority bit. If the
/// cover precondition then fails, x drops further whole blocks.
inline std::pair<BitString, BitString> truncate_to_blocks(const BitString& x, const BitString& y, std::size_t w) {
  BitString a = x;
  BitString b = y;
  std::size_t r = a.size() % w;
  if (r % 2 != 0) throw ContractError("truncate_to_blocks: x must be balanced");
  if (r > 0) a = delete_rightmost(delete_rightmost(a, false, r / 2), true, r / 2);
  for (std::size_t k = b.size() % w; k > 0; --k) b = delete_rightmost(b, b.ones() > b.zeros(), 1);
  while (!a.empty() && a.ones() > std::min(b.ones(), b.zeros())) {
    if (w < 2) {
      a = BitString();
      break;
    }
    a = delete_rightmost(delete_rightmost(a, false, w / 2), true, w / 2);
  }
  return {std::move(a), std::move(b)};
}

struct ApproxOptions {
  bool trace_chain = false;
  bool reconstruct = false;
  CoverOptions cover;
};

struct ApproxResult {
  std::uint64_t bound = 0;
  std::uint64_t trivial = 0;
  ReductionTrace trace;
  std::optional<PipelineResult> pipeline;  // present when the rectangle DP ran
  std::size_t block_width = 0;
  std::optional<BitString> subsequence;    // when reconstruction was requested and possible
};

namespace detail {

class Reducer {
 public:
  Reducer(const Params& params, Oracles oracles, const ApproxOptions& options)
      : params_(params), oracles_(oracles), options_(options) {
    if (!oracles_.eq || !oracles_.imbalanced) throw ContractError("approx: both oracles must be set");
  }

  // Balanced-case dispatch. Returns the inner bound and, if requested, its
  // witness over the pair (a, b) as given.
  std::pair<std::uint64_t, std::optional<BitString>> balanced(const BitString& a, const BitString& b,
                                                              ApproxResult& out) {
    const std::size_t zx = a.zeros(), ox = a.ones(), zy = b.zeros(), oy = b.ones();
    const std::size_t m0 = std::min(zx, zy);
    if (a.size() > b.size() || m0 != std::min(ox, oy)) {
      throw ContractError("balanced_approx: requires |x| <= |y| and min(1(x),1(y)) = min(0(x),0(y))");
    }
    if (zx == m0 && ox == m0) {
      label(out, "case1");
      return pipeline(a, b, out);
    }
    if (zy == m0 && ox == m0) return case2(a, b, out, "case2");
    // zx == m0 && oy == m0: complementing both maps this onto case 2.
    out.trace.steps.push_back(ReductionStep::make(StepKind::complement_bits));
    auto [v, s] = case2(a.complement(), b.complement(), out, "case3");
    if (s) s = s->complement();
    return {v, std::move(s)};
  }

 private:
  void label(ApproxResult& out, std::string l) {
    out.trace.steps.push_back(ReductionStep::named(std::move(l)));
  }

  std::pair<std::uint64_t, std::optional<BitString>> case2(const BitString& a, const BitString& b, ApproxResult& out,
                                                           const std::string& name) {
    const std::size_t zx = a.zeros(), ox = a.ones();
    if (Rational(static_cast<long long>(ox)) >= (Rational(1, 2) - params_.rho) * static_cast<long long>(a.size())) {
      label(out, name + "a");
      out.trace.steps.push_back(ReductionStep::make(StepKind::truncate_zeros, zx - ox, 0));
      return pipeline(delete_rightmost(a, false, zx - ox), b, out);
    }
    label(out, name + "b");
    // 1(a) = 0(b) <= (1/2 - rho)|a|; complemented, this is the oracle's contract.
    const BitString ca = a.complement();
    const BitString cb = b.complement();
    const std::uint64_t v = oracles_.imbalanced->lcs(ca, cb, params_.rho);
    std::optional<BitString> s;
    if (options_.reconstruct) {
      if (auto wit = oracles_.imbalanced->witness(ca, cb)) s = wit->complement();
    }
    return {v, std::move(s)};
  }

  std::pair<std::uint64_t, std::optional<BitString>> pipeline(const BitString& a, const BitString& b,
                                                              ApproxResult& out) {
    if (a.empty()) return {0, BitString()};
    Params p = params_.with_layout(a.size(), b.size());
    auto [ta, tb] = truncate_to_blocks(a, b, p.w);
    out.trace.steps.push_back(ReductionStep::make(StepKind::truncate_blocks, a.size() - ta.size(), b.size() - tb.size()));
    out.block_width = p.w;
    if (ta.empty()) return {0, BitString()};
    p.m_x = ta.size() / p.w;
    p.m_y = tb.size() / p.w;
    const bool want_chain = options_.trace_chain || options_.reconstruct;
    PipelineResult res = run_full_lcs(ta, tb, p, *oracles_.eq, want_chain, options_.cover);
    std::optional<BitString> s;
    if (options_.reconstruct) s = reconstruct(ta, tb, res.chain, p);
    const std::uint64_t v = res.bound;
    out.pipeline = std::move(res);
    return {v, std::move(s)};
  }

  Params params_;
  Oracles oracles_;
  const ApproxOptions& options_;
};

inline void finish(ApproxResult& out, const BitString& x, const BitString& y, std::uint64_t inner,
                   std::optional<BitString> witness, const ApproxOptions& options) {
  out.bound = std::max(inner, out.trivial);
  out.trace.final_bound = out.bound;
  if (!options.reconstruct) return;
  if (out.trivial >= inner) {
    out.subsequence = BitString::repeat(trivial_bit(x, x.full(), y, y.full()), out.trivial);
  } else if (witness && witness->size() == inner) {
    out.subsequence = std::move(witness);
  }
}

}  // namespace detail

/// The balanced-case solver. Requires |x| <= |y| and
/// min(1(x),1(y)) = min(0(x),0(y)); the bound never drops below Trivial.
inline ApproxResult balanced_approx(const BitString& x, const BitString& y, const Params& params,
                                    Oracles oracles = default_oracles(), const ApproxOptions& options = {}) {
  params.validate();
  ApproxResult out;
  out.trivial = trivial_lcs(x, y);
  detail::Reducer r(params, oracles, options);
  auto [inner, wit] = r.balanced(x, y, out);
  detail::finish(out, x, y, inner, std::move(wit), options);
  return out;
}

/// Sound lower bound on LCS(x, y): at least Trivial(x, y), hence at least
/// LCS/2, and never above LCS.
inline ApproxResult approx_lcs(const BitString& x, const BitString& y, const Params& params,
                               Oracles oracles = default_oracles(), const ApproxOptions& options = {}) {
  params.validate();
  ApproxResult out;
  out.trivial = trivial_lcs(x, y);

  BitString a = x;
  BitString b = y;
  if (a.size() > b.size()) {
    std::swap(a, b);
    out.trace.steps.push_back(ReductionStep::make(StepKind::swap_xy));
  }
  std::size_t min0 = std::min(a.zeros(), b.zeros());
  std::size_t min1 = std::min(a.ones(), b.ones());
  bool flipped = false;
  if (min0 < min1) {
    a = a.complement();
    b = b.complement();
    std::swap(min0, min1);
    flipped = true;
    out.trace.steps.push_back(ReductionStep::make(StepKind::complement_bits));
  }
  if (Rational(static_cast<long long>(min0)) >= (1 + params.delta0) * static_cast<long long>(min1)) {
    out.trace.steps.push_back(ReductionStep::named("trivial_shortcut"));
    detail::finish(out, x, y, 0, std::nullopt, options);
    return out;
  }
  if (const std::size_t d = min0 - min1; d > 0) {
    a = delete_rightmost(a, false, d);
    b = delete_rightmost(b, false, d);
    out.trace.steps.push_back(ReductionStep::make(StepKind::truncate_zeros, d, d));
  }
  detail::Reducer r(params, oracles, options);
  auto [inner, wit] = r.balanced(a, b, out);
  if (wit && flipped) wit = wit->complement();
  detail::finish(out, x, y, inner, std::move(wit), options);
  return out;
}

/// Applies the recorded steps to (x, y) and returns the pair handed to the
/// inner solver (the rectangle DP or the imbalanced oracle).
inline std::pair<BitString, BitString> replay(const BitString& x, const BitString& y, const ReductionTrace& trace,
                                              const Params& params) {
  BitString a = x;
  BitString b = y;
  std::string current_case;
  for (const auto& s : trace.steps) {
    switch (s.kind) {
      case StepKind::swap_xy: std::swap(a, b); break;
      case StepKind::complement_bits:
        a = a.complement();
        b = b.complement();
        break;
      case StepKind::truncate_zeros:
        a = delete_rightmost(a, false, s.x_count);
        b = delete_rightmost(b, false, s.y_count);
        break;
      case StepKind::truncate_blocks: {
        const std::size_t w = params.with_layout(a.size(), b.size()).w;
        std::tie(a, b) = truncate_to_blocks(a, b, w);
        break;
      }
      case StepKind::case_label: current_case = s.label; break;
    }
  }
  if (current_case == "case2b" || current_case == "case3b") return {a.complement(), b.complement()};
  return {std::move(a), std::move(b)};
}

}  // namespace blcs
