#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <variant>
#include <vector>

#include "blcs/bit_string.hpp"
#include "blcs/covering.hpp"
#include "blcs/dp.hpp"
#include "blcs/error.hpp"
#include "blcs/lcs.hpp"
#include "blcs/params.hpp"
#include "blcs/reduction.hpp"

namespace blcs::bench {

inline constexpr std::string_view kPrngName = "splitmix64-v1";
inline constexpr std::string_view kSchema = "blcs-bench-v1";

/// SplitMix64. Versioned by kPrngName; the output sequence must never change.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t operator()() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return ~std::uint64_t{0}; }

  /// Independent child stream.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t k) {
    SplitMix64 g(seed ^ (k * 0xD1B54A32D192ED03ull));
    return g();
  }

 private:
  std::uint64_t state_;
};

/// P(bit = 1) as a 64-bit threshold; p must lie in [0, 1].
class BernoulliThreshold {
 public:
  explicit BernoulliThreshold(const Rational& p) {
    if (p < 0 || p > 1) throw ConfigError("probability must lie in [0, 1], got " + rational::to_string(p));
    always_ = p == 1;
    if (!always_) {
      BigInt scaled = numerator(p) * (BigInt(1) << 64) / denominator(p);
      threshold_ = scaled.convert_to<std::uint64_t>();
    }
  }

  bool operator()(SplitMix64& g) const { return always_ || g() < threshold_; }

 private:
  bool always_ = false;
  std::uint64_t threshold_ = 0;
};

struct GenSpec;

struct Uniform {
  Rational p;
};
struct Periodic {
  std::size_t ell = 1;
  Rational noise;
};
struct CoarseBlocks {
  std::size_t block = 1;
  std::vector<Rational> densities;
};
struct Concat {
  std::vector<GenSpec> parts;
};
struct AdversarialImbalanced {
  Rational skew;
};

/// Instance family plus length. Seeds are supplied at generation time.
struct GenSpec {
  std::variant<Uniform, Periodic, CoarseBlocks, Concat, AdversarialImbalanced> family;
  std::size_t length = 0;

  std::string name() const;
};

namespace detail {

inline void emit(const GenSpec& spec, std::uint64_t seed, std::vector<std::uint8_t>& out);

struct Emitter {
  std::size_t n;
  std::uint64_t seed;
  std::vector<std::uint8_t>& out;

  void operator()(const Uniform& u) const {
    const BernoulliThreshold coin(u.p);
    SplitMix64 g(seed);
    for (std::size_t i = 0; i < n; ++i) out.push_back(coin(g));
  }
  void operator()(const Periodic& p) const {
    if (p.ell == 0) throw ConfigError("periodic: ell must be positive");
    const BernoulliThreshold flip(p.noise);
    SplitMix64 g(seed);
    for (std::size_t i = 0; i < n; ++i) out.push_back(static_cast<std::uint8_t>(((i / p.ell) % 2) ^ flip(g)));
  }
  void operator()(const CoarseBlocks& c) const {
    if (c.block == 0 || c.densities.empty()) throw ConfigError("coarse_blocks: need a positive block and densities");
    std::vector<BernoulliThreshold> coins;
    for (const auto& d : c.densities) coins.emplace_back(d);
    SplitMix64 g(seed);
    for (std::size_t i = 0; i < n; ++i) out.push_back(coins[(i / c.block) % coins.size()](g));
  }
  void operator()(const Concat& c) const {
    std::size_t total = 0;
    for (const auto& part : c.parts) total += part.length;
    if (total != n) {
      throw ConfigError("concat: part lengths sum to " + std::to_string(total) + ", expected " + std::to_string(n));
    }
    for (std::size_t k = 0; k < c.parts.size(); ++k) emit(c.parts[k], SplitMix64::derive(seed, k + 1), out);
  }
  void operator()(const AdversarialImbalanced& a) const {
    (*this)(Uniform{Rational(1, 2) + a.skew});
  }
};

inline void emit(const GenSpec& spec, std::uint64_t seed, std::vector<std::uint8_t>& out) {
  std::visit(Emitter{spec.length, seed, out}, spec.family);
}

}  // namespace detail

/// Deterministic string for (spec, seed).
inline BitString generate(const GenSpec& spec, std::uint64_t seed) {
  std::vector<std::uint8_t> bits;
  bits.reserve(spec.length);
  detail::emit(spec, seed, bits);
  return BitString::from_bits(bits);
}

// ---------------------------------------------------------------------------
// Text form: family(args)[*length], e.g. uniform(1/2), periodic(4,0.01),
// coarse_blocks(64,0.1,0.9), adversarial_imbalanced(1/5),
// concat(uniform(1/2)*100,periodic(2,0)*50). The top-level length is given
// separately.

namespace detail {

class SpecParser {
 public:
  explicit SpecParser(std::string_view text) : s_(text) {}

  GenSpec parse_top(std::size_t length) {
    bool has_length = false;
    GenSpec g = parse_one(has_length);
    skip_ws();
    if (pos_ != s_.size()) fail("trailing characters");
    if (has_length && g.length != length) fail("explicit length disagrees with requested length");
    g.length = length;
    return g;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw ConfigError("bad generator spec '" + std::string(s_) + "' at offset " + std::to_string(pos_) + ": " + why);
  }
  void skip_ws() {
    while (pos_ < s_.size() && s_[pos_] == ' ') ++pos_;
  }
  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }
  std::string_view token() {
    skip_ws();
    const std::size_t a = pos_;
    while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != ')' && s_[pos_] != '(' && s_[pos_] != '*' &&
           s_[pos_] != ' ') {
      ++pos_;
    }
    if (a == pos_) fail("expected a value");
    return s_.substr(a, pos_ - a);
  }
  Rational number() { return rational::parse(token()); }
  std::size_t count() {
    const Rational r = number();
    if (denominator(r) != 1 || r < 0) fail("expected a nonnegative integer");
    return numerator(r).convert_to<std::size_t>();
  }

  GenSpec parse_one(bool& has_length) {
    const std::string family(token());
    expect('(');
    GenSpec g;
    if (family == "uniform") {
      g.family = Uniform{number()};
    } else if (family == "periodic") {
      Periodic p;
      p.ell = count();
      if (eat(',')) p.noise = number();
      g.family = p;
    } else if (family == "coarse_blocks") {
      CoarseBlocks c;
      c.block = count();
      while (eat(',')) c.densities.push_back(number());
      g.family = c;
    } else if (family == "adversarial_imbalanced") {
      g.family = AdversarialImbalanced{number()};
    } else if (family == "concat") {
      Concat c;
      do {
        bool part_length = false;
        GenSpec part = parse_one(part_length);
        if (!part_length) fail("concat parts need '*length'");
        c.parts.push_back(std::move(part));
      } while (eat(','));
      g.family = std::move(c);
    } else {
      fail("unknown family '" + family + "'");
    }
    expect(')');
    has_length = eat('*');
    if (has_length) g.length = count();
    return g;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline GenSpec parse_spec(std::string_view text, std::size_t length) {
  return detail::SpecParser(text).parse_top(length);
}

inline std::string GenSpec::name() const {
  struct Namer {
    std::string operator()(const Uniform& u) const { return "uniform(" + rational::to_string(u.p) + ")"; }
    std::string operator()(const Periodic& p) const {
      return "periodic(" + std::to_string(p.ell) + "," + rational::to_string(p.noise) + ")";
    }
    std::string operator()(const CoarseBlocks& c) const {
      std::string s = "coarse_blocks(" + std::to_string(c.block);
      for (const auto& d : c.densities) s += "," + rational::to_string(d);
      return s + ")";
    }
    std::string operator()(const Concat& c) const {
      std::string s = "concat(";
      for (std::size_t k = 0; k < c.parts.size(); ++k) {
        if (k) s += ",";
        s += c.parts[k].name() + "*" + std::to_string(c.parts[k].length);
      }
      return s + ")";
    }
    std::string operator()(const AdversarialImbalanced& a) const {
      return "adversarial_imbalanced(" + rational::to_string(a.skew) + ")";
    }
  };
  return std::visit(Namer{}, family);
}

// ---------------------------------------------------------------------------
// Suite

struct Instance {
  std::string family;  // spec text, reused for both strings
  std::size_t length_x = 0;
  std::size_t length_y = 0;
  std::uint64_t seed = 0;
};

/// x and y for an instance: independent streams derived from the seed.
inline std::pair<BitString, BitString> instance_pair(const Instance& in) {
  return {generate(parse_spec(in.family, in.length_x), SplitMix64::derive(in.seed, 1)),
          generate(parse_spec(in.family, in.length_y), SplitMix64::derive(in.seed, 2))};
}

struct Row {
  Instance instance;
  std::uint64_t trivial = 0;
  std::uint64_t approx = 0;
  std::optional<std::uint64_t> exact;
  CoverCounts counts;
  PhaseTimes times;

  std::optional<double> ratio() const {
    if (!exact) return std::nullopt;
    return *exact == 0 ? 1.0 : static_cast<double>(approx) / static_cast<double>(*exact);
  }
};

struct SuiteOptions {
  std::size_t exact_cap = 4096;  // longest string for which exact LCS is computed
  std::size_t workers = 1;
};

inline std::size_t workers_from_env() {
  if (const char* v = std::getenv("BLCS_WORKERS")) {
    try {
      const long n = std::stol(v);
      if (n >= 1) return static_cast<std::size_t>(n);
    } catch (const std::exception&) {
    }
    throw ConfigError(std::string("BLCS_WORKERS must be a positive integer, got '") + v + "'");
  }
  return 1;
}

inline Row run_instance(const Instance& in, const Params& params, Oracles oracles, const SuiteOptions& opt) {
  auto [x, y] = instance_pair(in);
  Row row;
  row.instance = in;
  row.trivial = trivial_lcs(x, y);
  const ApproxResult res = approx_lcs(x, y, params, oracles);
  row.approx = res.bound;
  if (res.pipeline) {
    row.counts = res.pipeline->counts;
    row.times = res.pipeline->times;
  }
  if (std::max(x.size(), y.size()) <= opt.exact_cap) row.exact = exact_lcs(x, y);
  return row;
}

/// Rows in instance order regardless of worker count.
inline std::vector<Row> run_suite(const std::vector<Instance>& instances, const Params& params, Oracles oracles,
                                  const SuiteOptions& opt = {}) {
  std::vector<Row> rows(instances.size());
  const std::size_t workers = std::max<std::size_t>(1, std::min(opt.workers, instances.size()));
  if (workers == 1) {
    for (std::size_t k = 0; k < instances.size(); ++k) rows[k] = run_instance(instances[k], params, oracles, opt);
    return rows;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < workers; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t k = t; k < instances.size(); k += workers) {
          rows[k] = run_instance(instances[k], params, oracles, opt);
        }
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

inline std::string csv_header() {
  return "# schema=" + std::string(kSchema) + " prng=" + std::string(kPrngName) +
         "\nfamily,length_x,length_y,seed,trivial,approx,exact,ratio_approx,rects_trivial,rects_square,"
         "rects_eqlcs,rects_structure,t_classify_us,t_cover_us,t_dp_us\n";
}

inline std::string csv_row(const Row& r) {
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  };
  std::string out = quote(r.instance.family) + ',' + std::to_string(r.instance.length_x) + ',' +
                    std::to_string(r.instance.length_y) + ',' + std::to_string(r.instance.seed) + ',' +
                    std::to_string(r.trivial) + ',' + std::to_string(r.approx) + ',';
  out += r.exact ? std::to_string(*r.exact) : std::string("null");
  out += ',';
  if (auto q = r.ratio()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", *q);
    out += buf;
  } else {
    out += "null";
  }
  out += ',' + std::to_string(r.counts.trivial) + ',' + std::to_string(r.counts.trivial_square) + ',' +
         std::to_string(r.counts.eq_lcs) + ',' + std::to_string(r.counts.structure) + ',' +
         std::to_string(r.times.classify_us) + ',' + std::to_string(r.times.cover_us) + ',' +
         std::to_string(r.times.dp_us) + '\n';
  return out;
}

// ---------------------------------------------------------------------------
// Scaling

/// Balanced x of the given length: uniform bits, then the rightmost surplus
/// bits flipped until 0(x) = 1(x).
inline BitString balanced_uniform(std::size_t n, std::uint64_t seed) {
  if (n % 2 != 0) throw ConfigError("balanced_uniform: length must be even");
  std::vector<std::uint8_t> bits = generate(GenSpec{Uniform{Rational(1, 2)}, n}, seed).unpack();
  std::size_t ones = static_cast<std::size_t>(std::count(bits.begin(), bits.end(), 1));
  for (std::size_t i = n; i-- > 0 && ones != n / 2;) {
    if (ones > n / 2 && bits[i]) {
      bits[i] = 0;
      --ones;
    } else if (ones < n / 2 && !bits[i]) {
      bits[i] = 1;
      ++ones;
    }
  }
  return BitString::from_bits(bits);
}

struct ScalingSample {
  std::size_t length_y = 0;
  std::uint64_t median_us = 0;  // covering (including classification) plus DP
  std::vector<std::uint64_t> runs_us;
};

/// Median wall time of covering + DP on a balanced |x| against uniform |y|,
/// after one untimed warm-up run.
inline ScalingSample measure_cover_dp(std::size_t x_len, std::size_t y_len, std::uint64_t seed, const Params& params,
                                      const EqLcsOracle& eq, std::size_t reps = 5) {
  const BitString x = balanced_uniform(x_len, SplitMix64::derive(seed, 1));
  const BitString y0 = generate(GenSpec{Uniform{Rational(1, 2)}, y_len}, SplitMix64::derive(seed, 2));
  Params p = params.with_layout(x.size(), y0.size());
  auto [tx, ty] = truncate_to_blocks(x, y0, p.w);
  p.m_x = tx.size() / p.w;
  p.m_y = ty.size() / p.w;
  ScalingSample s;
  s.length_y = y_len;
  run_full_lcs(tx, ty, p, eq);
  for (std::size_t r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    const PipelineResult res = run_full_lcs(tx, ty, p, eq);
    const auto t1 = std::chrono::steady_clock::now();
    if (res.bound > tx.size()) throw std::logic_error("scaling run produced an unsound bound");
    s.runs_us.push_back(
        static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0).count()));
  }
  std::vector<std::uint64_t> sorted = s.runs_us;
  std::sort(sorted.begin(), sorted.end());
  s.median_us = sorted[sorted.size() / 2];
  return s;
}

}  // namespace blcs::bench
