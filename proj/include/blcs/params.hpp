#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "blcs/error.hpp"

namespace blcs {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

namespace rational {

inline Rational pow_half(unsigned k) {
  BigInt den = 1;
  den <<= k;
  return Rational(BigInt(1), den);
}

/// Equality on the normalized numerator/denominator pair; much cheaper than
/// the generic rational comparison.
inline bool same(const Rational& a, const Rational& b) {
  return numerator(a) == numerator(b) && denominator(a) == denominator(b);
}

/// floor(c * n) for c*n >= 0.
inline std::int64_t floor_mul(const Rational& c, std::int64_t n) {
  const Rational v = c * n;
  BigInt q = numerator(v) / denominator(v);
  if (v < 0 && q * denominator(v) != numerator(v)) q -= 1;
  return q.convert_to<std::int64_t>();
}

/// ceil(c * n).
inline std::int64_t ceil_mul(const Rational& c, std::int64_t n) {
  const Rational v = c * n;
  BigInt q = numerator(v) / denominator(v);
  if (v > 0 && q * denominator(v) != numerator(v)) q += 1;
  return q.convert_to<std::int64_t>();
}

/// k if r == 2^-k, otherwise nullopt.
inline std::optional<unsigned> half_exponent(const Rational& r) {
  if (numerator(r) != 1 || denominator(r) <= 0) return std::nullopt;
  const BigInt& den = denominator(r);
  const unsigned k = boost::multiprecision::msb(den);
  if (den != (BigInt(1) << k)) return std::nullopt;
  return k;
}

/// Parses "0.05", "1/20", "2^-3" or an integer.
inline Rational parse(std::string_view text) {
  auto fail = [&] { throw ConfigError("cannot parse rational value '" + std::string(text) + "'"); };
  if (text.empty()) fail();
  try {
    if (text.rfind("2^-", 0) == 0) {
      const unsigned k = static_cast<unsigned>(std::stoul(std::string(text.substr(3))));
      return pow_half(k);
    }
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
      BigInt num(std::string(text.substr(0, slash)));
      BigInt den(std::string(text.substr(slash + 1)));
      if (den == 0) fail();
      return Rational(num, den);
    }
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
      std::string digits = std::string(text.substr(0, dot)) + std::string(text.substr(dot + 1));
      if (digits.empty() || digits == "-") fail();
      for (char c : digits) {
        if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '-')) fail();
      }
      BigInt num(digits);
      BigInt den = 1;
      for (std::size_t i = dot + 1; i < text.size(); ++i) den *= 10;
      return Rational(num, den);
    }
    for (char c : text) {
      if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '-')) fail();
    }
    return Rational(BigInt(std::string(text)));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    fail();
  }
  return {};
}

inline std::string to_string(const Rational& r) {
  if (denominator(r) == 1) return numerator(r).str();
  if (auto k = half_exponent(r); k && *k > 16) return "2^-" + std::to_string(*k);
  return numerator(r).str() + "/" + denominator(r).str();
}

}  // namespace rational

enum class Profile { paper, desk };

inline std::string_view to_string(Profile p) { return p == Profile::paper ? "paper" : "desk"; }

/// The constant ladder plus the per-input block layout. All constants are
/// exact rationals; every threshold derived from them is an exact integer
/// comparison.
struct Params {
  Rational eps;
  Rational alpha;
  Rational beta;
  Rational gamma;
  Rational delta;
  Rational theta;
  Rational delta_code;
  Rational rho;
  Rational delta0;

  // Layout. w == 0 means "not yet bound to an input".
  std::size_t w = 0;
  std::size_t m_x = 0;
  std::size_t m_y = 0;
  std::optional<std::size_t> w_override;

  Profile profile = Profile::desk;

  /// Relaxed constants that make the structure machinery exercisable at
  /// block widths of 2^10..2^12.
  static Params desk() {
    Params p;
    p.profile = Profile::desk;
    p.eps = Rational(1, 20);
    p.delta_code = Rational(1, 100);
    p.alpha = rational::pow_half(3);
    p.beta = rational::pow_half(3);
    p.gamma = rational::pow_half(1);
    p.delta = rational::pow_half(4);
    p.theta = p.delta;
    p.delta0 = Rational(1, 10);
    p.rho = Rational(1, 20);
    return p;
  }

  /// eps = 1e-5, delta_code = eps^4/2, alpha the largest power of 1/2 not
  /// above delta_code, beta = alpha^2, gamma = beta^2/2, theta = delta = gamma^8.
  static Params paper() {
    Params p;
    p.profile = Profile::paper;
    p.eps = Rational(1, 100000);
    p.delta_code = p.eps * p.eps * p.eps * p.eps / 2;
    unsigned k = 0;
    while (rational::pow_half(k) > p.delta_code) ++k;
    p.alpha = rational::pow_half(k);
    p.beta = p.alpha * p.alpha;
    p.gamma = p.beta * p.beta / 2;
    p.delta = p.gamma * p.gamma;
    p.delta = p.delta * p.delta;
    p.delta = p.delta * p.delta;
    p.theta = p.delta;
    // delta_1 = delta/2 is the balanced-case advantage; rho = delta_1/10 and
    // delta_0 = delta_1/2.
    p.rho = p.delta / 20;
    p.delta0 = p.delta / 4;
    return p;
  }

  static Params named(std::string_view profile) {
    if (profile == "desk") return desk();
    if (profile == "paper") return paper();
    throw ConfigError("unknown profile '" + std::string(profile) + "' (expected paper|desk)");
  }

  /// Override one constant by name. Call validate() afterwards.
  void set(std::string_view name, std::string_view value) {
    if (name == "w") {
      try {
        w_override = std::stoull(std::string(value));
      } catch (const std::exception&) {
        throw ConfigError("cannot parse w value '" + std::string(value) + "'");
      }
      return;
    }
    Rational v = rational::parse(value);
    if (name == "eps") eps = v;
    else if (name == "alpha") alpha = v;
    else if (name == "beta") beta = v;
    else if (name == "gamma") gamma = v;
    else if (name == "delta") delta = v;
    else if (name == "theta") theta = v;
    else if (name == "delta_code") delta_code = v;
    else if (name == "rho") rho = v;
    else if (name == "delta0") delta0 = v;
    else throw ConfigError("unknown parameter '" + std::string(name) + "'");
  }

  void validate() const {
    if (w != 0 && !std::has_single_bit(w)) throw ConfigError("w must be a power of two");
    if (w_override && !(*w_override > 0 && std::has_single_bit(*w_override))) {
      throw ConfigError("w must be a power of two");
    }
    // The constant checks are pure; skip them when this thread last accepted
    // the same constants.
    thread_local std::optional<Params> last_ok;
    if (last_ok && same_constants(*last_ok)) return;
    validate_constants();
    last_ok = *this;
  }

  bool same_constants(const Params& o) const {
    return profile == o.profile && rational::same(eps, o.eps) && rational::same(alpha, o.alpha) &&
           rational::same(beta, o.beta) && rational::same(gamma, o.gamma) && rational::same(delta, o.delta) &&
           rational::same(theta, o.theta) && rational::same(delta_code, o.delta_code) &&
           rational::same(rho, o.rho) && rational::same(delta0, o.delta0);
  }

 private:
  void validate_constants() const {
    auto require = [](bool ok, const std::string& msg) {
      if (!ok) throw ConfigError(msg);
    };
    for (auto [name, value] : {std::pair<const char*, const Rational*>{"alpha", &alpha},
                               {"beta", &beta},
                               {"gamma", &gamma},
                               {"delta", &delta},
                               {"theta", &theta}}) {
      if (!rational::half_exponent(*value)) {
        throw ConfigError(std::string(name) + " must be a power of 1/2, got " + rational::to_string(*value));
      }
    }
    require(*rational::half_exponent(delta) % 2 == 0, "delta must be an even power of 1/2 (sqrt(delta) is used)");
    require(theta == delta, "theta must equal delta");
    require(theta <= gamma, "theta must not exceed gamma");
    require(eps > 0 && eps < Rational(1, 2), "eps must lie in (0, 1/2)");
    require(delta_code > 0 && delta_code < 1, "delta_code must lie in (0, 1)");
    require(rho > 0 && rho < Rational(1, 2), "rho must lie in (0, 1/2)");
    require(delta0 > 0, "delta0 must be positive");
    require(sqrt_delta() < Rational(1, 2), "sqrt(delta) must be below 1/2");
    if (profile == Profile::paper) {
      require(beta == alpha * alpha, "paper profile requires beta = alpha^2");
      require(gamma == beta * beta / 2, "paper profile requires gamma = beta^2/2");
      Rational g8 = gamma * gamma;
      g8 *= g8;
      g8 *= g8;
      require(delta == g8, "paper profile requires delta = gamma^8");
      require(alpha <= delta_code, "paper profile requires alpha <= delta_code");
    }
  }

 public:

  Rational sqrt_delta() const {
    const auto k = rational::half_exponent(delta);
    if (!k || *k % 2 != 0) throw ConfigError("sqrt(delta) is not a power of 1/2");
    return rational::pow_half(*k / 2);
  }

  /// gamma*w, clamped to at least 1.
  std::size_t gamma_w() const { return clamp_width(gamma); }
  /// theta*w, clamped to at least 1.
  std::size_t theta_w() const { return clamp_width(theta); }

  /// Power of two closest to n / log2(n); ties go to the smaller one.
  static std::size_t default_block_width(std::size_t n) {
    if (n <= 2) return 1;
    const double target = static_cast<double>(n) / std::log2(static_cast<double>(n));
    std::size_t lo = std::bit_floor(static_cast<std::size_t>(std::max(1.0, std::floor(target))));
    const std::size_t hi = lo * 2;
    return (target - static_cast<double>(lo) <= static_cast<double>(hi) - target) ? lo : hi;
  }

  /// Copy with the block width fixed (used for single-block structure queries).
  Params with_block_width(std::size_t width) const {
    Params p = *this;
    p.w = width;
    p.m_x = p.m_y = 0;
    return p;
  }

  /// Copy bound to inputs of the given lengths; m_x, m_y count whole blocks.
  Params with_layout(std::size_t x_len, std::size_t y_len) const {
    Params p = *this;
    p.w = w_override ? *w_override : default_block_width(x_len);
    p.m_x = x_len / p.w;
    p.m_y = y_len / p.w;
    return p;
  }

 private:
  std::size_t clamp_width(const Rational& c) const {
    if (w == 0) throw ContractError("params are not bound to a block width");
    const std::int64_t v = rational::floor_mul(c, static_cast<std::int64_t>(w));
    return v < 1 ? 1 : static_cast<std::size_t>(v);
  }
};

}  // namespace blcs
