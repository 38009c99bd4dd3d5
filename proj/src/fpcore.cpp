#include "crtrig/fpcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace crtrig {

std::string_view to_string(RoundingMode mode) {
  switch (mode) {
    case RoundingMode::NearestEven: return "rne";
    case RoundingMode::NearestAway: return "rna";
    case RoundingMode::TowardZero: return "rtz";
    case RoundingMode::TowardPositive: return "rtp";
    case RoundingMode::TowardNegative: return "rtn";
    case RoundingMode::ToOdd: return "rno";
  }
  return "?";
}

RoundingMode parse_rounding_mode(std::string_view name) {
  if (name == "rne") return RoundingMode::NearestEven;
  if (name == "rna") return RoundingMode::NearestAway;
  if (name == "rtz") return RoundingMode::TowardZero;
  if (name == "rtp") return RoundingMode::TowardPositive;
  if (name == "rtn") return RoundingMode::TowardNegative;
  if (name == "rno") return RoundingMode::ToOdd;
  throw std::invalid_argument("unknown rounding mode: " + std::string(name));
}

FpTriple decode32(std::uint32_t bits) {
  FpTriple t;
  t.negative = (bits >> 31) != 0;
  t.biased_exp = static_cast<int>((bits >> 23) & 0xff);
  t.significand = bits & 0x7fffff;
  t.is_nan = t.biased_exp == 0xff && t.significand != 0;
  t.is_inf = t.biased_exp == 0xff && t.significand == 0;
  t.is_zero = t.biased_exp == 0 && t.significand == 0;
  t.is_subnormal = t.biased_exp == 0 && t.significand != 0;
  return t;
}

std::uint32_t encode32(const FpTriple& t) {
  return (t.negative ? 0x80000000u : 0u) |
         (static_cast<std::uint32_t>(t.biased_exp & 0xff) << 23) |
         (t.significand & 0x7fffff);
}

std::uint64_t round_to_format(const Unrounded& u, FpFormat fmt, RoundingMode mode) {
  if (!fmt.valid()) throw std::invalid_argument("format width out of range");
  const std::uint64_t sign = u.negative ? fmt.sign_mask() : 0;
  if (u.sig == 0) {
    if (u.sticky) throw std::invalid_argument("sticky bit without significand");
    return sign;
  }
  const int lz = std::countl_zero(u.sig);
  const std::uint64_t sig = u.sig << lz;
  const int exp = u.exponent - lz;  // value = sig * 2^exp, msb at bit 63
  const int e_top = exp + 63;
  const int p = fmt.precision();
  const int e_eff = std::max(e_top, FpFormat::emin);
  const int q = e_eff - (p - 1);
  const int drop = q - exp;  // >= 38 since p <= 26

  std::uint64_t t;
  bool round_bit;
  bool sticky;
  if (drop >= 65) {
    t = 0;
    round_bit = false;
    sticky = true;
  } else if (drop == 64) {
    t = 0;
    round_bit = (sig >> 63) != 0;
    sticky = (sig << 1) != 0 || u.sticky;
  } else {
    t = sig >> drop;
    round_bit = ((sig >> (drop - 1)) & 1) != 0;
    sticky = (sig & ((std::uint64_t{1} << (drop - 1)) - 1)) != 0 || u.sticky;
  }

  const bool inexact = round_bit || sticky;
  bool increment = false;
  switch (mode) {
    case RoundingMode::NearestEven:
      increment = round_bit && (sticky || (t & 1));
      break;
    case RoundingMode::NearestAway:
      increment = round_bit;
      break;
    case RoundingMode::TowardZero:
      break;
    case RoundingMode::TowardPositive:
      increment = !u.negative && inexact;
      break;
    case RoundingMode::TowardNegative:
      increment = u.negative && inexact;
      break;
    case RoundingMode::ToOdd:
      if (inexact) t |= 1;
      break;
  }
  t += increment ? 1 : 0;

  // t carries the hidden bit, so adding it to the exponent field folds a
  // rounding carry into the next binade.
  const std::uint64_t mag =
      (static_cast<std::uint64_t>(e_eff - FpFormat::emin) << (p - 1)) + t;
  if (mag >= fmt.inf_magnitude()) {
    bool to_inf = false;
    switch (mode) {
      case RoundingMode::NearestEven:
      case RoundingMode::NearestAway:
        to_inf = true;
        break;
      case RoundingMode::TowardPositive:
        to_inf = !u.negative;
        break;
      case RoundingMode::TowardNegative:
        to_inf = u.negative;
        break;
      default:
        break;
    }
    return sign | (to_inf ? fmt.inf_magnitude() : fmt.max_finite_magnitude());
  }
  return sign | mag;
}

double decode_format(std::uint64_t pattern, FpFormat fmt) {
  const int f = fmt.fraction_bits();
  const bool neg = (pattern & fmt.sign_mask()) != 0;
  const auto exp_field = static_cast<int>((pattern >> f) & 0xff);
  const std::uint64_t frac = pattern & ((std::uint64_t{1} << f) - 1);
  double v;
  if (exp_field == 0xff) {
    v = frac != 0 ? std::numeric_limits<double>::quiet_NaN()
                  : std::numeric_limits<double>::infinity();
  } else if (exp_field == 0) {
    v = std::ldexp(static_cast<double>(frac), FpFormat::emin - f);
  } else {
    v = std::ldexp(static_cast<double>(frac | (std::uint64_t{1} << f)),
                   exp_field - FpFormat::bias - f);
  }
  return neg ? -v : v;
}

Unrounded unrounded_from_double(double v) {
  const std::uint64_t b = double_bits(v);
  Unrounded u;
  u.negative = (b >> 63) != 0;
  const auto biased = static_cast<int>((b >> 52) & 0x7ff);
  const std::uint64_t frac = b & ((std::uint64_t{1} << 52) - 1);
  if (biased == 0) {
    u.sig = frac;
    u.exponent = -1074;
  } else {
    u.sig = frac | (std::uint64_t{1} << 52);
    u.exponent = biased - 1075;
  }
  return u;
}

std::uint64_t round_from_34(double v34, FpFormat fmt, RoundingMode mode) {
  if (std::isnan(v34)) return fmt.quiet_nan();
  const std::uint64_t sign = std::signbit(v34) ? fmt.sign_mask() : 0;
  if (std::isinf(v34)) return sign | fmt.inf_magnitude();
  if (v34 == 0.0) return sign;
  return round_to_format(unrounded_from_double(v34), fmt, mode);
}

std::uint64_t pattern_34(double v34) {
  return round_from_34(v34, kFormat34, RoundingMode::ToOdd);
}

double value_34(std::uint64_t pattern) { return decode_format(pattern, kFormat34); }

}  // namespace crtrig
