#include "crtrig/rangered.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "crtrig/dd.hpp"
#include "crtrig/fpcore.hpp"

#ifdef CRTRIG_CHECK_SHIFTS
#define CRTRIG_SHIFT(s)                                                          \
  ((s) >= 0 && (s) < 64 ? (s)                                                    \
                        : throw std::logic_error("shift amount " + std::to_string(s)))
#else
#define CRTRIG_SHIFT(s) (s)
#endif

namespace crtrig {

std::string_view to_string(ReductionStrategy s) {
  switch (s) {
    case ReductionStrategy::FpV1: return "fpv1";
    case ReductionStrategy::FpV2: return "fpv2";
    case ReductionStrategy::Int: return "int";
    case ReductionStrategy::Hybrid: return "hybrid";
  }
  return "?";
}

ReductionStrategy parse_strategy(std::string_view name) {
  for (ReductionStrategy s : kAllStrategies)
    if (to_string(s) == name) return s;
  throw std::invalid_argument("unknown reduction strategy: " + std::string(name));
}

namespace {

using u128 = unsigned __int128;

struct Split {
  std::uint32_t m = 0;  // |x| = m * 2^e
  int e = 0;
};

// x is a normal binary32 value.
Split split(double x) {
  const std::uint32_t b = float_bits(static_cast<float>(x));
  return {(b & 0x7fffffu) | 0x800000u, static_cast<int>((b >> 23) & 0xff) - 150};
}

// Fraction accumulator: k + (hi + lo), k reduced mod 512 at the end.
struct Acc {
  std::int64_t k = 0;
  double hi = 0;
  double lo = 0;

  // v exact; its integer part goes to k.
  void add_split(double v) {
    if (std::fabs(v) >= 512) v -= 512 * std::floor(v / 512);
    const double i = std::rint(v);
    k += static_cast<std::int64_t>(i);
    add_frac(v - i);
  }

  void add_frac(double v) {
    const DD s = two_sum(hi, v);
    hi = s.hi;
    lo += s.lo;
  }
};

// (r_hi + r_lo) * pi/256 as a normalized pair.
ReducedInput to_reduced(double r_hi, double r_lo, std::int64_t k) {
  const PiConstants& c = pi_constants();
  const DD p = two_prod(r_hi, c.pi_over_256);
  const double lo = p.lo + (r_hi * c.pi_over_256_lo + r_lo * c.pi_over_256);
  const DD xp = fast_two_sum(p.hi, lo);
  ReducedInput out;
  out.xp = xp.hi;
  out.xp_lo = xp.lo;
  out.kp = static_cast<int>(k & 0x1ff);
  return out;
}

// Recenters the fraction into [-1/2, 1/2].
ReducedInput finish(Acc& a) {
  const double i = std::rint(a.hi);
  a.k += static_cast<std::int64_t>(i);
  const DD r = fast_two_sum(a.hi - i, a.lo);
  return to_reduced(r.hi, r.lo, a.k);
}

// k plus the 128-bit fraction word pair (r, frac2) scaled by 2^-64 each.
ReducedInput finish_int(std::uint64_t k, std::uint64_t r, std::uint64_t frac2, double tail) {
  k += r >> 63;  // fraction >= 1/2: recenter as r - 1
  const auto sr = static_cast<std::int64_t>(r);
  const double hi = static_cast<double>(sr & ~std::int64_t{0x7ff}) * 0x1p-64;
  const double lo = static_cast<double>(r & 0x7ff) * 0x1p-64 +
                    static_cast<double>(frac2) * 0x1p-128 + tail;
  const DD f = fast_two_sum(hi, lo);
  return to_reduced(f.hi, f.lo, static_cast<std::int64_t>(k & 0x1ff));
}

// Branch-free: input signs are unpredictable.
ReducedInput with_sign(ReducedInput r, double x) {
  const std::uint64_t neg = double_bits(x) >> 63;
  r.kp = static_cast<int>((static_cast<std::uint32_t>(r.kp) ^ (0 - static_cast<std::uint32_t>(neg))) + neg) & 0x1ff;
  r.xp = bits_double(double_bits(r.xp) ^ (neg << 63));
  r.xp_lo = bits_double(double_bits(r.xp_lo) ^ (neg << 63));
  return r;
}

}  // namespace

ReducedInput reduce_fp_small(double x) {
  const PiConstants& c = pi_constants();
  const double ax = std::fabs(x);
  const double p0 = c.pieces28[0] * ax;  // exact
  const DD p1 = two_prod(c.small53[0], ax);
  const double p_int = std::rint(p0 + p1.hi);
  const DD r = two_sum(p0 - p_int, p1.hi);
  Acc a;
  a.k = static_cast<std::int64_t>(p_int);
  a.hi = r.hi;
  a.lo = r.lo + p1.lo + c.small53[1] * ax;
  return with_sign(finish(a), x);
}

ReducedInput reduce_fp28_large(double x) {
  const PiConstants& c = pi_constants();
  const double ax = std::fabs(x);
  const int e = split(ax).e;
  int idx = 0;
  while (c.pieces28_exp[idx] + e > 8) ++idx;  // idx <= 3
  Acc a;
  for (int j = 0; j < 3; ++j) a.add_split(c.pieces28[idx + j] * ax);
  a.add_frac(c.pieces28[idx + 3] * ax);
  a.lo += c.tails28[idx + 3] * ax;
  return with_sign(finish(a), x);
}

ReducedInput reduce_fp53_large(double x) {
  const PiConstants& c = pi_constants();
  const double ax = std::fabs(x);
  const int idx = 55 <= split(ax).e ? 1 : 0;
  Acc a;
  const DD pa = two_prod(c.pieces53[idx], ax);
  a.add_split(pa.hi);
  a.add_split(pa.lo);
  const DD pb = two_prod(c.pieces53[idx + 1], ax);
  a.add_split(pb.hi);
  a.add_frac(pb.lo);
  const DD pc = two_prod(c.pieces53[idx + 2], ax);
  a.add_frac(pc.hi);
  a.lo += pc.lo + c.pieces53[idx + 3] * ax;
  return with_sign(finish(a), x);
}

ReducedInput reduce_int_small(double x) {
  const PiConstants& c = pi_constants();
  const Split s = split(std::fabs(x));
  const std::uint64_t a = c.p1 * s.m;
  const std::uint64_t b = c.p0 * s.m;
  const std::uint64_t sum = a + (b >> 40);
  const int down = CRTRIG_SHIFT(33 - s.e);
  const int up = CRTRIG_SHIFT(31 + s.e);
  const std::uint64_t k = sum >> down;
  const std::uint64_t r = (sum << up) | ((b << 24) >> down);
  const std::uint64_t frac2 = (b << 24) << up;
  return with_sign(finish_int(k, r, frac2, c.tail80 * std::fabs(x)), x);
}

ReducedInput reduce_int_large(double x) {
  const PiConstants& c = pi_constants();
  const Split s = split(std::fabs(x));
  // 256/pi = words64[0] 2^-57 + words64[1] 2^-121 + words64[2] 2^-185 + tail.
  const u128 top = static_cast<u128>(s.m) * c.words64[0];
  const u128 mid = static_cast<u128>(s.m) * c.words64[1];
  const u128 low = static_cast<u128>(s.m) * c.words64[2];
  const std::uint64_t l0 = static_cast<std::uint64_t>(low);
  const u128 t1 = (low >> 64) + static_cast<std::uint64_t>(mid);
  const std::uint64_t l1 = static_cast<std::uint64_t>(t1);
  const std::uint64_t l2 = static_cast<std::uint64_t>(mid >> 64) +
                           static_cast<std::uint64_t>(top) +
                           static_cast<std::uint64_t>(t1 >> 64);
  // The binary point sits 185 - e bits above the bottom of l0.  All three
  // cases are computed and one is selected by mask, since e is
  // unpredictable; the unused cases run with clamped shift amounts.
  const int down_a = CRTRIG_SHIFT(std::clamp(57 - s.e, 1, 63));
  const int up_a = CRTRIG_SHIFT(64 - down_a);  // 7 + e below 57
  const std::uint64_t k_a = l2 >> down_a;
  const std::uint64_t r_a = (l2 << up_a) | (l1 >> down_a);
  const std::uint64_t f_a = (l1 << up_a) | (l0 >> down_a);
  const int up_c = CRTRIG_SHIFT(std::clamp(s.e - 57, 1, 63));
  const int down_c = CRTRIG_SHIFT(64 - up_c);  // 121 - e above 57
  const std::uint64_t k_c = (l2 << up_c) | (l1 >> down_c);
  const std::uint64_t r_c = (l1 << up_c) | (l0 >> down_c);
  const std::uint64_t f_c = l0 << up_c;
  const std::uint64_t ma = 0 - static_cast<std::uint64_t>(s.e < 57);
  const std::uint64_t mc = 0 - static_cast<std::uint64_t>(s.e > 57);
  const std::uint64_t mb = ~(ma | mc);
  const std::uint64_t k = (k_a & ma) | (l2 & mb) | (k_c & mc);
  const std::uint64_t r = (r_a & ma) | (l1 & mb) | (r_c & mc);
  const std::uint64_t frac2 = (f_a & ma) | (l0 & mb) | (f_c & mc);
  return with_sign(finish_int(k, r, frac2, c.tail192 * std::fabs(x)), x);
}

ReducedInput reduce(double x, ReductionStrategy strategy) {
  if (!std::isfinite(x)) throw std::invalid_argument("reduce needs a finite input");
  const bool large = float_bits(std::fabs(static_cast<float>(x))) >= kLargeInputBits;
  switch (strategy) {
    case ReductionStrategy::FpV1: return large ? reduce_fp28_large(x) : reduce_fp_small(x);
    case ReductionStrategy::FpV2: return large ? reduce_fp53_large(x) : reduce_fp_small(x);
    case ReductionStrategy::Int: return large ? reduce_int_large(x) : reduce_int_small(x);
    case ReductionStrategy::Hybrid: return large ? reduce_int_large(x) : reduce_fp_small(x);
  }
  throw std::invalid_argument("unknown reduction strategy");
}

ReducedInput reduce_any(std::uint32_t bits, ReductionStrategy strategy) {
  const double x = bits_float(bits);
  if ((bits & 0x7fffffff) < kNoReductionBits) {
    ReducedInput r;
    r.xp = x;
    r.needs_reduction = false;
    return r;
  }
  return reduce(x, strategy);
}

ShiftAmounts int_small_shifts(int lsb_exp) { return {2, {33 - lsb_exp, 31 + lsb_exp}}; }

ShiftAmounts int_large_shifts(int lsb_exp) {
  if (lsb_exp < 57) return {2, {57 - lsb_exp, 7 + lsb_exp}};
  if (lsb_exp == 57) return {0, {}};
  return {2, {lsb_exp - 57, 121 - lsb_exp}};
}

}  // namespace crtrig
