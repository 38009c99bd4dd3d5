// Signed floating-point numbers with a 128-bit mantissa and truncating
// arithmetic.  value = (-1)^neg * mant * 2^(exp - 127); mant is zero or has
// bit 127 set.  Each operation errs by less than one unit of the result's
// last mantissa bit.
#pragma once

#include <bit>
#include <cmath>
#include <cstdint>

namespace crtrig::detail {

using u128 = unsigned __int128;

inline int clz128(u128 v) {
  const auto hi = static_cast<std::uint64_t>(v >> 64);
  if (hi) return std::countl_zero(hi);
  return 64 + std::countl_zero(static_cast<std::uint64_t>(v));
}

struct U256 {
  u128 hi = 0;
  u128 lo = 0;
};

inline U256 mul_wide(u128 a, u128 b) {
  const auto a0 = static_cast<std::uint64_t>(a), a1 = static_cast<std::uint64_t>(a >> 64);
  const auto b0 = static_cast<std::uint64_t>(b), b1 = static_cast<std::uint64_t>(b >> 64);
  const u128 p00 = static_cast<u128>(a0) * b0;
  const u128 p01 = static_cast<u128>(a0) * b1;
  const u128 p10 = static_cast<u128>(a1) * b0;
  const u128 p11 = static_cast<u128>(a1) * b1;
  const u128 mid = (p00 >> 64) + static_cast<std::uint64_t>(p01) + static_cast<std::uint64_t>(p10);
  U256 r;
  r.lo = (mid << 64) | static_cast<std::uint64_t>(p00);
  r.hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
  return r;
}

inline U256 shr256(U256 v, int n) {
  if (n == 0) return v;
  if (n >= 256) return {};
  if (n >= 128) return {0, v.hi >> (n - 128)};
  return {v.hi >> n, (v.lo >> n) | (v.hi << (128 - n))};
}

inline U256 shl256(U256 v, int n) {
  if (n == 0) return v;
  if (n >= 128) return {v.lo << (n - 128), 0};
  return {(v.hi << n) | (v.lo >> (128 - n)), v.lo << n};
}

struct F128 {
  bool neg = false;
  int exp = 0;
  u128 mant = 0;

  bool is_zero() const { return mant == 0; }
  F128 operator-() const { return {!neg, exp, mant}; }

  // value = m * 2^lsb_exp
  static F128 from_parts(bool neg, u128 m, int lsb_exp) {
    if (m == 0) return {};
    const int lz = clz128(m);
    return {neg, lsb_exp + 127 - lz, m << lz};
  }

  static F128 from_double(double d) {
    if (d == 0.0) return {};
    int e;
    const double f = std::frexp(std::fabs(d), &e);  // f in [0.5, 1)
    const auto m = static_cast<std::uint64_t>(std::ldexp(f, 53));
    return from_parts(d < 0, m, e - 53);
  }

  // Truncated to 53 bits.
  double to_double() const {
    if (mant == 0) return neg ? -0.0 : 0.0;
    const double v = std::ldexp(static_cast<double>(static_cast<std::uint64_t>(mant >> 75)), exp - 52);
    return neg ? -v : v;
  }
};

inline F128 mul(const F128& a, const F128& b) {
  if (a.is_zero() || b.is_zero()) return {};
  const U256 p = mul_wide(a.mant, b.mant);
  F128 r;
  r.neg = a.neg != b.neg;
  if (p.hi >> 127) {
    r.mant = p.hi;
    r.exp = a.exp + b.exp + 1;
  } else {
    r.mant = (p.hi << 1) | (p.lo >> 127);
    r.exp = a.exp + b.exp;
  }
  return r;
}

inline bool mag_less(const F128& a, const F128& b) {
  if (b.is_zero()) return false;
  if (a.is_zero()) return true;
  if (a.exp != b.exp) return a.exp < b.exp;
  return a.mant < b.mant;
}

inline F128 add(F128 a, F128 b) {
  if (b.is_zero()) return a;
  if (a.is_zero()) return b;
  if (mag_less(a, b)) std::swap(a, b);
  const int d = a.exp - b.exp;
  const U256 x{a.mant, 0};
  const U256 y = shr256(U256{b.mant, 0}, d);
  F128 r;
  r.neg = a.neg;
  if (a.neg == b.neg) {
    U256 s;
    s.lo = x.lo + y.lo;
    const u128 c = s.lo < x.lo ? 1 : 0;
    s.hi = x.hi + y.hi + c;
    const bool carry = s.hi < x.hi || (s.hi == x.hi && (y.hi != 0 || c));
    if (carry) {
      s = shr256(s, 1);
      s.hi |= static_cast<u128>(1) << 127;
      r.exp = a.exp + 1;
    } else {
      r.exp = a.exp;
    }
    r.mant = s.hi;
    return r;
  }
  U256 s;
  s.lo = x.lo - y.lo;
  const u128 bw = x.lo < y.lo ? 1 : 0;
  s.hi = x.hi - y.hi - bw;
  if (s.hi == 0 && s.lo == 0) return {};
  const int lz = s.hi ? clz128(s.hi) : 128 + clz128(s.lo);
  s = shl256(s, lz);
  r.mant = s.hi;
  r.exp = a.exp - lz;
  return r;
}

inline F128 sub(const F128& a, const F128& b) { return add(a, -b); }

// 1/c by two Newton steps from a binary64 seed.
inline F128 reciprocal(const F128& c) {
  static const F128 two = F128::from_parts(false, 2, 0);
  F128 y = F128::from_double(1.0 / c.to_double());
  for (int i = 0; i < 2; ++i) y = mul(y, sub(two, mul(c, y)));
  return y;
}

}  // namespace crtrig::detail
