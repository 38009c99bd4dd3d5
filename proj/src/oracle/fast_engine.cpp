#include <gmp.h>
#include <mpfr.h>

#include <array>

#include "crtrig/oracle.hpp"
#include "f128.hpp"

namespace crtrig {
namespace {

using detail::F128;
using detail::u128;

constexpr int kTaylorTerms = 9;
// Relative error bound of every fast-engine result.
constexpr int kErrorBits = 110;

F128 from_mpfr(mpfr_t v) {
  if (mpfr_zero_p(v)) return {};
  mpfr_t t;
  mpfr_init2(t, 128);
  mpfr_set(t, v, MPFR_RNDN);
  mpz_t z;
  mpz_init(z);
  const long e = mpfr_get_z_2exp(z, t);
  const bool neg = mpz_sgn(z) < 0;
  mpz_abs(z, z);
  const u128 lo = mpz_get_ui(z);
  mpz_fdiv_q_2exp(z, z, 64);
  const u128 hi = mpz_get_ui(z);
  mpz_clear(z);
  mpfr_clear(t);
  return F128::from_parts(neg, (hi << 64) | lo, static_cast<int>(e));
}

struct FastTables {
  std::array<F128, 512> sin_table;
  std::array<F128, kTaylorTerms> sin_coeffs;  // (-1)^i / (2i+1)!
  std::array<F128, kTaylorTerms> cos_coeffs;  // (-1)^i / (2i)!
  F128 pi_over_256;

  FastTables() {
    mpfr_t pi, t, u;
    mpfr_init2(pi, 320);
    mpfr_init2(t, 320);
    mpfr_init2(u, 320);
    mpfr_const_pi(pi, MPFR_RNDN);
    mpfr_div_2ui(t, pi, 8, MPFR_RNDN);
    pi_over_256 = from_mpfr(t);
    for (int j = 0; j < 512; ++j) {
      if (j % 128 == 0) {
        static constexpr int kExact[] = {0, 1, 0, -1};
        const int v = kExact[j / 128];
        sin_table[j] = v == 0 ? F128{} : F128::from_parts(v < 0, 1, 0);
        continue;
      }
      mpfr_mul_ui(t, pi, j, MPFR_RNDN);
      mpfr_div_2ui(t, t, 8, MPFR_RNDN);
      mpfr_sin(u, t, MPFR_RNDN);
      sin_table[j] = from_mpfr(u);
    }
    mpfr_set_ui(t, 1, MPFR_RNDN);  // running 1/n!
    for (int n = 0; n < 2 * kTaylorTerms; ++n) {
      if (n > 0) mpfr_div_ui(t, t, n, MPFR_RNDN);
      const bool neg = (n / 2) % 2 == 1;
      F128 c = from_mpfr(t);
      c.neg = neg;
      if (n % 2 == 0) cos_coeffs[n / 2] = c; else sin_coeffs[n / 2] = c;
    }
    mpfr_clear(pi);
    mpfr_clear(t);
    mpfr_clear(u);
  }
};

const FastTables& tables() {
  static const FastTables t;
  return t;
}

F128 poly(const std::array<F128, kTaylorTerms>& c, const F128& z2) {
  F128 acc = c[kTaylorTerms - 1];
  for (int i = kTaylorTerms - 2; i >= 0; --i) acc = detail::add(detail::mul(acc, z2), c[i]);
  return acc;
}

std::uint64_t get_bits(const std::array<std::uint64_t, 9>& p, int pos, int n) {
  const int w = pos / 64, b = pos % 64;
  std::uint64_t v = p[w] >> b;
  if (b != 0 && w + 1 < 9) v |= p[w + 1] << (64 - b);
  return n == 64 ? v : v & ((std::uint64_t{1} << n) - 1);
}

struct Reduction {
  int k = 0;
  F128 r;  // 256 x / pi - k, |r| <= 1/2
  int window_bits = 0;
};

// |x| = m * 2^e with m < 2^24 and e in [-29, 104].
Reduction reduce(std::uint32_t m, int e) {
  const auto words = two_over_pi_words();
  // 256/pi = sum words[j] * 2^(-57 - 64 j).  Words with weight >= 2^9 drop out.
  const int s = e >= 66 ? 1 : 0;
  std::array<std::uint64_t, 9> p{};
  u128 carry = 0;
  for (int j = 0; j < 8; ++j) {
    const u128 prod = static_cast<u128>(m) * words[s + 7 - j] + carry;
    p[j] = static_cast<std::uint64_t>(prod);
    carry = prod >> 64;
  }
  p[8] = static_cast<std::uint64_t>(carry);
  const int bp = 57 + 64 * (s + 7) - e;  // fraction bits in p
  Reduction red;
  red.k = static_cast<int>(get_bits(p, bp, 9));
  std::array<std::uint64_t, 5> frac;  // frac[0] most significant
  for (int i = 0; i < 5; ++i) frac[i] = get_bits(p, bp - 64 * (i + 1), 64);
  red.window_bits = 320;
  bool neg = false;
  if (frac[0] >> 63) {
    red.k = (red.k + 1) & 511;
    neg = true;
    std::uint64_t c = 1;
    for (int i = 4; i >= 0; --i) {
      const std::uint64_t v = ~frac[i] + c;
      c = (c && v == 0) ? 1 : 0;
      frac[i] = v;
    }
  }
  int lead_word = 0;
  while (lead_word < 5 && frac[lead_word] == 0) ++lead_word;
  if (lead_word >= 3) throw OracleError("reduction lost precision");
  const u128 top = (static_cast<u128>(frac[lead_word]) << 64) | frac[lead_word + 1];
  const int lz = detail::clz128(top);
  u128 mant = top << lz;
  if (lz) mant |= frac[lead_word + 2] >> (64 - lz);
  // The top mantissa bit has weight 2^(-1 - 64 lead_word - lz).
  red.r = F128{neg, -1 - 64 * lead_word - lz, mant};
  return red;
}

// Truncation of v to kTruncBits when the error interval allows it.
bool conclude(const F128& v, OracleValue& out) {
  constexpr u128 kErr = static_cast<u128>(1) << (127 - kErrorBits + 1);
  const u128 lo = v.mant - kErr;
  const u128 hi = v.mant + kErr;
  if ((lo >> 127) == 0 || hi < v.mant) return false;
  constexpr int kShift = 128 - kTruncBits;
  if ((lo >> kShift) != (hi >> kShift)) return false;
  out.nan = false;
  out.value.negative = v.neg;
  out.value.sig = static_cast<std::uint64_t>(v.mant >> kShift);
  out.value.exponent = v.exp - 127 + kShift;
  out.value.sticky = true;
  return true;
}

}  // namespace

bool fast_eval_all(std::uint32_t bits, OracleTriple& out) {
  const FpTriple d = decode32(bits);
  if (d.is_nan || d.is_inf) {
    out.sin.nan = out.cos.nan = out.tan.nan = true;
    return true;
  }
  out.sin.nan = out.cos.nan = out.tan.nan = false;
  if (d.is_zero) {
    out.sin.value = Unrounded{d.negative, 0, 0, false};
    out.tan.value = out.sin.value;
    out.cos.value = Unrounded{false, 0, 1, false};
    return true;
  }
  const std::uint32_t m = d.full_significand();
  const int e = d.lsb_exponent();
  const int top = e + 31 - std::countl_zero(m);  // floor(log2 |x|)

  if (top < -30) {
    // sin x and tan x lie within a relative 2^-61 of x, on opposite sides;
    // cos x lies in (1 - 2^-51, 1).
    const int width = 32 - std::countl_zero(m);
    Unrounded ux{d.negative, e - (kTruncBits - width),
                 static_cast<std::uint64_t>(m) << (kTruncBits - width), true};
    out.tan.value = ux;
    Unrounded us = ux;
    us.sig -= 1;
    if (us.sig >> (kTruncBits - 1) == 0) {
      us.sig = (std::uint64_t{1} << kTruncBits) - 1;
      us.exponent -= 1;
    }
    out.sin.value = us;
    out.cos.value = Unrounded{false, -kTruncBits, (std::uint64_t{1} << kTruncBits) - 1, true};
    return true;
  }

  const FastTables& t = tables();
  F128 z;
  int k = 0;
  if (top < -6) {  // |x| < 2^-6 < pi/128: no reduction
    z = F128::from_parts(false, m, e);
  } else {
    const Reduction red = reduce(m, e);
    k = red.k;
    z = detail::mul(red.r, t.pi_over_256);
  }
  const F128 z2 = detail::mul(z, z);
  const F128 sz = detail::mul(z, poly(t.sin_coeffs, z2));
  const F128 cz = poly(t.cos_coeffs, z2);
  const F128& sk = t.sin_table[k];
  const F128& ck = t.sin_table[(k + 128) & 511];
  F128 s = detail::add(detail::mul(sk, cz), detail::mul(ck, sz));
  const F128 c = detail::sub(detail::mul(ck, cz), detail::mul(sk, sz));
  F128 tn = detail::mul(s, detail::reciprocal(c));
  if (d.negative) {
    s = -s;
    tn = -tn;
  }
  return conclude(s, out.sin) && conclude(c, out.cos) && conclude(tn, out.tan);
}

HpReduction hp_reduce(std::uint32_t bits) {
  const FpTriple d = decode32(bits);
  if (d.is_nan || d.is_inf) throw std::invalid_argument("hp_reduce needs a finite input");
  const std::uint32_t m = d.full_significand();
  const int e = d.lsb_exponent();
  if (m == 0 || e + 31 - std::countl_zero(m) < -6)
    throw std::invalid_argument("hp_reduce needs |x| >= pi/128");
  const Reduction red = reduce(m, e);
  HpReduction out;
  out.precision_bits = red.window_bits;
  const double hi = red.r.to_double();
  const F128 rest = detail::sub(red.r, F128::from_double(hi));
  out.r_hi = hi;
  out.r_lo = rest.to_double();
  out.k_mod_512 = red.k;
  if (d.negative) {
    out.k_mod_512 = (512 - out.k_mod_512) & 511;
    out.r_hi = -out.r_hi;
    out.r_lo = -out.r_lo;
  }
  return out;
}

}  // namespace crtrig
