#include "crtrig/oracle.hpp"

#include <gmp.h>
#include <mpfr.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>

#include "doctest.h"

using namespace crtrig;

namespace {

// 2/pi as published in 24-bit groups (fdlibm's __kernel_rem_pio2 table).
constexpr std::uint32_t kPublishedTwoOverPi[] = {
    0xA2F983, 0x6E4E44, 0x1529FC, 0x2757D1, 0xF534DD, 0xC0DB62, 0x95993C, 0x439041,
    0xFE5163, 0xABDEBB, 0xC561B7, 0x246E3A, 0x424DD2, 0xE00649, 0x2EEA09, 0xD1921C,
    0xFE1DEB, 0x1CB129, 0xA73EE8, 0x8235F5, 0x2EBB44, 0x84E99C, 0x7026B4, 0x5F7E41,
    0x3991D6, 0x398353, 0x39F49C, 0x845F8B, 0xBDF928, 0x3B1FF8, 0x97FFDE, 0x05980F,
    0xEF2F11, 0x8B5A0A, 0x6D1F6D, 0x367ECF, 0x27CB09, 0xB74F46, 0x3F669E, 0x5FEA2D,
    0x7527BA, 0xC7EBE5, 0xF17B3D, 0x0739F7, 0x8A5292, 0xEA6BFB, 0x5FB11F, 0x8D5D08,
    0x560330, 0x46FC7B, 0x6BABF0, 0xCFBC20, 0x9AF436, 0x1DA9E3, 0x91615E, 0xE61B08,
    0x659985, 0x5F14A0, 0x68408D, 0xFFD880, 0x4D7327, 0x310606, 0x1556CA, 0x73A8C9,
    0x60E27B, 0xC08C6B};

// Fraction digits of pi as used for the Blowfish P-array.
constexpr std::uint32_t kPublishedPiFraction[] = {
    0x243F6A88, 0x85A308D3, 0x13198A2E, 0x03707344, 0xA4093822, 0x299F31D0,
    0x082EFA98, 0xEC4E6C89, 0x452821E6, 0x38D01377, 0xBE5466CF, 0x34E90C6C,
    0xC0AC29B7, 0xC97C50DD, 0x3F84D5B5, 0xB5470917, 0x9216D5D9, 0x8979FB1B};

bool word_bit(std::span<const std::uint64_t> w, int i) {
  return ((w[i / 64] >> (63 - i % 64)) & 1) != 0;
}

// f(x) by summing Taylor series at 512 bits with basic MPFR arithmetic.
// Returns the value rounded toward zero to kTruncBits bits.
Unrounded taylor_reference(Func f, float xf) {
  constexpr int kPrec = 512;
  mpfr_t x, term, s, c, x2, t;
  mpfr_inits2(kPrec, x, term, s, c, x2, t, static_cast<mpfr_ptr>(nullptr));
  mpfr_set_flt(x, xf, MPFR_RNDN);
  mpfr_mul(x2, x, x, MPFR_RNDN);
  mpfr_set(s, x, MPFR_RNDN);
  mpfr_set_ui(c, 1, MPFR_RNDN);
  mpfr_set(term, x, MPFR_RNDN);
  for (int n = 1; n < 400; ++n) {  // term = x^(2n-1)/(2n-1)!
    mpfr_mul(t, term, x, MPFR_RNDN);
    mpfr_div_ui(t, t, 2 * n, MPFR_RNDN);  // x^(2n)/(2n)!
    if (n % 2) mpfr_sub(c, c, t, MPFR_RNDN); else mpfr_add(c, c, t, MPFR_RNDN);
    mpfr_mul(term, t, x, MPFR_RNDN);
    mpfr_div_ui(term, term, 2 * n + 1, MPFR_RNDN);  // x^(2n+1)/(2n+1)!
    if (n % 2) mpfr_sub(s, s, term, MPFR_RNDN); else mpfr_add(s, s, term, MPFR_RNDN);
  }
  mpfr_ptr r = s;
  if (f == Func::Cos) r = c;
  if (f == Func::Tan) {
    mpfr_div(t, s, c, MPFR_RNDN);
    r = t;
  }
  mpfr_t trunc;
  mpfr_init2(trunc, kTruncBits);
  mpfr_set(trunc, r, MPFR_RNDZ);
  mpz_t z;
  mpz_init(z);
  const long e = mpfr_get_z_2exp(z, trunc);
  Unrounded u;
  u.negative = mpz_sgn(z) < 0;
  mpz_abs(z, z);
  u.sig = mpz_get_ui(z);
  u.exponent = static_cast<int>(e);
  u.sticky = true;
  mpz_clear(z);
  mpfr_clear(trunc);
  mpfr_clears(x, term, s, c, x2, t, static_cast<mpfr_ptr>(nullptr));
  return u;
}

// 256 x / pi = k + r directly at 600 bits.
void direct_reduction(float xf, int& k_mod, double& r) {
  mpfr_t x, pi, q, n;
  mpfr_inits2(600, x, pi, q, n, static_cast<mpfr_ptr>(nullptr));
  mpfr_set_flt(x, xf, MPFR_RNDN);
  mpfr_const_pi(pi, MPFR_RNDN);
  mpfr_mul_2ui(q, x, 8, MPFR_RNDN);
  mpfr_div(q, q, pi, MPFR_RNDN);
  mpfr_rint(n, q, MPFR_RNDN);
  mpfr_sub(q, q, n, MPFR_RNDN);
  r = mpfr_get_d(q, MPFR_RNDN);
  mpz_t z;
  mpz_init(z);
  mpfr_get_z(z, n, MPFR_RNDN);
  k_mod = static_cast<int>(mpz_fdiv_ui(z, 512));
  mpz_clear(z);
  mpfr_clears(x, pi, q, n, static_cast<mpfr_ptr>(nullptr));
}

bool same(const OracleValue& a, const OracleValue& b) {
  if (a.nan || b.nan) return a.nan == b.nan;
  return a.value.negative == b.value.negative && a.value.sig == b.value.sig &&
         a.value.exponent == b.value.exponent && a.value.sticky == b.value.sticky;
}

std::uint32_t stratified_input(std::mt19937_64& rng) {
  const std::uint32_t exp = static_cast<std::uint32_t>(rng() % 255);
  const std::uint32_t frac = static_cast<std::uint32_t>(rng()) & 0x7fffff;
  const std::uint32_t sign = static_cast<std::uint32_t>(rng() & 1) << 31;
  return sign | (exp << 23) | frac;
}

}  // namespace

TEST_CASE("2/pi expansion matches the published hex table") {
  const auto w = two_over_pi_words();
  REQUIRE(w.size() * 64 >= 1280);
  int checked = 0;
  for (std::size_t g = 0; g < std::size(kPublishedTwoOverPi); ++g) {
    for (int b = 0; b < 24; ++b) {
      const int i = static_cast<int>(g) * 24 + b;
      if (i >= static_cast<int>(w.size()) * 64) break;
      REQUIRE(word_bit(w, i) == (((kPublishedTwoOverPi[g] >> (23 - b)) & 1) != 0));
      ++checked;
    }
  }
  CHECK(checked == 1280);
}

TEST_CASE("pi expansion matches the published hex digits") {
  const auto w = pi_over_four_words();
  // pi/4 = 0.11 followed by the fraction bits of pi.
  CHECK(word_bit(w, 0));
  CHECK(word_bit(w, 1));
  for (std::size_t g = 0; g < std::size(kPublishedPiFraction); ++g)
    for (int b = 0; b < 32; ++b)
      REQUIRE(word_bit(w, 2 + static_cast<int>(g) * 32 + b) ==
              (((kPublishedPiFraction[g] >> (31 - b)) & 1) != 0));
}

TEST_CASE("256/pi bit vector") {
  const auto bits = inv_pi_256_bits(256);
  REQUIRE(bits.size() == 256);
  // 256/pi = 0x51.7cc1b72722..., leading bits 1010001.
  const bool want[] = {1, 0, 1, 0, 0, 0, 1, 0, 1, 1, 1, 1, 1};
  for (int i = 0; i < 13; ++i) CHECK(bits[i] == want[i]);
  CHECK_THROWS_AS(inv_pi_256_bits(100000), OracleError);
}

TEST_CASE("sin(1) rounds to 0x3f576aa4") {
  Oracle oracle;
  const std::uint32_t one = 0x3f800000;
  const OracleValue v = oracle.eval(Func::Sin, one);
  CHECK(v.rounded(kBinary32, RoundingMode::NearestEven) == 0x3f576aa4);
  const Unrounded ref = taylor_reference(Func::Sin, 1.0f);
  CHECK(round_to_format(ref, kBinary32, RoundingMode::NearestEven) == 0x3f576aa4);
  CHECK(same(v, oracle.hp_eval(Func::Sin, one)));
}

TEST_CASE("zero and special inputs") {
  Oracle oracle;
  for (std::uint32_t z : {0u, 0x80000000u}) {
    CHECK(oracle.ro34(Func::Cos, z) == 1.0);
    CHECK(oracle.hp_eval(Func::Cos, z).ro34() == 1.0);
    CHECK(oracle.ro34(Func::Sin, z) == 0.0);
    CHECK(std::signbit(oracle.ro34(Func::Sin, z)) == (z != 0));
    CHECK(std::signbit(oracle.ro34(Func::Tan, z)) == (z != 0));
  }
  for (std::uint32_t s : {0x7f800000u, 0xff800000u, 0x7fc00000u, 0xffffffffu}) {
    for (Func f : kAllFuncs) {
      CHECK(std::isnan(oracle.ro34(f, s)));
      CHECK(oracle.eval(f, s).rounded(kBfloat16, RoundingMode::NearestEven) == 0x7fc0);
    }
  }
}

TEST_CASE("sin of the float nearest pi") {
  Oracle oracle;
  const float x = 0x1.921fb6p+1f;
  const double delta = static_cast<double>(x) - 3.14159265358979323846;  // ~8.74e-8
  const double s = oracle.ro34(Func::Sin, float_bits(x));
  CHECK(s < 0);
  CHECK(std::fabs(s + delta) < 1e-14);
  CHECK(oracle.eval(Func::Sin, float_bits(x)).rounded(kBinary32, RoundingMode::NearestEven) ==
        float_bits(-8.742278e-8f));
}

TEST_CASE("fast engine agrees with the Taylor reference") {
  std::mt19937_64 rng(5);
  Oracle oracle;
  for (int i = 0; i < 300; ++i) {
    // Moderate magnitudes keep the series reference well conditioned.
    const float x = std::ldexp(static_cast<float>(rng() % 1000000) / 1e6f + 0.001f,
                               static_cast<int>(rng() % 6) - 3);
    const OracleTriple t = oracle.eval_all(float_bits(x));
    for (Func f : kAllFuncs) {
      const Unrounded ref = taylor_reference(f, x);
      REQUIRE(t[f].value.sig == ref.sig);
      REQUIRE(t[f].value.exponent == ref.exponent);
      REQUIRE(t[f].value.negative == ref.negative);
    }
  }
}

TEST_CASE("two oracle engines agree on 10^6 random inputs and special values") {
  std::mt19937_64 rng(20240601);
  MpfrEngine general;
  std::vector<std::uint32_t> inputs = {
      0x00000001, 0x80000001, 0x007fffff, 0x00800000, 0x30800000, 0x30ffffff,
      0x31000000, 0x3c800000, 0x3c7fffff, 0x3cc90fdb, 0x3f800000, 0x3fc90fdb,
      0x40490fdb, 0x4e800000, 0x4e7fffff, 0x4f000000, 0x7f7fffff, 0xff7fffff,
      0x5f800000, 0x68000000, 0x7e800000};
  while (inputs.size() < 1'000'000) inputs.push_back(stratified_input(rng));
  int fast_fallbacks = 0;
  for (std::uint32_t x : inputs) {
    OracleTriple fast;
    if (!fast_eval_all(x, fast)) {
      ++fast_fallbacks;
      continue;
    }
    for (Func f : kAllFuncs) {
      const OracleValue g = general.eval(f, x);
      if (!same(fast[f], g)) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%s(0x%08x)", std::string(to_string(f)).c_str(), x);
        FAIL(buf);
      }
    }
  }
  CHECK(fast_fallbacks < 10);
  MESSAGE("max MPFR precision used: " << general.max_precision_used());
}

TEST_CASE("rounding interval is tight") {
  Oracle oracle;
  std::mt19937_64 rng(9);
  for (int i = 0; i < 20000; ++i) {
    const std::uint32_t x = stratified_input(rng);
    for (Func f : kAllFuncs) {
      const RoundingInterval ri = oracle.rounding_interval(f, x);
      const double v = oracle.ro34(f, x);
      if (std::isnan(v)) continue;
      REQUIRE(ri.lo <= ri.hi);
      REQUIRE(round_to_odd_34(ri.lo) == v);
      REQUIRE(round_to_odd_34(ri.hi) == v);
      REQUIRE(round_to_odd_34(std::nextafter(ri.lo, -INFINITY)) != v);
      REQUIRE(round_to_odd_34(std::nextafter(ri.hi, INFINITY)) != v);
    }
  }
}

TEST_CASE("rounding interval by brute-force neighborhood scan") {
  auto scan = [](double v, RoundingInterval ri) {
    const double ulp34 = std::ldexp(1.0, std::ilogb(v) - 25);
    const double start = v - 2 * ulp34;
    const double stop = v + 2 * ulp34;
    std::uint64_t inside = 0;
    double lo = INFINITY, hi = -INFINITY;
    for (double d = start; d <= stop; d = std::nextafter(d, INFINITY)) {
      if (round_to_odd_34(d) == v) {
        ++inside;
        lo = std::min(lo, d);
        hi = std::max(hi, d);
      }
    }
    CHECK(lo == ri.lo);
    CHECK(hi == ri.hi);
    return inside;
  };
  Oracle oracle;
  // cos(0) = 1 is exact: only 1 itself rounds to it.
  const RoundingInterval exact = oracle.rounding_interval(Func::Cos, 0);
  CHECK(exact.lo == 1.0);
  CHECK(exact.hi == 1.0);
  CHECK(scan(1.0, exact) == 1);
  // sin(1) lies in [0.5, 1): the open interval between its 34-bit
  // neighbours holds 2^28 - 1 binary64 values.
  const double v = oracle.ro34(Func::Sin, 0x3f800000);
  CHECK(scan(v, oracle.rounding_interval(Func::Sin, 0x3f800000)) == (1u << 28) - 1);
}

TEST_CASE("hp_reduce against direct high-precision division") {
  const float pi32 = 0x1.921fb6p+1f;
  const HpReduction red = hp_reduce(float_bits(pi32));
  CHECK(red.k_mod_512 == 256);
  CHECK(red.precision_bits >= 256);
  CHECK(red.r_hi == doctest::Approx(7.1243e-6).epsilon(1e-4));

  std::mt19937_64 rng(3);
  for (int i = 0; i < 20000; ++i) {
    std::uint32_t x = stratified_input(rng) & 0x7fffffff;
    if (bits_float(x) < 0.025f) continue;
    int k = 0;
    double r = 0;
    direct_reduction(bits_float(x), k, r);
    const HpReduction h = hp_reduce(x);
    REQUIRE(h.k_mod_512 == k);
    REQUIRE(std::fabs(h.r_hi - r) <= std::ldexp(std::fabs(r), -52));
    const HpReduction hn = hp_reduce(x | 0x80000000u);
    REQUIRE(hn.k_mod_512 == ((512 - k) & 511));
    REQUIRE(hn.r_hi == -h.r_hi);
    REQUIRE(hn.r_lo == -h.r_lo);
  }
  CHECK_THROWS_AS(hp_reduce(float_bits(0.001f)), std::invalid_argument);
  CHECK_THROWS_AS(hp_reduce(0x7f800000), std::invalid_argument);
}

TEST_CASE("oracle cache round-trips 12-byte records") {
  const auto path = (std::filesystem::temp_directory_path() / "crtrig_cache_test.bin").string();
  std::vector<CacheRecord> recs = {{0x3f800000, 0.5}, {0xdeadbeef, -0x1.8p-100}};
  write_cache(path, recs);
  append_cache(path, std::vector<CacheRecord>{{7, 1.0}});
  CHECK(std::filesystem::file_size(path) == 36);
  const auto back = read_cache(path);
  REQUIRE(back.size() == 3);
  CHECK(back[0].input == 0x3f800000);
  CHECK(back[1].ro34 == -0x1.8p-100);
  CHECK(back[2].input == 7);
  std::filesystem::remove(path);
}

TEST_CASE("precision schedule validation") {
  CHECK_THROWS_AS(MpfrEngine(64, 1024), std::invalid_argument);
  CHECK_THROWS_AS(MpfrEngine(256, 128), std::invalid_argument);
}
