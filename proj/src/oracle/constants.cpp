#include <gmp.h>
#include <mpfr.h>

#include <array>

#include "crtrig/oracle.hpp"

namespace crtrig {
namespace {

constexpr int kWords = 20;
constexpr int kWorkBits = kWords * 64 + 128;

// Fraction words of value in (0, 1), truncated.
std::array<std::uint64_t, kWords> fraction_words(const mpfr_t value) {
  mpfr_t scaled;
  mpfr_init2(scaled, kWorkBits);
  mpfr_mul_2ui(scaled, value, kWords * 64, MPFR_RNDN);
  mpz_t z;
  mpz_init(z);
  mpfr_get_z(z, scaled, MPFR_RNDZ);
  std::array<std::uint64_t, kWords> out{};
  for (int i = kWords - 1; i >= 0; --i) {
    out[i] = mpz_get_ui(z);  // unsigned long is 64-bit on this target
    mpz_fdiv_q_2exp(z, z, 64);
  }
  mpz_clear(z);
  mpfr_clear(scaled);
  return out;
}

struct Expansions {
  std::array<std::uint64_t, kWords> two_over_pi;
  std::array<std::uint64_t, kWords> pi_over_four;

  Expansions() {
    static_assert(sizeof(unsigned long) == 8);
    mpfr_t pi, t;
    mpfr_init2(pi, kWorkBits);
    mpfr_init2(t, kWorkBits);
    mpfr_const_pi(pi, MPFR_RNDN);
    mpfr_ui_div(t, 2, pi, MPFR_RNDN);
    two_over_pi = fraction_words(t);
    mpfr_div_2ui(t, pi, 2, MPFR_RNDN);
    pi_over_four = fraction_words(t);
    mpfr_clear(t);
    mpfr_clear(pi);
    mpfr_free_cache();
  }
};

const Expansions& expansions() {
  static const Expansions e;
  return e;
}

}  // namespace

std::span<const std::uint64_t> two_over_pi_words() { return expansions().two_over_pi; }
std::span<const std::uint64_t> pi_over_four_words() { return expansions().pi_over_four; }

std::vector<bool> inv_pi_256_bits(int bits) {
  // 256/pi = 2^7 * (2/pi); its leading bit is the first fraction bit of 2/pi.
  const auto w = two_over_pi_words();
  if (bits <= 0 || bits > static_cast<int>(w.size()) * 64 - 64)
    throw OracleError("requested expansion width out of range");
  std::vector<bool> out;
  out.reserve(bits);
  for (int i = 0; i < bits; ++i) out.push_back(((w[i / 64] >> (63 - i % 64)) & 1) != 0);
  return out;
}

}  // namespace crtrig
