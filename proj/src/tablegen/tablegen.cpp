#include <gmp.h>
#include <mpfr.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "crtrig/artifacts.hpp"
#include "crtrig/oracle.hpp"

namespace crtrig {
namespace {

// Fixed-point integer holding value * 2^-frac_bits.
class Fixed {
 public:
  Fixed() { mpz_init(v_); }
  ~Fixed() { mpz_clear(v_); }
  Fixed(const Fixed&) = delete;
  Fixed& operator=(const Fixed&) = delete;
  mpz_t& z() { return v_; }

 private:
  mpz_t v_;
};

struct Piece {
  double value = 0;
  int last_bit_exp = 0;
};

// Nearest value with at most 53 significant bits to x * 2^-frac_bits;
// subtracts it from x.
Piece take_nearest53(mpz_t x, int frac_bits) {
  Piece p;
  if (mpz_sgn(x) == 0) return p;
  const int neg = mpz_sgn(x) < 0;
  Fixed mag, q;
  mpz_abs(mag.z(), x);
  const int len = static_cast<int>(mpz_sizeinbase(mag.z(), 2));
  const int shift = len > 53 ? len - 53 : 0;
  if (shift > 0) {
    mpz_t half;
    mpz_init(half);
    mpz_setbit(half, shift - 1);
    mpz_add(q.z(), mag.z(), half);
    mpz_clear(half);
    mpz_fdiv_q_2exp(q.z(), q.z(), shift);
  } else {
    mpz_set(q.z(), mag.z());
  }
  p.value = std::ldexp(mpz_get_d(q.z()), shift - frac_bits);
  p.last_bit_exp = shift - frac_bits;
  mpz_mul_2exp(q.z(), q.z(), shift);
  if (neg) {
    p.value = -p.value;
    mpz_add(x, x, q.z());
  } else {
    mpz_sub(x, x, q.z());
  }
  return p;
}

// Bits [first, first + count) of the expansion as an integer.
std::uint64_t bit_field(const std::vector<bool>& bits, int first, int count) {
  std::uint64_t v = 0;
  for (int i = 0; i < count; ++i) v = (v << 1) | (bits[first + i] ? 1 : 0);
  return v;
}

// Remainder of the expansion after its first `used` bits.
void remainder_after(const std::vector<bool>& bits, int used, mpz_t out) {
  mpz_set_ui(out, 0);
  for (std::size_t i = used; i < bits.size(); ++i) {
    mpz_mul_2exp(out, out, 1);
    if (bits[i]) mpz_add_ui(out, out, 1);
  }
}

}  // namespace

PiConstants gen_pi_constants(int oracle_bits) {
  if (oracle_bits < 256) throw std::invalid_argument("at least 256 bits of 256/pi are required");
  const std::vector<bool> bits = inv_pi_256_bits(oracle_bits);
  const int frac_bits = oracle_bits - 7;  // the last bit has weight 2^(7 - oracle_bits)
  PiConstants c;
  Fixed r;

  for (int i = 0; i < 7; ++i) {
    const auto piece = bit_field(bits, 28 * i, 28);
    c.pieces28_exp[i] = -21 - 28 * i;
    c.pieces28[i] = std::ldexp(static_cast<double>(piece), c.pieces28_exp[i]);
    remainder_after(bits, 28 * (i + 1), r.z());
    c.tails28[i] = take_nearest53(r.z(), frac_bits).value;
  }

  remainder_after(bits, 0, r.z());
  for (int i = 0; i < 5; ++i) {
    const Piece p = take_nearest53(r.z(), frac_bits);
    c.pieces53[i] = p.value;
    c.pieces53_exp[i] = p.last_bit_exp;
  }

  remainder_after(bits, 28, r.z());
  for (int i = 0; i < 2; ++i) c.small53[i] = take_nearest53(r.z(), frac_bits).value;

  for (int i = 0; i < 3; ++i) c.words64[i] = bit_field(bits, 64 * i, 64);
  remainder_after(bits, 192, r.z());
  c.tail192 = take_nearest53(r.z(), frac_bits).value;

  c.p1 = bit_field(bits, 0, 40);
  c.p0 = bit_field(bits, 40, 40);
  remainder_after(bits, 80, r.z());
  c.tail80 = take_nearest53(r.z(), frac_bits).value;

  // pi/256 = (pi/4) / 64 from the oracle's word expansion of pi/4.
  const auto words = pi_over_four_words();
  mpz_set_ui(r.z(), 0);
  for (std::uint64_t w : words) {
    mpz_mul_2exp(r.z(), r.z(), 64);
    mpz_add_ui(r.z(), r.z(), w);
  }
  const int pi_frac_bits = static_cast<int>(words.size()) * 64 + 6;
  c.pi_over_256 = take_nearest53(r.z(), pi_frac_bits).value;
  c.pi_over_256_lo = take_nearest53(r.z(), pi_frac_bits).value;
  c.two_pow_minus_64 = 0x1p-64;
  return c;
}

SinTable build_sin_table() {
  SinTable t;
  mpfr_t pi, a, s;
  mpfr_inits2(512, pi, a, s, static_cast<mpfr_ptr>(nullptr));
  mpfr_const_pi(pi, MPFR_RNDN);
  for (int j = 0; j < 512; ++j) {
    if (j % 128 == 0) {
      static constexpr double kExact[] = {0.0, 1.0, 0.0, -1.0};
      t.hi[j] = kExact[j / 128];
      t.lo[j] = 0.0;
      continue;
    }
    mpfr_mul_ui(a, pi, j, MPFR_RNDN);
    mpfr_div_2ui(a, a, 8, MPFR_RNDN);
    mpfr_sin(s, a, MPFR_RNDN);
    t.hi[j] = mpfr_get_d(s, MPFR_RNDN);
    mpfr_sub_d(s, s, t.hi[j], MPFR_RNDN);
    t.lo[j] = mpfr_get_d(s, MPFR_RNDN);
  }
  mpfr_clears(pi, a, s, static_cast<mpfr_ptr>(nullptr));
  return t;
}

}  // namespace crtrig
