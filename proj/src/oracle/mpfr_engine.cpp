#include <gmp.h>
#include <mpfr.h>

#include <algorithm>
#include <cstdio>

#include "crtrig/oracle.hpp"

namespace crtrig {

struct MpfrEngine::State {
  mpfr_t x, y, t;
  mpz_t z;
  State() {
    mpfr_init2(x, 64);
    mpfr_init2(y, 128);
    mpfr_init2(t, kTruncBits);
    mpz_init(z);
  }
  ~State() {
    mpfr_clear(x);
    mpfr_clear(y);
    mpfr_clear(t);
    mpz_clear(z);
  }
};

MpfrEngine::MpfrEngine(int start_bits, int max_bits)
    : st_(new State), start_bits_(start_bits), max_bits_(max_bits) {
  if (start_bits < 128 || max_bits < start_bits)
    throw std::invalid_argument("oracle precision schedule out of range");
}

MpfrEngine::~MpfrEngine() { delete st_; }

OracleValue MpfrEngine::eval(Func f, std::uint32_t bits) {
  OracleValue out;
  const float xf = bits_float(bits);
  const FpTriple d = decode32(bits);
  if (d.is_nan || d.is_inf) {
    out.nan = true;
    return out;
  }
  if (d.is_zero) {
    out.value.negative = d.negative && f != Func::Cos;
    out.value.sig = f == Func::Cos ? 1 : 0;
    return out;
  }
  mpfr_set_flt(st_->x, xf, MPFR_RNDN);
  for (int prec = start_bits_; prec <= max_bits_; prec *= 2) {
    mpfr_set_prec(st_->y, prec);
    switch (f) {
      case Func::Sin: mpfr_sin(st_->y, st_->x, MPFR_RNDN); break;
      case Func::Cos: mpfr_cos(st_->y, st_->x, MPFR_RNDN); break;
      case Func::Tan: mpfr_tan(st_->y, st_->x, MPFR_RNDN); break;
    }
    // Half an ulp of error leaves prec - 1 correct bits with margin.
    if (!mpfr_can_round(st_->y, prec - 1, MPFR_RNDN, MPFR_RNDZ, kTruncBits)) continue;
    max_used_ = std::max(max_used_, prec);
    mpfr_set(st_->t, st_->y, MPFR_RNDZ);
    const long exp = mpfr_get_z_2exp(st_->z, st_->t);
    out.value.negative = mpz_sgn(st_->z) < 0;
    mpz_abs(st_->z, st_->z);
    out.value.sig = mpz_get_ui(st_->z);
    out.value.exponent = static_cast<int>(exp);
    out.value.sticky = true;
    return out;
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "oracle precision cap of %d bits exceeded for %s(0x%08x)",
                max_bits_, std::string(to_string(f)).c_str(), bits);
  throw OracleError(buf);
}

}  // namespace crtrig
