#include "crtrig/kernels.hpp"

#include <cmath>
#include <limits>

#include "crtrig/tables.hpp"

namespace crtrig {

DD sin_entry_dd(int kp) {
  const SinTable& t = sin_table();
  return {t.hi[kp], t.lo[kp]};
}

DD cos_entry_dd(int kp) { return sin_entry_dd((kp + 128) & 511); }

DD compensate_sin(int kp, DD s, DD c) { return compensate_sin(sin_entry_dd(kp), cos_entry_dd(kp), s, c); }
DD compensate_cos(int kp, DD s, DD c) { return compensate_cos(sin_entry_dd(kp), cos_entry_dd(kp), s, c); }
DD compensate_tan(int kp, DD s, DD c) {
  const DD sk = sin_entry_dd(kp), ck = cos_entry_dd(kp);
  return divide(compensate_sin(sk, ck, s, c), compensate_cos(sk, ck, s, c));
}

DD eval_dd(const KernelPolys& polys, Func f, std::uint32_t x, ReductionStrategy strategy) {
  const std::uint32_t mag = x & 0x7fffffff;
  if (mag >= 0x7f800000) return {std::numeric_limits<double>::quiet_NaN(), 0};
  if (mag == 0) return {f == Func::Cos ? 1.0 : static_cast<double>(bits_float(x)), 0};
  if (mag < kNoReductionBits) {
    const double xd = bits_float(x);
    const double z = xd * xd;
    const DD s = eval_sin_dd(polys.small, xd, 0.0, z);
    switch (f) {
      case Func::Sin: return s;
      case Func::Cos: return eval_cos_dd(polys.small, z);
      case Func::Tan: return divide(s, eval_cos_dd(polys.small, z));
    }
  }
  const ReducedInput r = reduce(bits_float(x), strategy);
  const double z = poly_z(r.xp, r.xp_lo);
  const DD s = eval_sin_dd(polys.reduced, r.xp, r.xp_lo, z);
  const DD c = eval_cos_dd(polys.reduced, z);
  const DD sk = sin_entry_dd(r.kp), ck = cos_entry_dd(r.kp);
  switch (f) {
    case Func::Sin: return compensate_sin(sk, ck, s, c);
    case Func::Cos: return compensate_cos(sk, ck, s, c);
    case Func::Tan: return divide(compensate_sin(sk, ck, s, c), compensate_cos(sk, ck, s, c));
  }
  return {};
}

double eval34(const KernelPolys& polys, Func f, std::uint32_t x, ReductionStrategy strategy) {
  const DD v = eval_dd(polys, f, x, strategy);
  return round_to_odd_34(v.hi, v.lo);
}

double eval34(Func f, std::uint32_t x, ReductionStrategy strategy) {
  return eval34(builtin_polys(), f, x, strategy);
}

std::uint64_t eval(Func f, std::uint32_t x, FpFormat fmt, RoundingMode mode) {
  return round_from_34(eval34(f, x), fmt, mode);
}

namespace {
float binary32(Func f, float x) {
  return bits_float(static_cast<std::uint32_t>(
      eval(f, float_bits(x), kBinary32, RoundingMode::NearestEven)));
}
}  // namespace

float cr_sinf(float x) { return binary32(Func::Sin, x); }
float cr_cosf(float x) { return binary32(Func::Cos, x); }
float cr_tanf(float x) { return binary32(Func::Tan, x); }

}  // namespace crtrig
