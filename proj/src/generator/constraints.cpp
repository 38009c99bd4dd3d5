#include <cmath>
#include <stdexcept>

#include "crtrig/generator.hpp"
#include "crtrig/kernels.hpp"

namespace crtrig {

Domain domain_of(std::uint32_t x) {
  return (x & 0x7fffffff) < kNoReductionBits ? Domain::Small : Domain::Reduced;
}

Constraint make_constraint(Func f, std::uint32_t x, const OracleValue& v, ReductionStrategy strategy) {
  if (f == Func::Tan) throw std::invalid_argument("tan is validated, not constrained");
  const std::uint32_t mag = x & 0x7fffffff;
  if (mag == 0 || mag >= 0x7f800000 || v.nan)
    throw std::invalid_argument("constraints need a finite nonzero input");
  Constraint c;
  c.func = f;
  c.input = x;
  c.domain = domain_of(x);
  const double dx = bits_float(x);
  if (c.domain == Domain::Small) {
    c.xp = dx;
    (f == Func::Sin ? c.a_sin : c.a_cos) = {1.0, 0.0};
  } else {
    const ReducedInput r = reduce(dx, strategy);
    c.xp = r.xp;
    c.xp_lo = r.xp_lo;
    const DD sk = sin_entry_dd(r.kp), ck = cos_entry_dd(r.kp);
    if (f == Func::Sin) {
      c.a_sin = ck;
      c.a_cos = sk;
    } else {
      c.a_sin = {-sk.hi, -sk.lo};
      c.a_cos = ck;
    }
  }
  c.target = v.ro34();
  const std::uint64_t p = pattern_34(std::fabs(c.target));
  const double below = value_34(p - 1), above = value_34(p + 1);
  if (c.target < 0) {
    c.lo = -above;
    c.hi = -below;
  } else {
    c.lo = below;
    c.hi = above;
  }
  return c;
}

std::vector<Constraint> make_constraints(Func f, std::span<const std::uint32_t> inputs,
                                         ReductionStrategy strategy, Oracle& oracle) {
  std::vector<Constraint> out;
  for (std::uint32_t x : inputs) {
    const std::uint32_t mag = x & 0x7fffffff;
    if (mag == 0 || mag >= 0x7f800000) continue;
    out.push_back(make_constraint(f, x, oracle.eval(f, x), strategy));
  }
  return out;
}

DD constraint_value(const PolyPair& pp, const Constraint& c) {
  const double z = poly_z(c.xp, c.xp_lo);
  if (c.domain == Domain::Small)
    return c.func == Func::Sin ? eval_sin_dd(pp, c.xp, c.xp_lo, z) : eval_cos_dd(pp, z);
  return dot2(c.a_cos, eval_cos_dd(pp, z), c.a_sin, eval_sin_dd(pp, c.xp, c.xp_lo, z));
}

double relative_slack(const PolyPair& pp, const Constraint& c) {
  const DD v = constraint_value(pp, c);
  const double above_lo = (v.hi - c.lo) + v.lo;
  const double below_hi = (c.hi - v.hi) - v.lo;
  return std::min(above_lo, below_hi) / std::fabs(c.target);
}

std::vector<std::uint32_t> validate(const KernelPolys& polys, Func f,
                                    std::span<const std::uint32_t> inputs, Oracle& oracle,
                                    ReductionStrategy strategy) {
  std::vector<std::uint32_t> bad;
  for (std::uint32_t x : inputs) {
    const double got = eval34(polys, f, x, strategy);
    const double want = oracle.eval(f, x).ro34();
    if (double_bits(got) != double_bits(want)) bad.push_back(x);
  }
  return bad;
}

}  // namespace crtrig
