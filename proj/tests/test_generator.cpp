#include "doctest.h"
#include <mpfr.h>

#include <random>

#include "crtrig/generator.hpp"
#include "crtrig/kernels.hpp"
#include "json.hpp"

using namespace crtrig;

namespace {

std::uint32_t bits_of(float f) { return std::bit_cast<std::uint32_t>(f); }

// Independent check of V = a_sin P_s + a_cos P_c at 400 bits.
double mpfr_value(const PolyPair& pp, const Constraint& c) {
  mpfr_t x, z, ps, pc, t;
  for (auto* v : {&x, &z, &ps, &pc, &t}) mpfr_init2(*v, 400);
  mpfr_set_d(x, c.xp, MPFR_RNDN);
  mpfr_add_d(x, x, c.xp_lo, MPFR_RNDN);
  mpfr_sqr(z, x, MPFR_RNDN);
  mpfr_set_d(ps, pp.sin_coeffs[pp.sin_terms - 1], MPFR_RNDN);
  for (int i = pp.sin_terms - 2; i >= 0; --i) {
    mpfr_mul(ps, ps, z, MPFR_RNDN);
    mpfr_add_d(ps, ps, pp.sin_coeffs[i], MPFR_RNDN);
  }
  mpfr_mul(ps, ps, x, MPFR_RNDN);
  mpfr_set_d(pc, pp.cos_coeffs[pp.cos_terms - 1], MPFR_RNDN);
  for (int i = pp.cos_terms - 2; i >= 0; --i) {
    mpfr_mul(pc, pc, z, MPFR_RNDN);
    mpfr_add_d(pc, pc, pp.cos_coeffs[i], MPFR_RNDN);
  }
  mpfr_set_d(t, c.a_sin.hi, MPFR_RNDN);
  mpfr_add_d(t, t, c.a_sin.lo, MPFR_RNDN);
  mpfr_mul(ps, ps, t, MPFR_RNDN);
  mpfr_set_d(t, c.a_cos.hi, MPFR_RNDN);
  mpfr_add_d(t, t, c.a_cos.lo, MPFR_RNDN);
  mpfr_mul(pc, pc, t, MPFR_RNDN);
  mpfr_add(t, ps, pc, MPFR_RNDN);
  const double out = mpfr_get_d(t, MPFR_RNDN);
  for (auto* v : {&x, &z, &ps, &pc, &t}) mpfr_clear(*v);
  return out;
}

LpProblem problem_for(Domain d, std::vector<Constraint> cs) {
  LpProblem p;
  p.domain = d;
  p.constraints = std::move(cs);
  if (d == Domain::Small) {
    p.sin_degree = 9;
    p.cos_degree = 8;
  }
  p.reference = taylor_pair(p.sin_degree, p.cos_degree);
  return p;
}

std::vector<std::uint32_t> random_inputs(std::size_t n, std::uint32_t lo, std::uint32_t hi, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<std::uint32_t> d(lo, hi);
  std::vector<std::uint32_t> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

}  // namespace

TEST_CASE("domains follow the reduction threshold") {
  CHECK(domain_of(kNoReductionBits - 1) == Domain::Small);
  CHECK(domain_of(kNoReductionBits) == Domain::Reduced);
  CHECK(domain_of(kNoReductionBits | 0x80000000u) == Domain::Reduced);
  CHECK(domain_of(bits_of(-0.01f)) == Domain::Small);
}

TEST_CASE("constraint intervals are the 34-bit neighbours of the target") {
  Oracle o;
  for (float f : {1.0f, -2.5f, 1e6f, -3e30f}) {
    for (Func fn : {Func::Sin, Func::Cos}) {
      const Constraint c = make_constraint(fn, bits_of(f), o.eval(fn, bits_of(f)), ReductionStrategy::Hybrid);
      CHECK(c.lo < c.target);
      CHECK(c.target < c.hi);
      CHECK(round_to_odd_34(c.lo, 0) == c.lo);
      CHECK(round_to_odd_34(c.hi, 0) == c.hi);
      // lo and hi are even 34-bit patterns, target odd.
      CHECK((pattern_34(std::fabs(c.target)) & 1) == 1);
      CHECK(relative_slack(taylor_pair(7, 6), c) > 0);
    }
  }
  CHECK_THROWS_AS(make_constraint(Func::Tan, bits_of(1.0f), o.eval(Func::Tan, bits_of(1.0f)),
                                  ReductionStrategy::Hybrid),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_constraint(Func::Sin, 0, o.eval(Func::Sin, 0), ReductionStrategy::Hybrid),
                  std::invalid_argument);
}

TEST_CASE("constraint value matches a 400-bit evaluation") {
  Oracle o;
  const PolyPair pp = taylor_pair(7, 6);
  for (std::uint32_t x : random_inputs(200, kNoReductionBits, 0x7f7fffff, 3)) {
    for (Func f : {Func::Sin, Func::Cos}) {
      const Constraint c = make_constraint(f, x, o.eval(f, x), ReductionStrategy::Hybrid);
      const DD v = constraint_value(pp, c);
      const double ref = mpfr_value(pp, c);
      CHECK(std::fabs((v.hi + v.lo - ref) / ref) < 0x1p-60);
    }
  }
}

TEST_CASE("a single cos constraint is solved with slack") {
  Oracle o;
  const std::uint32_t x = bits_of(0.75f);
  const Constraint c = make_constraint(Func::Cos, x, o.eval(Func::Cos, x), ReductionStrategy::Hybrid);
  const LpSolution s = solve_lp(problem_for(Domain::Reduced, {c}));
  REQUIRE(s.feasible);
  CHECK(s.exact);
  CHECK(s.min_slack > 0);
  CHECK(s.recheck.ok());
  CHECK(s.recheck.checked == 1);
  CHECK(s.max_relative_change <= 0x1p-44);
  const double v = mpfr_value(s.pair, c);
  CHECK(v > c.lo);
  CHECK(v < c.hi);
  // c1 and d0 stay pinned.
  CHECK(s.pair.sin_coeffs[0] == 1.0);
  CHECK(s.pair.cos_coeffs[0] == 1.0);
}

TEST_CASE("an interval the reference misses forces a non-dyadic optimum") {
  Oracle o;
  // x' close to pi/512, where coefficient moves have the most effect.
  const std::uint32_t x = bits_of(static_cast<float>(61.49 * M_PI / 256));
  Constraint c = make_constraint(Func::Sin, x, o.eval(Func::Sin, x), ReductionStrategy::Hybrid);
  const double v = mpfr_value(taylor_pair(7, 6), c);
  // Just above the Taylor value: only a coefficient move reaches it, so the
  // optimal slack is an interior ratio rather than the box cap.
  c.lo = v + std::ldexp(std::fabs(v), -50);
  c.hi = v + std::ldexp(std::fabs(v), -48);
  c.target = v + std::ldexp(std::fabs(v), -49);
  const LpSolution s = solve_lp(problem_for(Domain::Reduced, {c}));
  REQUIRE(s.feasible);
  CHECK(s.min_slack > 0);
  CHECK(s.min_slack < 1);
  CHECK(s.recheck.ok());
  // The exact value clears lo, but may round onto it.
  const double w = mpfr_value(s.pair, c);
  CHECK(w >= c.lo);
  CHECK(w < c.hi);
}

TEST_CASE("contradictory constraints are reported infeasible") {
  Oracle o;
  const std::uint32_t x = bits_of(0.75f);
  const Constraint a = make_constraint(Func::Sin, x, o.eval(Func::Sin, x), ReductionStrategy::Hybrid);
  Constraint b = a;
  // Same evaluation point, interval just above a's: the two are disjoint.
  const std::uint64_t p = pattern_34(a.hi);
  b.lo = a.hi;
  b.target = value_34(p + 1);
  b.hi = value_34(p + 2);
  const LpSolution s = solve_lp(problem_for(Domain::Reduced, {a, b}));
  CHECK_FALSE(s.feasible);
  CHECK(s.min_slack < 0);
}

TEST_CASE("an empty constraint list is rejected") {
  CHECK_THROWS_AS(solve_lp(problem_for(Domain::Reduced, {})), std::invalid_argument);
  Oracle o;
  CHECK(validate(builtin_polys(), Func::Sin, {}, o).empty());
}

TEST_CASE("validation catches a dropped cubic term") {
  Oracle o;
  const auto inputs = random_inputs(20000, kNoReductionBits, 0x4f000000, 11);
  CHECK(validate(builtin_polys(), Func::Sin, inputs, o).empty());
  KernelPolys broken = builtin_polys();
  broken.reduced.sin_coeffs[1] = 0;
  broken.reduced.cos_coeffs[1] = 0;
  CHECK_FALSE(validate(broken, Func::Sin, inputs, o).empty());
  CHECK_FALSE(validate(broken, Func::Cos, inputs, o).empty());
  // The top terms are below the 34-bit quantum on this domain: dropping
  // one changes V by under 2^-50 relative.
  KernelPolys top = builtin_polys();
  top.reduced.sin_coeffs[top.reduced.sin_terms - 1] = 0;
  for (std::uint32_t x : std::span(inputs).first(2000)) {
    const DD a = eval_dd(builtin_polys(), Func::Sin, x, ReductionStrategy::Hybrid);
    const DD b = eval_dd(top, Func::Sin, x, ReductionStrategy::Hybrid);
    CHECK(std::fabs((a.hi - b.hi) + (a.lo - b.lo)) <= 0x1p-50 * std::fabs(a.hi));
  }
}

TEST_CASE("rational recheck agrees with the interval test") {
  Oracle o;
  const auto inputs = random_inputs(300, kNoReductionBits, 0x7f7fffff, 5);
  const auto cs = make_constraints(Func::Sin, inputs, ReductionStrategy::Hybrid, o);
  const PolyPair pp = builtin_polys().reduced;
  CHECK(exact_recheck(pp, cs, 0).ok());
  // Shift one interval off the value: it must fail.
  std::vector<Constraint> moved = cs;
  const double v = mpfr_value(pp, moved[7]);
  const std::uint64_t p = pattern_34(std::fabs(moved[7].hi));
  if (v > 0) {
    moved[7].lo = value_34(p + 2);
    moved[7].hi = value_34(p + 4);
  } else {
    moved[7].lo = -value_34(p + 4);
    moved[7].hi = -value_34(p + 2);
  }
  const RationalCheck r = exact_recheck(pp, moved, 0);
  CHECK(r.checked == moved.size());
  CHECK(r.passed == moved.size() - 1);
}

TEST_CASE("generation on explicit inputs converges and reports") {
  GenerateOptions o;
  o.inputs = random_inputs(3000, kNoReductionBits, 0x7f7fffff, 21);
  const auto small = random_inputs(1000, 0x30000000, kNoReductionBits - 1, 22);
  o.inputs.insert(o.inputs.end(), small.begin(), small.end());
  o.sample = 500;
  o.add_per_round = 100;
  o.tight = 0x1p-40;
  const GenerateReport r = generate_polys(o);
  CHECK(r.inputs_swept == o.inputs.size());
  CHECK(r.ok());
  CHECK(r.reduced.solution.recheck.ok());
  CHECK(r.small.solution.recheck.ok());
  Oracle oracle;
  for (Func f : kAllFuncs) CHECK(validate(r.polys, f, o.inputs, oracle).empty());

  const auto j = nlohmann::json::parse(r.json());
  CHECK(j["kind"] == "generate");
  CHECK(j["ok"] == true);
  CHECK(j["domains"].size() == 2);
  CHECK(j["domains"][0]["domain"] == "reduced");
  CHECK(j["domains"][0]["coefficients"]["sin"].size() == 4);
  CHECK(j["domains"][1]["coefficients"]["cos"].size() == 5);

  // Same options, same coefficients.
  const GenerateReport again = generate_polys(o);
  CHECK(again.polys.reduced == r.polys.reduced);
  CHECK(again.polys.small == r.polys.small);
}
