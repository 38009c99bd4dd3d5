// Polynomial synthesis from rounding intervals.
//
// Each constraint asks that the compensated value
//   V = a_sin * P_s(x') + a_cos * P_c(x')
// lie strictly between the 34-bit neighbours lo < target < hi of the
// correctly rounded round-to-odd result.  V is linear in the coefficients, so
// sin and cos coefficients are found jointly by one linear program.  tan is
// checked by validation only.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "crtrig/dd.hpp"
#include "crtrig/func.hpp"
#include "crtrig/oracle.hpp"
#include "crtrig/poly.hpp"
#include "crtrig/rangered.hpp"

namespace crtrig {

enum class Domain { Reduced, Small };

struct Constraint {
  double xp = 0;
  double xp_lo = 0;
  DD a_sin;  // multiplier of P_s
  DD a_cos;  // multiplier of P_c
  double lo = 0;
  double hi = 0;
  double target = 0;
  Func func = Func::Sin;
  std::uint32_t input = 0;
  Domain domain = Domain::Reduced;
};

// Which domain the kernel uses for x.
Domain domain_of(std::uint32_t x);

// The constraint for f at x given the oracle value.  x must be finite and
// nonzero; f must be Sin or Cos.
Constraint make_constraint(Func f, std::uint32_t x, const OracleValue& v, ReductionStrategy strategy);
std::vector<Constraint> make_constraints(Func f, std::span<const std::uint32_t> inputs,
                                         ReductionStrategy strategy, Oracle& oracle);

// V as the kernel computes it.
DD constraint_value(const PolyPair& pp, const Constraint& c);
// Signed distance of V inside (lo, hi), relative to |target|; negative when
// V is outside.
double relative_slack(const PolyPair& pp, const Constraint& c);

struct LpProblem {
  std::vector<Constraint> constraints;
  int sin_degree = 7;
  int cos_degree = 6;
  Domain domain = Domain::Reduced;
  PolyPair reference;         // coefficients stay within `radius` of these
  double radius = 0x1p-44;    // bound on the relative change of V
  double margin = 0x1p-62;    // relative shrink of every interval
};

struct RationalCheck {
  std::size_t checked = 0;
  std::size_t passed = 0;
  bool ok() const { return checked == passed; }
};

struct LpSolution {
  bool feasible = false;
  PolyPair pair;
  double min_slack = 0;  // optimal relative slack in the scaled LP
  std::vector<std::size_t> active;  // constraint indices in the final basis
  std::vector<std::size_t> hard;    // reference slack below 2 * margin; solved unshrunk
  int simplex_iterations = 0;
  bool exact = false;  // vertex confirmed in rational arithmetic
  RationalCheck recheck;  // rounded coefficients against every constraint
  double max_relative_change = 0;  // certified bound on |dV / V| vs. reference
};

LpSolution solve_lp(const LpProblem& p);

// Exact check of lo + margin|lo| <= V_exact <= hi - margin|hi| for the given
// binary64 coefficients, with V evaluated in rational arithmetic.
RationalCheck exact_recheck(const PolyPair& pp, std::span<const Constraint> cs, double margin);

// Inputs whose kernel result with `polys` differs from the oracle.
std::vector<std::uint32_t> validate(const KernelPolys& polys, Func f,
                                    std::span<const std::uint32_t> inputs, Oracle& oracle,
                                    ReductionStrategy strategy = ReductionStrategy::Hybrid);

struct GenerateOptions {
  int sin_degree = 7;
  int cos_degree = 6;
  int small_sin_degree = 9;
  int small_cos_degree = 8;
  // Candidates have reference slack below tight * min(1, (x' / D)^2), with
  // D = 2^-7 reduced and 2^-5 small.  Also the LP box radius.
  double tight = 0x1p-44;
  double margin = 0x1p-62;
  std::size_t sample = 5000;    // constraints in the first LP
  std::size_t add_per_round = 500;
  int max_rounds = 50;
  std::size_t spread = 20000;   // random non-tight constraints kept per domain
  std::uint64_t seed = 1;
  int jobs = 0;
  // Positive patterns swept for candidates: [sweep_from, sweep_to).
  std::uint64_t sweep_from = 1;
  std::uint64_t sweep_to = 0x7f800000;
  // When nonempty, these inputs replace the sweep.
  std::vector<std::uint32_t> inputs;
  bool quiet = true;
  // When set, the candidate inputs are written here, one hex pattern per line.
  std::string candidates_out;
};

struct DomainReport {
  Domain domain = Domain::Reduced;
  std::size_t candidates = 0;
  std::size_t tight = 0;
  std::size_t lp_constraints = 0;
  int rounds = 0;
  bool converged = false;  // no candidate violated the final pair
  std::vector<std::uint32_t> hard;  // dropped margin: reference slack below 2 * margin
  LpSolution solution;
  std::vector<std::uint32_t> failures;  // candidate inputs failing validation (all funcs)
  double margin = 0;
};

struct GenerateReport {
  KernelPolys polys;
  KernelPolys reference;
  DomainReport reduced;
  DomainReport small;
  std::size_t inputs_swept = 0;
  std::size_t tan_candidates = 0;
  std::vector<std::uint32_t> tan_failures;
  double seconds = 0;
  bool ok() const;
  std::string json() const;
};

// The fixed starting point: truncated Taylor series.
KernelPolys reference_polys(const GenerateOptions& o);

GenerateReport generate_polys(const GenerateOptions& o);

inline constexpr int kGeneratorVersion = 1;

}  // namespace crtrig
