#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <numeric>
#include <random>
#include <set>

#include "crtrig/artifacts.hpp"
#include "crtrig/generator.hpp"
#include "crtrig/kernels.hpp"
#include "crtrig/sweep.hpp"
#include "json.hpp"

namespace crtrig {
namespace {

std::uint64_t mix(std::uint64_t v) {
  v += 0x9e3779b97f4a7c15ULL;
  v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ULL;
  v = (v ^ (v >> 27)) * 0x94d049bb133111ebULL;
  return v ^ (v >> 31);
}

struct Candidates {
  std::vector<Constraint> cs[2];  // by domain, sin and cos
  std::vector<Constraint> tan;    // targets only
  std::size_t tight[2] = {0, 0};
  std::size_t swept = 0;

  void merge(Candidates& o) {
    for (int d = 0; d < 2; ++d) {
      cs[d].insert(cs[d].end(), o.cs[d].begin(), o.cs[d].end());
      tight[d] += o.tight[d];
    }
    tan.insert(tan.end(), o.tan.begin(), o.tan.end());
    swept += o.swept;
  }
};

bool by_input(const Constraint& a, const Constraint& b) {
  return a.input != b.input ? a.input < b.input : a.func < b.func;
}

std::uint64_t overlap(std::uint64_t a0, std::uint64_t a1, std::uint64_t b0, std::uint64_t b1) {
  const std::uint64_t lo = std::max(a0, b0), hi = std::min(a1, b1);
  return hi > lo ? hi - lo : 0;
}

class Collector {
 public:
  Collector(const GenerateOptions& o, const KernelPolys& ref, std::uint64_t n_small, std::uint64_t n_reduced)
      : o_(o), ref_(ref) {
    rate_[0] = n_reduced ? o.spread / (2.0 * n_reduced) : 0;
    rate_[1] = n_small ? o.spread / (2.0 * n_small) : 0;
  }

  void add(Candidates& out, std::uint32_t x, const OracleTriple& t) const {
    const std::uint32_t mag = x & 0x7fffffff;
    if (mag == 0 || mag >= 0x7f800000) return;
    ++out.swept;
    const Domain d = domain_of(x);
    const int di = d == Domain::Small ? 1 : 0;
    const PolyPair& pp = d == Domain::Small ? ref_.small : ref_.reduced;
    // Coefficient moves inside the LP box change V by at most
    // (tight / 4) (x' / D)^2 relative, so only slack below tight (x' / D)^2
    // can be lost.
    double threshold = o_.tight;
    for (Func f : {Func::Sin, Func::Cos}) {
      const Constraint c = make_constraint(f, x, t[f], ReductionStrategy::Hybrid);
      const double q = c.xp / (d == Domain::Small ? 0x1p-5 : 0x1p-7);
      threshold = o_.tight * std::min(1.0, q * q);
      const bool tight = relative_slack(pp, c) < threshold;
      const double u = static_cast<double>(mix(x ^ (o_.seed << 33) ^ (static_cast<std::uint64_t>(f) << 32)) >> 11) * 0x1p-53;
      if (tight) ++out.tight[di];
      if (tight || u < rate_[di]) out.cs[di].push_back(c);
    }
    const DD v = eval_dd(ref_, Func::Tan, x, ReductionStrategy::Hybrid);
    Constraint c;
    c.func = Func::Tan;
    c.input = x;
    c.domain = d;
    c.target = t.tan.ro34();
    const std::uint64_t p = pattern_34(std::fabs(c.target));
    const double below = value_34(p - 1), above = value_34(p + 1);
    c.lo = c.target < 0 ? -above : below;
    c.hi = c.target < 0 ? -below : above;
    const double slack = std::min((v.hi - c.lo) + v.lo, (c.hi - v.hi) - v.lo) / std::fabs(c.target);
    if (slack < threshold) out.tan.push_back(c);
  }

 private:
  const GenerateOptions& o_;
  const KernelPolys& ref_;
  double rate_[2];
};

Candidates collect(const GenerateOptions& o, const KernelPolys& ref) {
  Candidates all;
  if (!o.inputs.empty()) {
    Collector col(o, ref, o.inputs.size(), o.inputs.size());
    Oracle oracle;
    for (std::uint32_t x : o.inputs) col.add(all, x, oracle.eval_all(x));
  } else {
    const std::uint64_t n_small = overlap(o.sweep_from, o.sweep_to, 1, kNoReductionBits);
    const std::uint64_t n_reduced = overlap(o.sweep_from, o.sweep_to, kNoReductionBits, 0x7f800000);
    Collector col(o, ref, n_small, n_reduced);
    const int jobs = o.jobs > 0 ? o.jobs : default_jobs();
    std::vector<Candidates> part(jobs);
    const auto start = std::chrono::steady_clock::now();
    sweep_oracle(
        o.sweep_from, o.sweep_to, jobs,
        [&](int w, std::uint32_t x, const OracleTriple& t) { col.add(part[w], x, t); },
        [&](std::uint64_t done) {
          if (o.quiet || done % (std::uint64_t{1} << 26) != 0) return;
          const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
          std::fprintf(stderr, "generate: swept %llu of %llu inputs (%.0f s)\n",
                       static_cast<unsigned long long>(done),
                       static_cast<unsigned long long>(o.sweep_to - o.sweep_from), s);
        });
    for (auto& p : part) all.merge(p);
  }
  for (auto& v : all.cs) std::sort(v.begin(), v.end(), by_input);
  std::sort(all.tan.begin(), all.tan.end(), by_input);
  return all;
}

bool passes(const PolyPair& pp, const Constraint& c) {
  const DD v = constraint_value(pp, c);
  return double_bits(round_to_odd_34(v.hi, v.lo)) == double_bits(c.target);
}

DomainReport solve_domain(const GenerateOptions& o, Domain d, const PolyPair& reference,
                          const std::vector<Constraint>& cand) {
  DomainReport r;
  r.domain = d;
  r.candidates = cand.size();
  r.margin = o.margin;
  LpProblem p;
  p.domain = d;
  p.sin_degree = d == Domain::Small ? o.small_sin_degree : o.sin_degree;
  p.cos_degree = d == Domain::Small ? o.small_cos_degree : o.cos_degree;
  p.reference = reference;
  p.radius = o.tight;
  p.margin = o.margin;
  if (cand.empty()) {
    r.solution.pair = reference;
    r.solution.feasible = true;
    r.converged = true;
    return r;
  }
  std::vector<std::size_t> order(cand.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(o.seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<char> in_lp(cand.size(), 0);
  std::vector<std::size_t> chosen(order.begin(), order.begin() + std::min(o.sample, order.size()));
  std::sort(chosen.begin(), chosen.end());
  for (std::size_t i : chosen) in_lp[i] = 1;
  for (r.rounds = 1; r.rounds <= o.max_rounds; ++r.rounds) {
    p.constraints.clear();
    for (std::size_t i : chosen) p.constraints.push_back(cand[i]);
    r.solution = solve_lp(p);
    if (!o.quiet)
      std::fprintf(stderr, "generate: %s round %d: %zu constraints, slack %.3g, %d pivots\n",
                   d == Domain::Small ? "small" : "reduced", r.rounds, chosen.size(), r.solution.min_slack,
                   r.solution.simplex_iterations);
    if (!r.solution.feasible) break;
    std::vector<std::pair<double, std::size_t>> bad;
    for (std::size_t i = 0; i < cand.size(); ++i)
      if (!in_lp[i] && !passes(r.solution.pair, cand[i]))
        bad.emplace_back(relative_slack(r.solution.pair, cand[i]), i);
    if (bad.empty()) {
      r.converged = true;
      break;
    }
    std::sort(bad.begin(), bad.end());
    for (std::size_t k = 0; k < bad.size() && k < o.add_per_round; ++k) {
      chosen.push_back(bad[k].second);
      in_lp[bad[k].second] = 1;
    }
    std::sort(chosen.begin(), chosen.end());
  }
  r.rounds = std::min(r.rounds, o.max_rounds);
  r.lp_constraints = p.constraints.size();
  for (std::size_t i : r.solution.hard) r.hard.push_back(p.constraints[i].input);
  for (const Constraint& c : cand)
    if (!passes(r.solution.pair, c)) r.failures.push_back(c.input);
  return r;
}

std::string hex32(std::uint32_t v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "0x%08x", v);
  return buf;
}

std::string hexf(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

nlohmann::json hex_list(const std::vector<std::uint32_t>& v) {
  nlohmann::json a = nlohmann::json::array();
  for (std::uint32_t x : v) a.push_back(hex32(x));
  return a;
}

nlohmann::json pair_json(const PolyPair& pp) {
  nlohmann::json s = nlohmann::json::array(), c = nlohmann::json::array();
  for (int i = 0; i < pp.sin_terms; ++i) s.push_back(hexf(pp.sin_coeffs[i]));
  for (int i = 0; i < pp.cos_terms; ++i) c.push_back(hexf(pp.cos_coeffs[i]));
  return {{"sin_degree", pp.sin_degree()}, {"cos_degree", pp.cos_degree()}, {"sin", s}, {"cos", c}};
}

nlohmann::json domain_json(const DomainReport& r) {
  const LpSolution& s = r.solution;
  return {{"domain", r.domain == Domain::Small ? "small" : "reduced"},
          {"candidates", r.candidates},
          {"tight", r.tight},
          {"lp_constraints", r.lp_constraints},
          {"rounds", r.rounds},
          {"converged", r.converged},
          {"feasible", s.feasible},
          {"min_slack", s.min_slack},
          {"exact_vertex", s.exact},
          {"rational_recheck", {{"checked", s.recheck.checked}, {"passed", s.recheck.passed}}},
          {"max_relative_change", s.max_relative_change},
          {"margin", r.margin},
          {"simplex_iterations", s.simplex_iterations},
          {"hard", hex_list(r.hard)},
          {"failures", hex_list(r.failures)},
          {"coefficients", pair_json(s.pair)}};
}

}  // namespace

KernelPolys reference_polys(const GenerateOptions& o) {
  return {taylor_pair(o.sin_degree, o.cos_degree), taylor_pair(o.small_sin_degree, o.small_cos_degree)};
}

bool GenerateReport::ok() const {
  for (const DomainReport* r : {&reduced, &small}) {
    const LpSolution& s = r->solution;
    if (!r->converged || !s.feasible || !s.recheck.ok() || !r->failures.empty()) return false;
  }
  return tan_failures.empty();
}

std::string GenerateReport::json() const {
  nlohmann::json j = {{"kind", "generate"},
                      {"generator_version", kGeneratorVersion},
                      {"eval_order", std::string(kEvalOrder)},
                      {"inputs_swept", inputs_swept},
                      {"tan_candidates", tan_candidates},
                      {"tan_failures", hex_list(tan_failures)},
                      {"domains", {domain_json(reduced), domain_json(small)}},
                      {"seconds", seconds},
                      {"ok", ok()}};
  return j.dump();
}

GenerateReport generate_polys(const GenerateOptions& o) {
  const auto start = std::chrono::steady_clock::now();
  GenerateReport rep;
  rep.reference = reference_polys(o);
  Candidates cand = collect(o, rep.reference);
  if (!o.candidates_out.empty()) {
    std::set<std::uint32_t> ins;
    for (const auto& v : cand.cs)
      for (const Constraint& c : v) ins.insert(c.input);
    for (const Constraint& c : cand.tan) ins.insert(c.input);
    std::string text = "# generator candidates\n";
    char buf[16];
    for (std::uint32_t x : ins) {
      std::snprintf(buf, sizeof buf, "0x%08x\n", x);
      text += buf;
    }
    write_text_file(o.candidates_out, text);
  }
  rep.inputs_swept = cand.swept;
  rep.reduced = solve_domain(o, Domain::Reduced, rep.reference.reduced, cand.cs[0]);
  rep.reduced.tight = cand.tight[0];
  rep.small = solve_domain(o, Domain::Small, rep.reference.small, cand.cs[1]);
  rep.small.tight = cand.tight[1];
  rep.polys = {rep.reduced.solution.pair, rep.small.solution.pair};
  rep.tan_candidates = cand.tan.size();
  for (const Constraint& c : cand.tan)
    if (double_bits(eval34(rep.polys, Func::Tan, c.input, ReductionStrategy::Hybrid)) != double_bits(c.target))
      rep.tan_failures.push_back(c.input);
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace crtrig
