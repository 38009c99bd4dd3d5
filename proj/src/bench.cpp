#include "crtrig/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "crtrig/kernels.hpp"
#include "json.hpp"

namespace crtrig {

std::string_view to_string(Workload w) {
  switch (w) {
    case Workload::UniformBits: return "uniform";
    case Workload::Small: return "small";
    case Workload::Large: return "large";
  }
  return "?";
}

Workload parse_workload(std::string_view name) {
  for (Workload w : {Workload::UniformBits, Workload::Small, Workload::Large})
    if (to_string(w) == name) return w;
  throw std::invalid_argument("unknown workload: " + std::string(name));
}

std::vector<std::uint32_t> bench_inputs(Workload w, std::uint64_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint32_t> v;
  v.reserve(n);
  while (v.size() < n) {
    const auto x = static_cast<std::uint32_t>(rng() >> 32);
    const std::uint32_t mag = x & 0x7fffffff;
    if (mag >= 0x7f800000) continue;
    if (w == Workload::Small && (mag < kNoReductionBits || mag >= kLargeInputBits)) continue;
    if (w == Workload::Large && mag < kLargeInputBits) continue;
    v.push_back(x);
  }
  return v;
}

double BenchReport::speedup(ReductionStrategy other) const {
  double h = NAN, t = NAN;
  for (const BenchResult& r : results) {
    if (r.strategy == ReductionStrategy::Hybrid) h = r.median_ns;
    if (r.strategy == other) t = r.median_ns;
  }
  return t / h - 1;
}

std::vector<std::string> BenchReport::json_lines() const {
  std::vector<std::string> out;
  for (const BenchResult& r : results)
    out.push_back(nlohmann::json{{"kind", "bench"},
                                 {"func", std::string(to_string(options.func))},
                                 {"workload", std::string(to_string(options.workload))},
                                 {"strategy", std::string(to_string(r.strategy))},
                                 {"n", options.n},
                                 {"repetitions", options.repetitions},
                                 {"median_ns_per_call", r.median_ns},
                                 {"ns_per_call", r.ns_per_rep}}
                      .dump());
  nlohmann::json sum = {{"kind", "bench_summary"},
                        {"func", std::string(to_string(options.func))},
                        {"workload", std::string(to_string(options.workload))},
                        {"note", "timings vary between machines and runs"}};
  for (ReductionStrategy s : {ReductionStrategy::FpV1, ReductionStrategy::FpV2, ReductionStrategy::Int}) {
    const double v = speedup(s);
    sum["hybrid_speedup_vs_" + std::string(to_string(s))] = std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v);
  }
  out.push_back(sum.dump());
  return out;
}

BenchReport run_bench(const BenchOptions& o) {
  BenchReport rep;
  rep.options = o;
  const std::vector<std::uint32_t> in = bench_inputs(o.workload, o.n, o.seed);
  const KernelPolys& polys = builtin_polys();
  for (ReductionStrategy s : o.strategies) rep.results.push_back({s, 0, {}});
  double sink = 0;
  for (int rep_i = 0; rep_i < o.repetitions; ++rep_i) {
    // Rotate the order so no strategy always runs first.
    for (std::size_t j = 0; j < rep.results.size(); ++j) {
      BenchResult& r = rep.results[(j + static_cast<std::size_t>(rep_i)) % rep.results.size()];
      const auto t0 = std::chrono::steady_clock::now();
      double acc = 0;
      for (std::uint32_t x : in) acc += eval34(polys, o.func, x, r.strategy);
      const auto t1 = std::chrono::steady_clock::now();
      sink += acc;
      r.ns_per_rep.push_back(std::chrono::duration<double, std::nano>(t1 - t0).count() / static_cast<double>(in.size()));
    }
  }
  for (BenchResult& r : rep.results) {
    std::vector<double> v = r.ns_per_rep;
    std::sort(v.begin(), v.end());
    r.median_ns = v.empty() ? NAN : v[v.size() / 2];
  }
  rep.sink = sink;
  return rep;
}

}  // namespace crtrig
