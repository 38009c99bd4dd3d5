// Latency of eval34 per reduction strategy on fixed input streams.
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "crtrig/func.hpp"
#include "crtrig/rangered.hpp"

namespace crtrig {

enum class Workload { UniformBits, Small, Large };
std::string_view to_string(Workload w);
Workload parse_workload(std::string_view name);  // uniform, small, large

// Finite binary32 inputs.  Small: pi/128 <= |x| < 2^30.  Large: |x| >= 2^30.
std::vector<std::uint32_t> bench_inputs(Workload w, std::uint64_t n, std::uint64_t seed);

struct BenchOptions {
  Func func = Func::Sin;
  std::vector<ReductionStrategy> strategies{kAllStrategies, kAllStrategies + 4};
  Workload workload = Workload::UniformBits;
  std::uint64_t n = 10'000'000;
  std::uint64_t seed = 1;
  int repetitions = 5;
};

struct BenchResult {
  ReductionStrategy strategy = ReductionStrategy::Hybrid;
  double median_ns = 0;
  std::vector<double> ns_per_rep;
};

struct BenchReport {
  BenchOptions options;
  std::vector<BenchResult> results;
  double sink = 0;  // keeps the measured calls alive
  // t_other / t_hybrid - 1; NaN when either strategy was not measured.
  double speedup(ReductionStrategy other) const;
  std::vector<std::string> json_lines() const;
};

BenchReport run_bench(const BenchOptions& o);

}  // namespace crtrig
