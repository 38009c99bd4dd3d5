// Comparison of kernel results against the oracle over sets of inputs.
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "crtrig/fpcore.hpp"
#include "crtrig/func.hpp"
#include "crtrig/poly.hpp"
#include "crtrig/rangered.hpp"

namespace crtrig {

// Thrown when a coefficient or table file is missing or inconsistent.
class ArtifactError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Loads poly_reduced.txt and poly_small.txt from `dir`.  The files must
// name the compiled evaluation order and the compiled table's checksum.
KernelPolys load_kernel_polys(const std::string& dir);

struct InputScope {
  enum class Kind { Exhaustive, Random, File };
  Kind kind = Kind::Exhaustive;
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
  std::string path;

  // "exhaustive", "random:N:SEED" or "file:PATH".
  static InputScope parse(std::string_view text);
  std::string str() const;
};

// Binary32 patterns of a random scope: n draws of 32 uniform bits.
std::vector<std::uint32_t> random_patterns(std::uint64_t n, std::uint64_t seed);
// Patterns listed one per line (any base accepted by strtoul), '#' comments.
std::vector<std::uint32_t> read_pattern_file(const std::string& path);

struct VerifyOptions {
  std::vector<Func> funcs{Func::Sin};
  int fmt_lo = 32;
  int fmt_hi = 32;
  std::vector<RoundingMode> modes{RoundingMode::NearestEven};
  std::vector<ReductionStrategy> strategies{ReductionStrategy::Hybrid};
  // Exhaustive means every pattern of each format, widened to binary32.
  // Random and file scopes give binary32 inputs whose results are rounded
  // to each format.
  InputScope scope;
  int jobs = 0;
  std::string oracle_cache;  // directory holding <func>.ro34 files; empty for none
  KernelPolys polys = builtin_polys();
  std::size_t max_failures = 100;
  bool progress = false;
};

struct FailureRecord {
  std::uint32_t input_bits = 0;
  std::uint64_t expected_bits = 0;
  std::uint64_t got_bits = 0;
};

struct VerifyReport {
  Func func = Func::Sin;
  int fmt = 32;
  RoundingMode mode = RoundingMode::NearestEven;
  ReductionStrategy strategy = ReductionStrategy::Hybrid;
  std::string scope;
  std::uint64_t total = 0;
  std::uint64_t mismatches = 0;
  std::vector<FailureRecord> first_failures;  // smallest failing patterns first
  double wall_time_seconds = 0;  // of the whole run that produced the report
  bool pass() const { return mismatches == 0; }
  std::string json() const;
};

// One report per (func, fmt, mode, strategy), in that nesting order.
std::vector<VerifyReport> run_verify(const VerifyOptions& o);

}  // namespace crtrig
