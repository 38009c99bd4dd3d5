// Arbitrary-precision reference values for sin, cos and tan of binary32
// inputs.
//
// Two engines are provided.  The general engine evaluates with MPFR and
// escalates the working precision (128, 256, 512, 1024 bits) until the
// truncation of the result to kTruncBits significant bits is unambiguous.
// The fast engine reduces the argument against a 1280-bit expansion of
// 2/pi, evaluates Taylor series in 128-bit fixed-mantissa arithmetic and
// falls back to the general engine when its error bound straddles a
// truncation boundary.
#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "crtrig/fpcore.hpp"
#include "crtrig/func.hpp"

namespace crtrig {

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Significant bits kept by the oracle before the sticky bit.  Any format up
// to 34 bits can be rounded correctly from this.
inline constexpr int kTruncBits = 48;

// f(x) truncated toward zero to kTruncBits bits.  `exact` results (only at
// x = 0) have sticky cleared; every other finite input gives a
// transcendental value and therefore a set sticky bit.
struct OracleValue {
  bool nan = false;
  Unrounded value;

  double ro34() const;  // round-to-odd 34-bit value as binary64
  std::uint64_t rounded(FpFormat fmt, RoundingMode mode) const;
};

struct OracleTriple {
  OracleValue sin, cos, tan;
  const OracleValue& operator[](Func f) const {
    return f == Func::Sin ? sin : (f == Func::Cos ? cos : tan);
  }
};

// Binary64 values whose round-to-odd 34-bit image is the correct result.
struct RoundingInterval {
  double lo = 0;
  double hi = 0;
  Func func = Func::Sin;
  std::uint32_t input = 0;
};

// 256 x / pi = 512 m + k_mod_512 + r with |r| <= 1/2.  r is held as an
// unevaluated sum r_hi + r_lo; precision_bits is the width of the fraction
// window the reduction was carried out with.
struct HpReduction {
  int k_mod_512 = 0;
  double r_hi = 0;
  double r_lo = 0;
  int precision_bits = 0;
};

// Words of the binary expansion of 2/pi after the binary point, most
// significant first (2/pi = sum words[i] * 2^(-64 (i + 1))).
std::span<const std::uint64_t> two_over_pi_words();
// Words of pi / 4 in the same layout.
std::span<const std::uint64_t> pi_over_four_words();
// Leading `bits` bits of 256/pi as a big-endian bit vector starting at the
// 2^6 bit.
std::vector<bool> inv_pi_256_bits(int bits);

class MpfrEngine {
 public:
  explicit MpfrEngine(int start_bits = 128, int max_bits = 1024);
  ~MpfrEngine();
  MpfrEngine(const MpfrEngine&) = delete;
  MpfrEngine& operator=(const MpfrEngine&) = delete;

  OracleValue eval(Func f, std::uint32_t x);
  // Highest working precision any call needed so far.
  int max_precision_used() const { return max_used_; }

 private:
  struct State;
  State* st_;
  int start_bits_;
  int max_bits_;
  int max_used_ = 0;
};

class Oracle {
 public:
  Oracle();

  // All three functions of x.  Uses the fast engine when its error bound is
  // conclusive and the general engine otherwise.
  OracleTriple eval_all(std::uint32_t x);
  OracleValue eval(Func f, std::uint32_t x) { return eval_all(x)[f]; }
  // General engine only.
  OracleValue hp_eval(Func f, std::uint32_t x) { return mpfr_.eval(f, x); }

  double ro34(Func f, std::uint32_t x) { return eval(f, x).ro34(); }
  RoundingInterval rounding_interval(Func f, std::uint32_t x);

  std::uint64_t fallbacks() const { return fallbacks_; }

 private:
  MpfrEngine mpfr_;
  std::uint64_t fallbacks_ = 0;
};

// Fast engine on its own; returns false when the result is inconclusive.
bool fast_eval_all(std::uint32_t x, OracleTriple& out);

// Interval of binary64 values mapping to the 34-bit value v34 under
// round-to-odd.  Exact values give the degenerate [v34, v34].
RoundingInterval interval_around(double v34, bool exact);

// Reduction of a finite binary32 with |x| >= pi/128.
HpReduction hp_reduce(std::uint32_t x);

// Cache of round-to-odd results: 12-byte little-endian records, a 4-byte
// input pattern followed by the 8-byte binary64 result.
struct CacheRecord {
  std::uint32_t input = 0;
  double ro34 = 0;
};
void write_cache(const std::string& path, std::span<const CacheRecord> records);
void append_cache(const std::string& path, std::span<const CacheRecord> records);
std::vector<CacheRecord> read_cache(const std::string& path);

}  // namespace crtrig
