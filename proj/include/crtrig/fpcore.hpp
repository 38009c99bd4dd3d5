// Floating-point formats with an 8-bit exponent, bit-level decoding, and
// the rounding machinery shared by the kernels and the oracle.
//
// A format with `total_bits` bits has 1 sign bit, 8 exponent bits (bias 127)
// and `total_bits - 9` stored fraction bits.  binary32 is FpFormat{32},
// bfloat16 is FpFormat{16}; FpFormat{34} is the internal round-to-odd format
// and is stored as a binary64 value whose low 27 fraction bits are zero.
#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace crtrig {

struct FpFormat {
  int total_bits = 32;

  static constexpr int exp_bits = 8;
  static constexpr int bias = 127;
  static constexpr int emin = -126;
  static constexpr int emax = 127;

  constexpr int fraction_bits() const { return total_bits - 1 - exp_bits; }
  // Significand bits including the hidden bit.
  constexpr int precision() const { return fraction_bits() + 1; }

  constexpr std::uint64_t sign_mask() const {
    return std::uint64_t{1} << (total_bits - 1);
  }
  constexpr std::uint64_t inf_magnitude() const {
    return std::uint64_t{0xff} << fraction_bits();
  }
  constexpr std::uint64_t max_finite_magnitude() const {
    return inf_magnitude() - 1;
  }
  constexpr std::uint64_t quiet_nan() const {
    return inf_magnitude() | (std::uint64_t{1} << (fraction_bits() - 1));
  }
  constexpr bool valid() const { return total_bits >= 10 && total_bits <= 34; }

  friend constexpr bool operator==(FpFormat, FpFormat) = default;
};

inline constexpr FpFormat kBinary32{32};
inline constexpr FpFormat kBfloat16{16};
inline constexpr FpFormat kFormat34{34};

enum class RoundingMode {
  NearestEven,
  NearestAway,
  TowardZero,
  TowardPositive,
  TowardNegative,
  ToOdd,  // internal: produces the 34-bit intermediate
};

inline constexpr RoundingMode kUserModes[] = {
    RoundingMode::NearestEven, RoundingMode::NearestAway,
    RoundingMode::TowardZero, RoundingMode::TowardPositive,
    RoundingMode::TowardNegative};

std::string_view to_string(RoundingMode mode);
// Accepts rne, rna, rtz, rtp, rtn, rno.
RoundingMode parse_rounding_mode(std::string_view name);

struct FpTriple {
  bool negative = false;
  int biased_exp = 0;
  std::uint32_t significand = 0;  // stored fraction bits, hidden bit excluded
  bool is_nan = false;
  bool is_inf = false;
  bool is_zero = false;
  bool is_subnormal = false;

  // Integer significand including the hidden bit for normal numbers.
  std::uint32_t full_significand() const {
    return (biased_exp != 0 ? (std::uint32_t{1} << 23) : 0) | significand;
  }
  // Exponent of the least significant significand bit.
  int lsb_exponent() const { return (biased_exp != 0 ? biased_exp : 1) - 150; }
};

FpTriple decode32(std::uint32_t bits);
std::uint32_t encode32(const FpTriple& t);

inline std::uint32_t float_bits(float f) { return std::bit_cast<std::uint32_t>(f); }
inline float bits_float(std::uint32_t b) { return std::bit_cast<float>(b); }
inline std::uint64_t double_bits(double d) { return std::bit_cast<std::uint64_t>(d); }
inline double bits_double(std::uint64_t b) { return std::bit_cast<double>(b); }

// A real value sig * 2^exponent, with `sticky` set when nonzero bits exist
// below the least significant bit of `sig`.  The rounding routines need at
// least precision + 2 significant bits in `sig` whenever `sticky` is set.
struct Unrounded {
  bool negative = false;
  int exponent = 0;
  std::uint64_t sig = 0;
  bool sticky = false;
};

// Correctly rounds `u` to `fmt` under `mode` and returns the bit pattern
// (sign bit at position fmt.total_bits - 1).  Handles subnormals and the
// IEEE overflow rules; sig == 0 with no sticky gives a signed zero.
std::uint64_t round_to_format(const Unrounded& u, FpFormat fmt, RoundingMode mode);

// Exact value of a fmt pattern.  NaN patterns give a quiet NaN.
double decode_format(std::uint64_t pattern, FpFormat fmt);

// Widens a fmt pattern (fmt.total_bits <= 32) to the binary32 pattern of the
// same value.
constexpr std::uint32_t widen_to_binary32(std::uint64_t pattern, FpFormat fmt) {
  return static_cast<std::uint32_t>(pattern << (32 - fmt.total_bits));
}

Unrounded unrounded_from_double(double v);

// True when finite v is exactly representable in the 34-bit format.
inline bool representable_34(double v) {
  const std::uint64_t mag = double_bits(v) & 0x7fffffffffffffffULL;
  if (mag >= 0x47f0000000000000ULL) return false;
  if (mag >= 0x3810000000000000ULL) return (mag & ((std::uint64_t{1} << 27) - 1)) == 0;
  const double scaled = bits_double(mag) * 0x1p151;
  return scaled == static_cast<double>(static_cast<std::uint64_t>(scaled));
}

// Round-to-odd onto the 34-bit format.  Exact values are kept; otherwise the
// neighbour whose last significand bit is 1 is chosen.  NaN and infinities
// pass through; finite values beyond the format's range clamp to its largest
// finite value (round-to-odd never overflows).
inline double round_to_odd_34(double v) {
  constexpr std::uint64_t kLowMask = (std::uint64_t{1} << 27) - 1;
  std::uint64_t b = double_bits(v);
  const std::uint64_t mag = b & 0x7fffffffffffffffULL;
  const std::uint64_t sign = b ^ mag;
  if (mag >= 0x47f0000000000000ULL) {  // |v| >= 2^128, inf or nan
    if (mag >= 0x7ff0000000000000ULL) return v;
    return bits_double(sign | 0x47effffff8000000ULL);
  }
  if (mag >= 0x3810000000000000ULL) {  // |v| >= 2^-126
    if (mag & kLowMask) b = (b & ~kLowMask) | (kLowMask + 1);
    return bits_double(b);
  }
  // Subnormal range of the 34-bit format: quantum 2^-151.
  const double scaled = bits_double(mag) * 0x1p151;
  double t = static_cast<double>(static_cast<std::uint64_t>(scaled));
  if (t != scaled) t = static_cast<double>(static_cast<std::uint64_t>(t) | 1);
  return bits_double(sign | double_bits(t * 0x1p-151));
}

// Round-to-odd of the unevaluated sum hi + lo, where |lo| <= ulp(hi) / 2 or
// hi == 0.
inline double round_to_odd_34(double hi, double lo) {
  if (lo == 0.0) return round_to_odd_34(hi);
  if (hi == 0.0) return round_to_odd_34(lo);
  if (representable_34(hi)) {
    // Any value strictly between hi and its 34-bit neighbour in the
    // direction of lo rounds the same way as hi + lo.
    std::uint64_t b = double_bits(hi);
    const bool away = (lo > 0.0) == (hi > 0.0);
    b = away ? b + 1 : b - 1;
    return round_to_odd_34(bits_double(b));
  }
  return round_to_odd_34(hi);
}

// Rounds an exactly representable 34-bit value to `fmt` (total_bits <= 32).
// NaN yields the canonical quiet NaN of the target format.
std::uint64_t round_from_34(double v34, FpFormat fmt, RoundingMode mode);

// Invertible helpers for the 34-bit format used by the oracle and tests.
std::uint64_t pattern_34(double v34);
double value_34(std::uint64_t pattern);

}  // namespace crtrig
