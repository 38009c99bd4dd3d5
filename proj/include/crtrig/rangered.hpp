// Argument reduction modulo pi/256.
//
// Every backend maps a finite binary32 x with |x| >= pi/128 to (xp, kp) with
//   x = xp + (512 m + kp) * pi / 256,   |xp| <= pi/512 (1 + 2^-40),
// where xp is carried as the unevaluated sum xp + xp_lo.  The binary64 part
// alone is the reduced input in the usual sense; the low part holds the
// bits lost when rounding the fraction to 53 bits.
#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace crtrig {

struct ReducedInput {
  double xp = 0;
  double xp_lo = 0;
  int kp = 0;
  bool needs_reduction = true;
};

enum class ReductionStrategy { FpV1, FpV2, Int, Hybrid };

inline constexpr ReductionStrategy kAllStrategies[] = {
    ReductionStrategy::FpV1, ReductionStrategy::FpV2, ReductionStrategy::Int,
    ReductionStrategy::Hybrid};

std::string_view to_string(ReductionStrategy s);
ReductionStrategy parse_strategy(std::string_view name);

// Pieces of 256/pi in the layouts the backends consume.  Each `tail`
// entry is the binary64 nearest to what remains of 256/pi after the
// preceding pieces.
struct PiConstants {
  // 28-bit pieces, truncated.  pieces28_exp[i] is the exponent of the last
  // bit of piece i.
  std::array<double, 7> pieces28{};
  std::array<int, 7> pieces28_exp{};
  std::array<double, 7> tails28{};  // remainder after pieces 0..i

  // 53-bit pieces, each the nearest binary64 to the remaining residual.
  // Element 4 is one more residual piece used as a tail.
  std::array<double, 5> pieces53{};
  std::array<int, 5> pieces53_exp{};

  // The small-input split: pieces28[0] followed by two 53-bit residuals.
  std::array<double, 2> small53{};

  // 192 leading bits in three words, most significant first.
  std::array<std::uint64_t, 3> words64{};
  double tail192 = 0;

  // 80 leading bits, 40 per word.
  std::uint64_t p1 = 0;
  std::uint64_t p0 = 0;
  double tail80 = 0;

  double pi_over_256 = 0;
  double pi_over_256_lo = 0;
  double two_pow_minus_64 = 0x1p-64;

  friend bool operator==(const PiConstants&, const PiConstants&) = default;
};

// Constants compiled into the library.
const PiConstants& pi_constants();

// |x| below this float is left unreduced.  Compared on binary32 bit
// patterns of |x|.
inline constexpr std::uint32_t kNoReductionBits = 0x3cc90fdb;  // smallest float above pi/128
inline constexpr std::uint32_t kLargeInputBits = 0x4e800000;   // 2^30

// The backends.  Inputs are binary32 values (as binary64) within each
// backend's range; the sign is folded into (kp, xp).
ReducedInput reduce_fp_small(double x);
ReducedInput reduce_fp28_large(double x);
ReducedInput reduce_fp53_large(double x);
ReducedInput reduce_int_small(double x);
ReducedInput reduce_int_large(double x);

// Routes x (|x| >= pi/128, finite) to a backend.  Throws on NaN and
// infinities.
ReducedInput reduce(double x, ReductionStrategy strategy);

// Reduction with the no-reduction region handled: |x| < pi/128 gives
// xp = x, kp = 0, needs_reduction = false.
ReducedInput reduce_any(std::uint32_t bits, ReductionStrategy strategy);

// Shift amounts taken by the integer backends for an input whose least
// significant bit has exponent `lsb_exp`.  Each is in [0, 64).
struct ShiftAmounts {
  int count = 0;
  std::array<int, 4> amounts{};
};
ShiftAmounts int_small_shifts(int lsb_exp);
ShiftAmounts int_large_shifts(int lsb_exp);

}  // namespace crtrig
