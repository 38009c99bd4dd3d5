// Public entry points.
#pragma once

#include <cstdint>

#include "crtrig/dd.hpp"
#include "crtrig/fpcore.hpp"
#include "crtrig/func.hpp"
#include "crtrig/poly.hpp"
#include "crtrig/rangered.hpp"

namespace crtrig {

// The value before the final rounding, as an unevaluated sum.  NaN and
// infinite inputs give NaN; zeros give (+-0, 0) for sin and tan, (1, 0) for
// cos.
DD eval_dd(const KernelPolys& polys, Func f, std::uint32_t x, ReductionStrategy strategy);

// 34-bit round-to-odd result.
double eval34(const KernelPolys& polys, Func f, std::uint32_t x, ReductionStrategy strategy);
double eval34(Func f, std::uint32_t x, ReductionStrategy strategy = ReductionStrategy::Hybrid);

// Correctly rounded result in `fmt` (total_bits <= 32) under `mode`.
std::uint64_t eval(Func f, std::uint32_t x, FpFormat fmt, RoundingMode mode);

// binary32, round to nearest even.
float cr_sinf(float x);
float cr_cosf(float x);
float cr_tanf(float x);

}  // namespace crtrig
