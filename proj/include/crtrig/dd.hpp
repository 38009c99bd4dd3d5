// Error-free transformations on binary64.
#pragma once

#include <cmath>

namespace crtrig {

struct DD {
  double hi = 0;
  double lo = 0;
};

// a + b = s + err exactly.
inline DD two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  const double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

// Requires |a| >= |b| or a == 0.
inline DD fast_two_sum(double a, double b) {
  const double s = a + b;
  return {s, b - (s - a)};
}

// a * b = p + err exactly (barring underflow).
inline DD two_prod(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

}  // namespace crtrig
