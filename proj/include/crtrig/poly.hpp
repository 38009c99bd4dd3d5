// Odd/even polynomial pairs over the reduced domain and the output
// compensation formulas.
//
// Evaluation order (tag kEvalOrder), with x' = xp + xp_lo:
//   z  = fma(xp, xp, 2 xp xp_lo)
//   qs = Horner in z over c3, c5, ...      (fma per step, highest first)
//   qc = Horner in z over d2, d4, ...
//   P_s = fast_two_sum(xp, xp_lo + (xp z) qs)
//   P_c = fast_two_sum(1, z qc)
// c1 and d0 are pinned to 1.
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "crtrig/dd.hpp"

namespace crtrig {

inline constexpr std::string_view kEvalOrder = "dd-horner-z-v1";
inline constexpr int kMaxTerms = 8;

struct PolyPair {
  std::array<double, kMaxTerms> sin_coeffs{};  // c1, c3, c5, ...
  std::array<double, kMaxTerms> cos_coeffs{};  // d0, d2, d4, ...
  int sin_terms = 0;
  int cos_terms = 0;

  int sin_degree() const { return 2 * sin_terms - 1; }
  int cos_degree() const { return 2 * cos_terms - 2; }

  friend bool operator==(const PolyPair&, const PolyPair&) = default;
};

// Degrees must be odd (sin) and even (cos), with at most kMaxTerms terms.
PolyPair make_poly_pair(int sin_degree, int cos_degree);
// Truncated Taylor series, coefficients rounded to nearest.
PolyPair taylor_pair(int sin_degree, int cos_degree);
void check_poly_pair(const PolyPair& pp);

// Both domains the kernel evaluates on.
struct KernelPolys {
  PolyPair reduced;  // |x'| <= pi/512
  PolyPair small;    // |x| < pi/128, no reduction

  friend bool operator==(const KernelPolys&, const KernelPolys&) = default;
};

// The compiled-in coefficients.
const KernelPolys& builtin_polys();

inline double poly_z(double xp, double xp_lo) { return std::fma(xp, xp, 2 * xp * xp_lo); }

inline DD eval_sin_dd(const PolyPair& pp, double xp, double xp_lo, double z) {
  double q = pp.sin_coeffs[pp.sin_terms - 1];
  for (int i = pp.sin_terms - 2; i >= 1; --i) q = std::fma(q, z, pp.sin_coeffs[i]);
  if (pp.sin_terms == 1) q = 0;
  return fast_two_sum(xp, xp_lo + (xp * z) * q);
}

inline DD eval_cos_dd(const PolyPair& pp, double z) {
  double q = pp.cos_coeffs[pp.cos_terms - 1];
  for (int i = pp.cos_terms - 2; i >= 1; --i) q = std::fma(q, z, pp.cos_coeffs[i]);
  if (pp.cos_terms == 1) q = 0;
  return fast_two_sum(1.0, z * q);
}

inline double eval_sin_poly(const PolyPair& pp, double xp) {
  return eval_sin_dd(pp, xp, 0.0, poly_z(xp, 0.0)).hi;
}
inline double eval_cos_poly(const PolyPair& pp, double xp) {
  return eval_cos_dd(pp, poly_z(xp, 0.0)).hi;
}

// a * b + c * d for pairs, normalized.
inline DD dot2(DD a, DD b, DD c, DD d) {
  const DD p = two_prod(a.hi, b.hi);
  const DD q = two_prod(c.hi, d.hi);
  const DD s = two_sum(p.hi, q.hi);
  const double lo = s.lo + (p.lo + q.lo) + ((a.hi * b.lo + a.lo * b.hi) + (c.hi * d.lo + c.lo * d.hi));
  return fast_two_sum(s.hi, lo);
}

// Table entries as pairs.
DD sin_entry_dd(int kp);
DD cos_entry_dd(int kp);

// sin(k pi/256 + x') = S_k P_c + C_k P_s.
inline DD compensate_sin(DD sk, DD ck, DD s, DD c) { return dot2(sk, c, ck, s); }
// cos(k pi/256 + x') = C_k P_c - S_k P_s.
inline DD compensate_cos(DD sk, DD ck, DD s, DD c) {
  return dot2(ck, c, {-sk.hi, -sk.lo}, s);
}
// num / den for pairs: one division plus a correction step.
inline DD divide(DD num, DD den) {
  const double q = num.hi / den.hi;
  const double r = std::fma(-q, den.hi, num.hi) + (num.lo - q * den.lo);
  return fast_two_sum(q, r / den.hi);
}

DD compensate_sin(int kp, DD s, DD c);
DD compensate_cos(int kp, DD s, DD c);
DD compensate_tan(int kp, DD s, DD c);

// Coefficient files: '#' header lines "key value" followed by
// "sin <i> <hex>" and "cos <i> <hex>" lines.
struct PolyFile {
  PolyPair pair;
  std::string domain;  // "reduced" or "small"
  std::string eval_order{kEvalOrder};
  std::uint64_t table_checksum = 0;
  int generator_version = 0;
};

std::string format_poly_file(const PolyFile& f);
PolyFile parse_poly_file(const std::string& text);

// Initializer body for the compiled-in KernelPolys.
std::string polys_inc(const KernelPolys& k);

}  // namespace crtrig
