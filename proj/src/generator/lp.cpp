#include <gmp.h>
#include <gmpxx.h>
#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "crtrig/generator.hpp"
#include "simplex.hpp"

namespace crtrig {
namespace {

constexpr double kAmplification = 2.01;  // max |multiplier| * |P| / |V| over both domains

double rn_double(const mpq_class& q) {
  mpfr_t t;
  mpfr_init2(t, 53);
  mpfr_set_q(t, q.get_mpq_t(), MPFR_RNDN);
  const double d = mpfr_get_d(t, MPFR_RNDN);
  mpfr_clear(t);
  return d;
}

mpq_class pow2(int e) {
  mpq_class q(1);
  if (e >= 0) mpq_mul_2exp(q.get_mpq_t(), q.get_mpq_t(), e);
  else mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(), -e);
  return q;
}

int floor_log2(double v) {
  int e = 0;
  std::frexp(std::fabs(v), &e);
  return e - 1;
}

struct Layout {
  int sin_terms, cos_terms, nv;
  int log2_d;                 // domain scale D = 2^log2_d
  std::vector<int> power;     // power of x' per variable
  std::vector<bool> is_sin;
  std::vector<int> log2_beta; // variable j moves its coefficient by delta_j * 2^log2_beta[j]
};

Layout layout_for(const LpProblem& p) {
  const PolyPair shape = make_poly_pair(p.sin_degree, p.cos_degree);
  Layout l;
  l.sin_terms = shape.sin_terms;
  l.cos_terms = shape.cos_terms;
  l.nv = (l.sin_terms - 1) + (l.cos_terms - 1);
  if (l.nv == 0) throw std::invalid_argument("no free coefficients");
  l.log2_d = p.domain == Domain::Small ? -5 : -7;
  const int share = floor_log2(p.radius / (4 * kAmplification * l.nv));
  for (int i = 1; i < l.sin_terms; ++i) {
    l.power.push_back(2 * i + 1);
    l.is_sin.push_back(true);
    l.log2_beta.push_back(share - (2 * i) * l.log2_d);
  }
  for (int i = 1; i < l.cos_terms; ++i) {
    l.power.push_back(2 * i);
    l.is_sin.push_back(false);
    l.log2_beta.push_back(share - (2 * i) * l.log2_d);
  }
  return l;
}

// Coefficients of the reference at the problem's degrees.
PolyPair reference_at(const LpProblem& p) {
  PolyPair r = make_poly_pair(p.sin_degree, p.cos_degree);
  for (int i = 1; i < r.sin_terms; ++i) r.sin_coeffs[i] = i < p.reference.sin_terms ? p.reference.sin_coeffs[i] : 0;
  for (int i = 1; i < r.cos_terms; ++i) r.cos_coeffs[i] = i < p.reference.cos_terms ? p.reference.cos_coeffs[i] : 0;
  return r;
}

struct Exact {
  mpq_class xp, a_sin, a_cos;
};

Exact exact_of(const Constraint& c) {
  Exact e;
  e.xp = mpq_class(c.xp) + mpq_class(c.xp_lo);
  e.a_sin = mpq_class(c.a_sin.hi) + mpq_class(c.a_sin.lo);
  e.a_cos = mpq_class(c.a_cos.hi) + mpq_class(c.a_cos.lo);
  return e;
}

mpq_class exact_value(const PolyPair& pp, const Exact& e) {
  const mpq_class z = e.xp * e.xp;
  mpq_class s = pp.sin_coeffs[pp.sin_terms - 1];
  for (int i = pp.sin_terms - 2; i >= 0; --i) s = s * z + pp.sin_coeffs[i];
  s *= e.xp;
  mpq_class c = pp.cos_coeffs[pp.cos_terms - 1];
  for (int i = pp.cos_terms - 2; i >= 0; --i) c = c * z + pp.cos_coeffs[i];
  return e.a_sin * s + e.a_cos * c;
}

struct Bounds {
  mpq_class lo, hi;
};

Bounds shrunk(const Constraint& c, double margin) {
  const mpq_class lo(c.lo), hi(c.hi);
  return {lo + abs(lo) * margin, hi - abs(hi) * margin};
}

RationalCheck recheck(const PolyPair& pp, std::span<const Constraint> cs, std::span<const double> margins) {
  RationalCheck r;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const mpq_class v = exact_value(pp, exact_of(cs[i]));
    const Bounds b = shrunk(cs[i], margins[i]);
    ++r.checked;
    if (b.lo <= v && v <= b.hi) ++r.passed;
  }
  return r;
}


// Dense solve of M x = r in rational arithmetic; M is n x n, row-major.
std::vector<mpq_class> solve_square(std::vector<mpq_class> mat, std::vector<mpq_class> r, int n) {
  for (int c = 0; c < n; ++c) {
    int piv = c;
    while (piv < n && sgn(mat[piv * n + c]) == 0) ++piv;
    if (piv == n) throw std::runtime_error("singular basis in exact refinement");
    if (piv != c) {
      for (int k = 0; k < n; ++k) std::swap(mat[piv * n + k], mat[c * n + k]);
      std::swap(r[piv], r[c]);
    }
    const mpq_class d = mat[c * n + c];
    for (int row = c + 1; row < n; ++row) {
      if (sgn(mat[row * n + c]) == 0) continue;
      const mpq_class f = mat[row * n + c] / d;
      for (int k = c; k < n; ++k) mat[row * n + k] -= f * mat[c * n + k];
      r[row] -= f * r[c];
    }
  }
  std::vector<mpq_class> x(n);
  for (int row = n - 1; row >= 0; --row) {
    mpq_class acc = r[row];
    for (int k = row + 1; k < n; ++k) acc -= mat[row * n + k] * x[k];
    x[row] = acc / mat[row * n + row];
  }
  return x;
}

// log2 of a dyadic denominator.
int dyadic_exp(const mpq_class& q) {
  const mpz_class& d = q.get_den();
  const auto e = static_cast<int>(mpz_scan1(d.get_mpz_t(), 0));
  if (mpz_sizeinbase(d.get_mpz_t(), 2) != static_cast<std::size_t>(e) + 1)
    throw std::logic_error("LP data is not dyadic");
  return e;
}

struct ExactResult {
  bool ok = false;  // false: iteration cap reached
  std::vector<int> basis;
  std::vector<mpq_class> duals;
  int iterations = 0;
};

// Primal simplex for  min cost.x  s.t.  A x = rhs, x >= 0, rhs >= 0, in
// exact arithmetic.  Pricing runs on integers: every entry is dyadic, so A
// and cost are scaled by a common power of two and the duals are put over a
// common denominator.  Starts from `start` when it is exactly feasible and
// from an artificial basis otherwise.
class ExactSimplex {
 public:
  ExactSimplex(int m, const std::vector<mpq_class>& a, const std::vector<mpq_class>& cost,
               const std::vector<mpq_class>& rhs)
      : m_(m), n_(cost.size()), a_(a), rhs_(rhs), row_sign_(m, 1) {
    for (int i = 0; i < m_; ++i) {
      if (sgn(rhs_[i]) >= 0) continue;
      row_sign_[i] = -1;
      rhs_[i] = -rhs_[i];
      for (std::size_t j = 0; j < n_; ++j) a_[j * m_ + i] = -a_[j * m_ + i];
    }
    for (int i = 0; i < m_; ++i)
      for (int k = 0; k < m_; ++k) a_.push_back(i == k ? 1 : 0);
    int scale = 0;
    for (const mpq_class& q : a_) scale = std::max(scale, dyadic_exp(q));
    for (const mpq_class& q : cost) scale = std::max(scale, dyadic_exp(q));
    auto scaled = [scale](const mpq_class& q) {
      mpz_class z = q.get_num();
      mpz_mul_2exp(z.get_mpz_t(), z.get_mpz_t(), static_cast<mp_bitcnt_t>(scale - dyadic_exp(q)));
      return z;
    };
    ai_.reserve(a_.size());
    for (const mpq_class& q : a_) ai_.push_back(scaled(q));
    cost2_ = cost;
    cost2_.resize(n_ + m_, 0);
    cost1_.assign(n_ + m_, 0);
    for (int i = 0; i < m_; ++i) cost1_[n_ + i] = 1;
    for (const mpq_class& q : cost2_) ci2_.push_back(scaled(q));
    for (const mpq_class& q : cost1_) ci1_.push_back(scaled(q));
  }

  ExactResult solve(const std::vector<int>& start, int max_iterations) {
    ExactResult res;
    std::vector<int> basis = start;
    if (basis.size() != static_cast<std::size_t>(m_) || !feasible(basis)) {
      basis.resize(m_);
      for (int i = 0; i < m_; ++i) basis[i] = static_cast<int>(n_) + i;
      if (!run(basis, cost1_, ci1_, n_ + m_, max_iterations, res)) return res;
      const std::vector<mpq_class> x = solve_square(matrix(basis), rhs_, m_);
      for (int i = 0; i < m_; ++i)
        if (basis[i] >= static_cast<int>(n_) && sgn(x[i]) != 0) throw std::runtime_error("LP has no feasible point");
      drive_out(basis);
    }
    if (!run(basis, cost2_, ci2_, n_, max_iterations, res)) return res;
    for (int i = 0; i < m_; ++i)
      if (row_sign_[i] < 0) res.duals[i] = -res.duals[i];
    res.ok = true;
    return res;
  }

 private:
  mpq_class entry(std::size_t j, int k) const { return a_[j * m_ + k]; }

  std::vector<mpq_class> matrix(const std::vector<int>& basis) const {
    std::vector<mpq_class> bm(static_cast<std::size_t>(m_) * m_);
    for (int i = 0; i < m_; ++i)
      for (int k = 0; k < m_; ++k) bm[i * m_ + k] = entry(basis[k], i);
    return bm;
  }

  std::vector<mpq_class> column(std::size_t j) const {
    std::vector<mpq_class> c(m_);
    for (int k = 0; k < m_; ++k) c[k] = entry(j, k);
    return c;
  }

  bool feasible(const std::vector<int>& basis) const {
    try {
      for (const mpq_class& v : solve_square(matrix(basis), rhs_, m_))
        if (sgn(v) < 0) return false;
    } catch (const std::runtime_error&) {
      return false;
    }
    return true;
  }

  // Replaces artificial columns left at level zero by original columns.
  void drive_out(std::vector<int>& basis) const {
    for (int i = 0; i < m_; ++i) {
      if (basis[i] < static_cast<int>(n_)) continue;
      const std::vector<mpq_class> bm = matrix(basis);
      bool done = false;
      for (std::size_t j = 0; j < n_ && !done; ++j) {
        if (std::find(basis.begin(), basis.end(), static_cast<int>(j)) != basis.end()) continue;
        if (sgn(solve_square(bm, column(j), m_)[i]) != 0) {
          basis[i] = static_cast<int>(j);
          done = true;
        }
      }
      if (!done) throw std::runtime_error("redundant LP row");
    }
  }

  bool run(std::vector<int>& basis, const std::vector<mpq_class>& cost, const std::vector<mpz_class>& ci,
           std::size_t priced, int max_iterations, ExactResult& res) const {
    std::vector<char> in_basis(n_ + m_, 0);
    for (int b : basis) in_basis[b] = 1;
    std::vector<mpq_class> bt(static_cast<std::size_t>(m_) * m_), cb(m_);
    std::vector<mpz_class> yi(m_);
    mpz_class r, lcm, best;
    int local = 0;
    for (;;) {
      const std::vector<mpq_class> bm = matrix(basis);
      for (int i = 0; i < m_; ++i)
        for (int k = 0; k < m_; ++k) bt[k * m_ + i] = bm[i * m_ + k];
      const std::vector<mpq_class> x = solve_square(bm, rhs_, m_);
      for (int i = 0; i < m_; ++i) cb[i] = cost[basis[i]];
      const std::vector<mpq_class> y = solve_square(bt, cb, m_);
      lcm = 1;
      for (const mpq_class& v : y) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), v.get_den_mpz_t());
      for (int k = 0; k < m_; ++k) yi[k] = y[k].get_num() * (lcm / y[k].get_den());
      const bool bland = local >= 200;
      int enter = -1;
      for (std::size_t j = 0; j < priced; ++j) {
        if (in_basis[j]) continue;
        mpz_mul(r.get_mpz_t(), ci[j].get_mpz_t(), lcm.get_mpz_t());
        for (int k = 0; k < m_; ++k) mpz_submul(r.get_mpz_t(), yi[k].get_mpz_t(), ai_[j * m_ + k].get_mpz_t());
        if (sgn(r) >= 0) continue;
        if (enter < 0 || r < best) {
          enter = static_cast<int>(j);
          best = r;
        }
        if (bland) break;
      }
      if (enter < 0) {
        res.basis = basis;
        res.duals = y;
        return true;
      }
      if (res.iterations >= max_iterations) return false;
      const std::vector<mpq_class> u = solve_square(bm, column(static_cast<std::size_t>(enter)), m_);
      int leave = -1;
      mpq_class ratio;
      for (int i = 0; i < m_; ++i) {
        if (sgn(u[i]) <= 0) continue;
        const mpq_class q = x[i] / u[i];
        if (leave < 0 || q < ratio || (q == ratio && basis[i] < basis[leave])) {
          ratio = q;
          leave = i;
        }
      }
      if (leave < 0) throw std::runtime_error("unbounded LP");
      in_basis[basis[leave]] = 0;
      in_basis[enter] = 1;
      basis[leave] = enter;
      ++res.iterations;
      ++local;
    }
  }

  int m_;
  std::size_t n_;
  std::vector<mpq_class> a_, rhs_, cost1_, cost2_;
  std::vector<mpz_class> ai_, ci1_, ci2_;
  std::vector<int> row_sign_;  // -1 where the row was negated to make rhs >= 0
};

// Second stage: among coefficient moves keeping every row's slack at least
// t2, the one with the least total |delta|.  `a` and `cost` are the
// first-stage dual data (m = nv + 1 rows, the last one for t).
std::vector<mpq_class> least_change(int nv, std::size_t constraint_cols, const std::vector<mpq_class>& a,
                                    const std::vector<mpq_class>& cost, const mpq_class& t2) {
  const int m1 = nv + 1, m2 = 2 * nv;
  std::vector<mpq_class> a2, cost2;
  auto push = [&](std::vector<mpq_class> col, mpq_class c) {
    a2.insert(a2.end(), col.begin(), col.end());
    cost2.push_back(std::move(c));
  };
  for (std::size_t c = 0; c < constraint_cols; ++c) {
    std::vector<mpq_class> col(m2, 0);
    for (int j = 0; j < nv; ++j) col[j] = a[c * m1 + j];
    push(std::move(col), cost[c] - t2 * a[c * m1 + nv]);
  }
  for (int j = 0; j < nv; ++j) {
    for (int sign : {1, -1}) {
      std::vector<mpq_class> box(m2, 0);
      box[j] = sign;
      push(std::move(box), 1);
      std::vector<mpq_class> abs_row(m2, 0);
      abs_row[j] = sign;
      abs_row[nv + j] = -1;
      push(std::move(abs_row), 0);
    }
  }
  std::vector<mpq_class> rhs(m2, 0);
  for (int j = 0; j < nv; ++j) rhs[nv + j] = -1;
  const ExactResult r = ExactSimplex(m2, a2, cost2, rhs).solve({}, 100000);
  if (!r.ok) throw std::runtime_error("least-change stage did not converge");
  return {r.duals.begin(), r.duals.begin() + nv};
}

}  // namespace

RationalCheck exact_recheck(const PolyPair& pp, std::span<const Constraint> cs, double margin) {
  const std::vector<double> margins(cs.size(), margin);
  return recheck(pp, cs, margins);
}

LpSolution solve_lp(const LpProblem& p) {
  if (p.constraints.empty()) throw std::invalid_argument("solve_lp needs constraints");
  const Layout l = layout_for(p);
  const PolyPair ref = reference_at(p);
  const int m = l.nv + 1;
  const std::size_t nc = p.constraints.size();
  const std::size_t ncols = 2 * nc + 2 * l.nv + 1;

  LpSolution sol;
  std::vector<double> margins(nc);
  std::vector<mpq_class> a(ncols * m), cost(ncols);
  for (std::size_t i = 0; i < nc; ++i) {
    const Constraint& c = p.constraints[i];
    const Exact e = exact_of(c);
    const mpq_class v_ref = exact_value(ref, e);
    const mpq_class scale = abs(mpq_class(c.target));
    const mpq_class above_lo = v_ref - mpq_class(c.lo), below_hi = mpq_class(c.hi) - v_ref;
    const mpq_class ref_slack = (above_lo < below_hi ? above_lo : below_hi) / scale;
    margins[i] = ref_slack < 2 * p.margin ? 0.0 : p.margin;
    if (margins[i] == 0.0) sol.hard.push_back(i);
    const Bounds b = shrunk(c, margins[i]);
    const mpq_class inv_w = pow2(-floor_log2(c.target));
    std::vector<mpq_class> g(l.nv);
    for (bool sin_family : {true, false}) {
      mpq_class xpow = 1;
      int have = 0;
      for (int j = 0; j < l.nv; ++j) {
        if (l.is_sin[j] != sin_family) continue;
        for (; have < l.power[j]; ++have) xpow *= e.xp;
        g[j] = (sin_family ? e.a_sin : e.a_cos) * xpow * pow2(l.log2_beta[j]) * inv_w;
      }
    }
    const std::size_t plus = 2 * i, minus = 2 * i + 1;
    for (int j = 0; j < l.nv; ++j) {
      a[plus * m + j] = -g[j];
      a[minus * m + j] = g[j];
    }
    a[plus * m + l.nv] = 1;
    a[minus * m + l.nv] = 1;
    cost[plus] = (v_ref - b.lo) * inv_w;
    cost[minus] = (b.hi - v_ref) * inv_w;
  }
  for (int j = 0; j < l.nv; ++j) {
    const std::size_t up = 2 * nc + 2 * j, down = up + 1;
    a[up * m + j] = 1;
    a[down * m + j] = -1;
    cost[up] = 1;
    cost[down] = 1;
  }
  a[(ncols - 1) * m + l.nv] = 1;
  cost[ncols - 1] = 1;
  std::vector<mpq_class> rhs(m, 0);
  rhs[l.nv] = 1;

  std::vector<long double> af(a.size()), costf(cost.size()), rhsf(m);
  for (std::size_t i = 0; i < a.size(); ++i) af[i] = a[i].get_d();
  for (std::size_t i = 0; i < cost.size(); ++i) costf[i] = cost[i].get_d();
  for (int i = 0; i < m; ++i) rhsf[i] = rhs[i].get_d();
  detail::Simplex<long double> fs(m, std::move(af), std::move(rhsf), std::move(costf), 1e-30L, false);
  const auto fr = fs.solve(100000);
  sol.simplex_iterations = fr.iterations;
  if (fr.status != detail::SimplexStatus::Optimal) throw std::runtime_error("floating-point simplex did not converge");

  const ExactResult er = ExactSimplex(m, a, cost, rhs).solve(fr.basis, 100000);
  if (!er.ok) throw std::runtime_error("exact simplex did not converge");
  sol.simplex_iterations += er.iterations;
  sol.exact = true;
  sol.min_slack = er.duals[l.nv].get_d();
  sol.feasible = er.duals[l.nv] >= 0;
  std::vector<mpq_class> delta(er.duals.begin(), er.duals.begin() + l.nv);
  if (sol.feasible) {
    // The second-stage slack floor: the largest power of two <= t*/2, which
    // keeps the data dyadic.
    mpq_class t2 = 0;
    if (sgn(er.duals[l.nv]) > 0) {
      const mpq_class half = er.duals[l.nv] / 2;
      const long e = static_cast<long>(mpz_sizeinbase(half.get_num_mpz_t(), 2)) -
                     static_cast<long>(mpz_sizeinbase(half.get_den_mpz_t(), 2));
      t2 = pow2(static_cast<int>(e) + 1);
      while (t2 > half) t2 /= 2;
    }
    delta = least_change(l.nv, 2 * nc, a, cost, t2);
  }

  sol.pair = ref;
  double change = 0;
  for (int j = 0; j < l.nv; ++j) {
    const int idx = l.is_sin[j] ? (l.power[j] - 1) / 2 : l.power[j] / 2;
    double& coeff = l.is_sin[j] ? sol.pair.sin_coeffs[idx] : sol.pair.cos_coeffs[idx];
    const double base = coeff;
    coeff = rn_double(mpq_class(base) + delta[j] * pow2(l.log2_beta[j]));
    const int dpow = l.is_sin[j] ? l.power[j] - 1 : l.power[j];
    change += std::fabs(coeff - base) * std::ldexp(1.0, dpow * l.log2_d);
  }
  sol.max_relative_change = kAmplification * change;
  for (int b : er.basis)
    if (b < static_cast<int>(2 * nc)) sol.active.push_back(static_cast<std::size_t>(b) / 2);
  sol.recheck = recheck(sol.pair, p.constraints, margins);
  return sol;
}

}  // namespace crtrig
