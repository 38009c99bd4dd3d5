// Revised simplex for  min cost.x  s.t.  A x = b, x >= 0, with a small
// number of rows.  The basis inverse is rebuilt by Gauss-Jordan each
// iteration.
#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

namespace crtrig::detail {

enum class SimplexStatus { Optimal, Infeasible, Unbounded, IterationLimit };

template <typename T>
struct SimplexResult {
  SimplexStatus status = SimplexStatus::IterationLimit;
  std::vector<int> basis;   // column per row
  std::vector<T> x_basis;   // values of the basic columns
  std::vector<T> duals;     // y with y.A_j <= cost_j for optimal bases
  T objective{};
  int iterations = 0;
};

template <typename T>
struct ScalarOps {
  static bool positive(const T& v, const T& tol) { return v > tol; }
  static bool negative(const T& v, const T& tol) { return v < -tol; }
  static T abs(const T& v) { return v < T(0) ? T(-v) : v; }
};

// Columns are stored densely, column-major: column j occupies
// a[j * m .. j * m + m).
template <typename T>
class Simplex {
 public:
  Simplex(int m, std::vector<T> a, std::vector<T> b, std::vector<T> cost, T tol, bool bland)
      : m_(m), n_(static_cast<int>(cost.size())), a_(std::move(a)), b_(std::move(b)),
        cost_(std::move(cost)), tol_(tol), bland_(bland), row_sign_(m, 1) {
    if (static_cast<int>(a_.size()) != m_ * n_ || static_cast<int>(b_.size()) != m_)
      throw std::invalid_argument("simplex dimensions");
  }

  // Solves from `start` when it is a primal feasible basis, otherwise runs
  // phase one.
  SimplexResult<T> solve(int max_iterations, const std::optional<std::vector<int>>& start = {}) {
    SimplexResult<T> res;
    std::vector<int> basis;
    if (start && start->size() == static_cast<std::size_t>(m_) && try_basis(*start)) {
      basis = *start;
    } else {
      if (!phase_one(basis, max_iterations, res.iterations)) {
        res.status = SimplexStatus::Infeasible;
        return res;
      }
    }
    res.status = iterate(basis, cost_, n_, max_iterations, res.iterations);
    finish(basis, cost_, res);
    return res;
  }

 private:
  T col(int j, int i) const { return j < n_ ? a_[static_cast<std::size_t>(j) * m_ + i] : (j - n_ == i ? T(1) : T(0)); }

  // Inverse of the basis matrix; false if singular.
  bool invert(const std::vector<int>& basis, std::vector<T>& inv) const {
    std::vector<T> w(static_cast<std::size_t>(m_) * 2 * m_);
    const int w2 = 2 * m_;
    for (int i = 0; i < m_; ++i) {
      for (int k = 0; k < m_; ++k) w[i * w2 + k] = col(basis[k], i);
      for (int k = 0; k < m_; ++k) w[i * w2 + m_ + k] = i == k ? T(1) : T(0);
    }
    for (int c = 0; c < m_; ++c) {
      int piv = -1;
      T best(0);
      for (int r = c; r < m_; ++r) {
        const T v = ScalarOps<T>::abs(w[r * w2 + c]);
        if (v > best) {
          best = v;
          piv = r;
        }
      }
      if (piv < 0 || best == T(0)) return false;
      if (piv != c)
        for (int k = 0; k < w2; ++k) std::swap(w[piv * w2 + k], w[c * w2 + k]);
      const T d = w[c * w2 + c];
      for (int k = 0; k < w2; ++k) w[c * w2 + k] /= d;
      for (int r = 0; r < m_; ++r) {
        if (r == c || w[r * w2 + c] == T(0)) continue;
        const T f = w[r * w2 + c];
        for (int k = 0; k < w2; ++k) w[r * w2 + k] -= f * w[c * w2 + k];
      }
    }
    inv.assign(static_cast<std::size_t>(m_) * m_, T(0));
    for (int i = 0; i < m_; ++i)
      for (int k = 0; k < m_; ++k) inv[i * m_ + k] = w[i * w2 + m_ + k];
    return true;
  }

  std::vector<T> times(const std::vector<T>& inv, int j) const {
    std::vector<T> u(m_, T(0));
    for (int i = 0; i < m_; ++i)
      for (int k = 0; k < m_; ++k) u[i] += inv[i * m_ + k] * col(j, k);
    return u;
  }

  std::vector<T> basic_values(const std::vector<T>& inv) const {
    std::vector<T> x(m_, T(0));
    for (int i = 0; i < m_; ++i)
      for (int k = 0; k < m_; ++k) x[i] += inv[i * m_ + k] * b_[k];
    return x;
  }

  bool try_basis(const std::vector<int>& basis) const {
    std::vector<T> inv;
    if (!invert(basis, inv)) return false;
    for (const T& v : basic_values(inv))
      if (ScalarOps<T>::negative(v, tol_)) return false;
    return true;
  }

  SimplexStatus iterate(std::vector<int>& basis, const std::vector<T>& cost, int ncols,
                        int max_iterations, int& iterations) const {
    std::vector<T> inv;
    while (iterations < max_iterations) {
      if (!invert(basis, inv)) throw std::runtime_error("singular simplex basis");
      const std::vector<T> x = basic_values(inv);
      std::vector<T> y(m_, T(0));
      for (int k = 0; k < m_; ++k)
        for (int i = 0; i < m_; ++i) y[k] += cost[basis[i]] * inv[i * m_ + k];
      int enter = -1;
      T best(0);
      for (int j = 0; j < ncols; ++j) {
        T d = cost[j];
        for (int k = 0; k < m_; ++k) d -= y[k] * col(j, k);
        if (!ScalarOps<T>::negative(d, tol_)) continue;
        if (bland_) {
          enter = j;
          break;
        }
        if (enter < 0 || d < best) {
          best = d;
          enter = j;
        }
      }
      if (enter < 0) return SimplexStatus::Optimal;
      const std::vector<T> u = times(inv, enter);
      int leave = -1;
      T ratio(0);
      for (int i = 0; i < m_; ++i) {
        if (!ScalarOps<T>::positive(u[i], tol_)) continue;
        const T r = x[i] / u[i];
        if (leave < 0 || r < ratio || (r == ratio && basis[i] < basis[leave])) {
          ratio = r;
          leave = i;
        }
      }
      if (leave < 0) return SimplexStatus::Unbounded;
      basis[leave] = enter;
      ++iterations;
    }
    return SimplexStatus::IterationLimit;
  }

  bool phase_one(std::vector<int>& basis, int max_iterations, int& iterations) {
    // Rows with negative right-hand sides are negated so the artificial
    // basis is feasible.
    for (int i = 0; i < m_; ++i) {
      if (!(b_[i] < T(0))) continue;
      row_sign_[i] = -1;
      b_[i] = -b_[i];
      for (int j = 0; j < n_; ++j) a_[static_cast<std::size_t>(j) * m_ + i] = -a_[static_cast<std::size_t>(j) * m_ + i];
    }
    std::vector<T> cost1(n_ + m_, T(0));
    for (int i = 0; i < m_; ++i) cost1[n_ + i] = T(1);
    basis.resize(m_);
    for (int i = 0; i < m_; ++i) basis[i] = n_ + i;
    const SimplexStatus st = iterate(basis, cost1, n_ + m_, max_iterations, iterations);
    if (st != SimplexStatus::Optimal) return false;
    std::vector<T> inv;
    invert(basis, inv);
    const std::vector<T> x = basic_values(inv);
    T infeas(0);
    for (int i = 0; i < m_; ++i)
      if (basis[i] >= n_) infeas += x[i];
    if (ScalarOps<T>::positive(infeas, tol_)) return false;
    // Drive remaining artificials out of the basis.
    for (int i = 0; i < m_; ++i) {
      if (basis[i] < n_) continue;
      invert(basis, inv);
      bool replaced = false;
      for (int j = 0; j < n_ && !replaced; ++j) {
        bool in_basis = false;
        for (int b : basis) in_basis |= b == j;
        if (in_basis) continue;
        const std::vector<T> u = times(inv, j);
        if (ScalarOps<T>::abs(u[i]) > tol_) {
          basis[i] = j;
          replaced = true;
        }
      }
      if (!replaced) throw std::runtime_error("redundant equality row in simplex");
    }
    return true;
  }

  void finish(const std::vector<int>& basis, const std::vector<T>& cost, SimplexResult<T>& res) const {
    std::vector<T> inv;
    if (!invert(basis, inv)) throw std::runtime_error("singular final basis");
    res.basis = basis;
    res.x_basis = basic_values(inv);
    res.duals.assign(m_, T(0));
    for (int k = 0; k < m_; ++k)
      for (int i = 0; i < m_; ++i) res.duals[k] += cost[basis[i]] * inv[i * m_ + k];
    for (int k = 0; k < m_; ++k)
      if (row_sign_[k] < 0) res.duals[k] = -res.duals[k];
    res.objective = T(0);
    for (int i = 0; i < m_; ++i) res.objective += cost[basis[i]] * res.x_basis[i];
  }

  int m_, n_;
  std::vector<T> a_, b_, cost_;
  T tol_;
  bool bland_;
  std::vector<int> row_sign_;  // -1 for rows negated in phase one
};

}  // namespace crtrig::detail
