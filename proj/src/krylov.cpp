// SPDX-License-Identifier: Apache-2.0

#include "skeldd/krylov.hpp"

#include <cmath>
#include <stdexcept>

namespace skeldd {

double norm2(const CVec& x) {
  double s = 0.0;
  for (const auto& v : x) s += std::norm(v);
  return std::sqrt(s);
}

Cplx dot(const CVec& x, const CVec& y) {
  Cplx s(0.0, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
  return s;
}

void axpy(Cplx alpha, const CVec& x, CVec& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

PcgResult pcg_solve(const LinearOp& apply_A, const LinearOp& apply_M, const CVec& b, CVec& x,
                    double tol, int maxit) {
  const std::size_t n = b.size();
  if (x.size() != n) x.assign(n, Cplx(0.0, 0.0));

  CVec r(n), z(n), p(n), ap(n);
  apply_A(x, ap);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
  apply_M(r, z);
  Cplx rho = dot(r, z);
  if (rho.real() < 0.0) throw std::runtime_error("pcg_solve: r^H M r negative (M not SPD)");
  const double res0 = std::sqrt(std::max(rho.real(), 0.0));

  PcgResult out;
  if (res0 == 0.0) {
    out.converged = true;
    return out;
  }
  p = z;
  for (int it = 1; it <= maxit; ++it) {
    apply_A(p, ap);
    Cplx pap = dot(p, ap);
    if (pap.real() <= 0.0)
      throw std::runtime_error("pcg_solve: p^H A p not positive (A not SPD)");
    Cplx alpha = rho / pap;
    axpy(alpha, p, x);
    axpy(-alpha, ap, r);
    apply_M(r, z);
    Cplx rho_new = dot(r, z);
    if (rho_new.real() < 0.0) throw std::runtime_error("pcg_solve: r^H M r negative (M not SPD)");
    double res = std::sqrt(std::max(rho_new.real(), 0.0));
    out.iterations = it;
    out.rel_residual = res / res0;
    if (out.rel_residual <= tol) {
      out.converged = true;
      return out;
    }
    Cplx beta = rho_new / rho;
    rho = rho_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  return out;
}

namespace {

// Unitary plane rotation [c, s; -conj(s), c] with real c mapping (a, b) to
// (r, 0), in the style of BLAS zrotg.
void make_rotation(Cplx a, Cplx b, double& c, Cplx& s, Cplx& r) {
  double an = std::abs(a), bn = std::abs(b);
  if (an == 0.0) {
    c = 0.0;
    s = Cplx(1.0, 0.0);
    r = b;
    return;
  }
  double t = std::hypot(an, bn);
  Cplx phase = a / an;
  c = an / t;
  s = phase * std::conj(b) / t;
  r = phase * t;
}

}  // namespace

GmresResult gmres_solve(const LinearOp& apply_A, const CVec& b, CVec& x, int restart, double tol,
                        int maxit, const GmresCallback& on_iteration) {
  if (restart < 1) throw std::invalid_argument("gmres_solve: restart must be >= 1");
  const std::size_t n = b.size();
  if (x.size() != n) x.assign(n, Cplx(0.0, 0.0));

  GmresResult out;
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    x.assign(n, Cplx(0.0, 0.0));
    out.converged = true;
    out.residual_history = {0.0};
    return out;
  }

  const int m = restart;
  std::vector<CVec> v(m + 1, CVec(n));
  std::vector<CVec> h(m, CVec(m + 1));  // h[j][i], column j of the Hessenberg
  CVec g(m + 1), cs_s(m);
  std::vector<double> cs_c(m);
  CVec w(n), tmp(n);

  auto solve_and_update = [&](int cols, CVec& target) {
    // Back substitution on the triangularized Hessenberg, then x update.
    CVec y(cols);
    for (int i = cols - 1; i >= 0; --i) {
      Cplx s = g[i];
      for (int k = i + 1; k < cols; ++k) s -= h[k][i] * y[k];
      y[i] = h[i][i] == Cplx(0.0, 0.0) ? Cplx(0.0, 0.0) : s / h[i][i];
    }
    for (int k = 0; k < cols; ++k) axpy(y[k], v[k], target);
  };

  apply_A(x, tmp);
  for (std::size_t i = 0; i < n; ++i) w[i] = b[i] - tmp[i];
  out.residual_history.push_back(norm2(w) / bnorm);

  while (true) {
    apply_A(x, tmp);
    for (std::size_t i = 0; i < n; ++i) w[i] = b[i] - tmp[i];
    double beta = norm2(w);
    const double cycle_start = beta / bnorm;
    if (cycle_start <= tol) {
      out.converged = true;
      out.rel_residual = cycle_start;
      return out;
    }
    for (std::size_t i = 0; i < n; ++i) v[0][i] = w[i] / beta;
    std::fill(g.begin(), g.end(), Cplx(0.0, 0.0));
    g[0] = beta;

    int j = 0;
    auto notify = [&](int cols, double res) {
      if (!on_iteration) return false;
      std::function<CVec()> build = [&, cols]() {
        CVec xc = x;
        solve_and_update(cols, xc);
        return xc;
      };
      return on_iteration(out.iterations, res, build);
    };
    for (; j < m && out.iterations < maxit; ++j) {
      apply_A(v[j], w);
      const double norm_before = norm2(w);
      for (int i = 0; i <= j; ++i) {
        Cplx hij = dot(v[i], w);
        axpy(-hij, v[i], w);
        h[j][i] = hij;
      }
      double norm_after = norm2(w);
      if (norm_after < 0.7 * norm_before && norm_after > 1e-8 * norm_before) {
        // Loss of orthogonality: one reorthogonalization pass.
        for (int i = 0; i <= j; ++i) {
          Cplx corr = dot(v[i], w);
          axpy(-corr, v[i], w);
          h[j][i] += corr;
        }
        norm_after = norm2(w);
      }
      h[j][m] = Cplx(0.0, 0.0);
      // Apply accumulated rotations to the new column.
      for (int i = 0; i < j; ++i) {
        Cplx h1 = h[j][i], h2 = h[j][i + 1];
        h[j][i] = cs_c[i] * h1 + cs_s[i] * h2;
        h[j][i + 1] = -std::conj(cs_s[i]) * h1 + cs_c[i] * h2;
      }
      ++out.iterations;
      if (norm_after <= 1e-16 * std::max(norm_before, 1.0)) {
        // Happy breakdown: the Krylov space is invariant, which amounts to a
        // trivial rotation for this column.
        cs_c[j] = 1.0;
        cs_s[j] = Cplx(0.0, 0.0);
        g[j + 1] = Cplx(0.0, 0.0);
        out.rel_residual = 0.0;
        out.residual_history.push_back(0.0);
        if (notify(j + 1, 0.0)) {
          solve_and_update(j + 1, x);
          out.converged = true;
          return out;
        }
        ++j;
        break;
      }
      for (std::size_t i = 0; i < n; ++i) v[j + 1][i] = w[i] / norm_after;
      double c;
      Cplx s, r;
      make_rotation(h[j][j], Cplx(norm_after, 0.0), c, s, r);
      cs_c[j] = c;
      cs_s[j] = s;
      h[j][j] = r;
      Cplx g1 = g[j];
      g[j] = c * g1;
      g[j + 1] = -std::conj(s) * g1;
      double res = std::abs(g[j + 1]) / bnorm;
      out.rel_residual = res;
      out.residual_history.push_back(res);
      if (notify(j + 1, res)) {
        solve_and_update(j + 1, x);
        out.converged = true;
        return out;
      }
      if (res <= tol) {
        ++j;
        break;
      }
    }
    if (j > 0) solve_and_update(j, x);
    apply_A(x, tmp);
    for (std::size_t i = 0; i < n; ++i) w[i] = b[i] - tmp[i];
    double res = norm2(w) / bnorm;
    out.rel_residual = res;
    if (res <= tol) {
      out.converged = true;
      return out;
    }
    if (out.iterations >= maxit) return out;
    if (res >= cycle_start * (1.0 - 1e-14)) {
      out.stagnated = true;
      return out;
    }
  }
}

}  // namespace skeldd
