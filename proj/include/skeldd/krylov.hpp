// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>

#include "skeldd/sparse.hpp"

namespace skeldd {

using LinearOp = std::function<void(const CVec&, CVec&)>;

double norm2(const CVec& x);
// Hermitian dot product conj(x) . y
Cplx dot(const CVec& x, const CVec& y);
void axpy(Cplx alpha, const CVec& x, CVec& y);  // y += alpha x

struct PcgResult {
  int iterations = 0;
  double rel_residual = 0.0;
  bool converged = false;
};

// Preconditioned conjugate gradient. apply_A and apply_M must be SPD (real
// symmetric positive definite operators acting on complex vectors). The
// stopping quantity is the preconditioned residual norm sqrt(r^H M r)
// relative to its initial value. Throws on detected indefiniteness.
PcgResult pcg_solve(const LinearOp& apply_A, const LinearOp& apply_M, const CVec& b, CVec& x,
                    double tol, int maxit);

struct GmresResult {
  int iterations = 0;
  double rel_residual = 0.0;
  bool converged = false;
  bool stagnated = false;
  std::vector<double> residual_history;  // relative, length iterations + 1
};

// Called after each GMRES iteration with (iteration, relative residual,
// current-iterate builder). Building the iterate costs a few AXPYs. Returning
// true stops the solver with the current iterate (caller-defined convergence).
using GmresCallback = std::function<bool(int, double, const std::function<CVec()>&)>;

// Restarted GMRES with modified Gram-Schmidt (one conditional
// reorthogonalization pass) and Givens rotations.
GmresResult gmres_solve(const LinearOp& apply_A, const CVec& b, CVec& x, int restart, double tol,
                        int maxit, const GmresCallback& on_iteration = nullptr);

}  // namespace skeldd
