// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>

#include "skeldd/sparse.hpp"

namespace skeldd {

class SingularMatrixError : public std::runtime_error {
public:
  SingularMatrixError(const std::string& what, int column, double pivot_abs)
      : std::runtime_error(what), column(column), pivot_abs(pivot_abs) {}
  int column;
  double pivot_abs;
};

// Sparse complex LU with partial pivoting (left-looking Gilbert-Peierls).
// Columns are preordered by a greedy minimum-degree pass on the pattern of
// A + A^T; row pivoting is by largest magnitude within the column.
// Factorizations are immutable after construction; solve() allocates its own
// workspace so concurrent back-solves on one handle are safe.
class SparseLU {
public:
  explicit SparseLU(const SparseMatrix& A);
  SparseLU(SparseLU&&) = default;
  SparseLU& operator=(SparseLU&&) = default;

  int size() const { return n_; }
  std::size_t factor_nnz() const {
    return l_val_.size() + u_val_.size() + static_cast<std::size_t>(n_);
  }

  CVec solve(const CVec& b) const;
  void solve(std::span<const Cplx> b, std::span<Cplx> x) const;

  // Crude reciprocal condition estimate min|U_kk| / max|U_kk|.
  double rcond_estimate() const;

private:
  int n_ = 0;
  // CSC factors; L has unit diagonal (not stored), U diagonal kept separately.
  std::vector<int> l_ptr_, l_idx_;
  CVec l_val_;
  std::vector<int> u_ptr_, u_idx_;
  CVec u_val_;
  CVec u_diag_;
  std::vector<int> col_order_;  // pivot column k factors original column col_order_[k]
  std::vector<int> row_perm_;   // original row -> pivot position
};

// Greedy minimum-degree elimination order on the pattern of A + A^T.
std::vector<int> min_degree_order(const SparseMatrix& A);

}  // namespace skeldd
