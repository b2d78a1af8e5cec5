// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace skeldd {

using Cplx = std::complex<double>;
using CVec = std::vector<Cplx>;
using RVec = std::vector<double>;

struct Triplet {
  int row;
  int col;
  Cplx value;
};

// Compressed-row complex sparse matrix. Rows hold sorted, unique column
// indices; exact zeros are dropped when the matrix is finalized.
class SparseMatrix {
public:
  SparseMatrix() = default;

  static SparseMatrix from_triplets(int rows, int cols, std::vector<Triplet> entries);
  static SparseMatrix identity(int n);
  static SparseMatrix diagonal(const CVec& d);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  // y = A x
  void multiply(std::span<const Cplx> x, std::span<Cplx> y) const;
  CVec multiply(const CVec& x) const;
  // y = A^T x (plain transpose, no conjugation; assembled matrices are
  // complex symmetric so this mostly shows up in oracles)
  CVec multiply_transpose(const CVec& x) const;

  // Stored entry at (r, c), zero if absent.
  Cplx coeff(int r, int c) const;

  SparseMatrix transpose() const;

  // Largest entry magnitude (0 for an empty matrix).
  double max_abs() const;

  const std::vector<int>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& col_idx() const { return col_idx_; }
  const CVec& values() const { return values_; }

  template <typename F>
  void for_each(F&& f) const {
    for (int r = 0; r < rows_; ++r)
      for (int p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) f(r, col_idx_[p], values_[p]);
  }

private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> col_idx_;
  CVec values_;
};

}  // namespace skeldd
