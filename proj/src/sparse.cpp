// SPDX-License-Identifier: Apache-2.0

#include "skeldd/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace skeldd {

SparseMatrix SparseMatrix::from_triplets(int rows, int cols, std::vector<Triplet> entries) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("SparseMatrix: negative dimension");
  for (const auto& t : entries) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw std::out_of_range("SparseMatrix: triplet index out of range");
  }
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  SparseMatrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.row_ptr_.assign(rows + 1, 0);
  m.col_idx_.reserve(entries.size());
  m.values_.reserve(entries.size());

  std::size_t i = 0;
  for (int r = 0; r < rows; ++r) {
    while (i < entries.size() && entries[i].row == r) {
      int c = entries[i].col;
      Cplx v = entries[i].value;
      ++i;
      while (i < entries.size() && entries[i].row == r && entries[i].col == c) {
        v += entries[i].value;
        ++i;
      }
      if (v != Cplx(0.0, 0.0)) {
        m.col_idx_.push_back(c);
        m.values_.push_back(v);
      }
    }
    m.row_ptr_[r + 1] = static_cast<int>(m.col_idx_.size());
  }
  return m;
}

SparseMatrix SparseMatrix::identity(int n) {
  std::vector<Triplet> t;
  t.reserve(n);
  for (int i = 0; i < n; ++i) t.push_back({i, i, Cplx(1.0, 0.0)});
  return from_triplets(n, n, std::move(t));
}

SparseMatrix SparseMatrix::diagonal(const CVec& d) {
  std::vector<Triplet> t;
  t.reserve(d.size());
  for (int i = 0; i < static_cast<int>(d.size()); ++i) t.push_back({i, i, d[i]});
  return from_triplets(static_cast<int>(d.size()), static_cast<int>(d.size()), std::move(t));
}

void SparseMatrix::multiply(std::span<const Cplx> x, std::span<Cplx> y) const {
  if (static_cast<int>(x.size()) != cols_ || static_cast<int>(y.size()) != rows_)
    throw std::invalid_argument("SparseMatrix::multiply: size mismatch");
  for (int r = 0; r < rows_; ++r) {
    Cplx s(0.0, 0.0);
    for (int p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) s += values_[p] * x[col_idx_[p]];
    y[r] = s;
  }
}

CVec SparseMatrix::multiply(const CVec& x) const {
  CVec y(rows_);
  multiply(x, y);
  return y;
}

CVec SparseMatrix::multiply_transpose(const CVec& x) const {
  if (static_cast<int>(x.size()) != rows_)
    throw std::invalid_argument("SparseMatrix::multiply_transpose: size mismatch");
  CVec y(cols_, Cplx(0.0, 0.0));
  for (int r = 0; r < rows_; ++r)
    for (int p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) y[col_idx_[p]] += values_[p] * x[r];
  return y;
}

Cplx SparseMatrix::coeff(int r, int c) const {
  if (r < 0 || r >= rows_ || c < 0 || c >= cols_)
    throw std::out_of_range("SparseMatrix::coeff: index out of range");
  auto lo = col_idx_.begin() + row_ptr_[r];
  auto hi = col_idx_.begin() + row_ptr_[r + 1];
  auto it = std::lower_bound(lo, hi, c);
  if (it != hi && *it == c) return values_[it - col_idx_.begin()];
  return Cplx(0.0, 0.0);
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<Triplet> t;
  t.reserve(nnz());
  for_each([&](int r, int c, Cplx v) { t.push_back({c, r, v}); });
  return from_triplets(cols_, rows_, std::move(t));
}

double SparseMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace skeldd
