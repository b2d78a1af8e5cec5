// SPDX-License-Identifier: Apache-2.0

#include <algorithm>

#include "doctest.h"
#include "skeldd/lu.hpp"
#include "support/oracles.hpp"

using namespace skeldd;
using testing::random_cvec;
using testing::to_dense;
using testing::to_eigen;

namespace {

double residual(const SparseMatrix& a, const CVec& x, const CVec& b) {
  CVec ax = a.multiply(x);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    num += std::norm(ax[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num) / std::sqrt(den);
}

SparseMatrix random_sparse(int n, unsigned seed) {
  // Diagonally dominant complex pattern, ~6 entries per row.
  CVec vals = random_cvec(static_cast<std::size_t>(n) * 6, seed);
  std::vector<Triplet> t;
  for (int r = 0; r < n; ++r) {
    t.push_back({r, r, Cplx(8.0, 3.0)});
    for (int k = 0; k < 5; ++k) {
      int c = (r * 7 + k * 13 + static_cast<int>(seed)) % n;
      t.push_back({r, c, vals[r * 6 + k]});
    }
  }
  return SparseMatrix::from_triplets(n, n, std::move(t));
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("triplets are deduplicated, sorted and zero-free") {
  std::vector<Triplet> t = {{1, 2, Cplx(1.0, 0.0)}, {0, 0, Cplx(2.0, 0.0)},
                            {1, 2, Cplx(3.0, 0.0)}, {0, 1, Cplx(5.0, 0.0)},
                            {0, 1, Cplx(-5.0, 0.0)}};
  SparseMatrix m = SparseMatrix::from_triplets(2, 3, t);
  CHECK(m.nnz() == 2);  // the (0,1) pair cancels exactly
  CHECK(m.coeff(1, 2) == Cplx(4.0, 0.0));
  CHECK(m.coeff(0, 0) == Cplx(2.0, 0.0));
  CHECK(m.coeff(0, 1) == Cplx(0.0, 0.0));
  const auto& cols = m.col_idx();
  CHECK(std::is_sorted(cols.begin(), cols.begin() + m.row_ptr()[1]));
}

TEST_CASE("sparse multiply matches a hand-computed product") {
  SparseMatrix m = SparseMatrix::from_triplets(
      2, 3, {{0, 0, Cplx(1.0, 0.0)}, {0, 2, Cplx(0.0, 1.0)}, {1, 1, Cplx(2.0, 0.0)}});
  CVec x = {Cplx(1.0, 0.0), Cplx(1.0, 1.0), Cplx(2.0, 0.0)};
  CVec y = m.multiply(x);
  CHECK(std::abs(y[0] - Cplx(1.0, 2.0)) < 1e-15);
  CHECK(std::abs(y[1] - Cplx(2.0, 2.0)) < 1e-15);
}

TEST_CASE("lu solves the identity") {
  SparseLU lu(SparseMatrix::identity(5));
  CVec b = random_cvec(5, 1);
  CVec x = lu.solve(b);
  for (int i = 0; i < 5; ++i) CHECK(std::abs(x[i] - b[i]) < 1e-15);
}

TEST_CASE("lu solves a complex diagonal") {
  SparseLU lu(SparseMatrix::diagonal({Cplx(2.0, 0.0), Cplx(0.0, 1.0)}));
  CVec x = lu.solve({Cplx(2.0, 0.0), Cplx(0.0, 1.0)});
  CHECK(std::abs(x[0] - Cplx(1.0, 0.0)) < 1e-15);
  CHECK(std::abs(x[1] - Cplx(1.0, 0.0)) < 1e-15);
}

TEST_CASE("lu back-solve residual on random 50x50 sparse") {
  SparseMatrix a = random_sparse(50, 7);
  SparseLU lu(a);
  CVec b = random_cvec(50, 8);
  CHECK(residual(a, lu.solve(b), b) <= 1e-10);
}

TEST_CASE("lu matches a dense solve on random 80x80") {
  SparseMatrix a = random_sparse(80, 21);
  CVec b = random_cvec(80, 22);
  CVec x = SparseLU(a).solve(b);
  Eigen::VectorXcd x_ref = to_dense(a).fullPivLu().solve(to_eigen(b));
  for (int i = 0; i < 80; ++i) CHECK(std::abs(x[i] - x_ref(i)) < 1e-10);
}

TEST_CASE("lu reports a numerically singular matrix") {
  // Second column is zero.
  SparseMatrix a =
      SparseMatrix::from_triplets(2, 2, {{0, 0, Cplx(1.0, 0.0)}, {1, 0, Cplx(1.0, 0.0)}});
  CHECK_THROWS_AS(SparseLU{a}, SingularMatrixError);
}

TEST_CASE("lu handles an indefinite saddle-point matrix") {
  // [[C, -B^T], [B, 0]] with C SPD: zero diagonal in the last row/column.
  std::vector<Triplet> t = {{0, 0, Cplx(4.0, 0.0)}, {1, 1, Cplx(3.0, 0.0)},
                            {0, 1, Cplx(1.0, 0.0)}, {1, 0, Cplx(1.0, 0.0)},
                            {0, 2, Cplx(-1.0, 0.0)}, {2, 0, Cplx(1.0, 0.0)}};
  SparseMatrix a = SparseMatrix::from_triplets(3, 3, t);
  CVec b = random_cvec(3, 3);
  CHECK(residual(a, SparseLU(a).solve(b), b) <= 1e-12);
}

TEST_CASE("minimum degree ordering is a permutation") {
  SparseMatrix a = random_sparse(40, 5);
  auto order = min_degree_order(a);
  std::vector<int> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 40; ++i) CHECK(sorted[i] == i);
}

}  // TEST_SUITE
