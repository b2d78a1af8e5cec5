// SPDX-License-Identifier: Apache-2.0

#include "skeldd/lu.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace skeldd {

namespace {

// A in CSC form (pattern + values), columns already permuted by `order`.
struct Csc {
  std::vector<int> ptr;
  std::vector<int> idx;
  CVec val;
};

Csc to_csc(const SparseMatrix& A, const std::vector<int>& order) {
  const int n = A.cols();
  std::vector<int> count(n, 0);
  std::vector<int> pos_of(n);  // original column -> permuted position
  for (int k = 0; k < n; ++k) pos_of[order[k]] = k;
  A.for_each([&](int, int c, Cplx) { ++count[pos_of[c]]; });
  Csc m;
  m.ptr.assign(n + 1, 0);
  for (int k = 0; k < n; ++k) m.ptr[k + 1] = m.ptr[k] + count[k];
  m.idx.resize(A.nnz());
  m.val.resize(A.nnz());
  std::vector<int> next(m.ptr.begin(), m.ptr.end() - 1);
  A.for_each([&](int r, int c, Cplx v) {
    int p = next[pos_of[c]]++;
    m.idx[p] = r;
    m.val[p] = v;
  });
  return m;
}

}  // namespace

std::vector<int> min_degree_order(const SparseMatrix& A) {
  const int n = A.rows();
  // Symmetrized adjacency (no diagonal), sorted unique per node.
  std::vector<std::vector<int>> adj(n);
  A.for_each([&](int r, int c, Cplx) {
    if (r != c) {
      adj[r].push_back(c);
      adj[c].push_back(r);
    }
  });
  for (auto& a : adj) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }

  std::vector<char> eliminated(n, 0);
  std::vector<int> order;
  order.reserve(n);
  // Bucket queue on degree with lazy entries.
  std::vector<std::vector<int>> bucket(n + 1);
  std::vector<int> degree(n);
  for (int i = 0; i < n; ++i) {
    degree[i] = static_cast<int>(adj[i].size());
    bucket[degree[i]].push_back(i);
  }
  int cur = 0;
  std::vector<int> merged;
  for (int step = 0; step < n; ++step) {
    int v = -1;
    while (v < 0) {
      while (bucket[cur].empty()) ++cur;
      int cand = bucket[cur].back();
      bucket[cur].pop_back();
      if (!eliminated[cand] && degree[cand] == cur) v = cand;
    }
    eliminated[v] = 1;
    order.push_back(v);
    // Connect the neighbors of v into a clique.
    auto& nv = adj[v];
    nv.erase(std::remove_if(nv.begin(), nv.end(), [&](int w) { return eliminated[w] != 0; }),
             nv.end());
    for (int w : nv) {
      auto& aw = adj[w];
      merged.clear();
      merged.reserve(aw.size() + nv.size());
      std::set_union(aw.begin(), aw.end(), nv.begin(), nv.end(), std::back_inserter(merged));
      aw.clear();
      for (int u : merged)
        if (u != w && u != v && !eliminated[u]) aw.push_back(u);
      int d = static_cast<int>(aw.size());
      if (d != degree[w]) {
        degree[w] = d;
        bucket[d].push_back(w);
        cur = std::min(cur, d);
      }
    }
    nv.clear();
    nv.shrink_to_fit();
  }
  return order;
}

SparseLU::SparseLU(const SparseMatrix& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("SparseLU: matrix must be square");
  n_ = A.rows();
  const double piv_tol = 1e-14 * std::max(A.max_abs(), 1.0);

  col_order_ = min_degree_order(A);
  Csc a = to_csc(A, col_order_);

  row_perm_.assign(n_, -1);
  l_ptr_.assign(n_ + 1, 0);
  u_ptr_.assign(n_ + 1, 0);
  u_diag_.assign(n_, Cplx(0.0, 0.0));

  CVec x(n_, Cplx(0.0, 0.0));
  std::vector<int> stack(n_), estack(n_), found(n_, -1), pattern;
  pattern.reserve(n_);

  for (int k = 0; k < n_; ++k) {
    // Symbolic step: pattern of the solution of L y = A(:,k) via DFS over the
    // columns of L reached through already-pivotal rows. `found` marks visits,
    // `pattern` ends up in reverse topological order.
    pattern.clear();
    for (int p = a.ptr[k]; p < a.ptr[k + 1]; ++p) {
      int r = a.idx[p];
      if (found[r] == k) continue;
      int top = 0;
      stack[0] = r;
      estack[0] = row_perm_[r] >= 0 ? l_ptr_[row_perm_[r]] : -1;
      found[r] = k;
      while (top >= 0) {
        int node = stack[top];
        int jnew = row_perm_[node];
        if (jnew >= 0 && estack[top] < l_ptr_[jnew + 1]) {
          int child = l_idx_[estack[top]++];
          if (found[child] != k) {
            found[child] = k;
            ++top;
            stack[top] = child;
            estack[top] = row_perm_[child] >= 0 ? l_ptr_[row_perm_[child]] : -1;
          }
        } else {
          pattern.push_back(node);
          --top;
        }
      }
    }

    // Numeric step (rows visited in topological order = reverse of `pattern`).
    for (int p = a.ptr[k]; p < a.ptr[k + 1]; ++p) x[a.idx[p]] = a.val[p];
    for (auto it = pattern.rbegin(); it != pattern.rend(); ++it) {
      int jnew = row_perm_[*it];
      if (jnew < 0) continue;
      Cplx xj = x[*it];
      if (xj == Cplx(0.0, 0.0)) continue;
      for (int p = l_ptr_[jnew]; p < l_ptr_[jnew + 1]; ++p) x[l_idx_[p]] -= l_val_[p] * xj;
    }

    // Partial pivoting among not-yet-pivotal rows.
    int ipiv = -1;
    double amax = 0.0;
    for (int r : pattern) {
      if (row_perm_[r] >= 0) continue;
      double m = std::abs(x[r]);
      if (m > amax || (m == amax && ipiv >= 0 && r < ipiv)) {
        amax = m;
        ipiv = r;
      }
    }
    if (ipiv < 0 || amax <= piv_tol)
      throw SingularMatrixError("SparseLU: numerically singular pivot", k, amax);

    const Cplx pivot = x[ipiv];
    u_diag_[k] = pivot;
    row_perm_[ipiv] = k;
    for (int r : pattern) {
      int rnew = row_perm_[r];
      if (rnew == k) {
      } else if (rnew >= 0) {
        if (x[r] != Cplx(0.0, 0.0)) {
          u_idx_.push_back(rnew);
          u_val_.push_back(x[r]);
        }
      } else {
        if (x[r] != Cplx(0.0, 0.0)) {
          l_idx_.push_back(r);  // original row id; renumbered after the loop
          l_val_.push_back(x[r] / pivot);
        }
      }
      x[r] = Cplx(0.0, 0.0);
    }
    l_ptr_[k + 1] = static_cast<int>(l_idx_.size());
    u_ptr_[k + 1] = static_cast<int>(u_idx_.size());
  }
  for (auto& r : l_idx_) r = row_perm_[r];
}

CVec SparseLU::solve(const CVec& b) const {
  CVec x(n_);
  solve(std::span<const Cplx>(b), std::span<Cplx>(x));
  return x;
}

void SparseLU::solve(std::span<const Cplx> b, std::span<Cplx> x) const {
  if (static_cast<int>(b.size()) != n_ || static_cast<int>(x.size()) != n_)
    throw std::invalid_argument("SparseLU::solve: size mismatch");
  CVec y(n_);
  for (int r = 0; r < n_; ++r) y[row_perm_[r]] = b[r];
  // L y = P b (unit lower triangular)
  for (int k = 0; k < n_; ++k) {
    Cplx yk = y[k];
    if (yk == Cplx(0.0, 0.0)) continue;
    for (int p = l_ptr_[k]; p < l_ptr_[k + 1]; ++p) y[l_idx_[p]] -= l_val_[p] * yk;
  }
  // U z = y
  for (int k = n_ - 1; k >= 0; --k) {
    y[k] /= u_diag_[k];
    Cplx yk = y[k];
    if (yk == Cplx(0.0, 0.0)) continue;
    for (int p = u_ptr_[k]; p < u_ptr_[k + 1]; ++p) y[u_idx_[p]] -= u_val_[p] * yk;
  }
  for (int k = 0; k < n_; ++k) x[col_order_[k]] = y[k];
}

double SparseLU::rcond_estimate() const {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& d : u_diag_) {
    double m = std::abs(d);
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  return hi > 0.0 ? lo / hi : 0.0;
}

}  // namespace skeldd
