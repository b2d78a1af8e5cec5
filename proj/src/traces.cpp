// SPDX-License-Identifier: Apache-2.0

#include "skeldd/traces.hpp"

#include <algorithm>
#include <stdexcept>

#include "skeldd/krylov.hpp"
#include "skeldd/parallel.hpp"

namespace skeldd {

namespace {

// [[C, -Bp^T], [Bp, 0]] for a subset of the trace rows.
SparseMatrix make_saddle(const SparseMatrix& C, const IndexMap& bprime,
                         const std::vector<int>& rows) {
  const int n = C.rows();
  const int m = static_cast<int>(rows.size());
  std::vector<Triplet> entries;
  entries.reserve(C.nnz() + 2 * rows.size());
  C.for_each([&](int r, int c, Cplx v) { entries.push_back({r, c, v}); });
  for (int i = 0; i < m; ++i) {
    int src = bprime.targets[rows[i]];
    entries.push_back({src, n + i, Cplx(-1.0, 0.0)});
    entries.push_back({n + i, src, Cplx(1.0, 0.0)});
  }
  return SparseMatrix::from_triplets(n + m, n + m, std::move(entries));
}

std::vector<int> all_rows(int m) {
  std::vector<int> r(m);
  for (int i = 0; i < m; ++i) r[i] = i;
  return r;
}

}  // namespace

Inductance Inductance::scalar(const Skeleton& skeleton, double a) {
  if (a <= 0.0) throw std::invalid_argument("Inductance::scalar: a must be positive");
  Inductance t;
  t.kind_ = InductanceKind::scalar;
  t.block_matched_ = true;
  for (int j = 0; j < skeleton.num_subdomains(); ++j) {
    int n = skeleton.block_size(j);
    t.block_sizes_.push_back(n);
    t.blocks_.push_back(SparseMatrix::diagonal(CVec(n, Cplx(a, 0.0))));
    t.block_factors_.emplace_back();
    if (n > 0) t.block_factors_.back().emplace(t.blocks_.back());
  }
  return t;
}

Inductance Inductance::despres(const Mesh& mesh, const Skeleton& skeleton, const Medium& medium,
                               bool interface_decouple) {
  Inductance t;
  t.kind_ = InductanceKind::despres;
  t.block_matched_ = interface_decouple;
  for (int j = 0; j < skeleton.num_subdomains(); ++j) {
    t.block_sizes_.push_back(skeleton.block_size(j));
    t.blocks_.push_back(assemble_despres(j, mesh, skeleton, medium));
    t.block_factors_.emplace_back();
    if (t.blocks_.back().rows() > 0) t.block_factors_.back().emplace(t.blocks_.back());
  }
  return t;
}

Inductance Inductance::explicit_blocks(const Skeleton& skeleton,
                                       std::vector<SparseMatrix> blocks) {
  if (static_cast<int>(blocks.size()) != skeleton.num_subdomains())
    throw std::invalid_argument("Inductance::explicit_blocks: block count mismatch");
  Inductance t;
  t.kind_ = InductanceKind::explicit_blocks;
  for (int j = 0; j < skeleton.num_subdomains(); ++j) {
    if (blocks[j].rows() != skeleton.block_size(j) || blocks[j].cols() != skeleton.block_size(j))
      throw std::invalid_argument("Inductance::explicit_blocks: block size mismatch");
    t.block_sizes_.push_back(blocks[j].rows());
    t.blocks_.push_back(std::move(blocks[j]));
    t.block_factors_.emplace_back();
    if (t.blocks_.back().rows() > 0) t.block_factors_.back().emplace(t.blocks_.back());
  }
  return t;
}

Inductance Inductance::schur_subdomain(const Skeleton& skeleton,
                                       std::vector<AuxiliarySystem> aux, int threads) {
  if (static_cast<int>(aux.size()) != skeleton.num_subdomains())
    throw std::invalid_argument("Inductance::schur_subdomain: auxiliary count mismatch");
  Inductance t;
  t.kind_ = InductanceKind::schur_subdomain;
  t.schur_.resize(aux.size());
  for (int j = 0; j < skeleton.num_subdomains(); ++j) {
    t.block_sizes_.push_back(skeleton.block_size(j));
    t.schur_[j].aux = std::move(aux[j]);
    t.schur_[j].class_rows.push_back(all_rows(skeleton.block_size(j)));
  }
  parallel_for(skeleton.num_subdomains(), threads, [&](int j) {
    auto& s = t.schur_[j];
    if (t.block_sizes_[j] == 0) return;
    s.c_factor.emplace(s.aux.C);
    s.saddle_factors.emplace_back(make_saddle(s.aux.C, s.aux.bprime, s.class_rows[0]));
  });
  return t;
}

Inductance Inductance::schur_interface(const Skeleton& skeleton, const EdgeSets& edge_sets,
                                       std::vector<AuxiliarySystem> aux, int threads) {
  if (static_cast<int>(aux.size()) != skeleton.num_subdomains())
    throw std::invalid_argument("Inductance::schur_interface: auxiliary count mismatch");
  Inductance t;
  t.kind_ = InductanceKind::schur_interface;
  t.schur_.resize(aux.size());
  for (int j = 0; j < skeleton.num_subdomains(); ++j) {
    t.block_sizes_.push_back(skeleton.block_size(j));
    auto& s = t.schur_[j];
    s.aux = std::move(aux[j]);
    // Group the rows of gamma_j by equivalence class (identical owning set).
    const auto& gj = skeleton.gamma_of[j];
    std::vector<std::vector<int>> keys;
    for (int i = 0; i < static_cast<int>(gj.size()); ++i) {
      const auto& cls = edge_sets.classes[gj[i]];
      auto it = std::find(keys.begin(), keys.end(), cls);
      if (it == keys.end()) {
        keys.push_back(cls);
        s.class_rows.emplace_back();
        it = keys.end() - 1;
      }
      s.class_rows[it - keys.begin()].push_back(i);
    }
  }
  parallel_for(skeleton.num_subdomains(), threads, [&](int j) {
    auto& s = t.schur_[j];
    if (t.block_sizes_[j] == 0) return;
    s.c_factor.emplace(s.aux.C);
    for (const auto& rows : s.class_rows)
      s.saddle_factors.emplace_back(make_saddle(s.aux.C, s.aux.bprime, rows));
  });
  return t;
}

void Inductance::apply(int j, std::span<const Cplx> x, std::span<Cplx> y) const {
  const int n = block_sizes_[j];
  if (static_cast<int>(x.size()) != n || static_cast<int>(y.size()) != n)
    throw std::invalid_argument("Inductance::apply: size mismatch");
  if (n == 0) return;
  if (is_explicit()) {
    blocks_[j].multiply(x, y);
    return;
  }
  const auto& s = schur_[j];
  const int nc = s.aux.C.rows();
  std::fill(y.begin(), y.end(), Cplx(0.0, 0.0));
  for (std::size_t c = 0; c < s.class_rows.size(); ++c) {
    const auto& rows = s.class_rows[c];
    CVec rhs(nc + rows.size(), Cplx(0.0, 0.0));
    for (std::size_t i = 0; i < rows.size(); ++i) rhs[nc + i] = x[rows[i]];
    CVec sol = s.saddle_factors[c]->solve(rhs);
    for (std::size_t i = 0; i < rows.size(); ++i) y[rows[i]] = sol[nc + i];
  }
}

void Inductance::apply_inverse(int j, std::span<const Cplx> x, std::span<Cplx> y) const {
  const int n = block_sizes_[j];
  if (static_cast<int>(x.size()) != n || static_cast<int>(y.size()) != n)
    throw std::invalid_argument("Inductance::apply_inverse: size mismatch");
  if (n == 0) return;
  if (is_explicit()) {
    CVec out = block_factors_[j]->solve(CVec(x.begin(), x.end()));
    std::copy(out.begin(), out.end(), y.begin());
    return;
  }
  // T^{-1} = B' C^{-1} B'^T per class.
  const auto& s = schur_[j];
  const int nc = s.aux.C.rows();
  std::fill(y.begin(), y.end(), Cplx(0.0, 0.0));
  for (const auto& rows : s.class_rows) {
    CVec rhs(nc, Cplx(0.0, 0.0));
    for (int r : rows) rhs[s.aux.bprime.targets[r]] += x[r];
    CVec sol = s.c_factor->solve(rhs);
    for (int r : rows) y[r] = sol[s.aux.bprime.targets[r]];
  }
}

const SparseMatrix* Inductance::explicit_block(int j) const {
  return is_explicit() ? &blocks_[j] : nullptr;
}

const AuxiliarySystem* Inductance::auxiliary(int j) const {
  return is_explicit() ? nullptr : &schur_[j].aux;
}

const std::vector<std::vector<int>>& Inductance::interface_classes(int j) const {
  if (kind_ == InductanceKind::schur_interface || kind_ == InductanceKind::schur_subdomain)
    return schur_[j].class_rows;
  return no_classes_;
}

Projector::Projector(const Skeleton& skeleton, const EdgeSets& edge_sets,
                     const Inductance& inductance, PcgConfig config, int threads)
    : skeleton_(&skeleton), inductance_(&inductance), config_(config), threads_(threads) {
  inv_multiplicity_.reserve(skeleton.gamma.size());
  for (int e : skeleton.gamma) inv_multiplicity_.push_back(1.0 / edge_sets.multiplicity[e]);
  if (inductance.is_explicit()) {
    std::vector<Triplet> entries;
    for (int j = 0; j < skeleton.num_subdomains(); ++j) {
      const auto& q = skeleton.gamma_of[j];
      inductance.explicit_block(j)->for_each([&](int r, int c, Cplx v) {
        entries.push_back({skeleton.gamma_index[q[r]], skeleton.gamma_index[q[c]], v});
      });
    }
    int n = static_cast<int>(skeleton.gamma.size());
    assembled_gram_ = SparseMatrix::from_triplets(n, n, std::move(entries));
  }
}

SingleTrace Projector::apply_gram(const SingleTrace& x) const {
  const auto& skel = *skeleton_;
  const int n = static_cast<int>(skel.gamma.size());
  if (static_cast<int>(x.v.size()) != n)
    throw std::invalid_argument("Projector::apply_gram: size mismatch");
  if (assembled_gram_) return {assembled_gram_->multiply(x.v)};
  const int count = skel.num_subdomains();
  std::vector<CVec> partial(count);
  parallel_for(count, threads_, [&](int j) {
    const auto& q = skel.gamma_of[j];
    CVec xj(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) xj[i] = x.v[skel.gamma_index[q[i]]];
    partial[j].assign(q.size(), Cplx(0.0, 0.0));
    inductance_->apply(j, xj, partial[j]);
  });
  SingleTrace out{CVec(n, Cplx(0.0, 0.0))};
  for (int j = 0; j < count; ++j) {
    const auto& q = skel.gamma_of[j];
    for (std::size_t i = 0; i < q.size(); ++i) out.v[skel.gamma_index[q[i]]] += partial[j][i];
  }
  return out;
}

SingleTrace Projector::nn_precondition(const SingleTrace& r) const {
  const auto& skel = *skeleton_;
  const int n = static_cast<int>(skel.gamma.size());
  if (static_cast<int>(r.v.size()) != n)
    throw std::invalid_argument("Projector::nn_precondition: size mismatch");
  CVec scaled(n);
  for (int i = 0; i < n; ++i) scaled[i] = inv_multiplicity_[i] * r.v[i];
  const int count = skel.num_subdomains();
  std::vector<CVec> partial(count);
  parallel_for(count, threads_, [&](int j) {
    const auto& q = skel.gamma_of[j];
    CVec xj(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) xj[i] = scaled[skel.gamma_index[q[i]]];
    partial[j].assign(q.size(), Cplx(0.0, 0.0));
    inductance_->apply_inverse(j, xj, partial[j]);
  });
  SingleTrace out{CVec(n, Cplx(0.0, 0.0))};
  for (int j = 0; j < count; ++j) {
    const auto& q = skel.gamma_of[j];
    for (std::size_t i = 0; i < q.size(); ++i) out.v[skel.gamma_index[q[i]]] += partial[j][i];
  }
  for (int i = 0; i < n; ++i) out.v[i] *= inv_multiplicity_[i];
  return out;
}

SingleTrace Projector::gram_solve(const MultiTrace& u) const {
  const auto& skel = *skeleton_;
  if (u.v.size() != skel.n_sys) throw std::invalid_argument("Projector::gram_solve: size mismatch");
  const int n = static_cast<int>(skel.gamma.size());
  // rhs = Q^T T u, accumulated in subdomain order.
  const int count = skel.num_subdomains();
  std::vector<CVec> partial(count);
  parallel_for(count, threads_, [&](int j) {
    partial[j].assign(skel.block_size(j), Cplx(0.0, 0.0));
    inductance_->apply(j, skel.block(u.v, j), partial[j]);
  });
  CVec rhs(n, Cplx(0.0, 0.0));
  for (int j = 0; j < count; ++j) {
    const auto& q = skel.gamma_of[j];
    for (std::size_t i = 0; i < q.size(); ++i) rhs[skel.gamma_index[q[i]]] += partial[j][i];
  }

  CVec v(n, Cplx(0.0, 0.0));
  auto apply_a = [this](const CVec& in, CVec& out) {
    SingleTrace res = apply_gram({in});
    out = std::move(res.v);
  };
  auto apply_m = [this](const CVec& in, CVec& out) {
    SingleTrace res = nn_precondition({in});
    out = std::move(res.v);
  };
  PcgResult res = pcg_solve(apply_a, apply_m, rhs, v, config_.tol, config_.max_iterations);
  stats_.last_pcg_iterations = res.iterations;
  stats_.max_pcg_iterations = std::max(stats_.max_pcg_iterations, res.iterations);
  if (!res.converged)
    throw ProjectionError("projection PCG did not reach tolerance", res.rel_residual);
  return {std::move(v)};
}

MultiTrace Projector::lift(const SingleTrace& v) const {
  const auto& skel = *skeleton_;
  MultiTrace w{CVec(skel.n_sys)};
  for (int j = 0; j < skel.num_subdomains(); ++j) {
    auto block = skel.block(w.v, j);
    const auto& q = skel.gamma_of[j];
    for (std::size_t i = 0; i < q.size(); ++i) block[i] = v.v[skel.gamma_index[q[i]]];
  }
  return w;
}

MultiTrace Projector::project(const MultiTrace& u) const {
  if (skeleton_->n_sys == 0) return u;
  return lift(gram_solve(u));
}

MultiTrace Projector::communicate(const MultiTrace& u) const {
  MultiTrace w = project(u);
  for (std::size_t i = 0; i < w.v.size(); ++i) w.v[i] = 2.0 * w.v[i] - u.v[i];
  return w;
}

MultiTrace Projector::project_explicit_diagonal(const MultiTrace& u) const {
  if (!inductance_->explicit_block_matched())
    throw std::logic_error(
        "project_explicit_diagonal: inductance does not satisfy the block-matched hypothesis");
  const auto& skel = *skeleton_;
  if (u.v.size() != skel.n_sys)
    throw std::invalid_argument("project_explicit_diagonal: size mismatch");
  const int n = static_cast<int>(skel.gamma.size());
  CVec acc(n, Cplx(0.0, 0.0));
  for (int j = 0; j < skel.num_subdomains(); ++j) {
    auto block = skel.block(u.v, j);
    const auto& q = skel.gamma_of[j];
    for (std::size_t i = 0; i < q.size(); ++i) acc[skel.gamma_index[q[i]]] += block[i];
  }
  for (int i = 0; i < n; ++i) acc[i] *= inv_multiplicity_[i];
  return lift({std::move(acc)});
}

MultiTrace Projector::t_apply(const MultiTrace& x) const {
  const auto& skel = *skeleton_;
  if (x.v.size() != skel.n_sys) throw std::invalid_argument("Projector::t_apply: size mismatch");
  MultiTrace y{CVec(skel.n_sys)};
  for (int j = 0; j < skel.num_subdomains(); ++j)
    inductance_->apply(j, skel.block(x.v, j), skel.block(y.v, j));
  return y;
}

Cplx Projector::t_dot(const MultiTrace& x, const MultiTrace& y) const {
  MultiTrace ty = t_apply(y);
  Cplx s(0.0, 0.0);
  for (std::size_t i = 0; i < x.v.size(); ++i) s += x.v[i] * std::conj(ty.v[i]);
  return s;
}

double Projector::t_norm(const MultiTrace& x) const {
  return std::sqrt(std::max(t_dot(x, x).real(), 0.0));
}

}  // namespace skeldd
