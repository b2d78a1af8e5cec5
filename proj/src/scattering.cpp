// SPDX-License-Identifier: Apache-2.0

#include "skeldd/scattering.hpp"

#include <sstream>

#include "skeldd/parallel.hpp"

namespace skeldd {

LocalSolver LocalSolver::factor(int j, const LinearSystem& local, const Inductance& inductance,
                                const IndexMap& trace_map) {
  LocalSolver s;
  s.subdomain_ = j;
  s.inductance_ = &inductance;
  s.trace_map_ = trace_map;
  s.edge_count_ = local.matrix.rows();
  s.trace_count_ = trace_map.codomain_size();

  try {
    if (inductance.is_explicit()) {
      s.kind_ = Kind::plain;
      std::vector<Triplet> entries;
      entries.reserve(local.matrix.nnz() + inductance.explicit_block(j)->nnz());
      local.matrix.for_each([&](int r, int c, Cplx v) { entries.push_back({r, c, v}); });
      inductance.explicit_block(j)->for_each([&](int r, int c, Cplx v) {
        entries.push_back({trace_map.targets[r], trace_map.targets[c], Cplx(0.0, -1.0) * v});
      });
      s.system_size_ = s.edge_count_;
      s.factor_.emplace(
          SparseMatrix::from_triplets(s.edge_count_, s.edge_count_, std::move(entries)));
    } else {
      s.kind_ = Kind::augmented;
      const AuxiliarySystem& aux = *inductance.auxiliary(j);
      const auto& classes = inductance.interface_classes(j);
      const int ne = s.edge_count_;
      const int nc = aux.C.rows();
      const int ncls = static_cast<int>(classes.size());
      s.class_offsets_.resize(ncls + 1);
      s.class_offsets_[0] = ne;
      for (int c = 0; c < ncls; ++c) s.class_offsets_[c + 1] = s.class_offsets_[c] + nc;
      const int trace_base = s.class_offsets_[ncls];
      s.system_size_ = trace_base + s.trace_count_;

      std::vector<Triplet> entries;
      entries.reserve(local.matrix.nnz() + ncls * aux.C.nnz() + 4 * s.trace_count_);
      local.matrix.for_each([&](int r, int c, Cplx v) { entries.push_back({r, c, v}); });
      for (int c = 0; c < ncls; ++c) {
        const int base = s.class_offsets_[c];
        aux.C.for_each(
            [&](int r, int cc, Cplx v) { entries.push_back({base + r, base + cc, Cplx(0.0, -1.0) * v}); });
        for (int row : classes[c]) {
          int tr = trace_base + row;
          int vr = base + aux.bprime.targets[row];
          int er = trace_map.targets[row];
          entries.push_back({er, tr, Cplx(1.0, 0.0)});    // B^T
          entries.push_back({tr, er, Cplx(1.0, 0.0)});    // B
          entries.push_back({vr, tr, Cplx(-1.0, 0.0)});   // -B'^T
          entries.push_back({tr, vr, Cplx(-1.0, 0.0)});   // -B'
        }
      }
      s.factor_.emplace(
          SparseMatrix::from_triplets(s.system_size_, s.system_size_, std::move(entries)));
    }
  } catch (const SingularMatrixError& e) {
    std::ostringstream msg;
    msg << "factor_local: singular local operator in subdomain " << j + 1 << " (pivot "
        << e.pivot_abs << " at column " << e.column << ")";
    throw std::runtime_error(msg.str());
  }
  return s;
}

CVec LocalSolver::solve(const CVec* f, std::span<const Cplx> p) const {
  if (edge_count_ == 0) return {};
  CVec rhs(system_size_, Cplx(0.0, 0.0));
  if (f) {
    if (static_cast<int>(f->size()) != edge_count_)
      throw std::invalid_argument("LocalSolver::solve: source size mismatch");
    std::copy(f->begin(), f->end(), rhs.begin());
  }
  if (!p.empty() && static_cast<int>(p.size()) != trace_count_)
    throw std::invalid_argument("LocalSolver::solve: trace size mismatch");

  if (kind_ == Kind::plain) {
    if (!p.empty()) {
      CVec tp(trace_count_);
      inductance_->apply(subdomain_, p, tp);
      trace_map_.apply_transpose_add(tp, rhs);
    }
    return factor_->solve(rhs);
  }
  const int trace_base = class_offsets_.back();
  if (!p.empty())
    for (int i = 0; i < trace_count_; ++i) rhs[trace_base + i] = Cplx(0.0, 1.0) * p[i];
  CVec sol = factor_->solve(rhs);
  return CVec(sol.begin(), sol.begin() + edge_count_);
}

ScatteringOperator::ScatteringOperator(const Skeleton& skeleton, const SubdomainMaps& maps,
                                       std::vector<LinearSystem> locals,
                                       const Inductance& inductance, int threads)
    : skeleton_(&skeleton),
      maps_(&maps),
      inductance_(&inductance),
      locals_(std::move(locals)),
      threads_(threads) {
  const int count = skeleton.num_subdomains();
  if (static_cast<int>(locals_.size()) != count)
    throw std::invalid_argument("ScatteringOperator: local system count mismatch");
  solvers_.resize(count);
  parallel_for(count, threads_, [&](int j) {
    solvers_[j] = LocalSolver::factor(j, locals_[j], inductance, maps.trace[j]);
  });
}

ScatteringOperator::SResult ScatteringOperator::apply(const MultiTrace& p) const {
  const auto& skel = *skeleton_;
  if (p.v.size() != skel.n_sys) throw std::invalid_argument("apply_S: size mismatch");
  SResult out;
  out.q.v.assign(skel.n_sys, Cplx(0.0, 0.0));
  out.volume.resize(skel.num_subdomains());
  parallel_for(skel.num_subdomains(), threads_, [&](int j) {
    auto pj = skel.block(p.v, j);
    out.volume[j] = solvers_[j].solve(nullptr, pj);
    auto qj = skel.block(out.q.v, j);
    const auto& bmap = maps_->trace[j];
    for (std::size_t i = 0; i < qj.size(); ++i)
      qj[i] = pj[i] + Cplx(0.0, 2.0) * out.volume[j][bmap.targets[i]];
  });
  return out;
}

BrokenField ScatteringOperator::volume_solve(const MultiTrace* p) const {
  const auto& skel = *skeleton_;
  BrokenField u(skel.num_subdomains());
  parallel_for(skel.num_subdomains(), threads_, [&](int j) {
    std::span<const Cplx> pj;
    if (p) pj = skel.block(p->v, j);
    u[j] = solvers_[j].solve(&locals_[j].rhs, pj);
  });
  return u;
}

MultiTrace ScatteringOperator::trace_of(const BrokenField& u) const {
  const auto& skel = *skeleton_;
  MultiTrace w{CVec(skel.n_sys)};
  for (int j = 0; j < skel.num_subdomains(); ++j) {
    auto wj = skel.block(w.v, j);
    const auto& bmap = maps_->trace[j];
    for (std::size_t i = 0; i < wj.size(); ++i) wj[i] = u[j][bmap.targets[i]];
  }
  return w;
}

double ScatteringOperator::dissipation(const BrokenField& v) const {
  Cplx s(0.0, 0.0);
  for (int j = 0; j < skeleton_->num_subdomains(); ++j) {
    if (v[j].empty()) continue;
    CVec av = locals_[j].matrix.multiply(v[j]);
    for (std::size_t i = 0; i < av.size(); ++i) s += std::conj(v[j][i]) * av[i];
  }
  return -s.imag();
}

SkeletonRhs skeleton_rhs(const ScatteringOperator& scattering, const Projector& projector) {
  SkeletonRhs out;
  out.source = scattering.volume_solve(nullptr);
  MultiTrace bu = scattering.trace_of(out.source);
  for (auto& x : bu.v) x *= Cplx(0.0, -2.0);
  out.g = projector.communicate(bu);
  return out;
}

}  // namespace skeldd
