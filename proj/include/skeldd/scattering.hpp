// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "skeldd/traces.hpp"

namespace skeldd {

// Factorization of one subdomain operator A_j - i B_j^T T_j B_j. For explicit
// inductances the matrix is formed and factored directly (plain kind). For
// Schur inductances the factorization is of the sparse augmented system
//   [[A, 0, B^T], [0, -iC, -B'^T], [B, -B', 0]]
// (one C copy per interface class), so the Schur complement is never formed.
class LocalSolver {
public:
  enum class Kind { plain, augmented };

  static LocalSolver factor(int j, const LinearSystem& local, const Inductance& inductance,
                            const IndexMap& trace_map);

  Kind kind() const { return kind_; }
  int edge_count() const { return edge_count_; }

  // u = (A_j - i B_j^T T_j B_j)^{-1} (f + B_j^T T_j p); either part may be null.
  CVec solve(const CVec* f, std::span<const Cplx> p) const;

private:
  Kind kind_ = Kind::plain;
  int edge_count_ = 0;
  int trace_count_ = 0;
  std::optional<SparseLU> factor_;
  const Inductance* inductance_ = nullptr;
  int subdomain_ = 0;
  IndexMap trace_map_;
  // augmented layout: [E_j | E'_j per class ... | gamma_j]
  std::vector<int> class_offsets_;
  int system_size_ = 0;
};

// Block-diagonal scattering operator S = Id + 2i B (A - iB^T T B)^{-1} B^T T
// together with the local solves shared by the outer algorithms.
class ScatteringOperator {
public:
  ScatteringOperator(const Skeleton& skeleton, const SubdomainMaps& maps,
                     std::vector<LinearSystem> locals, const Inductance& inductance,
                     int threads = 1);

  struct SResult {
    MultiTrace q;
    BrokenField volume;  // v_j = (A_j - iB^T T B)^{-1} B^T T p_j
  };
  SResult apply(const MultiTrace& p) const;

  // Volume solves u_j = (A_j - iB^T T B)^{-1}(f_j + B_j^T T_j p_j); pass
  // nullptr to drop the trace term (pure source solve).
  BrokenField volume_solve(const MultiTrace* p) const;

  // Trace of a broken field: blocks B_j u_j.
  MultiTrace trace_of(const BrokenField& u) const;

  // Energy dissipation -Im(v^H A v) of a broken field.
  double dissipation(const BrokenField& v) const;

  const LinearSystem& local(int j) const { return locals_[j]; }
  const LocalSolver& solver(int j) const { return solvers_[j]; }
  const Skeleton& skeleton() const { return *skeleton_; }
  const SubdomainMaps& maps() const { return *maps_; }
  const Inductance& inductance() const { return *inductance_; }
  int threads() const { return threads_; }

private:
  const Skeleton* skeleton_;
  const SubdomainMaps* maps_;
  const Inductance* inductance_;
  std::vector<LinearSystem> locals_;
  std::vector<LocalSolver> solvers_;
  int threads_;
};

struct SkeletonRhs {
  MultiTrace g;        // -2i Pi B (A - iB^T T B)^{-1} f
  BrokenField source;  // the f-only local solves (Richardson initial state)
};

SkeletonRhs skeleton_rhs(const ScatteringOperator& scattering, const Projector& projector);

}  // namespace skeldd
