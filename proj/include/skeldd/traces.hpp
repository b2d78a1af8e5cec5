// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <optional>

#include "skeldd/assembly.hpp"
#include "skeldd/lu.hpp"
#include "skeldd/partition.hpp"

namespace skeldd {

// Complex coefficients stacked over the per-subdomain skeleton blocks
// (gamma_1 x ... x gamma_J); duplicated interface unknowns are independent.
struct MultiTrace {
  CVec v;
};

// Coefficients over the skeleton edge set gamma itself.
struct SingleTrace {
  CVec v;
};

using BrokenField = std::vector<CVec>;  // per-subdomain volume coefficients

enum class InductanceKind { scalar, despres, schur_subdomain, schur_interface, explicit_blocks };

// Block-diagonal SPD operator defining the transmission scalar product.
// Explicit kinds store sparse blocks plus factorizations; Schur kinds apply
// T_j through saddle-point solves of the auxiliary system and T_j^{-1}
// through B' C^{-1} B'^T, without ever forming the Schur complement.
class Inductance {
public:
  static Inductance scalar(const Skeleton& skeleton, double a);
  static Inductance despres(const Mesh& mesh, const Skeleton& skeleton, const Medium& medium,
                            bool interface_decouple);
  static Inductance explicit_blocks(const Skeleton& skeleton, std::vector<SparseMatrix> blocks);
  static Inductance schur_subdomain(const Skeleton& skeleton, std::vector<AuxiliarySystem> aux,
                                    int threads = 1);
  // Schur complement taken against each interface class independently: T_j is
  // block diagonal over the equivalence classes of gamma_j.
  static Inductance schur_interface(const Skeleton& skeleton, const EdgeSets& edge_sets,
                                    std::vector<AuxiliarySystem> aux, int threads = 1);

  InductanceKind kind() const { return kind_; }
  int num_subdomains() const { return static_cast<int>(block_sizes_.size()); }
  int block_size(int j) const { return block_sizes_[j]; }
  bool is_explicit() const { return kind_ != InductanceKind::schur_subdomain && kind_ != InductanceKind::schur_interface; }
  // Whether the explicit block-matched hypothesis holds, enabling the
  // explicit projection formula.
  bool explicit_block_matched() const { return block_matched_; }

  void apply(int j, std::span<const Cplx> x, std::span<Cplx> y) const;
  void apply_inverse(int j, std::span<const Cplx> x, std::span<Cplx> y) const;

  const SparseMatrix* explicit_block(int j) const;
  const AuxiliarySystem* auxiliary(int j) const;
  // Interface classes of gamma_j (positions within gamma_j); empty unless
  // kind is schur_interface.
  const std::vector<std::vector<int>>& interface_classes(int j) const;

private:
  struct SchurBlock {
    AuxiliarySystem aux;
    std::optional<SparseLU> c_factor;
    std::vector<std::optional<SparseLU>> saddle_factors;  // one per class
    std::vector<std::vector<int>> class_rows;             // positions in gamma_j
    std::vector<IndexMap> class_bprime;                   // E'_j -> class rows
  };

  InductanceKind kind_ = InductanceKind::scalar;
  bool block_matched_ = false;
  std::vector<int> block_sizes_;
  std::vector<SparseMatrix> blocks_;
  std::vector<std::optional<SparseLU>> block_factors_;
  std::vector<SchurBlock> schur_;
  std::vector<std::vector<int>> no_classes_;
};

class ProjectionError : public std::runtime_error {
public:
  ProjectionError(const std::string& what, double best_residual)
      : std::runtime_error(what), best_residual(best_residual) {}
  double best_residual;
};

struct PcgConfig {
  double tol = 1e-12;
  int max_iterations = 500;
};

// T-orthogonal projector P onto the single-trace space rg(Q), evaluated by a
// conjugate gradient solve of the Gram system Q^T T Q v = Q^T T u with the
// Neumann-Neumann preconditioner D Q^T T^{-1} Q D, D = diag(1/d_e).
class Projector {
public:
  Projector(const Skeleton& skeleton, const EdgeSets& edge_sets, const Inductance& inductance,
            PcgConfig config = {}, int threads = 1);

  SingleTrace apply_gram(const SingleTrace& x) const;
  SingleTrace nn_precondition(const SingleTrace& r) const;

  // Solves the Gram system for Q^T T u; project(u) = Q * gram_solve(u).
  SingleTrace gram_solve(const MultiTrace& u) const;
  MultiTrace project(const MultiTrace& u) const;
  MultiTrace communicate(const MultiTrace& u) const;  // 2 P - Id

  // Explicit formula v_e = (1/d_e) sum_k u_{k,e}, valid when the inductance
  // satisfies the block-matched hypothesis; no linear solve involved.
  MultiTrace project_explicit_diagonal(const MultiTrace& u) const;

  MultiTrace lift(const SingleTrace& v) const;  // Q v

  // Transmission scalar product (x, y)_T = x^T T conj(y) and its norm.
  Cplx t_dot(const MultiTrace& x, const MultiTrace& y) const;
  double t_norm(const MultiTrace& x) const;
  MultiTrace t_apply(const MultiTrace& x) const;

  struct Stats {
    int last_pcg_iterations = 0;
    int max_pcg_iterations = 0;
  };
  const Stats& stats() const { return stats_; }
  void reset_stats() const { stats_ = Stats{}; }

  const Skeleton& skeleton() const { return *skeleton_; }
  const Inductance& inductance() const { return *inductance_; }
  const PcgConfig& config() const { return config_; }

private:
  const Skeleton* skeleton_;
  const Inductance* inductance_;
  PcgConfig config_;
  int threads_;
  RVec inv_multiplicity_;  // 1/d_e over gamma
  std::optional<SparseMatrix> assembled_gram_;  // pre-assembled for explicit kinds
  mutable Stats stats_;
};

}  // namespace skeldd
