// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>

#include "skeldd/mesh.hpp"
#include "skeldd/sparse.hpp"

namespace skeldd {

// Non-overlapping conforming partition; subdomain ids are 0-based in memory,
// 1-based in files.
struct Partition {
  std::vector<int> subdomain_of_triangle;
  int count = 0;

  int operator[](int t) const { return subdomain_of_triangle[t]; }
};

// Assigns triangles to angular sectors about `center`: subdomain
// floor(theta J / 2pi) with theta in [0, 2pi), half-open sectors.
Partition partition_pie(const Mesh& mesh, int count, Vec2 center = {0.0, 0.0});

// Vertical strips of equal width over the bounding box of the centroids;
// yields cross-point-free ("onion skin") partitions.
Partition partition_strip(const Mesh& mesh, int count);

// One integer label per triangle, newline separated, 0- or 1-based.
Partition partition_from_file(const Mesh& mesh, const std::string& path);
Partition partition_from_labels(const Mesh& mesh, const std::vector<long long>& labels);
void write_partition(const Partition& partition, const std::string& path);

// Per-subdomain edge sets, thin skeleton, multiplicities and classes.
struct EdgeSets {
  std::vector<std::vector<int>> edges_of;  // E_j, sorted global edge ids
  std::vector<int> thin_skeleton;          // edges shared by >= 2 subdomains, sorted
  std::vector<int> multiplicity;           // d_e for every edge of the mesh
  std::vector<std::vector<int>> classes;   // owning subdomains of every edge, sorted
  int num_subdomains = 0;
};

EdgeSets build_edge_sets(const Mesh& mesh, const Partition& partition);

struct SkeletonPolicy {
  enum class Kind { thin, layers, with_external_boundary };
  Kind kind = Kind::thin;
  int layer_count = 0;

  static SkeletonPolicy thin() { return {Kind::thin, 0}; }
  static SkeletonPolicy layers(int k) { return {Kind::layers, k}; }
  static SkeletonPolicy with_external_boundary() { return {Kind::with_external_boundary, 0}; }
  static SkeletonPolicy parse(const std::string& text);
  std::string to_string() const;
};

struct Skeleton {
  std::vector<int> gamma;                  // sorted global edge ids
  std::vector<std::vector<int>> gamma_of;  // per subdomain, sorted
  SkeletonPolicy policy;
  std::size_t n_sys = 0;                   // sum of the block sizes
  std::vector<int> gamma_index;            // edge id -> position in gamma, -1 outside
  std::vector<std::size_t> block_offset;   // size J+1, multi-trace block layout

  int num_subdomains() const { return static_cast<int>(gamma_of.size()); }
  int block_size(int j) const { return static_cast<int>(gamma_of[j].size()); }
  std::span<Cplx> block(CVec& v, int j) const {
    return std::span<Cplx>(v).subspan(block_offset[j], gamma_of[j].size());
  }
  std::span<const Cplx> block(const CVec& v, int j) const {
    return std::span<const Cplx>(v).subspan(block_offset[j], gamma_of[j].size());
  }
};

Skeleton build_thick_skeleton(const EdgeSets& edge_sets, const Mesh& mesh, SkeletonPolicy policy);

// Boolean restriction/trace operator stored as one source index per row.
struct IndexMap {
  int domain_size = 0;
  std::vector<int> targets;

  int codomain_size() const { return static_cast<int>(targets.size()); }
  void apply(std::span<const Cplx> x, std::span<Cplx> y) const;
  // Scatter-add of the transpose; `x` must be pre-sized (and usually zeroed).
  void apply_transpose_add(std::span<const Cplx> y, std::span<Cplx> x) const;
  CVec apply(const CVec& x) const;
  CVec apply_transpose(const CVec& y) const;
  SparseMatrix to_sparse() const;
};

struct SubdomainMaps {
  std::vector<IndexMap> restrict_edges;  // R_j : E -> E_j
  std::vector<IndexMap> restrict_gamma;  // Q_j : gamma -> gamma_j
  std::vector<IndexMap> trace;           // B_j : E_j -> gamma_j
  std::vector<IndexMap> interior;        // B_{j,c} : E_j -> E_j \ gamma_j
};

SubdomainMaps build_index_maps(const EdgeSets& edge_sets, const Skeleton& skeleton);

// Position of `value` in a sorted vector, -1 if absent.
int sorted_position(const std::vector<int>& sorted, int value);

}  // namespace skeldd
