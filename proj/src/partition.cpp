// SPDX-License-Identifier: Apache-2.0

#include "skeldd/partition.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace skeldd {

int sorted_position(const std::vector<int>& sorted, int value) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), value);
  if (it == sorted.end() || *it != value) return -1;
  return static_cast<int>(it - sorted.begin());
}

Partition partition_pie(const Mesh& mesh, int count, Vec2 center) {
  if (count < 1) throw std::invalid_argument("partition_pie: count must be >= 1");
  Partition p;
  p.count = count;
  p.subdomain_of_triangle.resize(mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    Vec2 c = mesh.centroid(t) - center;
    double theta = std::atan2(c.y, c.x);
    if (theta < 0.0) theta += 2.0 * M_PI;
    int j = static_cast<int>(std::floor(theta * count / (2.0 * M_PI)));
    p.subdomain_of_triangle[t] = std::clamp(j, 0, count - 1);
  }
  return p;
}

Partition partition_strip(const Mesh& mesh, int count) {
  if (count < 1) throw std::invalid_argument("partition_strip: count must be >= 1");
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    double x = mesh.centroid(t).x;
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  const double width = std::max(hi - lo, 1e-300);
  Partition p;
  p.count = count;
  p.subdomain_of_triangle.resize(mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    int j = static_cast<int>(std::floor((mesh.centroid(t).x - lo) / width * count));
    p.subdomain_of_triangle[t] = std::clamp(j, 0, count - 1);
  }
  return p;
}

Partition partition_from_labels(const Mesh& mesh, const std::vector<long long>& labels) {
  if (labels.empty()) throw std::runtime_error("partition: empty label set");
  if (static_cast<int>(labels.size()) != mesh.num_triangles())
    throw std::runtime_error("partition: label count does not match triangle count");
  long long lo = *std::min_element(labels.begin(), labels.end());
  long long hi = *std::max_element(labels.begin(), labels.end());
  if (lo < 0) throw std::runtime_error("partition: negative label");
  // Labels are 0-based when 0 occurs, 1-based otherwise.
  const long long base = lo == 0 ? 0 : 1;
  Partition p;
  p.count = static_cast<int>(hi - base + 1);
  if (p.count < 1) throw std::runtime_error("partition: empty label set");
  p.subdomain_of_triangle.resize(labels.size());
  for (std::size_t t = 0; t < labels.size(); ++t)
    p.subdomain_of_triangle[t] = static_cast<int>(labels[t] - base);
  return p;
}

Partition partition_from_file(const Mesh& mesh, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("partition: cannot open file: " + path);
  std::vector<long long> labels;
  std::string token;
  while (in >> token) {
    std::size_t used = 0;
    long long value = 0;
    try {
      value = std::stoll(token, &used);
    } catch (const std::exception&) {
      throw std::runtime_error("partition: non-integer token '" + token + "'");
    }
    if (used != token.size())
      throw std::runtime_error("partition: non-integer token '" + token + "'");
    labels.push_back(value);
  }
  return partition_from_labels(mesh, labels);
}

void write_partition(const Partition& partition, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("partition: cannot open file for writing: " + path);
  for (int j : partition.subdomain_of_triangle) out << j + 1 << "\n";
}

EdgeSets build_edge_sets(const Mesh& mesh, const Partition& partition) {
  EdgeSets s;
  s.num_subdomains = partition.count;
  s.edges_of.assign(partition.count, {});
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    int j = partition[t];
    if (j < 0 || j >= partition.count)
      throw std::runtime_error("build_edge_sets: triangle with out-of-range subdomain");
    for (int e : mesh.triangle_edges[t]) s.edges_of[j].push_back(e);
  }
  for (auto& list : s.edges_of) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  s.classes.assign(mesh.num_edges(), {});
  for (int j = 0; j < partition.count; ++j)
    for (int e : s.edges_of[j]) s.classes[e].push_back(j);
  s.multiplicity.resize(mesh.num_edges());
  for (int e = 0; e < mesh.num_edges(); ++e) {
    s.multiplicity[e] = static_cast<int>(s.classes[e].size());
    if (s.multiplicity[e] < 1)
      throw std::runtime_error("build_edge_sets: edge not covered by any subdomain");
    if (s.multiplicity[e] > 2)
      throw std::runtime_error("build_edge_sets: edge multiplicity > 2 in a 2D mesh");
    if (s.multiplicity[e] >= 2) s.thin_skeleton.push_back(e);
  }
  return s;
}

SkeletonPolicy SkeletonPolicy::parse(const std::string& text) {
  if (text == "thin") return thin();
  if (text == "with-boundary" || text == "with-external-boundary") return with_external_boundary();
  if (text.rfind("layers:", 0) == 0) {
    int k = std::stoi(text.substr(7));
    if (k < 0) throw std::invalid_argument("skeleton policy: layer count must be >= 0");
    return layers(k);
  }
  throw std::invalid_argument("skeleton policy: unknown '" + text + "'");
}

std::string SkeletonPolicy::to_string() const {
  switch (kind) {
    case Kind::thin: return "thin";
    case Kind::layers: return "layers:" + std::to_string(layer_count);
    case Kind::with_external_boundary: return "with-boundary";
  }
  return "thin";
}

Skeleton build_thick_skeleton(const EdgeSets& edge_sets, const Mesh& mesh,
                              SkeletonPolicy policy) {
  Skeleton skel;
  skel.policy = policy;
  switch (policy.kind) {
    case SkeletonPolicy::Kind::thin:
      skel.gamma = edge_sets.thin_skeleton;
      break;
    case SkeletonPolicy::Kind::with_external_boundary: {
      skel.gamma = edge_sets.thin_skeleton;
      skel.gamma.insert(skel.gamma.end(), mesh.boundary_edges.begin(),
                        mesh.boundary_edges.end());
      std::sort(skel.gamma.begin(), skel.gamma.end());
      skel.gamma.erase(std::unique(skel.gamma.begin(), skel.gamma.end()), skel.gamma.end());
      break;
    }
    case SkeletonPolicy::Kind::layers: {
      if (policy.layer_count < 0)
        throw std::invalid_argument("build_thick_skeleton: negative layer count");
      // Triangles incident to the thin skeleton, then `layer_count` hops of
      // triangle adjacency.
      std::vector<char> marked(mesh.num_triangles(), 0);
      std::vector<int> frontier;
      for (int e : edge_sets.thin_skeleton)
        for (int t : mesh.edge_triangles[e])
          if (t >= 0 && !marked[t]) {
            marked[t] = 1;
            frontier.push_back(t);
          }
      for (int hop = 0; hop < policy.layer_count; ++hop) {
        std::vector<int> next;
        for (int t : frontier)
          for (int e : mesh.triangle_edges[t])
            for (int nb : mesh.edge_triangles[e])
              if (nb >= 0 && !marked[nb]) {
                marked[nb] = 1;
                next.push_back(nb);
              }
        frontier = std::move(next);
      }
      skel.gamma = edge_sets.thin_skeleton;
      for (int t = 0; t < mesh.num_triangles(); ++t)
        if (marked[t])
          for (int e : mesh.triangle_edges[t]) skel.gamma.push_back(e);
      std::sort(skel.gamma.begin(), skel.gamma.end());
      skel.gamma.erase(std::unique(skel.gamma.begin(), skel.gamma.end()), skel.gamma.end());
      break;
    }
  }

  skel.gamma_index.assign(mesh.num_edges(), -1);
  for (std::size_t i = 0; i < skel.gamma.size(); ++i) skel.gamma_index[skel.gamma[i]] = static_cast<int>(i);

  skel.gamma_of.resize(edge_sets.num_subdomains);
  for (int j = 0; j < edge_sets.num_subdomains; ++j)
    for (int e : edge_sets.edges_of[j])
      if (skel.gamma_index[e] >= 0) skel.gamma_of[j].push_back(e);

  skel.block_offset.assign(edge_sets.num_subdomains + 1, 0);
  for (int j = 0; j < edge_sets.num_subdomains; ++j)
    skel.block_offset[j + 1] = skel.block_offset[j] + skel.gamma_of[j].size();
  skel.n_sys = skel.block_offset.back();
  return skel;
}

void IndexMap::apply(std::span<const Cplx> x, std::span<Cplx> y) const {
  if (static_cast<int>(x.size()) != domain_size ||
      static_cast<int>(y.size()) != codomain_size())
    throw std::invalid_argument("IndexMap::apply: size mismatch");
  for (std::size_t i = 0; i < targets.size(); ++i) y[i] = x[targets[i]];
}

void IndexMap::apply_transpose_add(std::span<const Cplx> y, std::span<Cplx> x) const {
  if (static_cast<int>(x.size()) != domain_size ||
      static_cast<int>(y.size()) != codomain_size())
    throw std::invalid_argument("IndexMap::apply_transpose_add: size mismatch");
  for (std::size_t i = 0; i < targets.size(); ++i) x[targets[i]] += y[i];
}

CVec IndexMap::apply(const CVec& x) const {
  CVec y(targets.size());
  apply(std::span<const Cplx>(x), std::span<Cplx>(y));
  return y;
}

CVec IndexMap::apply_transpose(const CVec& y) const {
  CVec x(domain_size, Cplx(0.0, 0.0));
  apply_transpose_add(std::span<const Cplx>(y), std::span<Cplx>(x));
  return x;
}

SparseMatrix IndexMap::to_sparse() const {
  std::vector<Triplet> t;
  t.reserve(targets.size());
  for (int i = 0; i < codomain_size(); ++i) t.push_back({i, targets[i], Cplx(1.0, 0.0)});
  return SparseMatrix::from_triplets(codomain_size(), domain_size, std::move(t));
}

SubdomainMaps build_index_maps(const EdgeSets& edge_sets, const Skeleton& skeleton) {
  SubdomainMaps maps;
  const int count = edge_sets.num_subdomains;
  const int num_edges = static_cast<int>(edge_sets.multiplicity.size());
  maps.restrict_edges.resize(count);
  maps.restrict_gamma.resize(count);
  maps.trace.resize(count);
  maps.interior.resize(count);
  for (int j = 0; j < count; ++j) {
    const auto& ej = edge_sets.edges_of[j];
    const auto& gj = skeleton.gamma_of[j];

    auto& r = maps.restrict_edges[j];
    r.domain_size = num_edges;
    r.targets = ej;

    auto& q = maps.restrict_gamma[j];
    q.domain_size = static_cast<int>(skeleton.gamma.size());
    q.targets.reserve(gj.size());
    for (int e : gj) q.targets.push_back(skeleton.gamma_index[e]);

    auto& b = maps.trace[j];
    b.domain_size = static_cast<int>(ej.size());
    b.targets.reserve(gj.size());
    for (int e : gj) b.targets.push_back(sorted_position(ej, e));

    auto& bc = maps.interior[j];
    bc.domain_size = static_cast<int>(ej.size());
    for (int i = 0; i < static_cast<int>(ej.size()); ++i)
      if (skeleton.gamma_index[ej[i]] < 0) bc.targets.push_back(i);
  }
  return maps;
}

}  // namespace skeldd
