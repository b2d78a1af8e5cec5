// SPDX-License-Identifier: Apache-2.0

#include "skeldd/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace skeldd {

namespace {

// 4-point Gauss-Legendre rule on [0, 1].
constexpr double kGaussNode[4] = {0.5 - 0.8611363115940526 / 2.0, 0.5 - 0.3399810435848563 / 2.0,
                                  0.5 + 0.3399810435848563 / 2.0, 0.5 + 0.8611363115940526 / 2.0};
constexpr double kGaussWeight[4] = {0.3478548451374538 / 2.0, 0.6521451548625461 / 2.0,
                                    0.6521451548625461 / 2.0, 0.3478548451374538 / 2.0};

struct ElementGeometry {
  double area;
  std::array<Vec2, 3> grad_lambda;
};

ElementGeometry element_geometry(const Mesh& mesh, int t, double degenerate_scale) {
  const auto& tri = mesh.triangles[t];
  Vec2 a = mesh.vertices[tri[0]], b = mesh.vertices[tri[1]], c = mesh.vertices[tri[2]];
  double area = 0.5 * cross(b - a, c - a);
  if (area <= 1e-14 * degenerate_scale)
    throw std::runtime_error("assembly: degenerate triangle " + std::to_string(t));
  auto perp = [](Vec2 v) { return Vec2{-v.y, v.x}; };
  ElementGeometry g;
  g.area = area;
  g.grad_lambda[0] = (0.5 / area) * perp(c - b);
  g.grad_lambda[1] = (0.5 / area) * perp(a - c);
  g.grad_lambda[2] = (0.5 / area) * perp(b - a);
  return g;
}

struct LocalEdge {
  int edge;  // global edge id
  int p, q;  // local vertex indices of (vmin, vmax)
};

std::array<LocalEdge, 3> local_edges(const Mesh& mesh, int t) {
  const auto& tri = mesh.triangles[t];
  std::array<LocalEdge, 3> out;
  for (int k = 0; k < 3; ++k) {
    int e = mesh.triangle_edges[t][k];
    out[k].edge = e;
    int vmin = mesh.edges[e][0], vmax = mesh.edges[e][1];
    for (int l = 0; l < 3; ++l) {
      if (tri[l] == vmin) out[k].p = l;
      if (tri[l] == vmax) out[k].q = l;
    }
  }
  return out;
}

double lambda_pair_integral(int i, int j, double area) { return i == j ? area / 6.0 : area / 12.0; }

double domain_scale(const Mesh& mesh) {
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& v : mesh.vertices) {
    xmin = std::min(xmin, v.x);
    xmax = std::max(xmax, v.x);
    ymin = std::min(ymin, v.y);
    ymax = std::max(ymax, v.y);
  }
  double dx = xmax - xmin, dy = ymax - ymin;
  return dx * dx + dy * dy;
}

// Sign relating the canonical tangent of boundary edge e to the
// counterclockwise traversal of the domain boundary (interior on the left).
int boundary_orientation(const Mesh& mesh, int e) {
  int t = mesh.edge_triangles[e][0];
  const auto& tri = mesh.triangles[t];
  for (int k = 0; k < 3; ++k)
    if (mesh.triangle_edges[t][k] == e) return tri[k] == mesh.edges[e][0] ? 1 : -1;
  throw std::logic_error("boundary_orientation: edge not on its triangle");
}

// Assembles the sesquilinear form and load over a triangle subset, writing
// into local indices given by edge_index (-1 entries are absent). Boundary
// impedance terms are taken on domain-boundary edges of the subset only.
LinearSystem assemble_on(const Mesh& mesh, const Medium& medium, const SourceSpec& source,
                         const std::vector<int>& tris, const std::vector<int>& edge_index,
                         int n_local) {
  const double scale = domain_scale(mesh);
  const double kappa = medium.kappa;
  std::vector<Triplet> entries;
  entries.reserve(9 * tris.size() + 8);
  CVec rhs(n_local, Cplx(0.0, 0.0));

  for (int t : tris) {
    ElementGeometry g = element_geometry(mesh, t, scale);
    auto le = local_edges(mesh, t);
    const Cplx inv_mu = Cplx(1.0, 0.0) / medium.mu[t];
    const Cplx eps = medium.eps[t];
    std::array<double, 3> curl;
    for (int k = 0; k < 3; ++k) curl[k] = 2.0 * cross(g.grad_lambda[le[k].p], g.grad_lambda[le[k].q]);
    for (int k = 0; k < 3; ++k) {
      int row = edge_index[le[k].edge];
      for (int l = 0; l < 3; ++l) {
        int col = edge_index[le[l].edge];
        const auto &ek = le[k], &el = le[l];
        auto dot_g = [&](int i, int j) { return dot(g.grad_lambda[i], g.grad_lambda[j]); };
        double mass = dot_g(ek.q, el.q) * lambda_pair_integral(ek.p, el.p, g.area) -
                      dot_g(ek.q, el.p) * lambda_pair_integral(ek.p, el.q, g.area) -
                      dot_g(ek.p, el.q) * lambda_pair_integral(ek.q, el.p, g.area) +
                      dot_g(ek.p, el.p) * lambda_pair_integral(ek.q, el.q, g.area);
        Cplx value = inv_mu * (g.area * curl[k] * curl[l]) - kappa * kappa * eps * mass;
        entries.push_back({row, col, value});
      }
      if (source.volume) {
        const auto& fv = (*source.volume)[t];
        Vec2 diff = g.grad_lambda[le[k].q] - g.grad_lambda[le[k].p];
        rhs[edge_index[le[k].edge]] += (g.area / 3.0) * (fv[0] * diff.x + fv[1] * diff.y);
      }
    }
  }

  // Impedance boundary term and plane-wave datum, on boundary edges whose
  // triangle belongs to the subset.
  std::vector<char> in_subset(mesh.num_triangles(), 0);
  for (int t : tris) in_subset[t] = 1;
  for (int e : mesh.boundary_edges) {
    int t = mesh.edge_triangles[e][0];
    if (!in_subset[t]) continue;
    int row = edge_index[e];
    const double len = mesh.edge_length(e);
    const Cplx impedance_weight = kappa / medium.eta[e];
    entries.push_back({row, row, Cplx(0.0, -1.0) * impedance_weight / len});
    if (source.plane_wave) {
      const PlaneWave& pw = *source.plane_wave;
      const int sigma = boundary_orientation(mesh, e);
      Vec2 v0 = mesh.vertices[mesh.edges[e][0]], v1 = mesh.vertices[mesh.edges[e][1]];
      Vec2 tangent = mesh.edge_tangents[e];
      Cplx curl_int(0.0, 0.0), tang_int(0.0, 0.0);
      for (int q = 0; q < 4; ++q) {
        Vec2 p = v0 + kGaussNode[q] * (v1 - v0);
        auto field = plane_wave_field(pw, kappa, p);
        curl_int += kGaussWeight[q] * len * plane_wave_curl(pw, kappa, p);
        tang_int += kGaussWeight[q] * len * (field[0] * tangent.x + field[1] * tangent.y);
      }
      const Cplx inv_mu = Cplx(1.0, 0.0) / medium.mu[t];
      rhs[row] += static_cast<double>(sigma) / len * inv_mu * curl_int -
                  Cplx(0.0, 1.0) * impedance_weight / len * tang_int;
    }
  }
  return {SparseMatrix::from_triplets(n_local, n_local, std::move(entries)), std::move(rhs)};
}

std::vector<int> identity_index(int n) {
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  return idx;
}

std::vector<int> index_of_sorted(const std::vector<int>& sorted, int n) {
  std::vector<int> idx(n, -1);
  for (std::size_t i = 0; i < sorted.size(); ++i) idx[sorted[i]] = static_cast<int>(i);
  return idx;
}

}  // namespace

LinearSystem assemble_global(const Mesh& mesh, const Medium& medium, const SourceSpec& source) {
  std::vector<int> tris(mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) tris[t] = t;
  return assemble_on(mesh, medium, source, tris, identity_index(mesh.num_edges()),
                     mesh.num_edges());
}

LinearSystem assemble_local(int j, const Mesh& mesh, const Partition& partition,
                            const EdgeSets& edge_sets, const Medium& medium,
                            const SourceSpec& source) {
  std::vector<int> tris;
  for (int t = 0; t < mesh.num_triangles(); ++t)
    if (partition[t] == j) tris.push_back(t);
  const auto& ej = edge_sets.edges_of[j];
  return assemble_on(mesh, medium, source, tris, index_of_sorted(ej, mesh.num_edges()),
                     static_cast<int>(ej.size()));
}

double despres_eta_bar(const Mesh& mesh, const Medium& medium, int e) {
  double sum = 0.0;
  int count = 0;
  for (int t : mesh.edge_triangles[e]) {
    if (t < 0) continue;
    sum += std::sqrt(medium.mu[t] / medium.eps[t]).real();
    ++count;
  }
  if (count == 0 || sum <= 0.0)
    throw std::runtime_error("despres_eta_bar: no admissible adjacent triangle");
  return sum / count;
}

SparseMatrix assemble_despres(int j, const Mesh& mesh, const Skeleton& skeleton,
                              const Medium& medium) {
  const auto& gj = skeleton.gamma_of[j];
  const int n = static_cast<int>(gj.size());
  std::vector<Triplet> entries;
  entries.reserve(n);
  for (int i = 0; i < n; ++i) {
    int e = gj[i];
    // The tangential trace of the edge basis function is 1/len on its own
    // edge and vanishes on every other edge, hence a diagonal matrix.
    double len = mesh.edge_length(e);
    double eta_bar = despres_eta_bar(mesh, medium, e);
    entries.push_back({i, i, Cplx(medium.kappa / (eta_bar * len), 0.0)});
  }
  return SparseMatrix::from_triplets(n, n, std::move(entries));
}

AuxiliarySystem assemble_auxiliary(int j, const Mesh& mesh, const Partition& partition,
                                   const EdgeSets& edge_sets, const Skeleton& skeleton,
                                   const Medium& medium, OmegaPrimePolicy policy) {
  AuxiliarySystem aux;

  // Triangles of Omega'_j.
  if (policy.kind == OmegaPrimePolicy::Kind::full) {
    for (int t = 0; t < mesh.num_triangles(); ++t)
      if (partition[t] == j) aux.triangles.push_back(t);
  } else {
    if (policy.layer_count < 0)
      throw std::invalid_argument("assemble_auxiliary: negative layer count");
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
    for (int t = 0; t < mesh.num_triangles(); ++t)
      if (marked[t] && partition[t] == j) aux.triangles.push_back(t);
  }

  for (int t : aux.triangles)
    for (int e : mesh.triangle_edges[t]) aux.edges.push_back(e);
  std::sort(aux.edges.begin(), aux.edges.end());
  aux.edges.erase(std::unique(aux.edges.begin(), aux.edges.end()), aux.edges.end());

  const auto& gj = skeleton.gamma_of[j];
  for (int e : gj)
    if (sorted_position(aux.edges, e) < 0)
      throw std::runtime_error(
          "assemble_auxiliary: policy violates gamma_j within the auxiliary edge set");

  const int n = static_cast<int>(aux.edges.size());
  std::vector<int> edge_index(mesh.num_edges(), -1);
  for (int i = 0; i < n; ++i) edge_index[aux.edges[i]] = i;

  const double scale = domain_scale(mesh);
  const double kappa = medium.kappa;
  std::vector<Triplet> entries;
  entries.reserve(9 * aux.triangles.size() + gj.size());

  for (int t : aux.triangles) {
    ElementGeometry g = element_geometry(mesh, t, scale);
    auto le = local_edges(mesh, t);
    const double re_inv_mu = (Cplx(1.0, 0.0) / medium.mu[t]).real();
    const double re_eps = medium.eps[t].real();
    std::array<double, 3> curl;
    for (int k = 0; k < 3; ++k) curl[k] = 2.0 * cross(g.grad_lambda[le[k].p], g.grad_lambda[le[k].q]);
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l) {
        const auto &ek = le[k], &el = le[l];
        auto dot_g = [&](int a, int b) { return dot(g.grad_lambda[a], g.grad_lambda[b]); };
        double mass = dot_g(ek.q, el.q) * lambda_pair_integral(ek.p, el.p, g.area) -
                      dot_g(ek.q, el.p) * lambda_pair_integral(ek.p, el.q, g.area) -
                      dot_g(ek.p, el.q) * lambda_pair_integral(ek.q, el.p, g.area) +
                      dot_g(ek.p, el.p) * lambda_pair_integral(ek.q, el.q, g.area);
        double value = re_inv_mu * g.area * curl[k] * curl[l] + kappa * kappa * re_eps * mass;
        entries.push_back({edge_index[ek.edge], edge_index[el.edge], Cplx(value, 0.0)});
      }
  }

  // Boundary mass on gamma'_j (boundary of Omega'_j not in gamma_j) and on
  // exterior-boundary edges of gamma_j. On edges interior to the domain the
  // impedance weight falls back to the same eta_bar rule as the Despres
  // operator; on the exterior boundary it is Re(kappa/eta).
  std::vector<int> incidence(mesh.num_edges(), 0);
  for (int t : aux.triangles)
    for (int e : mesh.triangle_edges[t]) ++incidence[e];
  std::vector<char> in_gamma_j(mesh.num_edges(), 0);
  for (int e : gj) in_gamma_j[e] = 1;
  for (int e : aux.edges) {
    bool on_aux_boundary = incidence[e] == 1;
    bool take = (on_aux_boundary && !in_gamma_j[e]) ||
                (in_gamma_j[e] && mesh.is_boundary_edge(e));
    if (!take) continue;
    double weight = mesh.is_boundary_edge(e) ? (kappa / medium.eta[e]).real()
                                             : kappa / despres_eta_bar(mesh, medium, e);
    int row = edge_index[e];
    entries.push_back({row, row, Cplx(weight / mesh.edge_length(e), 0.0)});
  }

  aux.C = SparseMatrix::from_triplets(n, n, std::move(entries));
  aux.bprime.domain_size = n;
  aux.bprime.targets.reserve(gj.size());
  for (int e : gj) aux.bprime.targets.push_back(edge_index[e]);
  return aux;
}

SparseMatrix assemble_energy_gram(const Mesh& mesh, double kappa) {
  const double scale = domain_scale(mesh);
  std::vector<Triplet> entries;
  entries.reserve(9 * mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    ElementGeometry g = element_geometry(mesh, t, scale);
    auto le = local_edges(mesh, t);
    std::array<double, 3> curl;
    for (int k = 0; k < 3; ++k) curl[k] = 2.0 * cross(g.grad_lambda[le[k].p], g.grad_lambda[le[k].q]);
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l) {
        const auto &ek = le[k], &el = le[l];
        auto dot_g = [&](int a, int b) { return dot(g.grad_lambda[a], g.grad_lambda[b]); };
        double mass = dot_g(ek.q, el.q) * lambda_pair_integral(ek.p, el.p, g.area) -
                      dot_g(ek.q, el.p) * lambda_pair_integral(ek.p, el.q, g.area) -
                      dot_g(ek.p, el.q) * lambda_pair_integral(ek.q, el.p, g.area) +
                      dot_g(ek.p, el.p) * lambda_pair_integral(ek.q, el.q, g.area);
        double value = mass + g.area * curl[k] * curl[l] / (kappa * kappa);
        entries.push_back({ek.edge, el.edge, Cplx(value, 0.0)});
      }
  }
  return SparseMatrix::from_triplets(mesh.num_edges(), mesh.num_edges(), std::move(entries));
}

CVec interpolate_plane_wave(const Mesh& mesh, const PlaneWave& pw, double kappa) {
  CVec u(mesh.num_edges());
  for (int e = 0; e < mesh.num_edges(); ++e) {
    Vec2 v0 = mesh.vertices[mesh.edges[e][0]], v1 = mesh.vertices[mesh.edges[e][1]];
    Vec2 tangent = mesh.edge_tangents[e];
    double len = mesh.edge_length(e);
    Cplx acc(0.0, 0.0);
    for (int q = 0; q < 4; ++q) {
      Vec2 p = v0 + kGaussNode[q] * (v1 - v0);
      auto field = plane_wave_field(pw, kappa, p);
      acc += kGaussWeight[q] * len * (field[0] * tangent.x + field[1] * tangent.y);
    }
    u[e] = acc;
  }
  return u;
}

}  // namespace skeldd
