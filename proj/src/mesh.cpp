// SPDX-License-Identifier: Apache-2.0

#include "skeldd/mesh.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace skeldd {

double Mesh::typical_edge_length() const {
  if (edges.empty()) return 0.0;
  double s = 0.0;
  for (int e = 0; e < num_edges(); ++e) s += edge_length(e);
  return s / num_edges();
}

void finalize_mesh(Mesh& mesh) {
  if (mesh.triangles.empty()) throw std::runtime_error("mesh: empty triangulation");
  const int nv = mesh.num_vertices();
  for (auto& tri : mesh.triangles) {
    for (int v : tri)
      if (v < 0 || v >= nv) throw std::runtime_error("mesh: vertex index out of range");
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
      throw std::runtime_error("mesh: degenerate triangle (repeated vertex)");
    double a = cross(mesh.vertices[tri[1]] - mesh.vertices[tri[0]],
                     mesh.vertices[tri[2]] - mesh.vertices[tri[0]]);
    if (a < 0.0) std::swap(tri[1], tri[2]);
  }

  std::vector<std::array<int, 2>> pairs;
  pairs.reserve(3 * mesh.triangles.size());
  for (const auto& tri : mesh.triangles)
    for (int k = 0; k < 3; ++k) {
      int a = tri[k], b = tri[(k + 1) % 3];
      pairs.push_back({std::min(a, b), std::max(a, b)});
    }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  mesh.edges = pairs;

  mesh.edge_tangents.resize(mesh.edges.size());
  for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
    Vec2 d = mesh.vertices[mesh.edges[e][1]] - mesh.vertices[mesh.edges[e][0]];
    double len = length(d);
    if (len <= 0.0) throw std::runtime_error("mesh: zero-length edge");
    mesh.edge_tangents[e] = (1.0 / len) * d;
  }

  auto edge_id = [&](int a, int b) {
    std::array<int, 2> key{std::min(a, b), std::max(a, b)};
    auto it = std::lower_bound(mesh.edges.begin(), mesh.edges.end(), key);
    return static_cast<int>(it - mesh.edges.begin());
  };

  mesh.triangle_edges.resize(mesh.triangles.size());
  mesh.edge_triangles.assign(mesh.edges.size(), {-1, -1});
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      int e = edge_id(tri[k], tri[(k + 1) % 3]);
      mesh.triangle_edges[t][k] = e;
      auto& inc = mesh.edge_triangles[e];
      if (inc[0] < 0)
        inc[0] = t;
      else if (inc[1] < 0)
        inc[1] = t;
      else
        throw std::runtime_error("mesh: non-conforming triangulation (edge on >2 triangles)");
    }
  }

  mesh.boundary_edges.clear();
  for (int e = 0; e < mesh.num_edges(); ++e)
    if (mesh.edge_triangles[e][1] < 0) mesh.boundary_edges.push_back(e);
  if (mesh.boundary_tag.size() != mesh.edges.size()) mesh.boundary_tag.assign(mesh.edges.size(), 0);

  if (mesh.num_vertices() - mesh.num_edges() + mesh.num_triangles() != 1)
    throw std::runtime_error("mesh: Euler relation violated (not a simply connected disk)");
}

namespace {

Mesh from_raw(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
              const std::vector<std::array<int, 3>>& boundary_lines) {
  Mesh mesh;
  mesh.vertices = std::move(vertices);
  mesh.triangles = std::move(triangles);
  finalize_mesh(mesh);
  for (const auto& line : boundary_lines) {
    std::array<int, 2> key{std::min(line[0], line[1]), std::max(line[0], line[1])};
    auto it = std::lower_bound(mesh.edges.begin(), mesh.edges.end(), key);
    if (it == mesh.edges.end() || *it != key)
      throw std::runtime_error("mesh: boundary line is not an edge of the triangulation");
    mesh.boundary_tag[it - mesh.edges.begin()] = line[2];
  }
  return mesh;
}

}  // namespace

Mesh mesh_from_msh(std::istream& in) {
  std::string line;
  std::map<long long, int> node_id;
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::array<int, 3>> boundary_lines;

  auto fail = [](const std::string& what) -> std::runtime_error {
    return std::runtime_error("msh: malformed file: " + what);
  };

  bool saw_nodes = false, saw_elements = false;
  while (std::getline(in, line)) {
    if (line.rfind("$MeshFormat", 0) == 0) {
      if (!std::getline(in, line)) throw fail("truncated $MeshFormat");
      std::istringstream fmt(line);
      double version = 0.0;
      fmt >> version;
      if (!(version >= 2.0 && version < 3.0)) throw fail("unsupported MSH version");
      if (!std::getline(in, line) || line.rfind("$EndMeshFormat", 0) != 0)
        throw fail("missing $EndMeshFormat");
    } else if (line.rfind("$Nodes", 0) == 0) {
      saw_nodes = true;
      if (!std::getline(in, line)) throw fail("truncated $Nodes");
      long long count = std::stoll(line);
      for (long long i = 0; i < count; ++i) {
        if (!std::getline(in, line)) throw fail("truncated node list");
        std::istringstream ls(line);
        long long id;
        double x, y, z;
        if (!(ls >> id >> x >> y >> z)) throw fail("bad node line");
        if (std::abs(z) > 1e-12 * std::max(1.0, std::abs(x) + std::abs(y)))
          throw fail("nonplanar node (z != 0)");
        node_id[id] = static_cast<int>(vertices.size());
        vertices.push_back({x, y});
      }
      if (!std::getline(in, line) || line.rfind("$EndNodes", 0) != 0)
        throw fail("missing $EndNodes");
    } else if (line.rfind("$Elements", 0) == 0) {
      saw_elements = true;
      if (!std::getline(in, line)) throw fail("truncated $Elements");
      long long count = std::stoll(line);
      for (long long i = 0; i < count; ++i) {
        if (!std::getline(in, line)) throw fail("truncated element list");
        std::istringstream ls(line);
        long long id;
        int type, ntags;
        if (!(ls >> id >> type >> ntags)) throw fail("bad element line");
        std::vector<int> tags(ntags);
        for (int k = 0; k < ntags; ++k)
          if (!(ls >> tags[k])) throw fail("bad element tags");
        auto node = [&](long long raw) {
          auto it = node_id.find(raw);
          if (it == node_id.end()) throw fail("element references unknown node");
          return it->second;
        };
        if (type == 1) {
          long long a, b;
          if (!(ls >> a >> b)) throw fail("bad line element");
          boundary_lines.push_back({node(a), node(b), ntags > 0 ? tags[0] : 0});
        } else if (type == 2) {
          long long a, b, c;
          if (!(ls >> a >> b >> c)) throw fail("bad triangle element");
          triangles.push_back({node(a), node(b), node(c)});
        } else if (type == 15) {
          // point elements carry no geometry we use
        } else {
          throw fail("unsupported element type " + std::to_string(type));
        }
      }
      if (!std::getline(in, line) || line.rfind("$EndElements", 0) != 0)
        throw fail("missing $EndElements");
    }
  }
  if (!saw_nodes || !saw_elements) throw fail("missing $Nodes or $Elements section");
  return from_raw(std::move(vertices), std::move(triangles), boundary_lines);
}

Mesh mesh_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("mesh json: parse error: ") + e.what());
  }
  if (!j.contains("vertices") || !j.contains("triangles"))
    throw std::runtime_error("mesh json: missing 'vertices' or 'triangles'");
  std::vector<Vec2> vertices;
  for (const auto& v : j["vertices"]) {
    if (!v.is_array() || v.size() != 2) throw std::runtime_error("mesh json: bad vertex entry");
    vertices.push_back({v[0].get<double>(), v[1].get<double>()});
  }
  std::vector<std::array<int, 3>> triangles;
  for (const auto& t : j["triangles"]) {
    if (!t.is_array() || t.size() != 3) throw std::runtime_error("mesh json: bad triangle entry");
    triangles.push_back({t[0].get<int>(), t[1].get<int>(), t[2].get<int>()});
  }
  std::vector<std::array<int, 3>> boundary_lines;
  if (j.contains("boundary_lines"))
    for (const auto& l : j["boundary_lines"]) {
      if (!l.is_array() || l.size() < 2) throw std::runtime_error("mesh json: bad boundary line");
      boundary_lines.push_back(
          {l[0].get<int>(), l[1].get<int>(), l.size() > 2 ? l[2].get<int>() : 0});
    }
  return from_raw(std::move(vertices), std::move(triangles), boundary_lines);
}

Mesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("mesh: cannot open file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string text = buffer.str();
  auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw std::runtime_error("mesh: empty file: " + path);
  if (text[first] == '{') return mesh_from_json_text(text);
  std::istringstream stream(text);
  return mesh_from_msh(stream);
}

Mesh make_disk_mesh(double radius, double target_h) {
  if (radius <= 0.0 || target_h <= 0.0)
    throw std::invalid_argument("make_disk_mesh: radius and target_h must be positive");
  int rings = std::max(1, static_cast<int>(std::lround(radius / target_h)));
  const double dr = radius / rings;

  Mesh mesh;
  mesh.vertices.push_back({0.0, 0.0});
  std::vector<int> ring_start(rings + 1, 0);
  for (int k = 1; k <= rings; ++k) {
    ring_start[k] = mesh.num_vertices();
    int n = 6 * k;
    for (int m = 0; m < n; ++m) {
      double a = 2.0 * M_PI * m / n;
      mesh.vertices.push_back({k * dr * std::cos(a), k * dr * std::sin(a)});
    }
  }
  // Center fan.
  for (int m = 0; m < 6; ++m)
    mesh.triangles.push_back({0, ring_start[1] + m, ring_start[1] + (m + 1) % 6});
  // Annulus strips: rings k-1 (n0 points) and k (n1 = n0 + 6 points), merged
  // by advancing whichever ring has the smaller next angle.
  for (int k = 2; k <= rings; ++k) {
    int n0 = 6 * (k - 1), n1 = 6 * k;
    int i = 0, jo = 0;
    auto inner = [&](int idx) { return ring_start[k - 1] + idx % n0; };
    auto outer = [&](int idx) { return ring_start[k] + idx % n1; };
    for (int step = 0; step < n0 + n1; ++step) {
      double next_inner = static_cast<double>(i + 1) / n0;
      double next_outer = static_cast<double>(jo + 1) / n1;
      if (next_outer <= next_inner) {
        mesh.triangles.push_back({outer(jo), outer(jo + 1), inner(i)});
        ++jo;
      } else {
        mesh.triangles.push_back({inner(i), inner(i + 1), outer(jo)});
        ++i;
      }
    }
  }
  finalize_mesh(mesh);
  return mesh;
}

Mesh make_rect_mesh(double w, double h, int nx, int ny) {
  if (w <= 0.0 || h <= 0.0 || nx < 1 || ny < 1)
    throw std::invalid_argument("make_rect_mesh: invalid dimensions");
  Mesh mesh;
  auto vid = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) mesh.vertices.push_back({w * i / nx, h * j / ny});
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      mesh.triangles.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
      mesh.triangles.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
    }
  finalize_mesh(mesh);
  return mesh;
}

}  // namespace skeldd
