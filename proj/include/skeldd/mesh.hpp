// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <iosfwd>
#include <string>
#include <vector>

namespace skeldd {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double length(Vec2 a) { return std::hypot(a.x, a.y); }

// 2D conforming triangulation with globally oriented edges. Triangles are
// positively oriented; edge e joins vertices (vmin, vmax) with vmin < vmax and
// unit tangent pointing from vmin to vmax. Edge ids follow the lexicographic
// order of (vmin, vmax), so operator matrices are reproducible across runs.
struct Mesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::array<int, 2>> edges;
  std::vector<Vec2> edge_tangents;
  std::vector<std::array<int, 3>> triangle_edges;  // edge ids of (v0v1, v1v2, v2v0)
  std::vector<std::array<int, 2>> edge_triangles;  // incident triangles, -1 if none
  std::vector<int> boundary_edges;                 // sorted edge ids on the domain boundary
  std::vector<int> boundary_tag;                   // per edge, 0 when untagged/interior

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }

  double edge_length(int e) const {
    return length(vertices[edges[e][1]] - vertices[edges[e][0]]);
  }
  Vec2 centroid(int t) const {
    const auto& tri = triangles[t];
    return (1.0 / 3.0) * (vertices[tri[0]] + vertices[tri[1]] + vertices[tri[2]]);
  }
  double triangle_area(int t) const {
    const auto& tri = triangles[t];
    return 0.5 * cross(vertices[tri[1]] - vertices[tri[0]], vertices[tri[2]] - vertices[tri[0]]);
  }
  bool is_boundary_edge(int e) const { return edge_triangles[e][1] < 0; }
  double typical_edge_length() const;
};

// Derives edges/incidence from vertices+triangles, reorients triangles
// positively and validates conformity (every edge on 1 or 2 triangles) and
// the Euler relation #V - #E + #T = 1.
void finalize_mesh(Mesh& mesh);

// Loads ASCII Gmsh MSH v2.2 (subset: element types 1 and 2) or the native
// JSON format, dispatching on file content.
Mesh load_mesh(const std::string& path);
Mesh mesh_from_msh(std::istream& in);
Mesh mesh_from_json_text(const std::string& text);

// Structured disk mesh made of hexagonal rings: ring k carries 6k vertices,
// so the edge length is close to radius / rings everywhere.
Mesh make_disk_mesh(double radius, double target_h);

// Axis-aligned rectangle [0,w] x [0,h] split into nx-by-ny squares, each cut
// along the lower-left to upper-right diagonal.
Mesh make_rect_mesh(double w, double h, int nx, int ny);

}  // namespace skeldd
