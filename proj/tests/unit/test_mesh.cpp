// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "skeldd/mesh.hpp"

using namespace skeldd;

namespace {

Mesh single_triangle() {
  return mesh_from_json_text(R"({"vertices":[[0,0],[1,0],[0,1]],"triangles":[[0,1,2]]})");
}

std::string write_temp(const std::string& name, const std::string& content) {
  std::string path = "/tmp/skeldd_test_" + name;
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_SUITE("mesh") {

TEST_CASE("single triangle: three edges, all on the boundary") {
  Mesh m = single_triangle();
  CHECK(m.num_vertices() == 3);
  CHECK(m.num_edges() == 3);
  CHECK(m.num_triangles() == 1);
  CHECK(m.boundary_edges.size() == 3);
  CHECK(m.num_vertices() - m.num_edges() + m.num_triangles() == 1);
  // Canonical tangents point from the lower to the higher vertex id.
  for (int e = 0; e < 3; ++e) {
    Vec2 d = m.vertices[m.edges[e][1]] - m.vertices[m.edges[e][0]];
    CHECK(m.edges[e][0] < m.edges[e][1]);
    CHECK(std::abs(cross(d, m.edge_tangents[e])) < 1e-15);
    CHECK(dot(d, m.edge_tangents[e]) > 0.0);
  }
}

TEST_CASE("unit square: five edges, one interior") {
  Mesh m = make_rect_mesh(1.0, 1.0, 1, 1);
  CHECK(m.num_edges() == 5);
  CHECK(m.boundary_edges.size() == 4);
  int interior = 0;
  for (int e = 0; e < m.num_edges(); ++e)
    if (!m.is_boundary_edge(e)) ++interior;
  CHECK(interior == 1);
}

TEST_CASE("disk meshes satisfy the Euler relation at any refinement") {
  for (double h : {0.4, 0.2, 0.1}) {
    Mesh m = make_disk_mesh(1.0, h);
    CHECK(m.num_vertices() - m.num_edges() + m.num_triangles() == 1);
    for (int t = 0; t < m.num_triangles(); ++t) CHECK(m.triangle_area(t) > 0.0);
    CHECK(m.typical_edge_length() == doctest::Approx(h).epsilon(0.35));
  }
}

TEST_CASE("msh v2 subset round-trips against the json loader") {
  std::string msh =
      "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n"
      "$Nodes\n4\n1 0 0 0\n2 1 0 0\n3 1 1 0\n4 0 1 0\n$EndNodes\n"
      "$Elements\n6\n"
      "1 1 2 7 1 1 2\n"
      "2 1 2 7 1 2 3\n"
      "3 2 2 1 1 1 2 3\n"
      "4 2 2 1 1 1 3 4\n"
      "5 1 2 9 2 3 4\n"
      "6 15 2 0 1 1\n"
      "$EndElements\n";
  std::istringstream in(msh);
  Mesh m = mesh_from_msh(in);
  CHECK(m.num_vertices() == 4);
  CHECK(m.num_triangles() == 2);
  CHECK(m.num_edges() == 5);
  CHECK(m.boundary_edges.size() == 4);
  // Tag 7 on edges (0,1) and (1,2), tag 9 on (2,3).
  int tagged7 = 0, tagged9 = 0;
  for (int e = 0; e < m.num_edges(); ++e) {
    if (m.boundary_tag[e] == 7) ++tagged7;
    if (m.boundary_tag[e] == 9) ++tagged9;
  }
  CHECK(tagged7 == 2);
  CHECK(tagged9 == 1);
}

TEST_CASE("load_mesh dispatches on content") {
  std::string json_path = write_temp(
      "mesh.json", R"({"vertices":[[0,0],[1,0],[0,1]],"triangles":[[0,2,1]]})");
  Mesh m = load_mesh(json_path);
  CHECK(m.num_triangles() == 1);
  CHECK(m.triangle_area(0) > 0.0);  // reoriented on load
  std::remove(json_path.c_str());
}

TEST_CASE("malformed inputs are rejected") {
  CHECK_THROWS_WITH(load_mesh("/tmp/skeldd_no_such_file.msh"), doctest::Contains("cannot open"));
  std::string empty = write_temp("empty.msh", "");
  CHECK_THROWS_WITH(load_mesh(empty), doctest::Contains("empty"));
  std::remove(empty.c_str());

  CHECK_THROWS(mesh_from_json_text("{\"vertices\":[[0,0]]}"));
  CHECK_THROWS(mesh_from_json_text("not json"));
  CHECK_THROWS_WITH(mesh_from_json_text(R"({"vertices":[],"triangles":[]})"),
                    doctest::Contains("empty"));

  std::istringstream bad_version("$MeshFormat\n4.1 0 8\n$EndMeshFormat\n");
  CHECK_THROWS_WITH(mesh_from_msh(bad_version), doctest::Contains("version"));

  std::istringstream nonplanar(
      "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n1\n1 0 0 3.5\n$EndNodes\n"
      "$Elements\n0\n$EndElements\n");
  CHECK_THROWS_WITH(mesh_from_msh(nonplanar), doctest::Contains("z != 0"));
}

TEST_CASE("an edge shared by three triangles is non-conforming") {
  CHECK_THROWS_WITH(
      mesh_from_json_text(
          R"({"vertices":[[0,0],[1,0],[0,1],[0,-1],[1,1]],
              "triangles":[[0,1,2],[0,1,3],[0,1,4]]})"),
      doctest::Contains("non-conforming"));
}

TEST_CASE("degenerate triangles are rejected") {
  CHECK_THROWS(mesh_from_json_text(
      R"({"vertices":[[0,0],[1,0],[0,1]],"triangles":[[0,1,1]]})"));
}

}  // TEST_SUITE
