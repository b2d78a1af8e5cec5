// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>

#include "skeldd/mesh.hpp"
#include "skeldd/sparse.hpp"

namespace skeldd {

// Piecewise-constant material coefficients: relative permittivity and
// permeability per triangle, impedance per boundary edge, wavenumber kappa.
// Admissible media have positive real parts and nonnegative imaginary parts
// (dissipative sign convention).
struct Medium {
  double kappa = 1.0;
  CVec eps;  // per triangle
  CVec mu;   // per triangle
  CVec eta;  // per edge, meaningful on boundary edges

  void validate(const Mesh& mesh) const;

  static Medium homogeneous(const Mesh& mesh, double kappa);
  static Medium flower_heterogeneous(const Mesh& mesh, double kappa);
  static Medium flower_dissipative(const Mesh& mesh, double kappa);
  static Medium preset(const std::string& name, const Mesh& mesh, double kappa);
  static Medium from_json_file(const Mesh& mesh, const std::string& path, double kappa);
};

// Petal-shaped heterogeneous profile evaluated at a point.
double flower_mu0(Vec2 p);
double flower_eps0(Vec2 p);

// Product of the area-weighted means of the flower profiles mu0 and eps0 over
// the mesh, used to scale the wavenumber of the homogeneous comparison medium.
double flower_kappa0(const Mesh& mesh);

struct PlaneWave {
  Vec2 direction{1.0, 0.0};  // unit propagation direction
  Cplx amplitude{1.0, 0.0};  // polarization is amplitude * perp(direction)
};

struct SourceSpec {
  std::optional<std::vector<std::array<Cplx, 2>>> volume;  // constant per triangle
  std::optional<PlaneWave> plane_wave;

  static SourceSpec none() { return {}; }
  static SourceSpec incoming_plane_wave(Vec2 direction = {1.0, 0.0});
};

// Incident field value and scalar curl of the plane wave at a point.
std::array<Cplx, 2> plane_wave_field(const PlaneWave& pw, double kappa, Vec2 p);
Cplx plane_wave_curl(const PlaneWave& pw, double kappa, Vec2 p);

}  // namespace skeldd
