// SPDX-License-Identifier: Apache-2.0

#include "skeldd/medium.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace skeldd {

void Medium::validate(const Mesh& mesh) const {
  if (kappa <= 0.0) throw std::runtime_error("medium: kappa must be positive");
  if (static_cast<int>(eps.size()) != mesh.num_triangles() ||
      static_cast<int>(mu.size()) != mesh.num_triangles())
    throw std::runtime_error("medium: coefficient arrays do not match the mesh");
  if (static_cast<int>(eta.size()) != mesh.num_edges())
    throw std::runtime_error("medium: eta array does not match the mesh");
  for (const auto& v : eps)
    if (v.real() <= 0.0 || v.imag() < 0.0) throw std::runtime_error("medium: inadmissible eps");
  for (const auto& v : mu)
    if (v.real() <= 0.0 || v.imag() < 0.0) throw std::runtime_error("medium: inadmissible mu");
  for (int e : mesh.boundary_edges) {
    const auto& v = eta[e];
    if (v.real() <= 0.0 || v.imag() < 0.0) throw std::runtime_error("medium: inadmissible eta");
  }
}

Medium Medium::homogeneous(const Mesh& mesh, double kappa) {
  Medium m;
  m.kappa = kappa;
  m.eps.assign(mesh.num_triangles(), Cplx(1.0, 0.0));
  m.mu.assign(mesh.num_triangles(), Cplx(1.0, 0.0));
  m.eta.assign(mesh.num_edges(), Cplx(1.0, 0.0));
  return m;
}

namespace {

constexpr double kDeltaMu = 5.0 / 2.0;
constexpr double kDeltaEps = 3.0 / 2.0;

double flower_rho(double theta) { return 1.0 + std::cos(6.0 * theta) / 2.0; }
double flower_psi(double theta) { return 2.0 * (1.0 + std::cos(6.0 * theta) / 6.0) / 3.0; }

double flower_profile(Vec2 p, double delta) {
  double r = length(p);
  double theta = std::atan2(p.y, p.x);
  if (theta < 0.0) theta += 2.0 * M_PI;
  double rho = flower_rho(theta);
  if (r < rho / 5.0) return 2.0 * delta;
  if (r < rho) return 1.0 + delta * flower_psi(theta);
  return 1.0;
}

}  // namespace

double flower_mu0(Vec2 p) { return flower_profile(p, kDeltaMu); }
double flower_eps0(Vec2 p) { return flower_profile(p, kDeltaEps); }

double flower_kappa0(const Mesh& mesh) {
  double area = 0.0, mu_sum = 0.0, eps_sum = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    double a = mesh.triangle_area(t);
    Vec2 c = mesh.centroid(t);
    area += a;
    mu_sum += a * flower_mu0(c);
    eps_sum += a * flower_eps0(c);
  }
  return (mu_sum / area) * (eps_sum / area);
}

Medium Medium::flower_heterogeneous(const Mesh& mesh, double kappa) {
  Medium m = homogeneous(mesh, kappa);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    Vec2 c = mesh.centroid(t);
    m.mu[t] = Cplx(flower_mu0(c), 0.0);
    m.eps[t] = Cplx(flower_eps0(c), 0.0);
  }
  return m;
}

Medium Medium::flower_dissipative(const Mesh& mesh, double kappa) {
  Medium m = flower_heterogeneous(mesh, kappa);
  for (auto& v : m.mu) v *= Cplx(1.0, 0.25);
  for (auto& v : m.eps) v *= Cplx(1.0, 1.0 / 6.0);
  return m;
}

Medium Medium::preset(const std::string& name, const Mesh& mesh, double kappa) {
  if (name == "homogeneous") return homogeneous(mesh, kappa);
  if (name == "flower-heterogeneous") return flower_heterogeneous(mesh, kappa);
  if (name == "flower-dissipative") return flower_dissipative(mesh, kappa);
  throw std::invalid_argument("medium: unknown preset '" + name + "'");
}

Medium Medium::from_json_file(const Mesh& mesh, const std::string& path, double kappa) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("medium: cannot open file: " + path);
  nlohmann::json j;
  in >> j;
  Medium m = homogeneous(mesh, kappa);
  auto read_complex_array = [&](const char* key, CVec& out, std::size_t expected) {
    if (!j.contains(key)) return;
    const auto& arr = j[key];
    if (arr.size() != expected)
      throw std::runtime_error(std::string("medium: '") + key + "' has wrong length");
    for (std::size_t i = 0; i < expected; ++i) {
      const auto& v = arr[i];
      if (v.is_number())
        out[i] = Cplx(v.get<double>(), 0.0);
      else if (v.is_array() && v.size() == 2)
        out[i] = Cplx(v[0].get<double>(), v[1].get<double>());
      else
        throw std::runtime_error(std::string("medium: bad entry in '") + key + "'");
    }
  };
  read_complex_array("eps", m.eps, mesh.num_triangles());
  read_complex_array("mu", m.mu, mesh.num_triangles());
  read_complex_array("eta", m.eta, mesh.num_edges());
  if (j.contains("kappa")) m.kappa = j["kappa"].get<double>();
  return m;
}

SourceSpec SourceSpec::incoming_plane_wave(Vec2 direction) {
  double len = length(direction);
  if (len <= 0.0) throw std::invalid_argument("plane wave: zero direction");
  SourceSpec s;
  s.plane_wave = PlaneWave{(1.0 / len) * direction, Cplx(1.0, 0.0)};
  return s;
}

std::array<Cplx, 2> plane_wave_field(const PlaneWave& pw, double kappa, Vec2 p) {
  // Polarization perpendicular to the propagation direction keeps the wave
  // divergence free, so it solves the homogeneous curl-curl problem exactly.
  Cplx phase = std::exp(Cplx(0.0, kappa * dot(pw.direction, p))) * pw.amplitude;
  return {-pw.direction.y * phase, pw.direction.x * phase};
}

Cplx plane_wave_curl(const PlaneWave& pw, double kappa, Vec2 p) {
  return Cplx(0.0, kappa) * std::exp(Cplx(0.0, kappa * dot(pw.direction, p))) * pw.amplitude;
}

}  // namespace skeldd
