// SPDX-License-Identifier: Apache-2.0

#include "skeldd/driver.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace skeldd {

namespace {

constexpr int kReportSchemaVersion = 1;

Partition parse_partition(const RunSpec& spec, const Mesh& mesh) {
  const std::string& text = spec.partition;
  if (text.rfind("pie:", 0) == 0) return partition_pie(mesh, std::stoi(text.substr(4)));
  if (text.rfind("strip:", 0) == 0) return partition_strip(mesh, std::stoi(text.substr(6)));
  if (text.rfind("file:", 0) == 0) return partition_from_file(mesh, text.substr(5));
  throw std::invalid_argument("partition: expected pie:J, strip:J or file:PATH, got '" + text +
                              "'");
}

InductanceKind parse_inductance(const std::string& text) {
  if (text == "despres") return InductanceKind::despres;
  if (text == "schur") return InductanceKind::schur_subdomain;
  if (text == "schur-interface") return InductanceKind::schur_interface;
  if (text == "scalar") return InductanceKind::scalar;
  throw std::invalid_argument("inductance: expected despres, schur, schur-interface or scalar");
}

Medium parse_medium(const RunSpec& spec, const Mesh& mesh) {
  if (spec.medium.rfind("json:", 0) == 0)
    return Medium::from_json_file(mesh, spec.medium.substr(5), spec.kappa);
  return Medium::preset(spec.medium, mesh, spec.kappa);
}

void write_history_csv(const std::string& path, const SolveReport& report) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot write " + path);
  std::fprintf(f, "iter,residual,error,pcg_iters\n");
  for (std::size_t i = 0; i < report.residual_history.size(); ++i) {
    double err = i < report.error_history.size() ? report.error_history[i]
                                                 : std::nan("");
    int pcg = i < report.pcg_history.size() ? report.pcg_history[i] : 0;
    std::fprintf(f, "%zu,%.17g,%.17g,%d\n", i, report.residual_history[i], err, pcg);
  }
  std::fclose(f);
}

nlohmann::json config_json(const RunSpec& spec) {
  return {{"mesh", spec.mesh},
          {"radius", spec.radius},
          {"nlambda", spec.nlambda},
          {"kappa", spec.kappa},
          {"partition", spec.partition},
          {"skeleton", spec.skeleton},
          {"inductance", spec.inductance},
          {"interface_decouple", spec.interface_decouple},
          {"medium", spec.medium},
          {"solver", spec.solver.method == SolverConfig::Method::richardson ? "richardson"
                                                                            : "gmres"},
          {"damping", spec.solver.damping},
          {"restart", spec.solver.restart},
          {"tol", spec.solver.tol},
          {"max_iterations", spec.solver.max_iterations},
          {"pcg_tol", spec.pcg.tol},
          {"threads", spec.threads}};
}

}  // namespace

std::unique_ptr<Problem> build_from_spec(const RunSpec& spec) {
  if (spec.nlambda < 5.0) throw std::invalid_argument("nlambda must be >= 5");
  Mesh mesh;
  if (spec.mesh == "disk") {
    double h = 2.0 * M_PI / (spec.kappa * spec.nlambda);
    mesh = make_disk_mesh(spec.radius, h);
  } else {
    mesh = load_mesh(spec.mesh);
  }
  Partition partition = parse_partition(spec, mesh);
  Medium medium = parse_medium(spec, mesh);
  SourceSpec source = SourceSpec::incoming_plane_wave();
  SolverConfig solver = spec.solver;
  solver.validate();
  return build_problem(std::move(mesh), std::move(partition),
                       SkeletonPolicy::parse(spec.skeleton), std::move(medium), std::move(source),
                       parse_inductance(spec.inductance), spec.interface_decouple, spec.pcg,
                       spec.threads);
}

RunOutcome run_solve(const RunSpec& spec) {
  std::filesystem::create_directories(spec.out_dir);
  auto problem = build_from_spec(spec);

  SolverConfig config = spec.solver;
  config.track_error = true;  // convergence histories are error based, as reported
  auto [p, report] = solve_skeleton(*problem, config);

  write_history_csv(spec.out_dir + "/history.csv", report);

  nlohmann::json j;
  j["schema_version"] = kReportSchemaVersion;
  j["config"] = config_json(spec);
  j["mesh"] = {{"vertices", problem->mesh.num_vertices()},
               {"edges", problem->mesh.num_edges()},
               {"triangles", problem->mesh.num_triangles()},
               {"typical_h", problem->mesh.typical_edge_length()}};
  j["subdomains"] = problem->partition.count;
  j["n_sys"] = problem->skeleton.n_sys;
  j["iterations"] = report.iterations;
  j["converged"] = report.converged;
  j["final_residual"] = report.final_residual;
  j["final_error"] = report.final_error;
  j["pcg_iters_max"] = report.pcg_iters_max;
  j["wall_time_seconds"] = report.wall_time_seconds;
  if (spec.medium.rfind("flower", 0) == 0)
    j["flower_kappa0"] = flower_kappa0(problem->mesh);
  if (spec.compute_alpha && problem->skeleton.n_sys <= 2000)
    j["alpha_estimate"] = alpha_estimate(*problem);
  {
    std::ofstream out(spec.out_dir + "/report.json");
    out << j.dump(2) << "\n";
  }
  validate_report_file(spec.out_dir + "/report.json");

  if (spec.write_solution) {
    VolumeSolution vol = recover_volume(*problem, p);
    nlohmann::json s;
    s["edges"] = problem->mesh.num_edges();
    auto& values = s["values"] = nlohmann::json::array();
    for (const auto& v : vol.merged) values.push_back({v.real(), v.imag()});
    std::ofstream out(spec.out_dir + "/solution.json");
    out << s.dump() << "\n";
  }

  RunOutcome outcome;
  outcome.report = std::move(report);
  outcome.exit_code = outcome.report.converged ? 0 : 2;
  return outcome;
}

std::vector<SweepRow> run_sweep(const RunSpec& spec, const std::string& axis,
                                const std::vector<double>& values) {
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] <= values[i - 1])
      throw std::invalid_argument("sweep: values must be strictly increasing");

  const double base_h = 2.0 * M_PI / (spec.kappa * spec.nlambda);
  double base_count = 1.0;
  if (axis == "subdomains") {
    if (spec.partition.rfind("pie:", 0) != 0)
      throw std::invalid_argument("sweep over subdomains requires a pie partition");
    base_count = std::stod(spec.partition.substr(4));
  }

  std::vector<SweepRow> rows;
  for (double value : values) {
    RunSpec point = spec;
    if (axis == "nlambda") {
      point.nlambda = value;
    } else if (axis == "kappa") {
      // Keep kappa^3 h^2 fixed along the sweep.
      point.kappa = value;
      double h = base_h * std::pow(spec.kappa / value, 1.5);
      point.nlambda = 2.0 * M_PI / (value * h);
    } else if (axis == "subdomains") {
      point.partition = "pie:" + std::to_string(static_cast<int>(value));
      point.radius = spec.radius * std::sqrt(value / base_count);
    } else {
      throw std::invalid_argument("sweep: axis must be nlambda, kappa or subdomains");
    }

    SweepRow row;
    row.value = value;
    for (const char* kind : {"despres", "schur"}) {
      RunSpec one = point;
      one.inductance = kind;
      try {
        auto problem = build_from_spec(one);
        SolverConfig config = one.solver;
        config.track_error = false;
        auto [p, report] = solve_skeleton(*problem, config);
        if (!report.converged) continue;  // leave the row entry as failed
        if (std::string(kind) == "despres")
          row.iters_despres = report.iterations;
        else {
          row.iters_schur = report.iterations;
          row.pcg_max = report.pcg_iters_max;
        }
      } catch (const std::exception&) {
        // recorded as nan in the table, the sweep continues
      }
    }
    rows.push_back(row);
  }

  std::filesystem::create_directories(spec.out_dir);
  std::FILE* f = std::fopen((spec.out_dir + "/sweep.csv").c_str(), "w");
  if (!f) throw std::runtime_error("cannot write sweep.csv");
  std::fprintf(f, "value,iters_despres,iters_schur,pcg_max\n");
  for (const auto& row : rows) {
    auto cell = [&](int v) {
      if (v < 0) return std::string("nan");
      return std::to_string(v);
    };
    std::fprintf(f, "%.17g,%s,%s,%s\n", row.value, cell(row.iters_despres).c_str(),
                 cell(row.iters_schur).c_str(), cell(row.pcg_max).c_str());
  }
  std::fclose(f);
  return rows;
}

SpectrumSummary run_spectrum(const RunSpec& spec) {
  std::filesystem::create_directories(spec.out_dir);
  auto problem = build_from_spec(spec);
  auto eigenvalues = spectrum(*problem, SpectrumOf::skeleton_operator);

  SpectrumSummary summary;
  summary.n_sys = problem->skeleton.n_sys;
  summary.min_abs = std::numeric_limits<double>::infinity();
  for (const auto& ev : eigenvalues) {
    summary.min_abs = std::min(summary.min_abs, std::abs(ev));
    summary.max_dist_one = std::max(summary.max_dist_one, std::abs(Cplx(1.0, 0.0) - ev));
  }
  summary.alpha = alpha_estimate(*problem);

  std::FILE* f = std::fopen((spec.out_dir + "/spectrum.csv").c_str(), "w");
  if (!f) throw std::runtime_error("cannot write spectrum.csv");
  std::fprintf(f, "re,im\n");
  for (const auto& ev : eigenvalues) std::fprintf(f, "%.17g,%.17g\n", ev.real(), ev.imag());
  std::fclose(f);

  nlohmann::json j;
  j["schema_version"] = kReportSchemaVersion;
  j["config"] = config_json(spec);
  j["n_sys"] = summary.n_sys;
  j["min_abs_eigenvalue"] = summary.min_abs;
  j["max_distance_to_one"] = summary.max_dist_one;
  j["alpha_estimate"] = summary.alpha;
  std::ofstream out(spec.out_dir + "/spectrum.json");
  out << j.dump(2) << "\n";
  return summary;
}

void validate_report_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("report: cannot open " + path);
  nlohmann::json j;
  in >> j;
  if (!j.contains("schema_version") || j["schema_version"].get<int>() != kReportSchemaVersion)
    throw std::runtime_error("report: unsupported schema version in " + path);
  for (const char* key : {"config", "mesh", "subdomains", "n_sys", "iterations", "converged",
                          "final_residual", "pcg_iters_max"})
    if (!j.contains(key)) throw std::runtime_error(std::string("report: missing key ") + key);
}

}  // namespace skeldd
