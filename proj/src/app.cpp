#include "sdg/app.hpp"

#include "sdg/cases.hpp"
#include "sdg/geometry.hpp"
#include "sdg/output.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sdg {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string trimmed(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trimmed(s.substr(start, pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return parts;
}

[[noreturn]] void bad_value(const std::string& where, const std::string& key,
                            const std::string& value) {
  throw std::invalid_argument(where + ": invalid value '" + value +
                              "' for key '" + key + "'");
}

double parse_double(const std::string& where, const std::string& key,
                    const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) bad_value(where, key, value);
    return v;
  } catch (const std::logic_error&) {
    bad_value(where, key, value);
  }
}

int parse_int(const std::string& where, const std::string& key,
              const std::string& value) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(value, &pos);
    if (pos != value.size()) bad_value(where, key, value);
    return v;
  } catch (const std::logic_error&) {
    bad_value(where, key, value);
  }
}

bool parse_bool(const std::string& where, const std::string& key,
                const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  bad_value(where, key, value);
}

void apply_config_key(CaseConfig& cfg, const std::string& where,
                      const std::string& key, const std::string& value) {
  if (key == "case") {
    cfg.case_id = value;
  } else if (key == "nu") {
    cfg.nu = parse_double(where, key, value);
  } else if (key == "lambda") {
    cfg.lambda = parse_double(where, key, value);
  } else if (key == "mesh") {
    cfg.mesh = value;
  } else if (key == "k") {
    cfg.k = parse_int(where, key, value);
  } else if (key == "tol") {
    cfg.solver.tolerance = parse_double(where, key, value);
  } else if (key == "max-iters") {
    cfg.solver.max_iterations = parse_int(where, key, value);
  } else if (key == "theta") {
    cfg.solver.theta = parse_double(where, key, value);
  } else if (key == "stokes") {
    cfg.stokes = parse_bool(where, key, value);
  } else if (key == "out") {
    cfg.out_dir = value;
  } else {
    throw std::invalid_argument(where + ": unknown config key '" + key + "'");
  }
}

/// Plain `key = value` config file; '#' starts a comment, blank lines are
/// skipped.  Flags given on the command line take precedence afterwards.
void apply_config_file(const std::string& path, CaseConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    line = trimmed(line);
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(lineno);
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(where + ": expected 'key = value', got '" +
                                  line + "'");
    apply_config_key(cfg, where, trimmed(line.substr(0, eq)),
                     trimmed(line.substr(eq + 1)));
  }
}

bool flag_given(const CLI::App* sub, const std::string& name) {
  const CLI::Option* opt = sub->get_option_no_throw(name);
  return opt != nullptr && opt->count() > 0;
}

/// Final configuration: library defaults, then the config file (if any),
/// then explicitly given command-line flags.
CaseConfig resolve_config(const CLI::App* sub, const CaseConfig& flags,
                          const std::string& config_path,
                          const std::string& default_mesh) {
  CaseConfig cfg;
  cfg.mesh = default_mesh;
  if (!config_path.empty()) apply_config_file(config_path, cfg);
  if (flag_given(sub, "--case")) cfg.case_id = flags.case_id;
  if (flag_given(sub, "--nu")) cfg.nu = flags.nu;
  if (flag_given(sub, "--lambda")) cfg.lambda = flags.lambda;
  if (flag_given(sub, "--mesh")) cfg.mesh = flags.mesh;
  if (flag_given(sub, "--k")) cfg.k = flags.k;
  if (flag_given(sub, "--tol")) cfg.solver.tolerance = flags.solver.tolerance;
  if (flag_given(sub, "--max-iters"))
    cfg.solver.max_iterations = flags.solver.max_iterations;
  if (flag_given(sub, "--theta")) cfg.solver.theta = flags.solver.theta;
  if (flag_given(sub, "--stokes")) cfg.stokes = flags.stokes;
  if (flag_given(sub, "--out")) cfg.out_dir = flags.out_dir;
  return cfg;
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw std::invalid_argument("cannot create output directory '" + dir +
                                "': " + ec.message());
}

std::vector<std::pair<std::string, std::string>> config_lines(
    const std::string& command, const CaseConfig& cfg) {
  return {
      {"command", command},
      {"case", cfg.case_id},
      {"mesh", cfg.mesh},
      {"k", std::to_string(cfg.k)},
      {"nu", format_double(cfg.nu)},
      {"lambda", format_double(cfg.lambda)},
      {"tol", format_double(cfg.solver.tolerance)},
      {"max-iters", std::to_string(cfg.solver.max_iterations)},
      {"theta", format_double(cfg.solver.theta)},
      {"stokes", cfg.stokes ? std::string("true") : std::string("false")},
      {"out", cfg.out_dir},
  };
}

void warn_not_converged(const SolveResult& sol) {
  std::fprintf(stderr,
               "warning: solver did not converge after %d iterations "
               "(last update %.3e); artifacts record converged = false\n",
               sol.iterations, sol.history.empty() ? 0.0 : sol.history.back());
}

int cmd_run(const CaseConfig& cfg) {
  ensure_out_dir(cfg.out_dir);
  PhaseTimings tm;

  auto t0 = Clock::now();
  const StaggeredMesh mesh = triangulate(build_case_mesh(cfg.mesh));
  tm.mesh_s = seconds_since(t0);

  t0 = Clock::now();
  const DofMaps maps(mesh, cfg.k);
  tm.assembly_s = seconds_since(t0);

  const Case c = make_case(cfg);

  t0 = Clock::now();
  const SolveResult sol = c.convective
                              ? picard_solve(maps, c.data, cfg.solver)
                              : stokes_solve(maps, c.data, cfg.solver);
  tm.solve_s = seconds_since(t0);

  t0 = Clock::now();
  const DivergenceReport div = divergence_report(maps, sol.u);
  ErrorReport rep;
  if (c.exact.attached()) {
    rep = error_report(maps, c, sol, div);
  } else {
    rep.h = mesh.h;
    rep.k = cfg.k;
    rep.nu = c.data.nu;
    rep.dofs_H = maps.dim(Space::H);
    rep.dofs_V = maps.dim(Space::V);
    rep.dofs_Q = maps.dim(Space::Q);
    rep.div = div;
  }
  tm.analysis_s = seconds_since(t0);

  const fs::path dir(cfg.out_dir);
  write_errors_csv((dir / "errors.csv").string(), rep, c.exact.attached(),
                   sol.converged, sol.iterations);
  write_vtk((dir / "solution.vtk").string(), maps, sol.G, sol.u, sol.p);

  RunManifest m;
  m.version = artifact_version();
  m.config = config_lines("run", cfg);
  m.timings = tm;
  m.converged = sol.converged;
  m.iterations = sol.iterations;
  m.history = sol.history;
  m.files = {"errors.csv", "solution.vtk", "manifest.txt"};
  write_manifest((dir / "manifest.txt").string(), m);

  if (!sol.converged) {
    warn_not_converged(sol);
    return 3;
  }
  return 0;
}

int cmd_convergence(const CaseConfig& cfg) {
  ensure_out_dir(cfg.out_dir);
  const std::vector<std::string> specs = split_list(cfg.mesh, ',');
  for (const auto& s : specs)
    if (s.empty())
      throw std::invalid_argument("empty mesh spec in list '" + cfg.mesh + "'");

  const Case c = make_case(cfg);
  if (!c.exact.attached())
    throw std::invalid_argument("convergence requires a case with an exact "
                                "solution; '" +
                                cfg.case_id + "' has none");

  PhaseTimings tm;
  std::vector<ErrorReport> reports;
  bool all_converged = true;
  int last_iterations = 0;
  std::vector<double> last_history;
  std::string failed_mesh;

  for (const auto& spec : specs) {
    auto t0 = Clock::now();
    const StaggeredMesh mesh = triangulate(build_case_mesh(spec));
    tm.mesh_s += seconds_since(t0);

    t0 = Clock::now();
    const DofMaps maps(mesh, cfg.k);
    tm.assembly_s += seconds_since(t0);

    t0 = Clock::now();
    const SolveResult sol = c.convective
                                ? picard_solve(maps, c.data, cfg.solver)
                                : stokes_solve(maps, c.data, cfg.solver);
    tm.solve_s += seconds_since(t0);
    last_iterations = sol.iterations;
    last_history = sol.history;

    if (!sol.converged) {
      // Abort the study; the table keeps the converged rows only.
      all_converged = false;
      failed_mesh = spec;
      warn_not_converged(sol);
      break;
    }

    t0 = Clock::now();
    const DivergenceReport div = divergence_report(maps, sol.u);
    reports.push_back(error_report(maps, c, sol, div));
    tm.analysis_s += seconds_since(t0);
  }

  if (all_converged && reports.size() < 2)
    std::fprintf(stderr,
                 "warning: single mesh in convergence study; "
                 "slope row left empty\n");

  const RateTable table = convergence_study(reports);

  const fs::path dir(cfg.out_dir);
  write_rates_csv((dir / "rates.csv").string(), table);

  RunManifest m;
  m.version = artifact_version();
  m.config = config_lines("convergence", cfg);
  if (!failed_mesh.empty()) m.config.emplace_back("failed-mesh", failed_mesh);
  m.timings = tm;
  m.converged = all_converged;
  m.iterations = last_iterations;
  m.history = last_history;
  m.files = {"rates.csv", "manifest.txt"};
  write_manifest((dir / "manifest.txt").string(), m);

  return all_converged ? 0 : 3;
}

int cmd_cavity(const CaseConfig& cfg) {
  ensure_out_dir(cfg.out_dir);
  PhaseTimings tm;

  auto t0 = Clock::now();
  const StaggeredMesh mesh = triangulate(build_case_mesh(cfg.mesh));
  tm.mesh_s = seconds_since(t0);

  t0 = Clock::now();
  const DofMaps maps(mesh, cfg.k);
  tm.assembly_s = seconds_since(t0);

  const Case c = make_case(cfg);

  t0 = Clock::now();
  const SolveResult sol = c.convective
                              ? picard_solve(maps, c.data, cfg.solver)
                              : stokes_solve(maps, c.data, cfg.solver);
  tm.solve_s = seconds_since(t0);

  t0 = Clock::now();
  std::optional<Streamfunction> sf;
  if (sol.converged) sf = streamfunction(maps, sol.u);
  tm.analysis_s = seconds_since(t0);

  const fs::path dir(cfg.out_dir);
  write_vtk((dir / "solution.vtk").string(), maps, sol.G, sol.u, sol.p);
  if (sf) write_streamfunction_csv((dir / "streamfunction.csv").string(), mesh, *sf);

  RunManifest m;
  m.version = artifact_version();
  m.config = config_lines("cavity", cfg);
  if (sf) {
    m.config.emplace_back("psi-max-abs", format_double(sf->max_abs));
    m.config.emplace_back("psi-max-closure", format_double(sf->max_closure));
  }
  m.timings = tm;
  m.converged = sol.converged;
  m.iterations = sol.iterations;
  m.history = sol.history;
  m.files = {"solution.vtk", "manifest.txt"};
  if (sf) m.files.insert(m.files.begin() + 1, "streamfunction.csv");
  write_manifest((dir / "manifest.txt").string(), m);

  if (!sol.converged) {
    warn_not_converged(sol);
    return 3;
  }
  return 0;
}

void add_common_options(CLI::App* sub, CaseConfig& flags,
                        std::string& config_path, bool with_case) {
  sub->add_option("--config", config_path,
                  "Config file with 'key = value' lines; flags override it");
  if (with_case)
    sub->add_option("--case", flags.case_id,
                    "Case id: taylor | taylor-stokes | noflow | cavity");
  sub->add_option("--nu", flags.nu, "Viscosity");
  if (with_case)
    sub->add_option("--lambda", flags.lambda,
                    "Pressure amplitude of the noflow case");
  sub->add_option("--k", flags.k, "Polynomial order (k >= 1)");
  sub->add_option("--mesh", flags.mesh,
                  "Mesh spec rect:NxM | voronoi:N:SEED | file:PATH");
  sub->add_option("--tol", flags.solver.tolerance,
                  "Picard tolerance on velocity DOF updates");
  sub->add_option("--max-iters", flags.solver.max_iterations,
                  "Picard iteration cap");
  sub->add_option("--theta", flags.solver.theta, "Picard damping in (0, 1]");
  sub->add_flag("--stokes", flags.stokes, "Drop the convective term");
  sub->add_option("--out", flags.out_dir, "Output directory");
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Staggered DG solver for stationary incompressible "
               "Navier-Stokes on polygonal meshes"};
  app.set_version_flag("--version", artifact_version());
  app.require_subcommand(1);

  CaseConfig flags;
  std::string config_path;

  CLI::App* run = app.add_subcommand(
      "run", "Solve one case on one mesh; writes errors.csv, solution.vtk, "
             "manifest.txt");
  add_common_options(run, flags, config_path, /*with_case=*/true);

  CLI::App* conv = app.add_subcommand(
      "convergence", "Solve a case on a comma-separated mesh list; writes "
                     "rates.csv, manifest.txt");
  add_common_options(conv, flags, config_path, /*with_case=*/true);

  CLI::App* cav = app.add_subcommand(
      "cavity", "Lid-driven cavity; writes solution.vtk, streamfunction.csv, "
                "manifest.txt");
  add_common_options(cav, flags, config_path, /*with_case=*/false);

  try {
    app.parse(argc, argv);

    if (run->parsed())
      return cmd_run(resolve_config(run, flags, config_path, "rect:8x8"));
    if (conv->parsed())
      return cmd_convergence(resolve_config(
          conv, flags, config_path,
          "rect:4x4,rect:8x8,rect:16x16,rect:32x32"));
    CaseConfig cfg = resolve_config(cav, flags, config_path, "rect:16x16");
    cfg.case_id = "cavity";
    return cmd_cavity(cfg);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const MeshError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 4;
  }
}

}  // namespace sdg
