#pragma once

#include "sdg/analysis.hpp"
#include "sdg/mesh.hpp"
#include "sdg/solver.hpp"

#include <optional>
#include <string>

namespace sdg {

/// Exact fields of a manufactured solution.  Null components mean no exact
/// solution is attached (cavity).
struct ExactSolution {
  VectorFn u;
  TensorFn G;  // G = nu * grad u
  ScalarFn p;
  bool attached() const { return static_cast<bool>(u); }
};

struct Case {
  std::string name;
  ProblemData data;  // nu, f, g
  ExactSolution exact;
  bool convective = true;  // false: Stokes mode, N_h omitted
};

/// Taylor vortex on (0,1)^2:
///   u = (-cos(pi x) sin(pi y), sin(pi x) cos(pi y)),
///   p = -(cos(2 pi x) + cos(2 pi y))/4,  G = nu grad u,  g = u|_boundary.
/// The momentum load simplifies: div(u (x) u) + grad p = 0, so
/// f = -nu Laplace(u) = 2 pi^2 nu u.
Case taylor_case(double nu);

/// Stokes variant of the Taylor vortex: same exact fields, convection
/// dropped, so f = 2 pi^2 nu u + grad p with
/// grad p = (pi/2) (sin(2 pi x), sin(2 pi y)).
Case taylor_stokes_case(double nu);

/// No-flow benchmark on (0,1)^2 with nu = 1:
///   u = 0,  p = lambda (y^3 - y^2/2 + y - 7/12),  g = 0,
///   f = grad p = (0, lambda (3 y^2 - y + 1)).
Case noflow_case(double lambda);

/// Lid-driven cavity on (0,1)^2: f = 0, g = (1,0) on the lid y = 1 and zero
/// elsewhere (discontinuity at the corners left as printed; on rectangular
/// meshes lid edges lie entirely on y = 1, so no quadrature point straddles
/// the jump).  No exact solution.
Case cavity_case(double nu);

/// Configuration of one run: union of config-file keys and CLI flags.
struct CaseConfig {
  std::string case_id = "taylor";  // taylor | taylor-stokes | noflow | cavity
  double nu = 0.1;
  double lambda = 1e7;           // noflow only
  std::string mesh = "rect:8x8";  // rect:NxM | voronoi:N:SEED | file:PATH
  int k = 1;
  SolverConfig solver;
  bool stokes = false;  // drop N_h (taylor switches to its Stokes load)
  std::string out_dir = ".";
};

/// Maps a config to case data; throws std::invalid_argument for unknown ids.
Case make_case(const CaseConfig& cfg);

/// Parses "rect:NxM", "voronoi:N:SEED", or "file:PATH" and builds the mesh;
/// throws std::invalid_argument on malformed specs (file errors mention the
/// path).
PrimalMesh build_case_mesh(const std::string& mesh_spec);

/// Error table entry for one solve of a case; requires c.exact.attached().
ErrorReport error_report(const DofMaps& maps, const Case& c,
                         const SolveResult& sol, const DivergenceReport& div);

struct CaseResult {
  SolveResult solve;
  std::optional<ErrorReport> errors;  // present iff the case has exact data
  DivergenceReport div;
};

/// Solve the case on prepared DOF maps and attach diagnostics.
CaseResult run_case(const DofMaps& maps, const Case& c,
                    const SolverConfig& scfg);

}  // namespace sdg
