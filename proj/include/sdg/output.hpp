#pragma once

#include "sdg/analysis.hpp"
#include "sdg/spaces.hpp"

#include <string>
#include <utility>
#include <vector>

namespace sdg {

/// Shortest round-trip-exact decimal form (17 significant digits), used for
/// every floating-point cell so identical runs produce byte-identical CSVs.
std::string format_double(double v);

/// Git-style artifact version string embedded at configure time.
std::string artifact_version();

/// errors.csv: header plus a single row for one solve.  The five error
/// columns are left empty when the case has no exact solution attached.
void write_errors_csv(const std::string& path, const ErrorReport& r,
                      bool has_exact, bool converged, int iterations);

/// rates.csv: one "mesh" row per study mesh (h, total DOFs, five error
/// quantities) and a final "slope" row with the least-squares slopes; slope
/// cells are empty when undefined (fewer than two meshes, or a degenerate
/// error column).
void write_rates_csv(const std::string& path, const RateTable& table);

/// streamfunction.csv: x, y, psi at every triangulation point.
void write_streamfunction_csv(const std::string& path,
                              const StaggeredMesh& mesh,
                              const Streamfunction& sf);

/// Legacy ASCII VTK unstructured grid: every triangle contributes three
/// duplicated points (corner-sampled fields stay discontinuous across
/// elements), with velocity vectors, pressure scalars, and the 2x2 velocity
/// gradient as a four-component field array.
void write_vtk(const std::string& path, const DofMaps& maps, const FEField& G,
               const FEField& u, const FEField& p);

/// Wall-clock seconds per phase of one CLI command.
struct PhaseTimings {
  double mesh_s = 0.0;      // primal mesh construction + triangulation
  double assembly_s = 0.0;  // DOF maps, bases, change-of-basis factors
  double solve_s = 0.0;     // Picard / Stokes solve(s)
  double analysis_s = 0.0;  // error norms, divergence, streamfunction
};

/// Everything manifest.txt records about a run.  `files` lists every emitted
/// artifact (manifest.txt included) exactly once.
struct RunManifest {
  std::string version;
  std::vector<std::pair<std::string, std::string>> config;  // resolved keys
  PhaseTimings timings;
  bool converged = false;
  int iterations = 0;
  std::vector<double> history;  // Picard update norms, one per iteration
  std::vector<std::string> files;
};

void write_manifest(const std::string& path, const RunManifest& m);

}  // namespace sdg
