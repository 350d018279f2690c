#include "sdg/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace sdg {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write output file: " + path);
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw std::runtime_error("error while writing output file: " + path);
}

std::string fmt(double v, const char* spec) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

/// NaN-aware cell: undefined quantities become empty CSV cells.
std::string cell(double v) { return std::isfinite(v) ? format_double(v) : std::string(); }

}  // namespace

std::string format_double(double v) { return fmt(v, "%.17g"); }

std::string artifact_version() {
#ifdef SDG_GIT_REV
  return "sdg 0.1.0-g" SDG_GIT_REV;
#else
  return "sdg 0.1.0";
#endif
}

void write_errors_csv(const std::string& path, const ErrorReport& r,
                      bool has_exact, bool converged, int iterations) {
  auto out = open_out(path);
  out << "h,k,nu,dofs_H,dofs_V,dofs_Q,"
      << "G_L2,u_L2,p_L2,Jhu_uh_h,u_Jhu_04h,"
      << "div_max,div_max_scaled,normal_jump_max,converged,iterations\n";
  out << format_double(r.h) << ',' << r.k << ',' << format_double(r.nu) << ','
      << r.dofs_H << ',' << r.dofs_V << ',' << r.dofs_Q << ',';
  if (has_exact) {
    out << format_double(r.err_G) << ',' << format_double(r.err_u) << ','
        << format_double(r.err_p) << ',' << format_double(r.err_Jhu_uh) << ','
        << format_double(r.err_u_Jhu_04) << ',';
  } else {
    out << ",,,,,";
  }
  out << format_double(r.div.div_max) << ',' << format_double(r.div.div_max_scaled)
      << ',' << format_double(r.div.normal_jump_max) << ','
      << (converged ? "true" : "false") << ',' << iterations << '\n';
  finish(out, path);
}

void write_rates_csv(const std::string& path, const RateTable& table) {
  auto out = open_out(path);
  out << "kind,h,dofs";
  for (const char* name : RateTable::quantity_names) out << ',' << name;
  out << '\n';
  for (const auto& row : table.rows) {
    out << "mesh," << format_double(row.h) << ','
        << (row.dofs_H + row.dofs_V + row.dofs_Q);
    for (int q = 0; q < RateTable::n_quantities; ++q)
      out << ',' << format_double(quantity_value(row, q));
    out << '\n';
  }
  out << "slope,,";
  for (int q = 0; q < RateTable::n_quantities; ++q)
    out << ',' << (table.has_slopes ? cell(table.ls_slopes[q]) : std::string());
  out << '\n';
  finish(out, path);
}

void write_streamfunction_csv(const std::string& path, const StaggeredMesh& mesh,
                              const Streamfunction& sf) {
  auto out = open_out(path);
  out << "x,y,psi\n";
  for (std::size_t i = 0; i < mesh.points.size(); ++i) {
    out << format_double(mesh.points[i].x()) << ','
        << format_double(mesh.points[i].y()) << ','
        << format_double(sf.psi[i]) << '\n';
  }
  finish(out, path);
}

void write_vtk(const std::string& path, const DofMaps& maps, const FEField& G,
               const FEField& u, const FEField& p) {
  const StaggeredMesh& mesh = maps.mesh();
  const int nt = mesh.n_tris();
  auto out = open_out(path);
  out << "# vtk DataFile Version 3.0\n"
      << "staggered DG solution (" << artifact_version() << ")\n"
      << "ASCII\nDATASET UNSTRUCTURED_GRID\n";

  // Three points per triangle; corners are duplicated on purpose so that the
  // piecewise-polynomial fields keep their inter-element discontinuities.
  out << "POINTS " << 3 * nt << " double\n";
  for (int t = 0; t < nt; ++t) {
    for (const Vec2& x : mesh.tri_points(t))
      out << fmt(x.x(), "%.12g") << ' ' << fmt(x.y(), "%.12g") << " 0\n";
  }
  out << "CELLS " << nt << ' ' << 4 * nt << '\n';
  for (int t = 0; t < nt; ++t)
    out << "3 " << 3 * t << ' ' << 3 * t + 1 << ' ' << 3 * t + 2 << '\n';
  out << "CELL_TYPES " << nt << '\n';
  for (int t = 0; t < nt; ++t) out << "5\n";

  out << "POINT_DATA " << 3 * nt << '\n';

  const auto corner_values = [&](const FEField& f, int t) {
    const auto corners = mesh.tri_points(t);
    return eval_values(maps, f, t, std::vector<Vec2>(corners.begin(), corners.end()));
  };

  out << "VECTORS velocity double\n";
  for (int t = 0; t < nt; ++t) {
    const Eigen::MatrixXd vals = corner_values(u, t);
    for (int c = 0; c < 3; ++c)
      out << fmt(vals(c, 0), "%.12g") << ' ' << fmt(vals(c, 1), "%.12g") << " 0\n";
  }

  out << "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
  for (int t = 0; t < nt; ++t) {
    const Eigen::MatrixXd vals = corner_values(p, t);
    for (int c = 0; c < 3; ++c) out << fmt(vals(c, 0), "%.12g") << '\n';
  }

  out << "FIELD gradient_data 1\nvelocity_gradient 4 " << 3 * nt << " double\n";
  for (int t = 0; t < nt; ++t) {
    const Eigen::MatrixXd vals = corner_values(G, t);
    for (int c = 0; c < 3; ++c) {
      out << fmt(vals(c, 0), "%.12g") << ' ' << fmt(vals(c, 1), "%.12g") << ' '
          << fmt(vals(c, 2), "%.12g") << ' ' << fmt(vals(c, 3), "%.12g") << '\n';
    }
  }
  finish(out, path);
}

void write_manifest(const std::string& path, const RunManifest& m) {
  auto out = open_out(path);
  out << "version = " << m.version << '\n';
  for (const auto& [key, value] : m.config) out << key << " = " << value << '\n';
  out << "converged = " << (m.converged ? "true" : "false") << '\n';
  out << "iterations = " << m.iterations << '\n';
  if (!m.history.empty()) {
    out << "history =";
    for (double d : m.history) out << ' ' << fmt(d, "%.6g");
    out << '\n';
  }
  out << "time_mesh_s = " << fmt(m.timings.mesh_s, "%.3f") << '\n'
      << "time_assembly_s = " << fmt(m.timings.assembly_s, "%.3f") << '\n'
      << "time_solve_s = " << fmt(m.timings.solve_s, "%.3f") << '\n'
      << "time_analysis_s = " << fmt(m.timings.analysis_s, "%.3f") << '\n';
  out << "files =";
  for (const auto& f : m.files) out << ' ' << f;
  out << '\n';
  finish(out, path);
}

}  // namespace sdg
