#include "doctest.h"

#include "sdg/app.hpp"
#include "sdg/output.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

using namespace sdg;
namespace fs = std::filesystem;

namespace {

int run(std::initializer_list<std::string> args) {
  std::vector<std::string> owned{"sdg"};
  owned.insert(owned.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : owned) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("sdg_app_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const fs::path& path) {
  std::vector<std::string> lines;
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::vector<std::string> fields_of(const std::string& csv_line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = csv_line.find(',', start);
    fields.push_back(csv_line.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return fields;
}

constexpr const char* kErrorsHeader =
    "h,k,nu,dofs_H,dofs_V,dofs_Q,G_L2,u_L2,p_L2,Jhu_uh_h,u_Jhu_04h,"
    "div_max,div_max_scaled,normal_jump_max,converged,iterations";

}  // namespace

TEST_SUITE("app") {

TEST_CASE("run emits errors.csv, solution.vtk, and manifest.txt") {
  const fs::path dir = fresh_dir("run_taylor");
  const int code = run({"run", "--case", "taylor", "--nu", "0.5", "--mesh",
                        "rect:8x8", "--k", "1", "--out", dir.string()});
  CHECK(code == 0);
  REQUIRE(fs::exists(dir / "errors.csv"));
  REQUIRE(fs::exists(dir / "solution.vtk"));
  REQUIRE(fs::exists(dir / "manifest.txt"));

  const auto lines = lines_of(dir / "errors.csv");
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == kErrorsHeader);
  const auto f = fields_of(lines[1]);
  REQUIRE(f.size() == 16);
  CHECK(std::stod(f[0]) == doctest::Approx(0.125));  // h
  CHECK(f[1] == "1");                                // k
  CHECK(std::stod(f[2]) == doctest::Approx(0.5));    // nu
  for (int q = 6; q <= 10; ++q) {                    // five error columns
    CAPTURE(q);
    REQUIRE(!f[q].empty());
    const double e = std::stod(f[q]);
    CHECK(std::isfinite(e));
    CHECK(e > 0.0);
    CHECK(e < 1.0);
  }
  CHECK(std::stod(f[13]) < 1e-10);  // normal_jump_max
  CHECK(f[14] == "true");
  CHECK(std::stoi(f[15]) >= 2);  // Picard took at least two iterations

  const auto vtk = lines_of(dir / "solution.vtk");
  REQUIRE(vtk.size() > 10);
  CHECK(vtk[0] == "# vtk DataFile Version 3.0");
  CHECK(vtk[2] == "ASCII");
  CHECK(vtk[3] == "DATASET UNSTRUCTURED_GRID");
  // 8x8 rectangles fan into 4 triangles each: 256 cells, 768 points.
  CHECK(vtk[4] == "POINTS 768 double");

  const std::string manifest = slurp(dir / "manifest.txt");
  CHECK(manifest.find("version = ") != std::string::npos);
  CHECK(manifest.find("command = run") != std::string::npos);
  CHECK(manifest.find("converged = true") != std::string::npos);
  CHECK(manifest.find("time_solve_s = ") != std::string::npos);
  CHECK(manifest.find("files = errors.csv solution.vtk manifest.txt") !=
        std::string::npos);
}

TEST_CASE("identical runs produce byte-identical CSV output") {
  const fs::path a = fresh_dir("repeat_a");
  const fs::path b = fresh_dir("repeat_b");
  for (const auto& dir : {a, b}) {
    const int code = run({"run", "--case", "taylor", "--nu", "0.37", "--mesh",
                          "voronoi:24:3", "--k", "2", "--out", dir.string()});
    REQUIRE(code == 0);
  }
  CHECK(slurp(a / "errors.csv") == slurp(b / "errors.csv"));
  CHECK(slurp(a / "solution.vtk") == slurp(b / "solution.vtk"));
}

TEST_CASE("run without an exact solution leaves the error cells empty") {
  const fs::path dir = fresh_dir("run_cavity");
  const int code = run({"run", "--case", "cavity", "--nu", "0.1", "--mesh",
                        "rect:4x4", "--k", "1", "--out", dir.string()});
  CHECK(code == 0);
  const auto lines = lines_of(dir / "errors.csv");
  REQUIRE(lines.size() == 2);
  const auto f = fields_of(lines[1]);
  REQUIRE(f.size() == 16);
  for (int q = 6; q <= 10; ++q) {
    CAPTURE(q);
    CHECK(f[q].empty());
  }
  CHECK(!f[11].empty());  // divergence diagnostics are still reported
  CHECK(f[14] == "true");
}

TEST_CASE("noflow stays pressure-robust through the CLI") {
  const fs::path dir = fresh_dir("noflow");
  const int code =
      run({"run", "--case", "noflow", "--lambda", "1e7", "--mesh",
           "voronoi:64:7", "--k", "2", "--out", dir.string()});
  CHECK(code == 0);
  const auto lines = lines_of(dir / "errors.csv");
  REQUIRE(lines.size() == 2);
  const auto f = fields_of(lines[1]);
  const double u_l2 = std::stod(f[7]);
  CAPTURE(u_l2);
  CHECK(u_l2 <= 1e-6);  // velocity error independent of the 1e7 pressure
}

TEST_CASE("convergence emits per-mesh rows and a slope row") {
  const fs::path dir = fresh_dir("conv");
  const int code = run({"convergence", "--case", "taylor-stokes", "--mesh",
                        "rect:4x4,rect:8x8,rect:16x16", "--k", "1", "--out",
                        dir.string()});
  CHECK(code == 0);
  const auto lines = lines_of(dir / "rates.csv");
  REQUIRE(lines.size() == 5);  // header + 3 mesh rows + slope row
  CHECK(lines[0] == "kind,h,dofs,G_L2,u_L2,p_L2,Jhu_uh_h,u_Jhu_04h");
  double prev_h = 1.0;
  long prev_dofs = 0;
  for (int i = 1; i <= 3; ++i) {
    const auto f = fields_of(lines[i]);
    REQUIRE(f.size() == 8);
    CHECK(f[0] == "mesh");
    const double h = std::stod(f[1]);
    const long dofs = std::stol(f[2]);
    CHECK(h < prev_h);
    CHECK(dofs > prev_dofs);
    prev_h = h;
    prev_dofs = dofs;
  }
  const auto slope = fields_of(lines[4]);
  REQUIRE(slope.size() == 8);
  CHECK(slope[0] == "slope");
  CHECK(slope[1].empty());
  CHECK(slope[2].empty());
  for (int q = 0; q < 3; ++q) {  // G, u, p all converge at order ~2 for k=1
    CAPTURE(q);
    const double s = std::stod(slope[3 + q]);
    CHECK(s > 1.6);
    CHECK(s < 2.6);
  }
}

TEST_CASE("single-mesh convergence warns and leaves the slope row empty") {
  const fs::path dir = fresh_dir("conv_single");
  const int code = run({"convergence", "--case", "taylor-stokes", "--mesh",
                        "rect:6x6", "--k", "1", "--out", dir.string()});
  CHECK(code == 0);
  const auto lines = lines_of(dir / "rates.csv");
  REQUIRE(lines.size() == 3);
  const auto slope = fields_of(lines[2]);
  REQUIRE(slope.size() == 8);
  CHECK(slope[0] == "slope");
  for (int i = 1; i < 8; ++i) {
    CAPTURE(i);
    CHECK(slope[i].empty());
  }
}

TEST_CASE("convergence refuses cases without exact solutions") {
  const fs::path dir = fresh_dir("conv_cavity");
  const int code = run({"convergence", "--case", "cavity", "--mesh",
                        "rect:4x4,rect:8x8", "--out", dir.string()});
  CHECK(code == 2);
  CHECK(!fs::exists(dir / "rates.csv"));
}

TEST_CASE("cavity emits the streamfunction at every triangulation point") {
  const fs::path dir = fresh_dir("cavity");
  const int code = run({"cavity", "--nu", "0.1", "--mesh", "rect:4x4", "--k",
                        "1", "--out", dir.string()});
  CHECK(code == 0);
  REQUIRE(fs::exists(dir / "streamfunction.csv"));
  REQUIRE(fs::exists(dir / "solution.vtk"));

  const auto lines = lines_of(dir / "streamfunction.csv");
  // 25 primal vertices + 16 polygon centers.
  REQUIRE(lines.size() == 1 + 25 + 16);
  CHECK(lines[0] == "x,y,psi");
  double max_abs = 0.0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = fields_of(lines[i]);
    REQUIRE(f.size() == 3);
    const double psi = std::stod(f[2]);
    REQUIRE(std::isfinite(psi));
    max_abs = std::max(max_abs, std::abs(psi));
  }
  CHECK(max_abs > 1e-3);  // the lid drives a nontrivial vortex

  const std::string manifest = slurp(dir / "manifest.txt");
  CHECK(manifest.find("command = cavity") != std::string::npos);
  CHECK(manifest.find("psi-max-abs = ") != std::string::npos);
  CHECK(manifest.find("files = solution.vtk streamfunction.csv manifest.txt") !=
        std::string::npos);
}

TEST_CASE("configuration errors exit with code 2") {
  SUBCASE("unknown flag") { CHECK(run({"run", "--frobnicate"}) == 2); }
  SUBCASE("missing subcommand") { CHECK(run({}) == 2); }
  SUBCASE("unknown case id") {
    CHECK(run({"run", "--case", "stokes2", "--out",
               fresh_dir("err_case").string()}) == 2);
  }
  SUBCASE("malformed mesh spec") {
    CHECK(run({"run", "--mesh", "grid:4x4", "--out",
               fresh_dir("err_mesh").string()}) == 2);
  }
  SUBCASE("missing mesh file") {
    CHECK(run({"run", "--mesh", "file:/no/such/mesh-file.txt", "--out",
               fresh_dir("err_file").string()}) == 2);
  }
  SUBCASE("missing config file") {
    CHECK(run({"run", "--config", "/no/such/config.cfg", "--out",
               fresh_dir("err_cfg").string()}) == 2);
  }
}

TEST_CASE("non-convergence exits 3 but still writes all artifacts") {
  const fs::path dir = fresh_dir("nonconv");
  const int code =
      run({"run", "--case", "taylor", "--nu", "0.5", "--mesh", "rect:4x4",
           "--max-iters", "2", "--tol", "1e-14", "--out", dir.string()});
  CHECK(code == 3);
  REQUIRE(fs::exists(dir / "errors.csv"));
  REQUIRE(fs::exists(dir / "solution.vtk"));
  const auto f = fields_of(lines_of(dir / "errors.csv")[1]);
  CHECK(f[14] == "false");
  CHECK(f[15] == "2");
  const std::string manifest = slurp(dir / "manifest.txt");
  CHECK(manifest.find("converged = false") != std::string::npos);
  CHECK(manifest.find("history = ") != std::string::npos);
}

TEST_CASE("config file keys apply and command-line flags override them") {
  const fs::path dir = fresh_dir("cfgfile");
  fs::create_directories(dir);
  const fs::path cfg = dir / "run.cfg";
  {
    std::ofstream out(cfg);
    out << "# manufactured Stokes setup\n"
        << "case = taylor-stokes\n"
        << "nu = 0.25\n"
        << "mesh = rect:4x4   # coarse smoke mesh\n"
        << "k = 1\n"
        << "tol = 1e-9\n";
  }

  SUBCASE("file alone") {
    const fs::path out_dir = fresh_dir("cfgfile_plain");
    const int code = run({"run", "--config", cfg.string(), "--out",
                          out_dir.string()});
    CHECK(code == 0);
    const std::string manifest = slurp(out_dir / "manifest.txt");
    CHECK(manifest.find("case = taylor-stokes") != std::string::npos);
    CHECK(manifest.find("nu = 0.25") != std::string::npos);
    CHECK(manifest.find("tol = " + format_double(1e-9)) != std::string::npos);
    CHECK(manifest.find("mesh = rect:4x4") != std::string::npos);
  }

  SUBCASE("flag overrides file") {
    const fs::path out_dir = fresh_dir("cfgfile_override");
    const int code = run({"run", "--config", cfg.string(), "--nu", "0.125",
                          "--out", out_dir.string()});
    CHECK(code == 0);
    const std::string manifest = slurp(out_dir / "manifest.txt");
    CHECK(manifest.find("nu = 0.125") != std::string::npos);
    CHECK(manifest.find("case = taylor-stokes") != std::string::npos);
    const auto f = fields_of(lines_of(out_dir / "errors.csv")[1]);
    CHECK(std::stod(f[2]) == doctest::Approx(0.125));
  }

  SUBCASE("unknown key rejected") {
    const fs::path bad = dir / "bad.cfg";
    {
      std::ofstream out(bad);
      out << "viscosity = 0.1\n";
    }
    CHECK(run({"run", "--config", bad.string(), "--out",
               fresh_dir("cfgfile_badkey").string()}) == 2);
  }

  SUBCASE("bad value rejected") {
    const fs::path bad = dir / "badval.cfg";
    {
      std::ofstream out(bad);
      out << "nu = fast\n";
    }
    CHECK(run({"run", "--config", bad.string(), "--out",
               fresh_dir("cfgfile_badval").string()}) == 2);
  }
}

}  // TEST_SUITE("app")
