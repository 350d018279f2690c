#include "doctest.h"

#include "sdg/cases.hpp"
#include "sdg/forms.hpp"
#include "sdg/geometry.hpp"
#include "sdg/mesh.hpp"
#include "sdg/quadrature.hpp"
#include "sdg/spaces.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

using namespace sdg;

namespace {

constexpr double PI = 3.14159265358979323846;

// Fourth-order central finite differences: an oracle for the closed-form
// case data that shares nothing with the library's derivatives.
constexpr double FD_H = 1e-3;

double fd_d1(const ScalarFn& f, Vec2 x, int d) {
  const double h = FD_H;
  auto at = [&](double s) {
    Vec2 y = x;
    y[d] += s;
    return f(y);
  };
  return (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
}

double fd_d2(const ScalarFn& f, Vec2 x, int d) {
  const double h = FD_H;
  auto at = [&](double s) {
    Vec2 y = x;
    y[d] += s;
    return f(y);
  };
  return (-at(2 * h) + 16 * at(h) - 30 * at(0) + 16 * at(-h) - at(-2 * h)) /
         (12 * h * h);
}

ScalarFn comp(const VectorFn& u, int c) {
  return [u, c](const Vec2& x) { return u(x)[c]; };
}

Vec2 fd_grad(const ScalarFn& f, const Vec2& x) {
  return Vec2(fd_d1(f, x, 0), fd_d1(f, x, 1));
}

double fd_div(const VectorFn& u, const Vec2& x) {
  return fd_d1(comp(u, 0), x, 0) + fd_d1(comp(u, 1), x, 1);
}

Mat2 fd_jacobian(const VectorFn& u, const Vec2& x) {
  Mat2 J;
  for (int c = 0; c < 2; ++c)
    for (int d = 0; d < 2; ++d) J(c, d) = fd_d1(comp(u, c), x, d);
  return J;
}

Vec2 fd_laplacian(const VectorFn& u, const Vec2& x) {
  Vec2 L;
  for (int c = 0; c < 2; ++c)
    L[c] = fd_d2(comp(u, c), x, 0) + fd_d2(comp(u, c), x, 1);
  return L;
}

std::vector<Vec2> random_points(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.05, 0.95);
  std::vector<Vec2> pts;
  pts.reserve(n);
  for (int i = 0; i < n; ++i) pts.emplace_back(unif(rng), unif(rng));
  return pts;
}

// Momentum residual -nu Lap(u) + [convective] (u.grad)u + grad p - f.
double momentum_residual(const Case& c, const Vec2& x) {
  Vec2 r = -c.data.nu * fd_laplacian(c.exact.u, x) +
           fd_grad(c.exact.p, x) - c.data.f(x);
  if (c.convective) r += fd_jacobian(c.exact.u, x) * c.exact.u(x);
  return r.lpNorm<Eigen::Infinity>();
}

std::string write_temp(const std::string& name, const std::string& content) {
  const std::string path = "/tmp/sdg_test_" + name;
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_SUITE("cases") {
  TEST_CASE("taylor fields satisfy the Navier-Stokes equations") {
    for (const double nu : {0.37, 1e-3}) {
      CAPTURE(nu);
      const Case c = taylor_case(nu);
      CHECK(c.name == "taylor");
      CHECK(c.convective);
      CHECK(c.exact.attached());
      CHECK(c.data.nu == nu);
      for (const Vec2& x : random_points(20, 7)) {
        const double fmag = c.data.f(x).lpNorm<Eigen::Infinity>();
        CHECK(momentum_residual(c, x) <= 1e-8 * (1.0 + fmag));
        CHECK(std::abs(fd_div(c.exact.u, x)) <= 1e-8);
        // G = nu grad u, and the Dirichlet datum is the velocity itself.
        const Mat2 dG = c.exact.G(x) - nu * fd_jacobian(c.exact.u, x);
        CHECK(dG.lpNorm<Eigen::Infinity>() <= 1e-7 * nu);
        CHECK((c.data.g(x) - c.exact.u(x)).lpNorm<Eigen::Infinity>() <=
              1e-15);
      }
      // The vortex is stagnant at the center, so the load vanishes there.
      CHECK(c.data.f(Vec2(0.5, 0.5)).lpNorm<Eigen::Infinity>() <= 1e-14);
    }
    // Zero-mean pressure (the interpolant preserves cellwise means).
    const Case c = taylor_case(1.0);
    const StaggeredMesh mesh = triangulate(build_rectangular_mesh(8, 8));
    const DofMaps maps(mesh, 2);
    CHECK(std::abs(mean_value(maps, interpolate_Q(maps, c.exact.p))) <= 1e-10);
  }

  TEST_CASE("taylor-stokes load absorbs the convective pressure gradient") {
    const double nu = 0.05;
    const Case c = taylor_stokes_case(nu);
    CHECK(c.name == "taylor-stokes");
    CHECK(!c.convective);
    const Case full = taylor_case(nu);
    for (const Vec2& x : random_points(20, 8)) {
      const double fmag = c.data.f(x).lpNorm<Eigen::Infinity>();
      CHECK(momentum_residual(c, x) <= 1e-8 * (1.0 + fmag));
      // Same manufactured fields as the convective vortex.
      CHECK((c.exact.u(x) - full.exact.u(x)).lpNorm<Eigen::Infinity>() <=
            1e-15);
      CHECK(std::abs(c.exact.p(x) - full.exact.p(x)) <= 1e-15);
      CHECK((c.exact.G(x) - full.exact.G(x)).lpNorm<Eigen::Infinity>() <=
            1e-15);
    }
  }

  TEST_CASE("noflow is a pure gradient load with zero velocity") {
    const double lambda = 1e7;
    const Case c = noflow_case(lambda);
    CHECK(c.name == "noflow");
    CHECK(c.data.nu == 1.0);
    CHECK(c.exact.attached());
    for (const Vec2& x : random_points(20, 9)) {
      CHECK(c.exact.u(x).lpNorm<Eigen::Infinity>() == 0.0);
      CHECK(c.exact.G(x).lpNorm<Eigen::Infinity>() == 0.0);
      // f = grad p exactly, hence curl f = 0.
      CHECK((c.data.f(x) - fd_grad(c.exact.p, x)).lpNorm<Eigen::Infinity>() <=
            1e-10 * lambda);
      CHECK(std::abs(fd_d1(comp(c.data.f, 1), x, 0) -
                     fd_d1(comp(c.data.f, 0), x, 1)) <= 1e-10 * lambda);
      // The load scales linearly in lambda.
      CHECK((c.data.f(x) - lambda * noflow_case(1.0).data.f(x))
                .lpNorm<Eigen::Infinity>() <= 1e-12 * lambda);
      if (c.data.g) CHECK(c.data.g(x).lpNorm<Eigen::Infinity>() == 0.0);
    }
    // Zero-mean pressure: 1/4 - 1/6 + 1/2 - 7/12 = 0.
    const StaggeredMesh mesh = triangulate(build_rectangular_mesh(4, 4));
    const DofMaps maps(mesh, 2);
    CHECK(std::abs(mean_value(maps, interpolate_Q(maps, c.exact.p))) <=
          1e-10 * lambda);
  }

  TEST_CASE("cavity boundary data slides along the lid") {
    const Case c = cavity_case(0.1);
    CHECK(c.name == "cavity");
    CHECK(c.convective);
    CHECK(!c.exact.attached());
    if (c.data.f)
      CHECK(c.data.f(Vec2(0.3, 0.4)).lpNorm<Eigen::Infinity>() == 0.0);

    const StaggeredMesh mesh = triangulate(build_rectangular_mesh(4, 4));
    const int k = 2;
    const DofMaps maps(mesh, k);

    // g.n vanishes at every boundary quadrature point: the lid datum is
    // tangential and the walls carry zero data.
    const QuadRule& seg = segment_rule(2 * k + 2);
    for (int e = 0; e < mesh.n_primal_edges; ++e) {
      const Edge& ed = mesh.edges[e];
      if (!ed.is_boundary()) continue;
      const PhysQuad pq = map_to_segment(seg, mesh.points[ed.va],
                                         mesh.points[ed.vb]);
      for (int p = 0; p < pq.size(); ++p) {
        const Vec2 g = c.data.g(pq.points[p]);
        CHECK(std::abs(g[0] * ed.normal[0] + g[1] * ed.normal[1]) <= 1e-15);
      }
    }

    // Consequently the normal-trace boundary functionals vanish identically,
    // while <g, Hn> picks up exactly the lid edges.
    CHECK(assemble_bdry_V(maps, c.data.g).lpNorm<Eigen::Infinity>() <= 1e-15);
    CHECK(assemble_bdry_Q(maps, c.data.g).lpNorm<Eigen::Infinity>() <= 1e-15);

    Eigen::VectorXd rH = assemble_bdry_H(maps, c.data.g);
    const int block = 2 * (k + 1);
    for (int e = 0; e < mesh.n_primal_edges; ++e) {
      const Edge& ed = mesh.edges[e];
      if (!ed.is_boundary()) continue;
      const bool lid = mesh.points[ed.va][1] >= 1.0 - 1e-12 &&
                       mesh.points[ed.vb][1] >= 1.0 - 1e-12;
      const double norm = rH.segment(maps.h_primal_offset(e), block).norm();
      CAPTURE(e);
      if (lid)
        CHECK(norm > 1e-12);
      else
        CHECK(norm <= 1e-15);
      rH.segment(maps.h_primal_offset(e), block).setZero();
    }
    CHECK(rH.lpNorm<Eigen::Infinity>() <= 1e-15);  // nothing else is loaded
  }

  TEST_CASE("make_case dispatches ids, parameters, and the stokes flag") {
    CaseConfig cfg;
    cfg.case_id = "taylor";
    cfg.nu = 0.25;
    Case c = make_case(cfg);
    CHECK(c.name == "taylor");
    CHECK(c.convective);
    CHECK(c.data.nu == 0.25);

    cfg.stokes = true;
    c = make_case(cfg);
    CHECK(c.name == "taylor-stokes");
    CHECK(!c.convective);
    const Case direct = taylor_stokes_case(0.25);
    for (const Vec2& x : random_points(5, 11))
      CHECK((c.data.f(x) - direct.data.f(x)).lpNorm<Eigen::Infinity>() <=
            1e-15);

    cfg.stokes = false;
    cfg.case_id = "taylor-stokes";
    c = make_case(cfg);
    CHECK(c.name == "taylor-stokes");
    CHECK(!c.convective);

    cfg.case_id = "noflow";
    cfg.lambda = 42.0;
    c = make_case(cfg);
    const Vec2 x(0.3, 0.6);
    CHECK(c.data.f(x)[0] == 0.0);
    CHECK(c.data.f(x)[1] ==
          doctest::Approx(42.0 * (3 * 0.36 - 0.6 + 1.0)).epsilon(1e-14));
    cfg.stokes = true;  // forces Stokes mode for any case
    CHECK(!make_case(cfg).convective);

    cfg.stokes = false;
    cfg.case_id = "cavity";
    cfg.nu = 0.004;
    c = make_case(cfg);
    CHECK(c.name == "cavity");
    CHECK(c.data.nu == 0.004);

    cfg.case_id = "stokes2";
    CHECK_THROWS_WITH_AS((void)make_case(cfg),
                         doctest::Contains("unknown case id"),
                         std::invalid_argument);
  }

  TEST_CASE("build_case_mesh parses and validates mesh specs") {
    CHECK(build_case_mesh("rect:4x4").polygons.size() == 16);
    CHECK(build_case_mesh("rect:2x3").polygons.size() == 6);
    CHECK(build_case_mesh("voronoi:12:9").polygons.size() == 12);

    const std::string path = write_temp("case_square.txt",
                                        "4 1\n"
                                        "0 0\n1 0\n1 1\n0 1\n"
                                        "4 0 1 2 3\n");
    CHECK(build_case_mesh("file:" + path).polygons.size() == 1);
    std::remove(path.c_str());

    for (const char* bad :
         {"", "grid:4x4", "rect:4", "rect:x4", "rect:4x", "rect:axb",
          "rect:0x4", "rect:-1x4", "rect:4x4junk", "voronoi:8", "voronoi::7",
          "voronoi:8:abc"}) {
      CAPTURE(bad);
      CHECK_THROWS_WITH_AS((void)build_case_mesh(bad),
                           doctest::Contains("invalid mesh spec"),
                           std::invalid_argument);
    }

    CHECK_THROWS_WITH_AS((void)build_case_mesh("file:/no/such/mesh-file.txt"),
                         doctest::Contains("/no/such/mesh-file.txt"),
                         MeshError);
  }

  TEST_CASE("run_case attaches errors exactly for manufactured cases") {
    const StaggeredMesh mesh = triangulate(build_rectangular_mesh(4, 4));
    const DofMaps maps(mesh, 1);
    SolverConfig scfg;

    SUBCASE("manufactured case reports errors and divergence") {
      CaseConfig cfg;
      cfg.case_id = "taylor";
      cfg.nu = 0.5;
      const CaseResult res = run_case(maps, make_case(cfg), scfg);
      CHECK(res.solve.converged);
      REQUIRE(res.errors.has_value());
      const ErrorReport& er = *res.errors;
      CHECK(er.h == doctest::Approx(mesh.h));
      CHECK(er.k == 1);
      CHECK(er.nu == 0.5);
      CHECK(er.dofs_H == maps.dim(Space::H));
      CHECK(er.dofs_V == maps.dim(Space::V));
      CHECK(er.dofs_Q == maps.dim(Space::Q));
      for (const double e : {er.err_G, er.err_u, er.err_p, er.err_Jhu_uh,
                             er.err_u_Jhu_04}) {
        CHECK(e > 0.0);
        CHECK(std::isfinite(e));
        CHECK(e < 10.0);  // coarse sanity bound at h = 1/4
      }
      const double scale = norm_h(maps, res.solve.u);
      CHECK(er.div.div_max_scaled <= 1e-9 * scale);
      CHECK(er.div.normal_jump_max <= 1e-9 * scale);
    }

    SUBCASE("cavity reports diagnostics but no errors") {
      CaseConfig cfg;
      cfg.case_id = "cavity";
      cfg.nu = 0.25;
      const CaseResult res = run_case(maps, make_case(cfg), scfg);
      CHECK(res.solve.converged);
      CHECK(!res.errors.has_value());
      const double scale = norm_h(maps, res.solve.u);
      CHECK(scale > 0.0);
      CHECK(res.div.div_max_scaled <= 1e-9 * scale);
      CHECK(res.div.normal_jump_max <= 1e-9 * scale);
    }
  }
}  // TEST_SUITE
