#include "sdg/cases.hpp"

#include <cmath>
#include <stdexcept>

namespace sdg {

namespace {

const double PI = std::acos(-1.0);

VectorFn taylor_velocity() {
  return [](const Vec2& x) {
    return Vec2(-std::cos(PI * x[0]) * std::sin(PI * x[1]),
                std::sin(PI * x[0]) * std::cos(PI * x[1]));
  };
}

ExactSolution taylor_exact(double nu) {
  ExactSolution ex;
  ex.u = taylor_velocity();
  ex.G = [nu](const Vec2& x) {
    const double sx = std::sin(PI * x[0]), cx = std::cos(PI * x[0]);
    const double sy = std::sin(PI * x[1]), cy = std::cos(PI * x[1]);
    Mat2 g;
    g(0, 0) = PI * sx * sy;
    g(0, 1) = -PI * cx * cy;
    g(1, 0) = PI * cx * cy;
    g(1, 1) = -PI * sx * sy;
    return Mat2(nu * g);
  };
  ex.p = [](const Vec2& x) {
    return -(std::cos(2 * PI * x[0]) + std::cos(2 * PI * x[1])) / 4.0;
  };
  return ex;
}

}  // namespace

Case taylor_case(double nu) {
  if (!(nu > 0.0)) throw std::invalid_argument("taylor_case: nu must be > 0");
  Case c;
  c.name = "taylor";
  c.data.nu = nu;
  const VectorFn u = taylor_velocity();
  c.data.f = [nu, u](const Vec2& x) { return Vec2(2 * PI * PI * nu * u(x)); };
  c.data.g = u;
  c.exact = taylor_exact(nu);
  c.convective = true;
  return c;
}

Case taylor_stokes_case(double nu) {
  Case c = taylor_case(nu);
  c.name = "taylor-stokes";
  const VectorFn u = taylor_velocity();
  c.data.f = [nu, u](const Vec2& x) {
    const Vec2 grad_p(0.5 * PI * std::sin(2 * PI * x[0]),
                      0.5 * PI * std::sin(2 * PI * x[1]));
    return Vec2(2 * PI * PI * nu * u(x) + grad_p);
  };
  c.convective = false;
  return c;
}

Case noflow_case(double lambda) {
  Case c;
  c.name = "noflow";
  c.data.nu = 1.0;
  c.data.f = [lambda](const Vec2& x) {
    return Vec2(0.0, lambda * (3.0 * x[1] * x[1] - x[1] + 1.0));
  };
  c.data.g = {};  // zero datum
  c.exact.u = [](const Vec2&) { return Vec2(0.0, 0.0); };
  c.exact.G = [](const Vec2&) { return Mat2(Mat2::Zero()); };
  c.exact.p = [lambda](const Vec2& x) {
    const double y = x[1];
    return lambda * (y * y * y - y * y / 2.0 + y - 7.0 / 12.0);
  };
  c.convective = true;
  return c;
}

Case cavity_case(double nu) {
  if (!(nu > 0.0)) throw std::invalid_argument("cavity_case: nu must be > 0");
  Case c;
  c.name = "cavity";
  c.data.nu = nu;
  c.data.f = {};
  c.data.g = [](const Vec2& x) {
    return x[1] >= 1.0 - 1e-12 ? Vec2(1.0, 0.0) : Vec2(0.0, 0.0);
  };
  c.convective = true;
  return c;
}

Case make_case(const CaseConfig& cfg) {
  Case c;
  if (cfg.case_id == "taylor") {
    c = cfg.stokes ? taylor_stokes_case(cfg.nu) : taylor_case(cfg.nu);
  } else if (cfg.case_id == "taylor-stokes") {
    c = taylor_stokes_case(cfg.nu);
  } else if (cfg.case_id == "noflow") {
    c = noflow_case(cfg.lambda);
  } else if (cfg.case_id == "cavity") {
    c = cavity_case(cfg.nu);
  } else {
    throw std::invalid_argument("unknown case id: " + cfg.case_id +
                                " (expected taylor, taylor-stokes, noflow, "
                                "or cavity)");
  }
  if (cfg.stokes) c.convective = false;
  return c;
}

PrimalMesh build_case_mesh(const std::string& spec) {
  const auto bad = [&spec]() {
    throw std::invalid_argument(
        "invalid mesh spec: '" + spec +
        "' (expected rect:NxM, voronoi:N:SEED, or file:PATH)");
  };
  const auto starts = [&spec](const char* prefix) {
    return spec.rfind(prefix, 0) == 0;
  };
  try {
    if (starts("rect:")) {
      const std::string body = spec.substr(5);
      const std::size_t x = body.find('x');
      if (x == std::string::npos) bad();
      std::size_t done = 0;
      const int nx = std::stoi(body.substr(0, x), &done);
      if (done != x) bad();
      const int ny = std::stoi(body.substr(x + 1), &done);
      if (x + 1 + done != body.size()) bad();
      if (nx < 1 || ny < 1) bad();
      return build_rectangular_mesh(nx, ny);
    }
    if (starts("voronoi:")) {
      const std::string body = spec.substr(8);
      const std::size_t colon = body.find(':');
      if (colon == std::string::npos) bad();
      std::size_t done = 0;
      const int n = std::stoi(body.substr(0, colon), &done);
      if (done != colon) bad();
      const unsigned long seed = std::stoul(body.substr(colon + 1), &done);
      if (colon + 1 + done != body.size()) bad();
      if (n < 1) bad();
      return generate_voronoi_mesh(n, static_cast<std::uint64_t>(seed));
    }
  } catch (const std::logic_error&) {
    bad();
  }
  if (starts("file:")) {
    return read_polygon_mesh(spec.substr(5));
  }
  bad();
  return {};  // unreachable
}

ErrorReport error_report(const DofMaps& maps, const Case& c,
                         const SolveResult& sol, const DivergenceReport& div) {
  ErrorReport r;
  r.h = maps.mesh().h;
  r.k = maps.k();
  r.nu = c.data.nu;
  r.dofs_H = maps.dim(Space::H);
  r.dofs_V = maps.dim(Space::V);
  r.dofs_Q = maps.dim(Space::Q);
  r.err_G = error_L2(maps, sol.G, c.exact.G);
  r.err_u = error_L2(maps, sol.u, c.exact.u);
  r.err_p = error_L2(maps, sol.p, c.exact.p);
  const FEField jhu = interpolate_V(maps, c.exact.u);
  const FEField diff{Space::V, jhu.coeffs - sol.u.coeffs};
  r.err_Jhu_uh = norm_h(maps, diff);
  r.err_u_Jhu_04 = norm_04h(maps, jhu, c.exact.u);
  r.div = div;
  return r;
}

CaseResult run_case(const DofMaps& maps, const Case& c,
                    const SolverConfig& scfg) {
  CaseResult out;
  out.solve = c.convective ? picard_solve(maps, c.data, scfg)
                           : stokes_solve(maps, c.data, scfg);
  out.div = divergence_report(maps, out.solve.u);
  if (c.exact.attached()) out.errors = error_report(maps, c, out.solve, out.div);
  return out;
}

}  // namespace sdg
