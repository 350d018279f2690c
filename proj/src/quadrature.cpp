#include "sdg/quadrature.hpp"

#include <cmath>
#include <map>
#include <numbers>

namespace sdg {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Classical initial guess for the i-th root (descending order).
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    if (2 * i + 1 == n) x = 0.0;  // middle root of an odd-degree Legendre polynomial
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    // Re-evaluate the derivative at the converged node for the weight.
    {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
}

const QuadRule& triangle_rule(int degree) {
  static std::map<int, QuadRule> cache;
  const int d = std::max(degree, 0);
  auto it = cache.find(d);
  if (it != cache.end()) return it->second;

  QuadRule r;
  r.degree = d;
  if (d <= 1) {
    r.points = {Vec2(1.0 / 3.0, 1.0 / 3.0)};
    r.weights = {0.5};
  } else {
    // Duffy transform x = xi, y = eta*(1-xi):
    //   int_T f = int_0^1 int_0^1 f(xi, eta(1-xi)) (1-xi) deta dxi.
    // A monomial x^a y^b becomes degree a+b+1 in xi and b in eta.
    const int nx = (d + 3) / 2;
    const int ny = (d + 2) / 2;
    std::vector<double> gx, wx, gy, wy;
    gauss_legendre(nx, gx, wx);
    gauss_legendre(ny, gy, wy);
    for (int ix = 0; ix < nx; ++ix)
      for (int iy = 0; iy < ny; ++iy) {
        const double xi = 0.5 * (1.0 + gx[ix]);
        const double eta = 0.5 * (1.0 + gy[iy]);
        r.points.emplace_back(xi, eta * (1.0 - xi));
        r.weights.push_back(0.25 * wx[ix] * wy[iy] * (1.0 - xi));
      }
  }
  return cache.emplace(d, std::move(r)).first->second;
}

const QuadRule& segment_rule(int degree) {
  static std::map<int, QuadRule> cache;
  const int d = std::max(degree, 0);
  auto it = cache.find(d);
  if (it != cache.end()) return it->second;

  QuadRule r;
  r.degree = d;
  std::vector<double> g, w;
  gauss_legendre((d + 2) / 2, g, w);
  for (std::size_t i = 0; i < g.size(); ++i) {
    r.points.emplace_back(g[i], 0.0);
    r.weights.push_back(w[i]);
  }
  return cache.emplace(d, std::move(r)).first->second;
}

PhysQuad map_to_triangle(const QuadRule& rule, const Vec2& v0, const Vec2& v1, const Vec2& v2) {
  const double jac = cross2(v1 - v0, v2 - v0);
  if (!(jac > 0.0)) throw MeshError("map_to_triangle: vertices are not counter-clockwise");
  PhysQuad q;
  q.points.reserve(rule.points.size());
  q.weights.reserve(rule.weights.size());
  for (std::size_t i = 0; i < rule.points.size(); ++i) {
    const double xi = rule.points[i].x();
    const double eta = rule.points[i].y();
    q.points.push_back(v0 + xi * (v1 - v0) + eta * (v2 - v0));
    q.weights.push_back(rule.weights[i] * jac);
  }
  return q;
}

PhysQuad map_to_segment(const QuadRule& rule, const Vec2& a, const Vec2& b) {
  PhysQuad q;
  q.points.reserve(rule.points.size());
  q.weights.reserve(rule.weights.size());
  const double half_len = 0.5 * (b - a).norm();
  for (std::size_t i = 0; i < rule.points.size(); ++i) {
    const double s = 0.5 * (1.0 + rule.points[i].x());
    q.points.push_back(a + s * (b - a));
    q.weights.push_back(rule.weights[i] * half_len);
  }
  return q;
}

}  // namespace sdg
