#include "doctest.h"
#include "sdg/basis.hpp"
#include "sdg/quadrature.hpp"

#include <cmath>
#include <random>

using namespace sdg;

TEST_SUITE_BEGIN("basis");

TEST_CASE("triangle basis is orthonormal") {
  const Vec2 a(0.1, 0.2), b(0.9, -0.05), c(0.35, 0.8);
  for (int k = 0; k <= 4; ++k) {
    const TriangleBasis basis(a, b, c, k);
    const int m = (k + 1) * (k + 2) / 2;
    REQUIRE(basis.size() == m);
    const PhysQuad q = map_to_triangle(triangle_rule(2 * k), a, b, c);
    const Eigen::MatrixXd v = basis.eval(q.points);
    const Eigen::Map<const Eigen::VectorXd> w(q.weights.data(), q.size());
    const Eigen::MatrixXd gram = v.transpose() * w.asDiagonal() * v;
    CHECK((gram - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("first member is the constant 1/sqrt(area)") {
  const Vec2 a(0.0, 0.0), b(2.0, 0.0), c(0.0, 1.0);
  const TriangleBasis basis(a, b, c, 2);
  const double area = 1.0;
  const Eigen::MatrixXd v = basis.eval({Vec2(0.3, 0.2), Vec2(1.0, 0.4)});
  CHECK(v(0, 0) == doctest::Approx(1.0 / std::sqrt(area)).epsilon(1e-13));
  CHECK(v(1, 0) == doctest::Approx(1.0 / std::sqrt(area)).epsilon(1e-13));
}

TEST_CASE("analytic gradients match central finite differences") {
  const Vec2 a(-0.2, 0.1), b(1.1, 0.3), c(0.2, 1.4);
  const TriangleBasis basis(a, b, c, 3);
  const double step = 1e-6 * basis.scale();
  const std::vector<Vec2> pts = {Vec2(0.3, 0.5), Vec2(0.5, 0.9), (a + b + c) / 3.0};
  Eigen::MatrixXd vals, gx, gy;
  basis.eval_with_grad(pts, vals, gx, gy);
  double max_rel = 0.0;
  for (std::size_t p = 0; p < pts.size(); ++p) {
    const Eigen::MatrixXd vxp = basis.eval({pts[p] + Vec2(step, 0.0)});
    const Eigen::MatrixXd vxm = basis.eval({pts[p] - Vec2(step, 0.0)});
    const Eigen::MatrixXd vyp = basis.eval({pts[p] + Vec2(0.0, step)});
    const Eigen::MatrixXd vym = basis.eval({pts[p] - Vec2(0.0, step)});
    for (int j = 0; j < basis.size(); ++j) {
      const double fdx = (vxp(0, j) - vxm(0, j)) / (2.0 * step);
      const double fdy = (vyp(0, j) - vym(0, j)) / (2.0 * step);
      const double scale = std::abs(gx(p, j)) + std::abs(gy(p, j)) + 1.0;
      max_rel = std::max(max_rel, std::abs(fdx - gx(p, j)) / scale);
      max_rel = std::max(max_rel, std::abs(fdy - gy(p, j)) / scale);
    }
  }
  CHECK(max_rel < 1e-6);
}

TEST_CASE("basis spans all polynomials of degree k") {
  // L2-project a random degree-k polynomial and compare pointwise.
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  const Vec2 a(0.0, 0.0), b(0.31, 0.07), c(0.1, 0.29);
  const int k = 3;
  const TriangleBasis basis(a, b, c, k);

  std::vector<std::pair<int, int>> exps;
  std::vector<double> cab;
  for (int t = 0; t <= k; ++t)
    for (int ax = t; ax >= 0; --ax) {
      exps.emplace_back(ax, t - ax);
      cab.push_back(coef(rng));
    }
  auto poly = [&](const Vec2& p) {
    double s = 0.0;
    for (std::size_t j = 0; j < exps.size(); ++j)
      s += cab[j] * std::pow(p.x(), exps[j].first) * std::pow(p.y(), exps[j].second);
    return s;
  };

  const PhysQuad q = map_to_triangle(triangle_rule(2 * k), a, b, c);
  const Eigen::MatrixXd v = basis.eval(q.points);
  Eigen::VectorXd proj = Eigen::VectorXd::Zero(basis.size());
  for (int i = 0; i < q.size(); ++i)
    proj += q.weights[i] * poly(q.points[i]) * v.row(i).transpose();

  const std::vector<Vec2> test_pts = {Vec2(0.12, 0.1), Vec2(0.2, 0.15), Vec2(0.05, 0.02)};
  const Eigen::MatrixXd tv = basis.eval(test_pts);
  for (std::size_t p = 0; p < test_pts.size(); ++p)
    CHECK(tv.row(p).dot(proj) == doctest::Approx(poly(test_pts[p])).epsilon(1e-10));
}

TEST_CASE("edge basis is orthonormal along the edge") {
  const double h_e = 0.37;
  const int k = 4;
  const QuadRule& rule = segment_rule(2 * k);
  std::vector<double> xi(rule.size());
  for (int i = 0; i < rule.size(); ++i) xi[i] = rule.points[i].x();
  const Eigen::MatrixXd v = edge_basis_values(k, h_e, xi);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(k + 1, k + 1);
  for (int i = 0; i < rule.size(); ++i)
    gram += (h_e / 2.0) * rule.weights[i] * v.row(i).transpose() * v.row(i);
  CHECK((gram - Eigen::MatrixXd::Identity(k + 1, k + 1)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("edge basis values follow the Legendre recurrence") {
  const std::vector<double> xi = {-0.83, -0.21, 0.0, 0.44, 0.97};
  const Eigen::MatrixXd v = edge_basis_values(3, 2.0, xi);
  for (std::size_t p = 0; p < xi.size(); ++p) {
    const double x = xi[p];
    CHECK(v(p, 0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
    CHECK(v(p, 1) == doctest::Approx(std::sqrt(1.5) * x).epsilon(1e-14));
    CHECK(v(p, 2) == doctest::Approx(std::sqrt(2.5) * 0.5 * (3 * x * x - 1)).epsilon(1e-13));
    CHECK(v(p, 3) ==
          doctest::Approx(std::sqrt(3.5) * 0.5 * (5 * x * x * x - 3 * x)).epsilon(1e-13));
  }
}

TEST_SUITE_END();
