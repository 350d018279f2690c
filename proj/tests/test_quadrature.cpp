#include "doctest.h"
#include "sdg/quadrature.hpp"

#include <cmath>
#include <random>

using namespace sdg;

namespace {

// Exact integral of x^a y^b over the unit triangle {(0,0),(1,0),(0,1)}:
// a! b! / (a+b+2)!.
double tri_monomial_exact(int a, int b) {
  double value = 1.0;
  // a! b! / (a+b+2)! computed as a product to avoid overflow
  for (int i = 1; i <= a; ++i) value *= i;
  for (int i = 1; i <= b; ++i) value *= i;
  for (int i = 1; i <= a + b + 2; ++i) value /= i;
  return value;
}

}  // namespace

TEST_SUITE_BEGIN("quadrature");

TEST_CASE("gauss_legendre basics") {
  std::vector<double> x, w;
  gauss_legendre(1, x, w);
  CHECK(x[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(w[0] == doctest::Approx(2.0).epsilon(1e-15));

  gauss_legendre(2, x, w);
  CHECK(x[0] == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(x[1] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));

  gauss_legendre(20, x, w);
  double wsum = 0.0, m38 = 0.0;
  for (int i = 0; i < 20; ++i) {
    wsum += w[i];
    m38 += w[i] * std::pow(x[i], 38);
    CHECK(w[i] > 0.0);
    // symmetry about 0
    CHECK(x[i] == doctest::Approx(-x[19 - i]).epsilon(1e-14));
  }
  CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(m38 == doctest::Approx(2.0 / 39.0).epsilon(1e-12));
}

TEST_CASE("segment rules are Gauss rules of the requested exactness") {
  CHECK(segment_rule(0).size() == 1);
  CHECK(segment_rule(1).size() == 1);
  CHECK(segment_rule(3).size() == 2);

  const QuadRule& r8 = segment_rule(8);
  CHECK(r8.size() == 5);
  double m8 = 0.0;
  for (int i = 0; i < r8.size(); ++i) m8 += r8.weights[i] * std::pow(r8.points[i].x(), 8);
  CHECK(m8 == doctest::Approx(2.0 / 9.0).epsilon(1e-14));

  for (int d = 0; d <= 15; ++d) {
    const QuadRule& r = segment_rule(d);
    for (int p = 0; p <= d; ++p) {
      double got = 0.0;
      for (int i = 0; i < r.size(); ++i) got += r.weights[i] * std::pow(r.points[i].x(), p);
      const double exact = (p % 2 == 0) ? 2.0 / (p + 1) : 0.0;
      CHECK(got == doctest::Approx(exact).epsilon(1e-13));
    }
  }
}

TEST_CASE("triangle rules: monomial exactness on the reference triangle") {
  CHECK(triangle_rule(0).size() == 1);
  CHECK(triangle_rule(1).size() == 1);
  for (int d = 0; d <= 12; ++d) {
    const QuadRule& r = triangle_rule(d);
    for (int a = 0; a + 0 <= d; ++a)
      for (int b = 0; a + b <= d; ++b) {
        double got = 0.0;
        for (int i = 0; i < r.size(); ++i)
          got += r.weights[i] * std::pow(r.points[i].x(), a) * std::pow(r.points[i].y(), b);
        const double exact = tri_monomial_exact(a, b);
        CHECK(std::abs(got - exact) <= 1e-13 * std::max(1.0, std::abs(exact)));
      }
  }
}

TEST_CASE("triangle rules: positive interior points and weights") {
  for (int d : {2, 5, 9, 14}) {
    const QuadRule& r = triangle_rule(d);
    double wsum = 0.0;
    for (int i = 0; i < r.size(); ++i) {
      const Vec2& p = r.points[i];
      CHECK(r.weights[i] > 0.0);
      CHECK(p.x() > 0.0);
      CHECK(p.y() > 0.0);
      CHECK(p.x() + p.y() < 1.0);
      wsum += r.weights[i];
    }
    CHECK(wsum == doctest::Approx(0.5).epsilon(1e-14));
  }
}

TEST_CASE("mapped rules carry the Jacobian") {
  const Vec2 a(0.2, -0.1), b(1.4, 0.3), c(0.5, 1.1);
  const double area = 0.5 * cross2(b - a, c - a);

  const PhysQuad q = map_to_triangle(triangle_rule(2), a, b, c);
  double wsum = 0.0;
  Vec2 first_moment(0.0, 0.0);
  for (int i = 0; i < q.size(); ++i) {
    wsum += q.weights[i];
    first_moment += q.weights[i] * q.points[i];
  }
  CHECK(wsum == doctest::Approx(area).epsilon(1e-14));
  const Vec2 centroid = (a + b + c) / 3.0;
  CHECK(first_moment.x() == doctest::Approx(area * centroid.x()).epsilon(1e-14));
  CHECK(first_moment.y() == doctest::Approx(area * centroid.y()).epsilon(1e-14));

  const PhysQuad s = map_to_segment(segment_rule(5), a, b);
  double len = 0.0;
  for (int i = 0; i < s.size(); ++i) len += s.weights[i];
  CHECK(len == doctest::Approx((b - a).norm()).epsilon(1e-14));
  // xi = -1 maps to the first endpoint's side
  CHECK((s.points.front() - a).norm() < (s.points.front() - b).norm());
}

TEST_CASE("random polynomial integrates exactly up to the stated degree") {
  std::mt19937 rng(1234);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  for (int d : {3, 6, 11}) {
    const QuadRule& r = triangle_rule(d);
    double got = 0.0, exact = 0.0;
    for (int a = 0; a <= d; ++a)
      for (int b = 0; a + b <= d; ++b) {
        const double cab = coef(rng);
        exact += cab * tri_monomial_exact(a, b);
        for (int i = 0; i < r.size(); ++i)
          got += cab * r.weights[i] * std::pow(r.points[i].x(), a) * std::pow(r.points[i].y(), b);
      }
    CHECK(got == doctest::Approx(exact).epsilon(1e-12));
  }
}

TEST_SUITE_END();
