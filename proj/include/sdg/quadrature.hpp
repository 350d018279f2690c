#pragma once

#include "sdg/geometry.hpp"

#include <vector>

namespace sdg {

/// Quadrature rule on a reference domain.  Triangle rules live on the unit
/// triangle {(0,0),(1,0),(0,1)} with weights summing to 1/2; segment rules
/// live on [-1,1] (abscissa stored in x()) with weights summing to 2.
struct QuadRule {
  std::vector<Vec2> points;
  std::vector<double> weights;
  int degree = 0;  ///< guaranteed polynomial exactness
  int size() const { return static_cast<int>(points.size()); }
};

/// Gauss-Legendre nodes/weights on [-1,1]; exact for polynomials of degree
/// 2n-1.  Nodes ascend and are exactly symmetric about 0.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Rule exact for polynomials of total degree <= degree on the unit triangle.
/// degree <= 1 returns the one-point centroid rule; higher degrees use a
/// Duffy-collapsed tensor Gauss rule (all weights positive, points interior).
const QuadRule& triangle_rule(int degree);

/// Gauss rule on [-1,1] exact for polynomials of degree <= degree.
const QuadRule& segment_rule(int degree);

/// Rule mapped to a physical cell; weights carry the Jacobian.
struct PhysQuad {
  std::vector<Vec2> points;
  std::vector<double> weights;
  int size() const { return static_cast<int>(points.size()); }
};

PhysQuad map_to_triangle(const QuadRule& rule, const Vec2& v0, const Vec2& v1, const Vec2& v2);

/// Maps with xi = -1 at a and xi = +1 at b.
PhysQuad map_to_segment(const QuadRule& rule, const Vec2& a, const Vec2& b);

}  // namespace sdg
