#include "sdg/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sdg {

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double polygon_signed_area(const std::vector<Vec2>& poly) {
  const int m = static_cast<int>(poly.size());
  double s = 0.0;
  for (int i = 0; i < m; ++i) s += cross2(poly[i], poly[(i + 1) % m]);
  return 0.5 * s;
}

Vec2 polygon_centroid(const std::vector<Vec2>& poly) {
  const int m = static_cast<int>(poly.size());
  double a = 0.0;
  Vec2 c(0.0, 0.0);
  for (int i = 0; i < m; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % m];
    const double w = cross2(p, q);
    a += w;
    c += w * (p + q);
  }
  if (std::abs(a) < 10.0 * std::numeric_limits<double>::min())
    throw MeshError("degenerate polygon: vanishing area");
  return c / (3.0 * a);
}

double polygon_diameter(const std::vector<Vec2>& poly) {
  const int m = static_cast<int>(poly.size());
  double d2 = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) d2 = std::max(d2, (poly[i] - poly[j]).squaredNorm());
  return std::sqrt(d2);
}

bool polygon_is_convex(const std::vector<Vec2>& poly) {
  const int m = static_cast<int>(poly.size());
  const double diam = polygon_diameter(poly);
  const double tol = 1e-12 * diam * diam;
  for (int i = 0; i < m; ++i) {
    const Vec2 e0 = poly[(i + 1) % m] - poly[i];
    const Vec2 e1 = poly[(i + 2) % m] - poly[(i + 1) % m];
    if (cross2(e0, e1) < -tol) return false;
  }
  return true;
}

bool point_in_polygon(const Vec2& p, const std::vector<Vec2>& poly) {
  // Even-odd crossing test; points on the boundary count as inside.
  const int m = static_cast<int>(poly.size());
  bool inside = false;
  for (int i = 0; i < m; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % m];
    // On-segment check.
    const Vec2 ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 > 0.0) {
      const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
      if ((a + t * ab - p).squaredNorm() < 1e-28 * len2) return true;
    }
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = a.x() + (p.y() - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
      if (x > p.x()) inside = !inside;
    }
  }
  return inside;
}

KernelDisc polygon_kernel_disc(const std::vector<Vec2>& poly) {
  const int m = static_cast<int>(poly.size());
  if (m < 3) throw MeshError("polygon needs at least 3 vertices");

  // Inward half-planes n_i . x >= off_i, one per CCW edge.
  std::vector<Vec2> n(m);
  std::vector<double> off(m);
  for (int i = 0; i < m; ++i) {
    const Vec2 d = poly[(i + 1) % m] - poly[i];
    const double len = d.norm();
    if (len < 10.0 * std::numeric_limits<double>::min())
      throw MeshError("degenerate polygon edge of zero length");
    n[i] = Vec2(-d.y(), d.x()) / len;
    off[i] = n[i].dot(poly[i]);
  }

  auto clearance = [&](const Vec2& x) {
    double r = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) r = std::min(r, n[i].dot(x) - off[i]);
    return r;
  };

  // The Chebyshev LP  max r  s.t.  n_i.x - r >= off_i  attains its optimum at
  // a point where three constraints are active; enumerate all triples and keep
  // the candidate with the largest true clearance.
  KernelDisc best;
  {
    const Vec2 c = polygon_centroid(poly);
    best = {c, clearance(c)};
  }
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      for (int l = j + 1; l < m; ++l) {
        Eigen::Matrix3d A;
        A << n[i].x(), n[i].y(), -1.0, n[j].x(), n[j].y(), -1.0, n[l].x(), n[l].y(), -1.0;
        if (std::abs(A.determinant()) < 1e-12) continue;
        const Eigen::Vector3d rhs(off[i], off[j], off[l]);
        const Eigen::Vector3d sol = A.partialPivLu().solve(rhs);
        const Vec2 x(sol[0], sol[1]);
        const double r = clearance(x);
        if (r > best.radius) best = {x, r};
      }
  return best;
}

Vec2 polygon_interior_point(const std::vector<Vec2>& poly) {
  if (polygon_is_convex(poly)) return polygon_centroid(poly);
  const KernelDisc disc = polygon_kernel_disc(poly);
  if (!(disc.radius > 1e-12 * polygon_diameter(poly)))
    throw MeshError("polygon is not star-shaped: kernel is empty");
  return disc.center;
}

}  // namespace sdg
