#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace sdg {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Error raised for invalid meshes, mesh files, or degenerate geometry.
class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scalar cross product a.x*b.y - a.y*b.x.
double cross2(const Vec2& a, const Vec2& b);

double polygon_signed_area(const std::vector<Vec2>& poly);
Vec2 polygon_centroid(const std::vector<Vec2>& poly);
double polygon_diameter(const std::vector<Vec2>& poly);
bool polygon_is_convex(const std::vector<Vec2>& poly);
bool point_in_polygon(const Vec2& p, const std::vector<Vec2>& poly);

/// Largest disc inscribed in the kernel of a polygon (the set of points from
/// which the whole polygon is visible).  radius <= 0 signals an empty kernel.
struct KernelDisc {
  Vec2 center{0.0, 0.0};
  double radius{0.0};
};

/// Chebyshev disc of the kernel, computed from the intersection of the edge
/// half-planes by exhaustive enumeration of constraint triples.
KernelDisc polygon_kernel_disc(const std::vector<Vec2>& poly);

/// Anchor for the fan triangulation: the centroid when the polygon is convex,
/// otherwise the Chebyshev center of the kernel.  Throws MeshError when the
/// kernel is empty.
Vec2 polygon_interior_point(const std::vector<Vec2>& poly);

}  // namespace sdg
