#pragma once

#include "sdg/geometry.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace sdg {

struct PrimalMesh {
  std::vector<Vec2> vertices;
  std::vector<std::vector<int>> polygons;  ///< counter-clockwise vertex cycles
  Vec2 bbox_lo{0.0, 0.0}, bbox_hi{0.0, 0.0};

  void update_bbox();
  double bbox_diagonal() const { return (bbox_hi - bbox_lo).norm(); }
};

PrimalMesh build_rectangular_mesh(int nx, int ny, const Vec2& lo = Vec2(0.0, 0.0),
                                  const Vec2& hi = Vec2(1.0, 1.0));

PrimalMesh read_polygon_mesh(const std::string& path);
void write_polygon_mesh(const PrimalMesh& mesh, const std::string& path);

/// Clipped Voronoi diagram of Lloyd-relaxed random seeds; all cells convex.
PrimalMesh generate_voronoi_mesh(int n_seeds, std::uint64_t rng_seed,
                                 const Vec2& lo = Vec2(0.0, 0.0),
                                 const Vec2& hi = Vec2(1.0, 1.0));

/// Checks all PrimalMesh invariants (orientation, simplicity, conforming
/// tiling, star-shapedness, duplicate vertices); throws MeshError.
void validate_primal_mesh(const PrimalMesh& mesh);

enum class EdgeKind { PrimalInterior, PrimalBoundary, Dual };

struct Edge {
  int va = -1, vb = -1;  ///< endpoint point ids; the tangent runs va -> vb
  EdgeKind kind = EdgeKind::PrimalInterior;
  int tri_plus = -1;   ///< triangle for which the normal is outward
  int tri_minus = -1;  ///< opposite triangle; -1 on boundary edges
  Vec2 tangent{0.0, 0.0};
  Vec2 normal{0.0, 0.0};  ///< tangent rotated -90 degrees: (t.y, -t.x)
  Vec2 midpoint{0.0, 0.0};
  double length = 0.0;

  bool is_primal() const { return kind != EdgeKind::Dual; }
  bool is_boundary() const { return kind == EdgeKind::PrimalBoundary; }
};

struct Triangle {
  std::array<int, 3> v{-1, -1, -1};  ///< point ids, CCW; v[0] is the interior point
  int polygon = -1;
  int primal_edge = -1;
  std::array<int, 2> dual_edges{-1, -1};  ///< ascending edge ids
  Vec2 centroid{0.0, 0.0};
  double area = 0.0;
  double diameter = 0.0;
};

/// Fan sub-triangulation of a polygonal mesh together with the classified,
/// oriented edge skeleton.  Immutable after construction.
struct StaggeredMesh {
  PrimalMesh primal;
  std::vector<Vec2> points;  ///< primal vertices, then one interior point per polygon
  std::vector<Triangle> tris;
  std::vector<Edge> edges;  ///< primal edges first, then dual edges
  std::vector<int> polygon_tri_begin;  ///< fan of polygon p: tris [begin[p], begin[p+1])
  std::vector<char> point_on_boundary;
  int n_primal_edges = 0;
  int n_primal_interior = 0;
  int n_primal_boundary = 0;
  int n_dual_edges = 0;
  double h = 0.0;  ///< max triangle diameter

  int n_polygons() const { return static_cast<int>(primal.polygons.size()); }
  int n_tris() const { return static_cast<int>(tris.size()); }
  int n_edges() const { return static_cast<int>(edges.size()); }
  std::array<Vec2, 3> tri_points(int t) const {
    return {points[tris[t].v[0]], points[tris[t].v[1]], points[tris[t].v[2]]};
  }
};

StaggeredMesh triangulate(const PrimalMesh& primal);

struct RegularityReport {
  double rho_E = 0.0;  ///< min over polygons of (shortest edge / polygon diameter)
  double rho_B = 0.0;  ///< min over polygons of (kernel inscribed radius / diameter)
  double h = 0.0;
  double min_triangle_angle = 0.0;  ///< radians
};

RegularityReport regularity_report(const StaggeredMesh& mesh);

}  // namespace sdg
