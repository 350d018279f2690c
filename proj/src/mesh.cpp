#include "sdg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

namespace sdg {

namespace {

std::vector<Vec2> polygon_points(const PrimalMesh& mesh, int p) {
  std::vector<Vec2> pts;
  pts.reserve(mesh.polygons[p].size());
  for (int idx : mesh.polygons[p]) pts.push_back(mesh.vertices[idx]);
  return pts;
}

// Proper or touching intersection of segments (a,b) and (c,d) that do not
// share an endpoint index.
bool segments_interfere(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d, double tol) {
  const double d1 = cross2(b - a, c - a);
  const double d2 = cross2(b - a, d - a);
  const double d3 = cross2(d - c, a - c);
  const double d4 = cross2(d - c, b - c);
  if (((d1 > tol && d2 < -tol) || (d1 < -tol && d2 > tol)) &&
      ((d3 > tol && d4 < -tol) || (d3 < -tol && d4 > tol)))
    return true;
  auto on_segment = [&](const Vec2& p, const Vec2& q, const Vec2& r) {
    // r collinear with p-q within tol and strictly between them
    if (std::abs(cross2(q - p, r - p)) > tol) return false;
    const double t = (r - p).dot(q - p) / (q - p).squaredNorm();
    return t > 1e-12 && t < 1.0 - 1e-12;
  };
  return on_segment(a, b, c) || on_segment(a, b, d) || on_segment(c, d, a) || on_segment(c, d, b);
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b, double& tproj) {
  const Vec2 ab = b - a;
  tproj = (p - a).dot(ab) / ab.squaredNorm();
  const double t = std::clamp(tproj, 0.0, 1.0);
  return (a + t * ab - p).norm();
}

}  // namespace

void PrimalMesh::update_bbox() {
  if (vertices.empty()) {
    bbox_lo = bbox_hi = Vec2(0.0, 0.0);
    return;
  }
  bbox_lo = bbox_hi = vertices[0];
  for (const Vec2& v : vertices) {
    bbox_lo = bbox_lo.cwiseMin(v);
    bbox_hi = bbox_hi.cwiseMax(v);
  }
}

PrimalMesh build_rectangular_mesh(int nx, int ny, const Vec2& lo, const Vec2& hi) {
  if (nx < 1 || ny < 1) throw MeshError("build_rectangular_mesh: counts must be >= 1");
  if (!(hi.x() > lo.x()) || !(hi.y() > lo.y()))
    throw MeshError("build_rectangular_mesh: degenerate domain rectangle");

  PrimalMesh mesh;
  mesh.vertices.reserve((nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      mesh.vertices.emplace_back(lo.x() + (hi.x() - lo.x()) * i / nx,
                                 lo.y() + (hi.y() - lo.y()) * j / ny);
  auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };
  mesh.polygons.reserve(nx * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      mesh.polygons.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
  mesh.update_bbox();
  return mesh;
}

void validate_primal_mesh(const PrimalMesh& mesh) {
  const int nv = static_cast<int>(mesh.vertices.size());
  const int np = static_cast<int>(mesh.polygons.size());
  if (nv < 3) throw MeshError("mesh has fewer than 3 vertices");
  if (np < 1) throw MeshError("mesh has no polygons");
  PrimalMesh tmp = mesh;
  tmp.update_bbox();
  const double diag = tmp.bbox_diagonal();
  if (!(diag > 0.0)) throw MeshError("mesh bounding box is degenerate");
  const double tol = 1e-12 * diag;

  // Duplicate vertices (within tolerance).
  {
    std::vector<int> order(nv);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const Vec2 &u = mesh.vertices[a], &v = mesh.vertices[b];
      if (u.x() != v.x()) return u.x() < v.x();
      if (u.y() != v.y()) return u.y() < v.y();
      return a < b;
    });
    for (int i = 0; i < nv; ++i)
      for (int j = i + 1; j < nv; ++j) {
        const Vec2& u = mesh.vertices[order[i]];
        const Vec2& v = mesh.vertices[order[j]];
        if (v.x() - u.x() > tol) break;
        if ((u - v).norm() < tol) {
          std::ostringstream os;
          os << "duplicate vertices " << std::min(order[i], order[j]) << " and "
             << std::max(order[i], order[j]);
          throw MeshError(os.str());
        }
      }
  }

  double polygon_area_sum = 0.0;
  for (int p = 0; p < np; ++p) {
    const std::vector<int>& cyc = mesh.polygons[p];
    const int m = static_cast<int>(cyc.size());
    std::ostringstream tag;
    tag << "polygon " << p;
    if (m < 3) throw MeshError(tag.str() + " has fewer than 3 vertices");
    for (int idx : cyc)
      if (idx < 0 || idx >= nv) throw MeshError(tag.str() + " references vertex out of range");
    {
      std::vector<int> sorted = cyc;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw MeshError(tag.str() + " repeats a vertex");
    }
    const std::vector<Vec2> pts = polygon_points(mesh, p);
    const double area = polygon_signed_area(pts);
    if (!(area > 0.0))
      throw MeshError("orientation error: " + tag.str() +
                      " is clockwise or degenerate (signed area <= 0)");
    polygon_area_sum += area;
    // Simplicity: non-adjacent edges must not intersect or touch.
    const double xtol = tol * polygon_diameter(pts);
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) {
        if (j == i + 1 || (i == 0 && j == m - 1)) continue;
        if (segments_interfere(pts[i], pts[(i + 1) % m], pts[j], pts[(j + 1) % m], xtol))
          throw MeshError(tag.str() + " is not simple (self-intersecting boundary)");
      }
    const KernelDisc disc = polygon_kernel_disc(pts);
    if (!(disc.radius > 1e-12 * polygon_diameter(pts)))
      throw MeshError(tag.str() + " is not star-shaped (empty kernel)");
  }

  // Segment sharing counts and orientation consistency.
  std::map<std::pair<int, int>, std::pair<int, int>> seg;  // (count, direction sum)
  for (int p = 0; p < np; ++p) {
    const std::vector<int>& cyc = mesh.polygons[p];
    const int m = static_cast<int>(cyc.size());
    for (int i = 0; i < m; ++i) {
      const int a = cyc[i], b = cyc[(i + 1) % m];
      auto& entry = seg[{std::min(a, b), std::max(a, b)}];
      entry.first += 1;
      entry.second += (a < b) ? 1 : -1;
    }
  }
  double boundary_loop_area = 0.0;
  int n_boundary_segments = 0;
  for (const auto& [key, entry] : seg) {
    if (entry.first > 2)
      throw MeshError("tiling error: segment shared by more than 2 polygons");
    if (entry.first == 2 && entry.second != 0)
      throw MeshError("tiling error: interior segment traversed twice in the same direction");
    if (entry.first == 1) ++n_boundary_segments;
  }
  // Boundary loop area via shoelace over directed boundary segments.
  for (int p = 0; p < np; ++p) {
    const std::vector<int>& cyc = mesh.polygons[p];
    const int m = static_cast<int>(cyc.size());
    for (int i = 0; i < m; ++i) {
      const int a = cyc[i], b = cyc[(i + 1) % m];
      if (seg[{std::min(a, b), std::max(a, b)}].first == 1)
        boundary_loop_area += 0.5 * cross2(mesh.vertices[a], mesh.vertices[b]);
    }
  }
  if (n_boundary_segments < 3) throw MeshError("tiling error: mesh has no closed boundary");
  if (std::abs(polygon_area_sum - boundary_loop_area) > 1e-9 * polygon_area_sum)
    throw MeshError("tiling error: polygon areas do not match the boundary loop area (overlap)");

  // Hanging nodes: a vertex lying in the interior of another segment.
  for (const auto& [key, entry] : seg) {
    const Vec2& a = mesh.vertices[key.first];
    const Vec2& b = mesh.vertices[key.second];
    for (int v = 0; v < nv; ++v) {
      if (v == key.first || v == key.second) continue;
      double tproj = 0.0;
      if (point_segment_distance(mesh.vertices[v], a, b, tproj) < tol && tproj > 0.0 &&
          tproj < 1.0) {
        std::ostringstream os;
        os << "non-conforming tiling: vertex " << v << " lies on the edge (" << key.first << ", "
           << key.second << ")";
        throw MeshError(os.str());
      }
    }
  }

  // Containment overlap: a vertex strictly inside another polygon.
  for (int p = 0; p < np; ++p) {
    const std::vector<Vec2> pts = polygon_points(mesh, p);
    Vec2 plo = pts[0], phi = pts[0];
    for (const Vec2& q : pts) {
      plo = plo.cwiseMin(q);
      phi = phi.cwiseMax(q);
    }
    std::vector<char> in_poly(nv, 0);
    for (int idx : mesh.polygons[p]) in_poly[idx] = 1;
    for (int v = 0; v < nv; ++v) {
      if (in_poly[v]) continue;
      const Vec2& q = mesh.vertices[v];
      if (q.x() < plo.x() - tol || q.x() > phi.x() + tol || q.y() < plo.y() - tol ||
          q.y() > phi.y() + tol)
        continue;
      if (!point_in_polygon(q, pts)) continue;
      // Require clearance from the boundary before declaring an overlap.
      double min_dist = std::numeric_limits<double>::infinity();
      const int m = static_cast<int>(pts.size());
      for (int i = 0; i < m; ++i) {
        double tproj = 0.0;
        min_dist = std::min(min_dist, point_segment_distance(q, pts[i], pts[(i + 1) % m], tproj));
      }
      if (min_dist > tol) {
        std::ostringstream os;
        os << "tiling error: vertex " << v << " lies inside polygon " << p << " (overlap)";
        throw MeshError(os.str());
      }
    }
  }
}

StaggeredMesh triangulate(const PrimalMesh& primal) {
  validate_primal_mesh(primal);
  StaggeredMesh mesh;
  mesh.primal = primal;
  mesh.primal.update_bbox();
  const int nv = static_cast<int>(primal.vertices.size());
  const int np = static_cast<int>(primal.polygons.size());
  const double diag = mesh.primal.bbox_diagonal();

  mesh.points = primal.vertices;
  mesh.points.reserve(nv + np);
  for (int p = 0; p < np; ++p)
    mesh.points.push_back(polygon_interior_point(polygon_points(primal, p)));

  // Primal edges in first-encounter order.
  std::map<std::pair<int, int>, int> primal_edge_id;
  std::vector<std::vector<int>> poly_edge(np);
  for (int p = 0; p < np; ++p) {
    const std::vector<int>& cyc = primal.polygons[p];
    const int m = static_cast<int>(cyc.size());
    poly_edge[p].resize(m);
    for (int i = 0; i < m; ++i) {
      const int a = cyc[i], b = cyc[(i + 1) % m];
      const std::pair<int, int> key{std::min(a, b), std::max(a, b)};
      auto it = primal_edge_id.find(key);
      if (it == primal_edge_id.end()) {
        const int id = static_cast<int>(mesh.edges.size());
        primal_edge_id.emplace(key, id);
        Edge e;
        e.va = key.first;
        e.vb = key.second;
        e.kind = EdgeKind::PrimalBoundary;  // provisional; flipped to interior on 2nd visit
        mesh.edges.push_back(e);
        poly_edge[p][i] = id;
      } else {
        mesh.edges[it->second].kind = EdgeKind::PrimalInterior;
        poly_edge[p][i] = it->second;
      }
    }
  }
  mesh.n_primal_edges = static_cast<int>(mesh.edges.size());

  // Dual edges and fan triangles, polygon by polygon.
  mesh.polygon_tri_begin.assign(np + 1, 0);
  for (int p = 0; p < np; ++p) {
    const std::vector<int>& cyc = primal.polygons[p];
    const int m = static_cast<int>(cyc.size());
    const int xid = nv + p;
    std::vector<int> dual_id(m);
    for (int i = 0; i < m; ++i) {
      dual_id[i] = static_cast<int>(mesh.edges.size());
      Edge e;
      e.va = cyc[i];
      e.vb = xid;
      e.kind = EdgeKind::Dual;
      mesh.edges.push_back(e);
    }
    mesh.polygon_tri_begin[p] = static_cast<int>(mesh.tris.size());
    for (int i = 0; i < m; ++i) {
      const int j = (i + 1) % m;
      Triangle t;
      t.v = {xid, cyc[i], cyc[j]};
      t.polygon = p;
      t.primal_edge = poly_edge[p][i];
      t.dual_edges = {std::min(dual_id[i], dual_id[j]), std::max(dual_id[i], dual_id[j])};
      const Vec2& a = mesh.points[t.v[0]];
      const Vec2& b = mesh.points[t.v[1]];
      const Vec2& c = mesh.points[t.v[2]];
      const double two_area = cross2(b - a, c - a);
      if (!(two_area > 0.0)) {
        std::ostringstream os;
        os << "degenerate fan triangle in polygon " << p;
        throw MeshError(os.str());
      }
      t.area = 0.5 * two_area;
      t.centroid = (a + b + c) / 3.0;
      t.diameter = std::sqrt(
          std::max({(b - a).squaredNorm(), (c - b).squaredNorm(), (a - c).squaredNorm()}));
      mesh.tris.push_back(t);
    }
  }
  mesh.polygon_tri_begin[np] = static_cast<int>(mesh.tris.size());

  // Edge adjacency.
  std::vector<std::array<int, 2>> adj(mesh.edges.size(), {-1, -1});
  auto add_adj = [&adj](int e, int t) {
    if (adj[e][0] < 0)
      adj[e][0] = t;
    else if (adj[e][1] < 0)
      adj[e][1] = t;
    else
      throw MeshError("edge adjacent to more than 2 triangles");
  };
  for (int t = 0; t < mesh.n_tris(); ++t) {
    add_adj(mesh.tris[t].primal_edge, t);
    add_adj(mesh.tris[t].dual_edges[0], t);
    add_adj(mesh.tris[t].dual_edges[1], t);
  }

  for (int ei = 0; ei < mesh.n_edges(); ++ei) {
    Edge& e = mesh.edges[ei];
    const Vec2& pa = mesh.points[e.va];
    const Vec2& pb = mesh.points[e.vb];
    e.length = (pb - pa).norm();
    if (!(e.length > 1e-14 * diag)) throw MeshError("zero-length edge");
    e.tangent = (pb - pa) / e.length;
    e.normal = Vec2(e.tangent.y(), -e.tangent.x());
    e.midpoint = 0.5 * (pa + pb);

    const int t0 = adj[ei][0], t1 = adj[ei][1];
    if (e.kind == EdgeKind::Dual || e.kind == EdgeKind::PrimalInterior) {
      if (t0 < 0 || t1 < 0) throw MeshError("interior edge with fewer than 2 triangles");
      if (e.kind == EdgeKind::Dual && mesh.tris[t0].polygon != mesh.tris[t1].polygon)
        throw MeshError("dual edge shared across polygons");
      const double s0 = (e.midpoint - mesh.tris[t0].centroid).dot(e.normal);
      const double s1 = (e.midpoint - mesh.tris[t1].centroid).dot(e.normal);
      if (!(s0 * s1 < 0.0)) throw MeshError("inconsistent edge orientation");
      e.tri_plus = (s0 > 0.0) ? t0 : t1;
      e.tri_minus = (s0 > 0.0) ? t1 : t0;
    } else {
      if (t0 < 0 || t1 >= 0) throw MeshError("boundary edge adjacency mismatch");
      e.tri_plus = t0;
      e.tri_minus = -1;
      // Boundary normals point out of the single adjacent triangle; flip the
      // tangent when the index-ordered orientation puts the normal inward.
      if ((e.midpoint - mesh.tris[t0].centroid).dot(e.normal) < 0.0) {
        std::swap(e.va, e.vb);
        e.tangent = -e.tangent;
        e.normal = -e.normal;
      }
    }
  }

  mesh.n_primal_boundary = 0;
  for (int ei = 0; ei < mesh.n_primal_edges; ++ei)
    if (mesh.edges[ei].kind == EdgeKind::PrimalBoundary) ++mesh.n_primal_boundary;
  mesh.n_primal_interior = mesh.n_primal_edges - mesh.n_primal_boundary;
  mesh.n_dual_edges = mesh.n_edges() - mesh.n_primal_edges;

  mesh.point_on_boundary.assign(mesh.points.size(), 0);
  for (const Edge& e : mesh.edges)
    if (e.is_boundary()) {
      mesh.point_on_boundary[e.va] = 1;
      mesh.point_on_boundary[e.vb] = 1;
    }

  // Polygon area consistency and mesh size.
  mesh.h = 0.0;
  for (int p = 0; p < np; ++p) {
    double fan_area = 0.0;
    for (int t = mesh.polygon_tri_begin[p]; t < mesh.polygon_tri_begin[p + 1]; ++t)
      fan_area += mesh.tris[t].area;
    const double poly_area = polygon_signed_area(polygon_points(primal, p));
    if (std::abs(fan_area - poly_area) > 1e-12 * poly_area) {
      std::ostringstream os;
      os << "fan triangulation of polygon " << p << " does not cover it";
      throw MeshError(os.str());
    }
  }
  for (const Triangle& t : mesh.tris) mesh.h = std::max(mesh.h, t.diameter);
  return mesh;
}

RegularityReport regularity_report(const StaggeredMesh& mesh) {
  RegularityReport rep;
  rep.h = mesh.h;
  rep.rho_E = std::numeric_limits<double>::infinity();
  rep.rho_B = std::numeric_limits<double>::infinity();
  rep.min_triangle_angle = std::numeric_limits<double>::infinity();
  for (int p = 0; p < mesh.n_polygons(); ++p) {
    const std::vector<Vec2> pts = polygon_points(mesh.primal, p);
    const double diam = polygon_diameter(pts);
    const int m = static_cast<int>(pts.size());
    double emin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) emin = std::min(emin, (pts[(i + 1) % m] - pts[i]).norm());
    rep.rho_E = std::min(rep.rho_E, emin / diam);
    rep.rho_B = std::min(rep.rho_B, polygon_kernel_disc(pts).radius / diam);
  }
  for (const Triangle& t : mesh.tris) {
    const std::array<Vec2, 3> p = {mesh.points[t.v[0]], mesh.points[t.v[1]], mesh.points[t.v[2]]};
    for (int i = 0; i < 3; ++i) {
      const Vec2 u = p[(i + 1) % 3] - p[i];
      const Vec2 w = p[(i + 2) % 3] - p[i];
      const double ang = std::atan2(std::abs(cross2(u, w)), u.dot(w));
      rep.min_triangle_angle = std::min(rep.min_triangle_angle, ang);
    }
  }
  return rep;
}

}  // namespace sdg
