#include "sdg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

namespace sdg {

namespace {

// Deterministic uniform double in [0,1) from the top 53 bits of the engine.
double uniform01(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

// Keeps the part of the convex polygon with (x - anchor) . dir <= 0.
void clip_halfplane(std::vector<Vec2>& poly, const Vec2& anchor, const Vec2& dir,
                    std::vector<Vec2>& scratch) {
  scratch.clear();
  const int n = static_cast<int>(poly.size());
  for (int i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    const double da = (a - anchor).dot(dir);
    const double db = (b - anchor).dot(dir);
    if (da <= 0.0) scratch.push_back(a);
    if ((da < 0.0) != (db < 0.0)) {
      const double s = da / (da - db);
      scratch.push_back(a + s * (b - a));
    }
  }
  poly.swap(scratch);
}

// Voronoi cell of seed i clipped to the rectangle.  Only the nearest seeds can
// carve the cell: a bisector at distance d/2 beyond the current max cell
// radius cannot cut, so the candidate list is widened until that bound holds.
std::vector<Vec2> voronoi_cell(const std::vector<Vec2>& seeds, int i, const Vec2& lo,
                               const Vec2& hi, std::vector<int>& idx_scratch,
                               std::vector<Vec2>& poly_scratch) {
  const int n = static_cast<int>(seeds.size());
  std::vector<Vec2> cell = {lo, Vec2(hi.x(), lo.y()), hi, Vec2(lo.x(), hi.y())};
  if (n == 1) return cell;

  idx_scratch.clear();
  for (int j = 0; j < n; ++j)
    if (j != i) idx_scratch.push_back(j);
  auto dist2 = [&](int j) { return (seeds[j] - seeds[i]).squaredNorm(); };

  int k = std::min<int>(32, static_cast<int>(idx_scratch.size()));
  std::nth_element(idx_scratch.begin(), idx_scratch.begin() + (k - 1), idx_scratch.end(),
                   [&](int a, int b) { return dist2(a) < dist2(b); });
  std::sort(idx_scratch.begin(), idx_scratch.begin() + k,
            [&](int a, int b) { return dist2(a) < dist2(b); });

  std::size_t processed = 0;
  while (true) {
    for (; processed < static_cast<std::size_t>(k); ++processed) {
      const int j = idx_scratch[processed];
      double max_r2 = 0.0;
      for (const Vec2& v : cell) max_r2 = std::max(max_r2, (v - seeds[i]).squaredNorm());
      if (dist2(j) > 4.0 * max_r2) return cell;  // no farther seed can cut
      clip_halfplane(cell, 0.5 * (seeds[i] + seeds[j]), seeds[j] - seeds[i], poly_scratch);
      if (cell.size() < 3) throw MeshError("degenerate Voronoi cell during relaxation");
    }
    if (k == static_cast<int>(idx_scratch.size())) return cell;
    const int new_k = std::min<int>(4 * k, static_cast<int>(idx_scratch.size()));
    std::nth_element(idx_scratch.begin() + k, idx_scratch.begin() + (new_k - 1),
                     idx_scratch.end(), [&](int a, int b) { return dist2(a) < dist2(b); });
    std::sort(idx_scratch.begin() + k, idx_scratch.begin() + new_k,
              [&](int a, int b) { return dist2(a) < dist2(b); });
    k = new_k;
  }
}

}  // namespace

PrimalMesh generate_voronoi_mesh(int n_seeds, std::uint64_t rng_seed, const Vec2& lo,
                                 const Vec2& hi) {
  if (n_seeds < 1) throw MeshError("generate_voronoi_mesh: need at least 1 seed");
  if (!(hi.x() > lo.x()) || !(hi.y() > lo.y()))
    throw MeshError("generate_voronoi_mesh: degenerate domain rectangle");
  const double diag = (hi - lo).norm();

  std::mt19937_64 rng(rng_seed);
  std::vector<Vec2> seeds(n_seeds);
  for (Vec2& s : seeds) {
    s.x() = lo.x() + uniform01(rng) * (hi.x() - lo.x());
    s.y() = lo.y() + uniform01(rng) * (hi.y() - lo.y());
  }

  // Lloyd relaxation: move every seed to the centroid of its clipped cell.
  std::vector<int> idx_scratch;
  std::vector<Vec2> poly_scratch;
  std::vector<std::vector<Vec2>> cells(n_seeds);
  for (int iter = 0; iter < 200; ++iter) {
    double move = 0.0;
    for (int i = 0; i < n_seeds; ++i)
      cells[i] = voronoi_cell(seeds, i, lo, hi, idx_scratch, poly_scratch);
    for (int i = 0; i < n_seeds; ++i) {
      const Vec2 c = polygon_centroid(cells[i]);
      move = std::max(move, (c - seeds[i]).norm());
      seeds[i] = c;
    }
    if (move < 1e-10 * diag) break;
  }
  for (int i = 0; i < n_seeds; ++i)
    cells[i] = voronoi_cell(seeds, i, lo, hi, idx_scratch, poly_scratch);

  // Merge cell corners into shared vertices (union-find).  The tolerance is
  // a small fraction of the mean cell size rather than machine precision:
  // four generators can converge to a nearly cocircular configuration, which
  // leaves a Voronoi edge orders of magnitude shorter than the cells around
  // it.  Collapsing such degenerate corner clusters keeps the mesh
  // quasi-uniform (and the downstream DOF matrices well conditioned) while
  // leaving regular cells untouched.
  const double area = (hi.x() - lo.x()) * (hi.y() - lo.y());
  const double tol =
      std::max(1e-12 * diag, 0.05 * std::sqrt(area / n_seeds));
  std::vector<Vec2> raw;
  std::vector<std::vector<int>> cell_raw(n_seeds);
  for (int i = 0; i < n_seeds; ++i)
    for (const Vec2& v : cells[i]) {
      cell_raw[i].push_back(static_cast<int>(raw.size()));
      raw.push_back(v);
    }
  const int nraw = static_cast<int>(raw.size());
  std::vector<int> parent(nraw);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  {
    std::vector<int> order(nraw);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (raw[a].x() != raw[b].x()) return raw[a].x() < raw[b].x();
      if (raw[a].y() != raw[b].y()) return raw[a].y() < raw[b].y();
      return a < b;
    });
    for (int i = 0; i < nraw; ++i)
      for (int j = i + 1; j < nraw; ++j) {
        if (raw[order[j]].x() - raw[order[i]].x() > tol) break;
        if ((raw[order[i]] - raw[order[j]]).norm() < tol) {
          const int ra = find(order[i]), rb = find(order[j]);
          if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
        }
      }
  }

  // Merged position: cluster centroid, snapped back onto the domain boundary
  // so clipped corners stay exactly on the rectangle.
  std::vector<Vec2> rep_pos(nraw, Vec2::Zero());
  std::vector<int> rep_count(nraw, 0);
  for (int r = 0; r < nraw; ++r) {
    rep_pos[find(r)] += raw[r];
    ++rep_count[find(r)];
  }
  for (int r = 0; r < nraw; ++r) {
    if (rep_count[r] == 0) continue;
    Vec2 p = rep_pos[r] / rep_count[r];
    if (std::abs(p.x() - lo.x()) <= tol) p.x() = lo.x();
    if (std::abs(p.x() - hi.x()) <= tol) p.x() = hi.x();
    if (std::abs(p.y() - lo.y()) <= tol) p.y() = lo.y();
    if (std::abs(p.y() - hi.y()) <= tol) p.y() = hi.y();
    rep_pos[r] = p;
  }

  PrimalMesh mesh;
  std::vector<int> rep_to_vertex(nraw, -1);
  mesh.polygons.resize(n_seeds);
  for (int i = 0; i < n_seeds; ++i) {
    std::vector<int>& cyc = mesh.polygons[i];
    for (int r : cell_raw[i]) {
      const int rep = find(r);
      if (rep_to_vertex[rep] < 0) {
        rep_to_vertex[rep] = static_cast<int>(mesh.vertices.size());
        mesh.vertices.push_back(rep_pos[rep]);
      }
      const int vid = rep_to_vertex[rep];
      if (cyc.empty() || cyc.back() != vid) cyc.push_back(vid);
    }
    while (cyc.size() > 1 && cyc.front() == cyc.back()) cyc.pop_back();
    if (cyc.size() < 3) throw MeshError("degenerate Voronoi cell after relaxation");
  }

  mesh.update_bbox();
  try {
    validate_primal_mesh(mesh);
  } catch (const MeshError& err) {
    throw MeshError(std::string("generate_voronoi_mesh: ") + err.what());
  }
  return mesh;
}

}  // namespace sdg
