#include "sdg/analysis.hpp"

#include "sdg/quadrature.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace sdg {

namespace {

/// Squared Euclidean length of one row of an eval_values block.
double row_sq(const Eigen::MatrixXd& vals, int p) {
  double s = 0.0;
  for (int c = 0; c < vals.cols(); ++c) s += vals(p, c) * vals(p, c);
  return s;
}

template <typename ExactEval>
double l2_error_impl(const DofMaps& maps, const FEField& f,
                     const ExactEval& exact_row) {
  const StaggeredMesh& mesh = maps.mesh();
  const QuadRule& rule = triangle_rule(moment_quad_degree(maps.k()));
  double total = 0.0;
  for (int t = 0; t < mesh.n_tris(); ++t) {
    const auto tp = mesh.tri_points(t);
    const PhysQuad pq = map_to_triangle(rule, tp[0], tp[1], tp[2]);
    Eigen::MatrixXd vals = eval_values(maps, f, t, pq.points);
    for (int p = 0; p < pq.size(); ++p) {
      exact_row(pq.points[p], vals, p);  // subtracts exact values in place
      total += pq.weights[p] * row_sq(vals, p);
    }
  }
  return std::sqrt(total);
}

/// Evaluate the trace of a V-field on a mapped edge rule from triangle t.
Eigen::MatrixXd edge_trace(const DofMaps& maps, const FEField& f, int t,
                           const PhysQuad& pq) {
  return eval_values(maps, f, t, pq.points);
}

}  // namespace

double error_L2(const DofMaps& maps, const FEField& f, const TensorFn& exact) {
  if (f.space != Space::H)
    throw std::invalid_argument("error_L2: tensor overload needs an H field");
  return l2_error_impl(
      maps, f, [&exact](const Vec2& x, Eigen::MatrixXd& vals, int p) {
        const Mat2 e = exact(x);
        vals(p, 0) -= e(0, 0);
        vals(p, 1) -= e(0, 1);
        vals(p, 2) -= e(1, 0);
        vals(p, 3) -= e(1, 1);
      });
}

double error_L2(const DofMaps& maps, const FEField& f, const VectorFn& exact) {
  if (f.space != Space::V)
    throw std::invalid_argument("error_L2: vector overload needs a V field");
  return l2_error_impl(maps, f,
                       [&exact](const Vec2& x, Eigen::MatrixXd& vals, int p) {
                         const Vec2 e = exact(x);
                         vals(p, 0) -= e[0];
                         vals(p, 1) -= e[1];
                       });
}

double error_L2(const DofMaps& maps, const FEField& f, const ScalarFn& exact) {
  if (f.space != Space::Q)
    throw std::invalid_argument("error_L2: scalar overload needs a Q field");
  return l2_error_impl(maps, f,
                       [&exact](const Vec2& x, Eigen::MatrixXd& vals, int p) {
                         vals(p, 0) -= exact(x);
                       });
}

double norm_h(const DofMaps& maps, const FEField& v) {
  if (v.space != Space::V)
    throw std::invalid_argument("norm_h expects a V field");
  const StaggeredMesh& mesh = maps.mesh();
  const int k = maps.k();
  double total = 0.0;

  const QuadRule& vol_rule = triangle_rule(2 * k);
  for (int t = 0; t < mesh.n_tris(); ++t) {
    const auto tp = mesh.tri_points(t);
    const PhysQuad pq = map_to_triangle(vol_rule, tp[0], tp[1], tp[2]);
    const Eigen::MatrixXd g = eval_gradients(maps, v, t, pq.points);
    for (int p = 0; p < pq.size(); ++p) total += pq.weights[p] * row_sq(g, p);
  }

  const QuadRule& seg = segment_rule(2 * k + 2);
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const Edge& ed = mesh.edges[e];
    const PhysQuad pq = map_to_segment(seg, mesh.points[ed.va],
                                       mesh.points[ed.vb]);
    const Eigen::MatrixXd vp = edge_trace(maps, v, ed.tri_plus, pq);
    Eigen::MatrixXd jump = vp;
    if (ed.tri_minus >= 0) jump -= edge_trace(maps, v, ed.tri_minus, pq);
    const double inv_he = 1.0 / ed.length;
    if (ed.is_primal()) {
      for (int p = 0; p < pq.size(); ++p)
        total += inv_he * pq.weights[p] * row_sq(jump, p);
    } else {
      for (int p = 0; p < pq.size(); ++p) {
        const double jt =
            jump(p, 0) * ed.tangent[0] + jump(p, 1) * ed.tangent[1];
        total += inv_he * pq.weights[p] * jt * jt;
      }
    }
  }
  return std::sqrt(total);
}

double norm_04h(const DofMaps& maps, const FEField& v, const VectorFn& exact) {
  if (v.space != Space::V)
    throw std::invalid_argument("norm_04h expects a V field");
  const StaggeredMesh& mesh = maps.mesh();
  const int k = maps.k();
  const int deg = 4 * k + 8;
  double total = 0.0;

  const QuadRule& vol_rule = triangle_rule(deg);
  for (int t = 0; t < mesh.n_tris(); ++t) {
    const auto tp = mesh.tri_points(t);
    const PhysQuad pq = map_to_triangle(vol_rule, tp[0], tp[1], tp[2]);
    Eigen::MatrixXd vals = eval_values(maps, v, t, pq.points);
    for (int p = 0; p < pq.size(); ++p) {
      if (exact) {
        const Vec2 e = exact(pq.points[p]);
        vals(p, 0) = e[0] - vals(p, 0);
        vals(p, 1) = e[1] - vals(p, 1);
      }
      const double s = row_sq(vals, p);
      total += pq.weights[p] * s * s;
    }
  }

  const QuadRule& seg = segment_rule(deg);
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const Edge& ed = mesh.edges[e];
    const PhysQuad pq = map_to_segment(seg, mesh.points[ed.va],
                                       mesh.points[ed.vb]);
    Eigen::MatrixXd avg = edge_trace(maps, v, ed.tri_plus, pq);
    if (ed.tri_minus >= 0) {
      avg += edge_trace(maps, v, ed.tri_minus, pq);
      avg *= 0.5;
    }
    const double inv_he = 1.0 / ed.length;
    for (int p = 0; p < pq.size(); ++p) {
      if (exact) {
        const Vec2 ex = exact(pq.points[p]);
        avg(p, 0) = ex[0] - avg(p, 0);
        avg(p, 1) = ex[1] - avg(p, 1);
      }
      const double s = row_sq(avg, p);
      total += inv_he * pq.weights[p] * s * s;
    }
  }
  return std::pow(total, 0.25);
}

double norm_1h(const DofMaps& maps, const FEField& q) {
  if (q.space != Space::Q)
    throw std::invalid_argument("norm_1h expects a Q field");
  const StaggeredMesh& mesh = maps.mesh();
  const int k = maps.k();
  double total = 0.0;

  const QuadRule& vol_rule = triangle_rule(2 * k);
  for (int t = 0; t < mesh.n_tris(); ++t) {
    const auto tp = mesh.tri_points(t);
    const PhysQuad pq = map_to_triangle(vol_rule, tp[0], tp[1], tp[2]);
    const Eigen::MatrixXd g = eval_gradients(maps, q, t, pq.points);
    for (int p = 0; p < pq.size(); ++p) total += pq.weights[p] * row_sq(g, p);
  }

  const QuadRule& seg = segment_rule(2 * k + 2);
  for (int e = mesh.n_primal_edges; e < mesh.n_edges(); ++e) {
    const Edge& ed = mesh.edges[e];
    const PhysQuad pq = map_to_segment(seg, mesh.points[ed.va],
                                       mesh.points[ed.vb]);
    Eigen::MatrixXd jump = edge_trace(maps, q, ed.tri_plus, pq);
    jump -= edge_trace(maps, q, ed.tri_minus, pq);
    const double inv_he = 1.0 / ed.length;
    for (int p = 0; p < pq.size(); ++p)
      total += inv_he * pq.weights[p] * jump(p, 0) * jump(p, 0);
  }
  return std::sqrt(total);
}

DivergenceReport divergence_report(const DofMaps& maps, const FEField& u) {
  if (u.space != Space::V)
    throw std::invalid_argument("divergence_report expects a V field");
  const StaggeredMesh& mesh = maps.mesh();
  const int k = maps.k();
  DivergenceReport rep;

  const QuadRule& vol_rule = triangle_rule(2 * k);
  for (int t = 0; t < mesh.n_tris(); ++t) {
    const auto tp = mesh.tri_points(t);
    const PhysQuad pq = map_to_triangle(vol_rule, tp[0], tp[1], tp[2]);
    const Eigen::MatrixXd g = eval_gradients(maps, u, t, pq.points);
    double dmax = 0.0;
    for (int p = 0; p < pq.size(); ++p)
      dmax = std::max(dmax, std::abs(g(p, 0) + g(p, 3)));
    rep.div_max = std::max(rep.div_max, dmax);
    rep.div_max_scaled =
        std::max(rep.div_max_scaled, mesh.tris[t].diameter * dmax);
  }

  const QuadRule& seg = segment_rule(2 * k);
  for (int e = 0; e < mesh.n_primal_edges; ++e) {
    const Edge& ed = mesh.edges[e];
    if (ed.is_boundary()) continue;
    const PhysQuad pq = map_to_segment(seg, mesh.points[ed.va],
                                       mesh.points[ed.vb]);
    Eigen::MatrixXd jump = edge_trace(maps, u, ed.tri_plus, pq);
    jump -= edge_trace(maps, u, ed.tri_minus, pq);
    for (int p = 0; p < pq.size(); ++p) {
      const double jn = jump(p, 0) * ed.normal[0] + jump(p, 1) * ed.normal[1];
      rep.normal_jump_max = std::max(rep.normal_jump_max, std::abs(jn));
    }
  }
  return rep;
}

Streamfunction streamfunction(const DofMaps& maps, const FEField& u) {
  const StaggeredMesh& mesh = maps.mesh();
  const int k = maps.k();

  const DivergenceReport rep = divergence_report(maps, u);
  const double scale = norm_h(maps, u);
  if (rep.div_max_scaled > 1e-8 * scale ||
      rep.normal_jump_max > 1e-8 * scale) {
    throw std::invalid_argument(
        "streamfunction requires a divergence-free velocity "
        "(divergence_report maxima exceed 1e-8 relative)");
  }

  // Flux of u across every edge, oriented with the stored edge normal.
  const QuadRule& seg = segment_rule(2 * k);
  std::vector<double> flux(mesh.n_edges(), 0.0);
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const Edge& ed = mesh.edges[e];
    const PhysQuad pq = map_to_segment(seg, mesh.points[ed.va],
                                       mesh.points[ed.vb]);
    const Eigen::MatrixXd vals = edge_trace(maps, u, ed.tri_plus, pq);
    double fl = 0.0;
    for (int p = 0; p < pq.size(); ++p)
      fl += pq.weights[p] *
            (vals(p, 0) * ed.normal[0] + vals(p, 1) * ed.normal[1]);
    flux[e] = fl;
  }

  // Vertex adjacency of the full (primal + dual) edge graph.
  const int n_pts = static_cast<int>(mesh.points.size());
  std::vector<std::vector<std::pair<int, int>>> adj(n_pts);  // (edge, nbr)
  for (int e = 0; e < mesh.n_edges(); ++e) {
    adj[mesh.edges[e].va].push_back({e, mesh.edges[e].vb});
    adj[mesh.edges[e].vb].push_back({e, mesh.edges[e].va});
  }

  int anchor = -1;
  for (int i = 0; i < n_pts && anchor < 0; ++i)
    if (mesh.point_on_boundary[i]) anchor = i;
  if (anchor < 0) anchor = 0;

  Streamfunction out;
  out.psi.assign(n_pts, 0.0);
  std::vector<char> visited(n_pts, 0);
  std::vector<char> in_tree(mesh.n_edges(), 0);
  std::deque<int> queue{anchor};
  visited[anchor] = 1;
  int n_visited = 1;
  while (!queue.empty()) {
    const int a = queue.front();
    queue.pop_front();
    for (const auto& [e, b] : adj[a]) {
      if (visited[b]) continue;
      visited[b] = 1;
      ++n_visited;
      in_tree[e] = 1;
      // psi(vb) - psi(va) = flux along the edge orientation va -> vb.
      out.psi[b] =
          out.psi[a] + (mesh.edges[e].va == a ? flux[e] : -flux[e]);
      queue.push_back(b);
    }
  }
  if (n_visited != n_pts)
    throw std::runtime_error("streamfunction: edge graph is disconnected");

  for (int i = 0; i < n_pts; ++i)
    out.max_abs = std::max(out.max_abs, std::abs(out.psi[i]));
  for (int e = 0; e < mesh.n_edges(); ++e) {
    if (in_tree[e]) continue;
    const Edge& ed = mesh.edges[e];
    out.max_closure = std::max(
        out.max_closure,
        std::abs(out.psi[ed.vb] - out.psi[ed.va] - flux[e]));
  }
  return out;
}

const std::array<const char*, RateTable::n_quantities>
    RateTable::quantity_names = {"G_L2", "u_L2", "p_L2", "Jhu_uh_h",
                                 "u_Jhu_04h"};

double quantity_value(const ErrorReport& r, int q) {
  switch (q) {
    case 0: return r.err_G;
    case 1: return r.err_u;
    case 2: return r.err_p;
    case 3: return r.err_Jhu_uh;
    case 4: return r.err_u_Jhu_04;
    default: throw std::out_of_range("quantity index");
  }
}

RateTable convergence_study(const std::vector<ErrorReport>& reports) {
  RateTable table;
  table.rows = reports;
  const int n = static_cast<int>(reports.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  table.ls_slopes.fill(nan);
  if (n < 2) return table;

  table.pairwise.resize(n - 1);
  for (int i = 0; i + 1 < n; ++i) {
    const double dh = std::log2(reports[i].h / reports[i + 1].h);
    for (int q = 0; q < RateTable::n_quantities; ++q) {
      const double e0 = quantity_value(reports[i], q);
      const double e1 = quantity_value(reports[i + 1], q);
      table.pairwise[i][q] =
          (e0 > 0.0 && e1 > 0.0 && dh != 0.0) ? std::log2(e0 / e1) / dh : nan;
    }
  }

  // Least squares of log e against log h over the finest min(3, n) rows.
  const int m = std::min(3, n);
  const int first = n - m;
  for (int q = 0; q < RateTable::n_quantities; ++q) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    bool ok = true;
    for (int i = first; i < n; ++i) {
      const double e = quantity_value(reports[i], q);
      if (!(e > 0.0) || !(reports[i].h > 0.0)) {
        ok = false;
        break;
      }
      const double x = std::log(reports[i].h);
      const double y = std::log(e);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double denom = m * sxx - sx * sx;
    table.ls_slopes[q] = (ok && denom > 0.0) ? (m * sxy - sx * sy) / denom
                                             : nan;
  }
  table.has_slopes = true;
  return table;
}

}  // namespace sdg
