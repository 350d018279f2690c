#include "sdg/forms.hpp"

#include <cmath>
#include <vector>

namespace sdg {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

void scatter(const Eigen::MatrixXd& a, const std::vector<int>& rows,
             const std::vector<int>& cols, Triplets& out) {
  for (int r = 0; r < a.rows(); ++r)
    for (int c = 0; c < a.cols(); ++c)
      if (a(r, c) != 0.0) out.emplace_back(rows[r], cols[c], a(r, c));
}

SparseMat build(int nrows, int ncols, const Triplets& trips) {
  SparseMat m(nrows, ncols);
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

PhysQuad tri_quad(const StaggeredMesh& mesh, int t, int degree) {
  const auto p = mesh.tri_points(t);
  return map_to_triangle(triangle_rule(degree), p[0], p[1], p[2]);
}

PhysQuad edge_quad(const StaggeredMesh& mesh, const Edge& e, int degree) {
  return map_to_segment(segment_rule(degree), mesh.points[e.va], mesh.points[e.vb]);
}

// Weighted cross Gram on an edge: G(i, j) = sum_p w_p k_p phi_row(p, i) phi_col(p, j).
Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& phi_row, const Eigen::MatrixXd& phi_col,
                              const PhysQuad& q, const Eigen::VectorXd& kernel) {
  Eigen::VectorXd wk(q.size());
  for (int p = 0; p < q.size(); ++p) wk[p] = q.weights[p] * kernel[p];
  return phi_row.transpose() * wk.asDiagonal() * phi_col;
}

Eigen::VectorXd unit_kernel(int n) { return Eigen::VectorXd::Ones(n); }

}  // namespace

int assembly_volume_degree(int k) { return std::max(2 * k, 3 * k - 1) + 1; }

int assembly_edge_degree(int k) { return 3 * k + 2; }

SparseMat assemble_mass_H(const DofMaps& maps, const AssemblyOptions& opt) {
  const StaggeredMesh& mesh = maps.mesh();
  const int k = maps.k();
  const int n_scalar = (k + 1) * (k + 2) / 2;
  const int deg = assembly_volume_degree(k) + opt.quad_bump;
  Triplets trips;
  for (int t = 0; t < mesh.n_tris(); ++t) {
    const PhysQuad q = tri_quad(mesh, t, deg);
    const Eigen::MatrixXd phi = maps.tri_basis(t).eval(q.points);
    const Eigen::MatrixXd s = weighted_gram(phi, phi, q, unit_kernel(q.size()));
    Eigen::MatrixXd morth = Eigen::MatrixXd::Zero(4 * n_scalar, 4 * n_scalar);
    for (int a = 0; a < n_scalar; ++a)
      for (int b = 0; b < n_scalar; ++b)
        for (int c2 = 0; c2 < 4; ++c2) morth(4 * a + c2, 4 * b + c2) = s(a, b);
    const Eigen::MatrixXd& ch = maps.change_of_basis(Space::H, t);
    scatter(ch.transpose() * morth * ch, maps.local_to_global(Space::H, t),
            maps.local_to_global(Space::H, t), trips);
  }
  return build(maps.dim(Space::H), maps.dim(Space::H), trips);
}

SparseMat assemble_B(const DofMaps& maps, const AssemblyOptions& opt) {
  const StaggeredMesh& mesh = maps.mesh();
  const int k = maps.k();
  const int n_scalar = (k + 1) * (k + 2) / 2;
  const int vdeg = assembly_volume_degree(k) + opt.quad_bump;
  const int edeg = assembly_edge_degree(k) + opt.quad_bump;
  Triplets trips;

  // Volume part: (H, grad v).
  for (int t = 0; t < mesh.n_tris(); ++t) {
    const PhysQuad q = tri_quad(mesh, t, vdeg);
    Eigen::MatrixXd phi, gx, gy;
    maps.tri_basis(t).eval_with_grad(q.points, phi, gx, gy);
    const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(q.weights.data(), q.size());
    // dc(s, s') = int phi_s d_c phi_s'.
    const Eigen::MatrixXd dx = phi.transpose() * w.asDiagonal() * gx;
    const Eigen::MatrixXd dy = phi.transpose() * w.asDiagonal() * gy;
    Eigen::MatrixXd eorth = Eigen::MatrixXd::Zero(2 * n_scalar, 4 * n_scalar);
    for (int sv = 0; sv < n_scalar; ++sv)
      for (int sh = 0; sh < n_scalar; ++sh)
        for (int r = 0; r < 2; ++r) {
          eorth(2 * sv + r, 4 * sh + 2 * r + 0) = dx(sh, sv);
          eorth(2 * sv + r, 4 * sh + 2 * r + 1) = dy(sh, sv);
        }
    const Eigen::MatrixXd a = maps.change_of_basis(Space::V, t).transpose() * eorth *
                              maps.change_of_basis(Space::H, t);
    scatter(a, maps.local_to_global(Space::V, t), maps.local_to_global(Space::H, t), trips);
  }

  // Edge parts.  The tested H component (Hn on primal edges, t.Hn on dual
  // edges) is single-valued; it is evaluated from the plus triangle.
  for (int ei = 0; ei < mesh.n_edges(); ++ei) {
    const Edge& e = mesh.edges[ei];
    const PhysQuad q = edge_quad(mesh, e, edeg);
    const Eigen::MatrixXd phi_h = maps.tri_basis(e.tri_plus).eval(q.points);
    const int sides = (e.tri_minus >= 0) ? 2 : 1;
    for (int side = 0; side < sides; ++side) {
      const int tv = (side == 0) ? e.tri_plus : e.tri_minus;
      const double sgn = (side == 0) ? 1.0 : -1.0;
      const Eigen::MatrixXd phi_v = maps.tri_basis(tv).eval(q.points);
      const Eigen::MatrixXd g = weighted_gram(phi_v, phi_h, q, unit_kernel(q.size()));
      Eigen::MatrixXd eorth = Eigen::MatrixXd::Zero(2 * n_scalar, 4 * n_scalar);
      if (e.is_primal()) {
        // -<Hn, [v]>
        for (int sv = 0; sv < n_scalar; ++sv)
          for (int sh = 0; sh < n_scalar; ++sh)
            for (int r = 0; r < 2; ++r)
              for (int c = 0; c < 2; ++c)
                eorth(2 * sv + r, 4 * sh + 2 * r + c) = -sgn * e.normal[c] * g(sv, sh);
      } else {
        // -<t.Hn, [v.t]>
        for (int sv = 0; sv < n_scalar; ++sv)
          for (int sh = 0; sh < n_scalar; ++sh)
            for (int cv = 0; cv < 2; ++cv)
              for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c)
                  eorth(2 * sv + cv, 4 * sh + 2 * r + c) +=
                      -sgn * e.tangent[cv] * e.tangent[r] * e.normal[c] * g(sv, sh);
      }
      const Eigen::MatrixXd a = maps.change_of_basis(Space::V, tv).transpose() * eorth *
                                maps.change_of_basis(Space::H, e.tri_plus);
      scatter(a, maps.local_to_global(Space::V, tv),
              maps.local_to_global(Space::H, e.tri_plus), trips);
    }
  }
  return build(maps.dim(Space::V), maps.dim(Space::H), trips);
}

SparseMat assemble_b(const DofMaps& maps, const AssemblyOptions& opt) {
  const StaggeredMesh& mesh = maps.mesh();
  const int k = maps.k();
  const int n_scalar = (k + 1) * (k + 2) / 2;
  const int vdeg = assembly_volume_degree(k) + opt.quad_bump;
  const int edeg = assembly_edge_degree(k) + opt.quad_bump;
  Triplets trips;

  // Volume part: -(v, grad q).
  for (int t = 0; t < mesh.n_tris(); ++t) {
    const PhysQuad q = tri_quad(mesh, t, vdeg);
    Eigen::MatrixXd phi, gx, gy;
    maps.tri_basis(t).eval_with_grad(q.points, phi, gx, gy);
    const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(q.weights.data(), q.size());
    const Eigen::MatrixXd dx = phi.transpose() * w.asDiagonal() * gx;
    const Eigen::MatrixXd dy = phi.transpose() * w.asDiagonal() * gy;
    Eigen::MatrixXd eorth(n_scalar, 2 * n_scalar);
    for (int sq = 0; sq < n_scalar; ++sq)
      for (int sv = 0; sv < n_scalar; ++sv) {
        eorth(sq, 2 * sv + 0) = -dx(sv, sq);
        eorth(sq, 2 * sv + 1) = -dy(sv, sq);
      }
    const Eigen::MatrixXd a = maps.change_of_basis(Space::Q, t).transpose() * eorth *
                              maps.change_of_basis(Space::V, t);
    scatter(a, maps.local_to_global(Space::Q, t), maps.local_to_global(Space::V, t), trips);
  }

  // Dual edge part: +<v.n, [q]>; v.n is single-valued, evaluated from the
  // plus triangle.
  for (int ei = mesh.n_primal_edges; ei < mesh.n_edges(); ++ei) {
    const Edge& e = mesh.edges[ei];
    const PhysQuad q = edge_quad(mesh, e, edeg);
    const Eigen::MatrixXd phi_v = maps.tri_basis(e.tri_plus).eval(q.points);
    for (int side = 0; side < 2; ++side) {
      const int tq = (side == 0) ? e.tri_plus : e.tri_minus;
      const double sgn = (side == 0) ? 1.0 : -1.0;
      const Eigen::MatrixXd phi_q = maps.tri_basis(tq).eval(q.points);
      const Eigen::MatrixXd g = weighted_gram(phi_q, phi_v, q, unit_kernel(q.size()));
      Eigen::MatrixXd eorth(n_scalar, 2 * n_scalar);
      for (int sq = 0; sq < n_scalar; ++sq)
        for (int sv = 0; sv < n_scalar; ++sv) {
          eorth(sq, 2 * sv + 0) = sgn * e.normal.x() * g(sq, sv);
          eorth(sq, 2 * sv + 1) = sgn * e.normal.y() * g(sq, sv);
        }
      const Eigen::MatrixXd a = maps.change_of_basis(Space::Q, tq).transpose() * eorth *
                                maps.change_of_basis(Space::V, e.tri_plus);
      scatter(a, maps.local_to_global(Space::Q, tq),
              maps.local_to_global(Space::V, e.tri_plus), trips);
    }
  }
  return build(maps.dim(Space::Q), maps.dim(Space::V), trips);
}

SparseMat assemble_N(const DofMaps& maps, const FEField& w, const AssemblyOptions& opt) {
  if (w.space != Space::V)
    throw std::invalid_argument("assemble_N: transport field must be a V-field");
  const StaggeredMesh& mesh = maps.mesh();
  const int k = maps.k();
  const int n_scalar = (k + 1) * (k + 2) / 2;
  const int vdeg = assembly_volume_degree(k) + opt.quad_bump;
  const int edeg = assembly_edge_degree(k) + opt.quad_bump;
  Triplets trips;

  // Volume part: -(psi (x) w, grad v) = -int phi_s (w . grad phi_s') per
  // vector component.
  for (int t = 0; t < mesh.n_tris(); ++t) {
    const PhysQuad q = tri_quad(mesh, t, vdeg);
    Eigen::MatrixXd phi, gx, gy;
    maps.tri_basis(t).eval_with_grad(q.points, phi, gx, gy);
    const Eigen::MatrixXd wv = eval_values(maps, w, t, q.points);  // [wx wy]
    Eigen::MatrixXd wgrad(q.size(), n_scalar);  // (w . grad phi_s')(p)
    for (int p = 0; p < q.size(); ++p)
      for (int s = 0; s < n_scalar; ++s)
        wgrad(p, s) = wv(p, 0) * gx(p, s) + wv(p, 1) * gy(p, s);
    const Eigen::VectorXd qw = Eigen::Map<const Eigen::VectorXd>(q.weights.data(), q.size());
    const Eigen::MatrixXd nk = wgrad.transpose() * qw.asDiagonal() * phi;  // (s_v, s_psi)
    Eigen::MatrixXd eorth = Eigen::MatrixXd::Zero(2 * n_scalar, 2 * n_scalar);
    for (int sv = 0; sv < n_scalar; ++sv)
      for (int sp = 0; sp < n_scalar; ++sp)
        for (int a = 0; a < 2; ++a) eorth(2 * sv + a, 2 * sp + a) = -nk(sv, sp);
    const Eigen::MatrixXd& cv = maps.change_of_basis(Space::V, t);
    scatter(cv.transpose() * eorth * cv, maps.local_to_global(Space::V, t),
            maps.local_to_global(Space::V, t), trips);
  }

  // Edge parts: <{w.n}, {psi}.[v]> on interior edges, <|{w.n}|, [psi].[v]>
  // on all edges.
  for (int ei = 0; ei < mesh.n_edges(); ++ei) {
    const Edge& e = mesh.edges[ei];
    const PhysQuad q = edge_quad(mesh, e, edeg);
    const bool interior = e.tri_minus >= 0;

    Eigen::VectorXd wn_avg(q.size());
    {
      const Eigen::MatrixXd wp = eval_values(maps, w, e.tri_plus, q.points);
      if (interior) {
        const Eigen::MatrixXd wm = eval_values(maps, w, e.tri_minus, q.points);
        for (int p = 0; p < q.size(); ++p)
          wn_avg[p] = 0.5 * ((wp(p, 0) + wm(p, 0)) * e.normal.x() +
                             (wp(p, 1) + wm(p, 1)) * e.normal.y());
      } else {
        for (int p = 0; p < q.size(); ++p)
          wn_avg[p] = wp(p, 0) * e.normal.x() + wp(p, 1) * e.normal.y();
      }
    }

    const int sides = interior ? 2 : 1;
    for (int side_p = 0; side_p < sides; ++side_p) {
      const int tpsi = (side_p == 0) ? e.tri_plus : e.tri_minus;
      const double avg_p = interior ? 0.5 : 1.0;
      const double jmp_p = (side_p == 0) ? 1.0 : -1.0;
      const Eigen::MatrixXd phi_p = maps.tri_basis(tpsi).eval(q.points);
      for (int side_v = 0; side_v < sides; ++side_v) {
        const int tv = (side_v == 0) ? e.tri_plus : e.tri_minus;
        const double jmp_v = (side_v == 0) ? 1.0 : -1.0;
        const Eigen::MatrixXd phi_v = maps.tri_basis(tv).eval(q.points);
        Eigen::VectorXd kernel(q.size());
        for (int p = 0; p < q.size(); ++p) {
          const double upwind = std::abs(wn_avg[p]) * jmp_p * jmp_v;
          const double central = interior ? wn_avg[p] * avg_p * jmp_v : 0.0;
          kernel[p] = central + upwind;
        }
        const Eigen::MatrixXd g = weighted_gram(phi_v, phi_p, q, kernel);
        Eigen::MatrixXd eorth = Eigen::MatrixXd::Zero(2 * n_scalar, 2 * n_scalar);
        for (int sv = 0; sv < n_scalar; ++sv)
          for (int sp = 0; sp < n_scalar; ++sp)
            for (int a = 0; a < 2; ++a) eorth(2 * sv + a, 2 * sp + a) = g(sv, sp);
        const Eigen::MatrixXd a = maps.change_of_basis(Space::V, tv).transpose() * eorth *
                                  maps.change_of_basis(Space::V, tpsi);
        scatter(a, maps.local_to_global(Space::V, tv), maps.local_to_global(Space::V, tpsi),
                trips);
      }
    }
  }
  return build(maps.dim(Space::V), maps.dim(Space::V), trips);
}

Eigen::VectorXd assemble_load_V(const DofMaps& maps, const VectorFn& f,
                                const AssemblyOptions& opt) {
  const StaggeredMesh& mesh = maps.mesh();
  const int k = maps.k();
  const int n_scalar = (k + 1) * (k + 2) / 2;
  const int deg = moment_quad_degree(k) + opt.quad_bump;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(maps.dim(Space::V));
  for (int t = 0; t < mesh.n_tris(); ++t) {
    const PhysQuad q = tri_quad(mesh, t, deg);
    const Eigen::MatrixXd phi = maps.tri_basis(t).eval(q.points);
    Eigen::VectorXd rorth = Eigen::VectorXd::Zero(2 * n_scalar);
    for (int p = 0; p < q.size(); ++p) {
      const Vec2 fp = f(q.points[p]);
      for (int s = 0; s < n_scalar; ++s) {
        const double wphi = q.weights[p] * phi(p, s);
        rorth[2 * s + 0] += wphi * fp.x();
        rorth[2 * s + 1] += wphi * fp.y();
      }
    }
    const Eigen::VectorXd rdof = maps.change_of_basis(Space::V, t).transpose() * rorth;
    const std::vector<int>& map = maps.local_to_global(Space::V, t);
    for (std::size_t i = 0; i < map.size(); ++i) rhs[map[i]] += rdof[i];
  }
  return rhs;
}

Eigen::VectorXd assemble_bdry_H(const DofMaps& maps, const VectorFn& g,
                                const AssemblyOptions& opt) {
  const StaggeredMesh& mesh = maps.mesh();
  const int k = maps.k();
  const int n_scalar = (k + 1) * (k + 2) / 2;
  const int deg = moment_quad_degree(k) + opt.quad_bump;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(maps.dim(Space::H));
  for (int ei = 0; ei < mesh.n_edges(); ++ei) {
    const Edge& e = mesh.edges[ei];
    if (!e.is_boundary()) continue;
    const PhysQuad q = edge_quad(mesh, e, deg);
    const Eigen::MatrixXd phi = maps.tri_basis(e.tri_plus).eval(q.points);
    Eigen::VectorXd rorth = Eigen::VectorXd::Zero(4 * n_scalar);
    for (int p = 0; p < q.size(); ++p) {
      const Vec2 gp = g(q.points[p]);
      for (int s = 0; s < n_scalar; ++s) {
        const double wphi = q.weights[p] * phi(p, s);
        for (int r = 0; r < 2; ++r)
          for (int c = 0; c < 2; ++c)
            rorth[4 * s + 2 * r + c] += wphi * gp[r] * e.normal[c];
      }
    }
    const Eigen::VectorXd rdof =
        maps.change_of_basis(Space::H, e.tri_plus).transpose() * rorth;
    const std::vector<int>& map = maps.local_to_global(Space::H, e.tri_plus);
    for (std::size_t i = 0; i < map.size(); ++i) rhs[map[i]] += rdof[i];
  }
  return rhs;
}

Eigen::VectorXd assemble_bdry_V(const DofMaps& maps, const VectorFn& g,
                                const AssemblyOptions& opt) {
  const StaggeredMesh& mesh = maps.mesh();
  const int k = maps.k();
  const int n_scalar = (k + 1) * (k + 2) / 2;
  const int deg = moment_quad_degree(k) + opt.quad_bump;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(maps.dim(Space::V));
  for (int ei = 0; ei < mesh.n_edges(); ++ei) {
    const Edge& e = mesh.edges[ei];
    if (!e.is_boundary()) continue;
    const PhysQuad q = edge_quad(mesh, e, deg);
    const Eigen::MatrixXd phi = maps.tri_basis(e.tri_plus).eval(q.points);
    Eigen::VectorXd rorth = Eigen::VectorXd::Zero(2 * n_scalar);
    for (int p = 0; p < q.size(); ++p) {
      const Vec2 gp = g(q.points[p]);
      const double gn = gp.dot(e.normal);
      const double kernel = std::abs(gn) - gn;
      for (int s = 0; s < n_scalar; ++s) {
        const double wphi = q.weights[p] * phi(p, s) * kernel;
        rorth[2 * s + 0] += wphi * gp.x();
        rorth[2 * s + 1] += wphi * gp.y();
      }
    }
    const Eigen::VectorXd rdof =
        maps.change_of_basis(Space::V, e.tri_plus).transpose() * rorth;
    const std::vector<int>& map = maps.local_to_global(Space::V, e.tri_plus);
    for (std::size_t i = 0; i < map.size(); ++i) rhs[map[i]] += rdof[i];
  }
  return rhs;
}

Eigen::VectorXd assemble_bdry_Q(const DofMaps& maps, const VectorFn& g,
                                const AssemblyOptions& opt) {
  const StaggeredMesh& mesh = maps.mesh();
  const int k = maps.k();
  const int n_scalar = (k + 1) * (k + 2) / 2;
  const int deg = moment_quad_degree(k) + opt.quad_bump;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(maps.dim(Space::Q));
  for (int ei = 0; ei < mesh.n_edges(); ++ei) {
    const Edge& e = mesh.edges[ei];
    if (!e.is_boundary()) continue;
    const PhysQuad q = edge_quad(mesh, e, deg);
    const Eigen::MatrixXd phi = maps.tri_basis(e.tri_plus).eval(q.points);
    Eigen::VectorXd rorth = Eigen::VectorXd::Zero(n_scalar);
    for (int p = 0; p < q.size(); ++p) {
      const double gn = g(q.points[p]).dot(e.normal);
      for (int s = 0; s < n_scalar; ++s) rorth[s] += q.weights[p] * gn * phi(p, s);
    }
    const Eigen::VectorXd rdof =
        maps.change_of_basis(Space::Q, e.tri_plus).transpose() * rorth;
    const std::vector<int>& map = maps.local_to_global(Space::Q, e.tri_plus);
    for (std::size_t i = 0; i < map.size(); ++i) rhs[map[i]] += rdof[i];
  }
  return rhs;
}

Eigen::VectorXd assemble_q_integral(const DofMaps& maps) {
  const StaggeredMesh& mesh = maps.mesh();
  const int k = maps.k();
  const int n_scalar = (k + 1) * (k + 2) / 2;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(maps.dim(Space::Q));
  for (int t = 0; t < mesh.n_tris(); ++t) {
    const PhysQuad q = tri_quad(mesh, t, k);
    const Eigen::MatrixXd phi = maps.tri_basis(t).eval(q.points);
    Eigen::VectorXd rorth = Eigen::VectorXd::Zero(n_scalar);
    for (int p = 0; p < q.size(); ++p)
      for (int s = 0; s < n_scalar; ++s) rorth[s] += q.weights[p] * phi(p, s);
    const Eigen::VectorXd rdof = maps.change_of_basis(Space::Q, t).transpose() * rorth;
    const std::vector<int>& map = maps.local_to_global(Space::Q, t);
    for (std::size_t i = 0; i < map.size(); ++i) out[map[i]] += rdof[i];
  }
  return out;
}

}  // namespace sdg
