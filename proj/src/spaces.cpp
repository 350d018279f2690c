#include "sdg/spaces.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sdg {

namespace {

int space_index(Space s) { return static_cast<int>(s); }

std::vector<double> segment_xi(const QuadRule& rule) {
  std::vector<double> xi(rule.points.size());
  for (std::size_t i = 0; i < xi.size(); ++i) xi[i] = rule.points[i].x();
  return xi;
}

// Moments of the triangle's scalar basis against the orthonormal Legendre
// functions of edge e: (k+1) x n_scalar matrix of integrals over e.
Eigen::MatrixXd edge_moment_matrix(const StaggeredMesh& mesh, const TriangleBasis& basis,
                                   const Edge& e, int k, int quad_degree) {
  const QuadRule& rule = segment_rule(quad_degree);
  const PhysQuad q = map_to_segment(rule, mesh.points[e.va], mesh.points[e.vb]);
  const Eigen::MatrixXd leg = edge_basis_values(k, e.length, segment_xi(rule));
  const Eigen::MatrixXd phi = basis.eval(q.points);
  const Eigen::Map<const Eigen::VectorXd> w(q.weights.data(), q.size());
  return leg.transpose() * w.asDiagonal() * phi;
}

}  // namespace

int moment_quad_degree(int k) { return 2 * k + 6; }

DofMaps::DofMaps(const StaggeredMesh& mesh, int k) : mesh_(&mesh), k_(k) {
  if (k < 1) throw std::invalid_argument("DofMaps: polynomial degree k must be >= 1");
  n_scalar_ = (k + 1) * (k + 2) / 2;
  n_interior_ = k * (k + 1) / 2;
  const int n_tris = mesh.n_tris();
  const int kp1 = k + 1;

  tri_basis_.reserve(n_tris);
  for (int t = 0; t < n_tris; ++t) {
    const auto p = mesh.tri_points(t);
    tri_basis_.emplace_back(p[0], p[1], p[2], k);
  }

  for (int s = 0; s < 3; ++s) {
    l2g_[s].resize(n_tris);
    cob_[s].resize(n_tris);
  }

  const int qdeg = moment_quad_degree(k);
  for (int t = 0; t < n_tris; ++t) {
    const Triangle& tri = mesh.tris[t];
    const TriangleBasis& basis = tri_basis_[t];
    const Edge& ep = mesh.edges[tri.primal_edge];
    const Edge& ed0 = mesh.edges[tri.dual_edges[0]];
    const Edge& ed1 = mesh.edges[tri.dual_edges[1]];

    const Eigen::MatrixXd mom_p = edge_moment_matrix(mesh, basis, ep, k, qdeg);
    const Eigen::MatrixXd mom_d0 = edge_moment_matrix(mesh, basis, ed0, k, qdeg);
    const Eigen::MatrixXd mom_d1 = edge_moment_matrix(mesh, basis, ed1, k, qdeg);

    // Interior moments (phi_sf, phi_s) over the triangle.
    const auto pts = mesh.tri_points(t);
    const PhysQuad vq = map_to_triangle(triangle_rule(qdeg), pts[0], pts[1], pts[2]);
    const Eigen::MatrixXd phi = basis.eval(vq.points);
    const Eigen::Map<const Eigen::VectorXd> vw(vq.weights.data(), vq.size());
    const Eigen::MatrixXd vol_mom =
        phi.leftCols(n_interior_).transpose() * vw.asDiagonal() * phi;

    // ---- H: 2(k+1) primal moments of Hn, (k+1) dual moments of t.Hn per
    //      dual edge, 2k(k+1) interior moments.
    {
      const int nloc = 4 * n_scalar_;
      Eigen::MatrixXd d = Eigen::MatrixXd::Zero(nloc, nloc);
      std::vector<int>& map = l2g_[space_index(Space::H)][t];
      map.resize(nloc);
      int row = 0;
      for (int c = 0; c < 2; ++c)
        for (int i = 0; i <= k; ++i, ++row) {
          map[row] = h_primal_offset(tri.primal_edge) + c * kp1 + i;
          for (int s = 0; s < n_scalar_; ++s)
            for (int col = 0; col < 2; ++col)
              d(row, 4 * s + 2 * c + col) = ep.normal[col] * mom_p(i, s);
        }
      for (int de = 0; de < 2; ++de) {
        const Edge& ed = (de == 0) ? ed0 : ed1;
        const Eigen::MatrixXd& mom = (de == 0) ? mom_d0 : mom_d1;
        for (int i = 0; i <= k; ++i, ++row) {
          map[row] = h_dual_offset(tri.dual_edges[de]) + i;
          for (int s = 0; s < n_scalar_; ++s)
            for (int r = 0; r < 2; ++r)
              for (int col = 0; col < 2; ++col)
                d(row, 4 * s + 2 * r + col) = ed.tangent[r] * ed.normal[col] * mom(i, s);
        }
      }
      for (int sf = 0; sf < n_interior_; ++sf)
        for (int c2 = 0; c2 < 4; ++c2, ++row) {
          map[row] = h_interior_offset(t) + 4 * sf + c2;
          for (int s = 0; s < n_scalar_; ++s) d(row, 4 * s + c2) = vol_mom(sf, s);
        }
      cob_[space_index(Space::H)][t] = d.partialPivLu().inverse();
      max_cond_ = std::max(max_cond_, d.cwiseAbs().rowwise().sum().maxCoeff() *
                                          cob_[space_index(Space::H)][t]
                                              .cwiseAbs()
                                              .rowwise()
                                              .sum()
                                              .maxCoeff());
    }

    // ---- V: (k+1) dual moments of v.n per dual edge, k(k+1) interior moments.
    {
      const int nloc = 2 * n_scalar_;
      Eigen::MatrixXd d = Eigen::MatrixXd::Zero(nloc, nloc);
      std::vector<int>& map = l2g_[space_index(Space::V)][t];
      map.resize(nloc);
      int row = 0;
      for (int de = 0; de < 2; ++de) {
        const Edge& ed = (de == 0) ? ed0 : ed1;
        const Eigen::MatrixXd& mom = (de == 0) ? mom_d0 : mom_d1;
        for (int i = 0; i <= k; ++i, ++row) {
          map[row] = v_dual_offset(tri.dual_edges[de]) + i;
          for (int s = 0; s < n_scalar_; ++s)
            for (int c = 0; c < 2; ++c) d(row, 2 * s + c) = ed.normal[c] * mom(i, s);
        }
      }
      for (int sf = 0; sf < n_interior_; ++sf)
        for (int c = 0; c < 2; ++c, ++row) {
          map[row] = v_interior_offset(t) + 2 * sf + c;
          for (int s = 0; s < n_scalar_; ++s) d(row, 2 * s + c) = vol_mom(sf, s);
        }
      cob_[space_index(Space::V)][t] = d.partialPivLu().inverse();
      max_cond_ = std::max(max_cond_, d.cwiseAbs().rowwise().sum().maxCoeff() *
                                          cob_[space_index(Space::V)][t]
                                              .cwiseAbs()
                                              .rowwise()
                                              .sum()
                                              .maxCoeff());
    }

    // ---- Q: (k+1) primal moments of q, k(k+1)/2 interior moments.
    {
      const int nloc = n_scalar_;
      Eigen::MatrixXd d = Eigen::MatrixXd::Zero(nloc, nloc);
      std::vector<int>& map = l2g_[space_index(Space::Q)][t];
      map.resize(nloc);
      int row = 0;
      for (int i = 0; i <= k; ++i, ++row) {
        map[row] = q_primal_offset(tri.primal_edge) + i;
        for (int s = 0; s < n_scalar_; ++s) d(row, s) = mom_p(i, s);
      }
      for (int sf = 0; sf < n_interior_; ++sf, ++row) {
        map[row] = q_interior_offset(t) + sf;
        for (int s = 0; s < n_scalar_; ++s) d(row, s) = vol_mom(sf, s);
      }
      cob_[space_index(Space::Q)][t] = d.partialPivLu().inverse();
      max_cond_ = std::max(max_cond_, d.cwiseAbs().rowwise().sum().maxCoeff() *
                                          cob_[space_index(Space::Q)][t]
                                              .cwiseAbs()
                                              .rowwise()
                                              .sum()
                                              .maxCoeff());
    }
  }

  if (max_cond_ > 1e12) {
    std::ostringstream os;
    os << "DofMaps: local DOF matrix is nearly singular (condition estimate " << max_cond_
       << "); unisolvence fails on this mesh";
    throw MeshError(os.str());
  }
}

int DofMaps::dim(Space s) const {
  const StaggeredMesh& m = *mesh_;
  const int kp1 = k_ + 1;
  switch (s) {
    case Space::H:
      return 2 * kp1 * m.n_primal_edges + kp1 * m.n_dual_edges + 4 * n_interior_ * m.n_tris();
    case Space::V:
      return kp1 * m.n_dual_edges + 2 * n_interior_ * m.n_tris();
    case Space::Q:
      return kp1 * m.n_primal_edges + n_interior_ * m.n_tris();
  }
  return 0;
}

int DofMaps::local_dim(Space s) const {
  switch (s) {
    case Space::H:
      return 4 * n_scalar_;
    case Space::V:
      return 2 * n_scalar_;
    case Space::Q:
      return n_scalar_;
  }
  return 0;
}

const std::vector<int>& DofMaps::local_to_global(Space s, int tri) const {
  return l2g_[space_index(s)][tri];
}

const Eigen::MatrixXd& DofMaps::change_of_basis(Space s, int tri) const {
  return cob_[space_index(s)][tri];
}

const TriangleBasis& DofMaps::tri_basis(int tri) const { return tri_basis_[tri]; }

int DofMaps::h_primal_offset(int edge) const { return edge * 2 * (k_ + 1); }

int DofMaps::h_dual_offset(int edge) const {
  return mesh_->n_primal_edges * 2 * (k_ + 1) + (edge - mesh_->n_primal_edges) * (k_ + 1);
}

int DofMaps::h_interior_offset(int tri) const {
  return mesh_->n_primal_edges * 2 * (k_ + 1) + mesh_->n_dual_edges * (k_ + 1) +
         tri * 4 * n_interior_;
}

int DofMaps::v_dual_offset(int edge) const { return (edge - mesh_->n_primal_edges) * (k_ + 1); }

int DofMaps::v_interior_offset(int tri) const {
  return mesh_->n_dual_edges * (k_ + 1) + tri * 2 * n_interior_;
}

int DofMaps::q_primal_offset(int edge) const { return edge * (k_ + 1); }

int DofMaps::q_interior_offset(int tri) const {
  return mesh_->n_primal_edges * (k_ + 1) + tri * n_interior_;
}

FEField interpolate_H(const DofMaps& maps, const TensorFn& fn) {
  const StaggeredMesh& mesh = maps.mesh();
  const int k = maps.k();
  const int kp1 = k + 1;
  FEField out;
  out.space = Space::H;
  out.coeffs = Eigen::VectorXd::Zero(maps.dim(Space::H));

  const QuadRule& srule = segment_rule(moment_quad_degree(k));
  const std::vector<double> xi = segment_xi(srule);
  for (int ei = 0; ei < mesh.n_edges(); ++ei) {
    const Edge& e = mesh.edges[ei];
    const PhysQuad q = map_to_segment(srule, mesh.points[e.va], mesh.points[e.vb]);
    const Eigen::MatrixXd leg = edge_basis_values(k, e.length, xi);
    if (e.is_primal()) {
      const int base = maps.h_primal_offset(ei);
      for (int p = 0; p < q.size(); ++p) {
        const Vec2 gn = fn(q.points[p]) * e.normal;
        for (int c = 0; c < 2; ++c)
          for (int i = 0; i <= k; ++i)
            out.coeffs[base + c * kp1 + i] += q.weights[p] * gn[c] * leg(p, i);
      }
    } else {
      const int base = maps.h_dual_offset(ei);
      for (int p = 0; p < q.size(); ++p) {
        const double tgn = e.tangent.dot(fn(q.points[p]) * e.normal);
        for (int i = 0; i <= k; ++i) out.coeffs[base + i] += q.weights[p] * tgn * leg(p, i);
      }
    }
  }

  const QuadRule& trule = triangle_rule(moment_quad_degree(k));
  const int n_int = k * kp1 / 2;
  for (int t = 0; t < mesh.n_tris(); ++t) {
    const auto pts = mesh.tri_points(t);
    const PhysQuad q = map_to_triangle(trule, pts[0], pts[1], pts[2]);
    const Eigen::MatrixXd phi = maps.tri_basis(t).eval(q.points);
    const int base = maps.h_interior_offset(t);
    for (int p = 0; p < q.size(); ++p) {
      const Mat2 g = fn(q.points[p]);
      for (int s = 0; s < n_int; ++s) {
        const double wphi = q.weights[p] * phi(p, s);
        out.coeffs[base + 4 * s + 0] += wphi * g(0, 0);
        out.coeffs[base + 4 * s + 1] += wphi * g(0, 1);
        out.coeffs[base + 4 * s + 2] += wphi * g(1, 0);
        out.coeffs[base + 4 * s + 3] += wphi * g(1, 1);
      }
    }
  }
  return out;
}

FEField interpolate_V(const DofMaps& maps, const VectorFn& fn) {
  const StaggeredMesh& mesh = maps.mesh();
  const int k = maps.k();
  FEField out;
  out.space = Space::V;
  out.coeffs = Eigen::VectorXd::Zero(maps.dim(Space::V));

  const QuadRule& srule = segment_rule(moment_quad_degree(k));
  const std::vector<double> xi = segment_xi(srule);
  for (int ei = mesh.n_primal_edges; ei < mesh.n_edges(); ++ei) {
    const Edge& e = mesh.edges[ei];
    const PhysQuad q = map_to_segment(srule, mesh.points[e.va], mesh.points[e.vb]);
    const Eigen::MatrixXd leg = edge_basis_values(k, e.length, xi);
    const int base = maps.v_dual_offset(ei);
    for (int p = 0; p < q.size(); ++p) {
      const double vn = fn(q.points[p]).dot(e.normal);
      for (int i = 0; i <= k; ++i) out.coeffs[base + i] += q.weights[p] * vn * leg(p, i);
    }
  }

  const QuadRule& trule = triangle_rule(moment_quad_degree(k));
  const int n_int = k * (k + 1) / 2;
  for (int t = 0; t < mesh.n_tris(); ++t) {
    const auto pts = mesh.tri_points(t);
    const PhysQuad q = map_to_triangle(trule, pts[0], pts[1], pts[2]);
    const Eigen::MatrixXd phi = maps.tri_basis(t).eval(q.points);
    const int base = maps.v_interior_offset(t);
    for (int p = 0; p < q.size(); ++p) {
      const Vec2 v = fn(q.points[p]);
      for (int s = 0; s < n_int; ++s) {
        const double wphi = q.weights[p] * phi(p, s);
        out.coeffs[base + 2 * s + 0] += wphi * v.x();
        out.coeffs[base + 2 * s + 1] += wphi * v.y();
      }
    }
  }
  return out;
}

FEField interpolate_Q(const DofMaps& maps, const ScalarFn& fn) {
  const StaggeredMesh& mesh = maps.mesh();
  const int k = maps.k();
  FEField out;
  out.space = Space::Q;
  out.coeffs = Eigen::VectorXd::Zero(maps.dim(Space::Q));

  const QuadRule& srule = segment_rule(moment_quad_degree(k));
  const std::vector<double> xi = segment_xi(srule);
  for (int ei = 0; ei < mesh.n_primal_edges; ++ei) {
    const Edge& e = mesh.edges[ei];
    const PhysQuad q = map_to_segment(srule, mesh.points[e.va], mesh.points[e.vb]);
    const Eigen::MatrixXd leg = edge_basis_values(k, e.length, xi);
    const int base = maps.q_primal_offset(ei);
    for (int p = 0; p < q.size(); ++p)
      for (int i = 0; i <= k; ++i)
        out.coeffs[base + i] += q.weights[p] * fn(q.points[p]) * leg(p, i);
  }

  const QuadRule& trule = triangle_rule(moment_quad_degree(k));
  const int n_int = k * (k + 1) / 2;
  for (int t = 0; t < mesh.n_tris(); ++t) {
    const auto pts = mesh.tri_points(t);
    const PhysQuad q = map_to_triangle(trule, pts[0], pts[1], pts[2]);
    const Eigen::MatrixXd phi = maps.tri_basis(t).eval(q.points);
    const int base = maps.q_interior_offset(t);
    for (int p = 0; p < q.size(); ++p)
      for (int s = 0; s < n_int; ++s)
        out.coeffs[base + s] += q.weights[p] * fn(q.points[p]) * phi(p, s);
  }
  return out;
}

Eigen::VectorXd local_coeffs(const DofMaps& maps, const FEField& field, int tri) {
  const std::vector<int>& map = maps.local_to_global(field.space, tri);
  Eigen::VectorXd dofs(map.size());
  for (std::size_t i = 0; i < map.size(); ++i) dofs[i] = field.coeffs[map[i]];
  return maps.change_of_basis(field.space, tri) * dofs;
}

Eigen::MatrixXd eval_values(const DofMaps& maps, const FEField& field, int tri,
                            const std::vector<Vec2>& pts) {
  const Eigen::VectorXd c = local_coeffs(maps, field, tri);
  const Eigen::MatrixXd phi = maps.tri_basis(tri).eval(pts);
  const int ncomp = (field.space == Space::H) ? 4 : (field.space == Space::V) ? 2 : 1;
  const int n_scalar = phi.cols();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(phi.rows(), ncomp);
  for (int s = 0; s < n_scalar; ++s)
    for (int comp = 0; comp < ncomp; ++comp)
      out.col(comp) += c[ncomp * s + comp] * phi.col(s);
  return out;
}

Eigen::MatrixXd eval_gradients(const DofMaps& maps, const FEField& field, int tri,
                               const std::vector<Vec2>& pts) {
  const Eigen::VectorXd c = local_coeffs(maps, field, tri);
  Eigen::MatrixXd phi, gx, gy;
  maps.tri_basis(tri).eval_with_grad(pts, phi, gx, gy);
  const int ncomp = (field.space == Space::H) ? 4 : (field.space == Space::V) ? 2 : 1;
  const int n_scalar = phi.cols();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(phi.rows(), 2 * ncomp);
  for (int s = 0; s < n_scalar; ++s)
    for (int comp = 0; comp < ncomp; ++comp) {
      out.col(2 * comp + 0) += c[ncomp * s + comp] * gx.col(s);
      out.col(2 * comp + 1) += c[ncomp * s + comp] * gy.col(s);
    }
  return out;
}

double mean_value(const DofMaps& maps, const FEField& field) {
  if (field.space != Space::Q)
    throw std::invalid_argument("mean_value: expected a Q-field");
  const StaggeredMesh& mesh = maps.mesh();
  const QuadRule& trule = triangle_rule(maps.k());
  double integral = 0.0;
  double area = 0.0;
  for (int t = 0; t < mesh.n_tris(); ++t) {
    const auto pts = mesh.tri_points(t);
    const PhysQuad q = map_to_triangle(trule, pts[0], pts[1], pts[2]);
    const Eigen::MatrixXd vals = eval_values(maps, field, t, q.points);
    for (int p = 0; p < q.size(); ++p) integral += q.weights[p] * vals(p, 0);
    area += mesh.tris[t].area;
  }
  return integral / area;
}

}  // namespace sdg
