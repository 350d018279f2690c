#pragma once

#include "sdg/basis.hpp"
#include "sdg/mesh.hpp"

#include <array>
#include <functional>
#include <vector>

namespace sdg {

/// The three staggered spaces: H (2x2 tensor gradients), V (velocity),
/// Q (pressure).
enum class Space { H, V, Q };

using TensorFn = std::function<Mat2(const Vec2&)>;
using VectorFn = std::function<Vec2(const Vec2&)>;
using ScalarFn = std::function<double(const Vec2&)>;

/// A finite element function: the coefficient vector stores the values of the
/// global DOF functionals (edge moments against orthonormal Legendre functions
/// and interior moments against the orthonormal triangle basis).
struct FEField {
  Space space = Space::V;
  Eigen::VectorXd coeffs;
};

/// Global DOF numbering, per-triangle local-to-global maps, and per-triangle
/// change-of-basis matrices for the three staggered spaces.
///
/// Global layout (edge blocks first, then per-triangle interior blocks):
///   H: per primal edge 2(k+1) moments of Hn, per dual edge (k+1) moments of
///      t.Hn, per triangle 2k(k+1) interior moments;
///   V: per dual edge (k+1) moments of v.n, per triangle k(k+1) interior
///      moments;
///   Q: per primal edge (k+1) moments of q, per triangle k(k+1)/2 interior
///      moments.
/// Local layout per triangle: primal-edge block, dual-edge blocks in
/// ascending edge id, then the interior block.  Within blocks, vector/tensor
/// components interleave: member j of the local H basis is phi_{j/4} E_{j%4}
/// (E indexed row-major), member j of the V basis is phi_{j/2} e_{j%2}.
///
/// The mesh must outlive the DofMaps.  Immutable after construction.
class DofMaps {
 public:
  DofMaps(const StaggeredMesh& mesh, int k);

  const StaggeredMesh& mesh() const { return *mesh_; }
  int k() const { return k_; }

  int dim(Space s) const;
  int local_dim(Space s) const;
  const std::vector<int>& local_to_global(Space s, int tri) const;
  /// C_tau: maps local DOF values to coefficients in the orthonormal local
  /// basis (inverse of the local DOF matrix).
  const Eigen::MatrixXd& change_of_basis(Space s, int tri) const;
  const TriangleBasis& tri_basis(int tri) const;
  /// Largest local DOF-matrix condition estimate across triangles and spaces.
  double max_dof_condition() const { return max_cond_; }

  // Global offsets of edge/interior DOF blocks.
  int h_primal_offset(int edge) const;    // block of 2(k+1), component-major
  int h_dual_offset(int edge) const;      // block of (k+1)
  int h_interior_offset(int tri) const;   // block of 2k(k+1)
  int v_dual_offset(int edge) const;      // block of (k+1)
  int v_interior_offset(int tri) const;   // block of k(k+1)
  int q_primal_offset(int edge) const;    // block of (k+1)
  int q_interior_offset(int tri) const;   // block of k(k+1)/2

 private:
  const StaggeredMesh* mesh_;
  int k_;
  int n_scalar_;    // (k+1)(k+2)/2
  int n_interior_;  // k(k+1)/2
  double max_cond_ = 0.0;
  std::vector<TriangleBasis> tri_basis_;
  std::array<std::vector<std::vector<int>>, 3> l2g_;
  std::array<std::vector<Eigen::MatrixXd>, 3> cob_;
};

/// Quadrature degree used for DOF moments, interpolation, and error norms.
int moment_quad_degree(int k);

/// DOF interpolants of smooth data.
FEField interpolate_H(const DofMaps& maps, const TensorFn& fn);
FEField interpolate_V(const DofMaps& maps, const VectorFn& fn);
FEField interpolate_Q(const DofMaps& maps, const ScalarFn& fn);

/// Coefficients of the field on one triangle in the orthonormal local basis.
Eigen::VectorXd local_coeffs(const DofMaps& maps, const FEField& field, int tri);

/// Values at points inside triangle tri.  Column layout: Q: [q]; V: [vx vy];
/// H: [H00 H01 H10 H11].
Eigen::MatrixXd eval_values(const DofMaps& maps, const FEField& field, int tri,
                            const std::vector<Vec2>& pts);

/// Cartesian derivatives at points inside triangle tri.  Column layout:
/// Q: [qx qy]; V: [vx_x vx_y vy_x vy_y]; H: 8 columns in the same pattern.
Eigen::MatrixXd eval_gradients(const DofMaps& maps, const FEField& field, int tri,
                               const std::vector<Vec2>& pts);

/// Integral mean of a Q-field over the domain.
double mean_value(const DofMaps& maps, const FEField& field);

}  // namespace sdg
