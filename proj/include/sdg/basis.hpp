#pragma once

#include "sdg/geometry.hpp"
#include "sdg/quadrature.hpp"

#include <vector>

namespace sdg {

/// L2-orthonormal polynomial basis of degree <= k on a physical triangle,
/// built by modified Gram-Schmidt (with re-orthogonalization) applied to
/// scaled-centered monomials ((x-c)/l)^a ((y-c)/l)^b ordered by total degree.
/// Because the ordering is degree-graded, the leading k(k+1)/2 members span
/// the degree k-1 subspace.
class TriangleBasis {
 public:
  TriangleBasis() = default;
  TriangleBasis(const Vec2& v0, const Vec2& v1, const Vec2& v2, int k);

  int degree() const { return k_; }
  int size() const { return static_cast<int>(exps_.size()); }
  const Vec2& center() const { return center_; }
  double scale() const { return scale_; }

  /// Values of all members at the given points: (npts x size).
  Eigen::MatrixXd eval(const std::vector<Vec2>& pts) const;

  /// Values and Cartesian gradient components at the given points.
  void eval_with_grad(const std::vector<Vec2>& pts, Eigen::MatrixXd& vals, Eigen::MatrixXd& gx,
                      Eigen::MatrixXd& gy) const;

 private:
  Eigen::MatrixXd monomials(const std::vector<Vec2>& pts) const;

  int k_ = -1;
  Vec2 center_{0.0, 0.0};
  double scale_ = 1.0;
  std::vector<std::pair<int, int>> exps_;  // monomial exponents, degree-graded
  Eigen::MatrixXd coeff_;                  // column j: monomial coefficients of member j
};

/// Orthonormal Legendre basis on an edge of length h_e, evaluated at reference
/// abscissae xi in [-1,1]: row p, column i holds sqrt((2i+1)/h_e) P_i(xi_p).
/// The functions are orthonormal in the L2 inner product along the edge.
Eigen::MatrixXd edge_basis_values(int k, double h_e, const std::vector<double>& xi);

}  // namespace sdg
