#include "sdg/basis.hpp"

#include <cmath>

namespace sdg {

TriangleBasis::TriangleBasis(const Vec2& v0, const Vec2& v1, const Vec2& v2, int k) : k_(k) {
  if (k < 0) throw std::invalid_argument("TriangleBasis: degree must be >= 0");
  center_ = (v0 + v1 + v2) / 3.0;
  scale_ = std::sqrt(std::max({(v1 - v0).squaredNorm(), (v2 - v1).squaredNorm(),
                               (v0 - v2).squaredNorm()}));
  if (!(scale_ > 0.0)) throw MeshError("TriangleBasis: degenerate triangle");

  for (int t = 0; t <= k; ++t)
    for (int a = t; a >= 0; --a) exps_.emplace_back(a, t - a);
  const int m = size();

  const PhysQuad q = map_to_triangle(triangle_rule(2 * k), v0, v1, v2);
  const Eigen::MatrixXd v = monomials(q.points);
  const Eigen::Map<const Eigen::VectorXd> w(q.weights.data(), q.size());
  const Eigen::MatrixXd gram = v.transpose() * w.asDiagonal() * v;

  coeff_ = Eigen::MatrixXd::Identity(m, m);
  for (int j = 0; j < m; ++j) {
    Eigen::VectorXd c = Eigen::VectorXd::Unit(m, j);
    for (int pass = 0; pass < 2; ++pass)
      for (int i = 0; i < j; ++i) c -= coeff_.col(i).dot(gram * c) * coeff_.col(i);
    const double nrm = std::sqrt(c.dot(gram * c));
    if (!(nrm > 1e-14)) throw MeshError("TriangleBasis: orthogonalization failed");
    coeff_.col(j) = c / nrm;
  }
}

Eigen::MatrixXd TriangleBasis::monomials(const std::vector<Vec2>& pts) const {
  const int n = static_cast<int>(pts.size());
  const int m = size();
  Eigen::MatrixXd out(n, m);
  std::vector<double> px(k_ + 1), py(k_ + 1);
  for (int p = 0; p < n; ++p) {
    const Vec2 u = (pts[p] - center_) / scale_;
    px[0] = py[0] = 1.0;
    for (int d = 1; d <= k_; ++d) {
      px[d] = px[d - 1] * u.x();
      py[d] = py[d - 1] * u.y();
    }
    for (int j = 0; j < m; ++j) out(p, j) = px[exps_[j].first] * py[exps_[j].second];
  }
  return out;
}

Eigen::MatrixXd TriangleBasis::eval(const std::vector<Vec2>& pts) const {
  return monomials(pts) * coeff_;
}

void TriangleBasis::eval_with_grad(const std::vector<Vec2>& pts, Eigen::MatrixXd& vals,
                                   Eigen::MatrixXd& gx, Eigen::MatrixXd& gy) const {
  const int n = static_cast<int>(pts.size());
  const int m = size();
  Eigen::MatrixXd mono(n, m), dx(n, m), dy(n, m);
  std::vector<double> px(k_ + 1), py(k_ + 1);
  for (int p = 0; p < n; ++p) {
    const Vec2 u = (pts[p] - center_) / scale_;
    px[0] = py[0] = 1.0;
    for (int d = 1; d <= k_; ++d) {
      px[d] = px[d - 1] * u.x();
      py[d] = py[d - 1] * u.y();
    }
    for (int j = 0; j < m; ++j) {
      const auto [a, b] = exps_[j];
      mono(p, j) = px[a] * py[b];
      dx(p, j) = (a > 0) ? a / scale_ * px[a - 1] * py[b] : 0.0;
      dy(p, j) = (b > 0) ? b / scale_ * px[a] * py[b - 1] : 0.0;
    }
  }
  vals = mono * coeff_;
  gx = dx * coeff_;
  gy = dy * coeff_;
}

Eigen::MatrixXd edge_basis_values(int k, double h_e, const std::vector<double>& xi) {
  if (!(h_e > 0.0)) throw MeshError("edge_basis_values: nonpositive edge length");
  const int n = static_cast<int>(xi.size());
  Eigen::MatrixXd out(n, k + 1);
  for (int p = 0; p < n; ++p) {
    const double x = xi[p];
    double p0 = 1.0, p1 = x;
    for (int i = 0; i <= k; ++i) {
      double pi;
      if (i == 0)
        pi = p0;
      else if (i == 1)
        pi = p1;
      else {
        pi = ((2 * i - 1) * x * p1 - (i - 1) * p0) / i;
        p0 = p1;
        p1 = pi;
      }
      out(p, i) = std::sqrt((2 * i + 1) / h_e) * pi;
    }
  }
  return out;
}

}  // namespace sdg
