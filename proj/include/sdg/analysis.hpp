#pragma once

#include "sdg/spaces.hpp"

#include <array>
#include <string>
#include <vector>

namespace sdg {

/// Divergence diagnostics of a velocity field, sampled at the points of
/// degree-2k quadrature rules.  The normal-jump maximum runs over interior
/// primal edges only: on boundary edges the scheme imposes u.n equal to the
/// moment projection of the (generally nonzero) datum g.n, so the boundary
/// trace is not a divergence defect.
struct DivergenceReport {
  double div_max = 0.0;          // max over triangles of |div u| at volume points
  double div_max_scaled = 0.0;   // max over triangles of h_T * |div u|
  double normal_jump_max = 0.0;  // max over interior primal edges of |[u.n]|
};

/// Errors and diagnostics of one solve against a manufactured solution.
struct ErrorReport {
  double h = 0.0;
  int k = 0;
  double nu = 0.0;
  int dofs_H = 0, dofs_V = 0, dofs_Q = 0;
  double err_G = 0.0;         // ||G - G_h||_L2
  double err_u = 0.0;         // ||u - u_h||_L2
  double err_p = 0.0;         // ||p - p_h||_L2
  double err_Jhu_uh = 0.0;    // ||J_h u - u_h||_h (superconvergent)
  double err_u_Jhu_04 = 0.0;  // ||u - J_h u||_{0,4,h}
  DivergenceReport div;
};

/// Broken L2 error of a field against exact data, degree-(2k+6) quadrature.
double error_L2(const DofMaps& maps, const FEField& f, const TensorFn& exact);
double error_L2(const DofMaps& maps, const FEField& f, const VectorFn& exact);
double error_L2(const DofMaps& maps, const FEField& f, const ScalarFn& exact);

/// ||v||_h^2 = ||grad v||^2_{L2(T_h)} + sum_{primal e} h_e^{-1} ||[v]||^2
///           + sum_{dual e} h_e^{-1} ||[v.t]||^2,
/// with traces in place of jumps on boundary primal edges.  Differences of
/// V-fields are formed by subtracting coefficient vectors.
double norm_h(const DofMaps& maps, const FEField& v);

/// ||v||_{0,4,h}^4 = ||v||^4_{L4(T_h)} + sum_{all e} h_e^{-1} ||{v}||^4_{L4(e)}.
/// When exact is non-null the norm of (exact - v) is computed pointwise.
double norm_04h(const DofMaps& maps, const FEField& v,
                const VectorFn& exact = {});

/// ||q||_{1,h}^2 = ||grad q||^2_{L2(T_h)} + sum_{dual e} h_e^{-1} ||[q]||^2.
double norm_1h(const DofMaps& maps, const FEField& q);

DivergenceReport divergence_report(const DofMaps& maps, const FEField& u);

/// Streamfunction on the triangulation points, integrated along a spanning
/// tree of the (primal + dual) edge graph via psi(vb) - psi(va) = flux of u
/// across the edge, anchored at zero on the lowest-index boundary vertex.
struct Streamfunction {
  std::vector<double> psi;   // one value per triangulation point
  double max_closure = 0.0;  // max defect |psi(vb)-psi(va)-flux| off the tree
  double max_abs = 0.0;      // max |psi|
};

/// Requires an (up to roundoff) divergence-free u: divergence_report maxima
/// must not exceed 1e-8 * ||u||_h; throws std::invalid_argument otherwise.
Streamfunction streamfunction(const DofMaps& maps, const FEField& u);

/// Convergence-rate extraction over a mesh sequence, coarse to fine.
struct RateTable {
  static constexpr int n_quantities = 5;
  static const std::array<const char*, n_quantities> quantity_names;

  std::vector<ErrorReport> rows;  // ordered coarse -> fine
  /// pairwise[i][q]: log2(e_i/e_{i+1}) / log2(h_i/h_{i+1}); empty if < 2 rows
  std::vector<std::array<double, n_quantities>> pairwise;
  /// least-squares slope of log e vs log h over the finest min(3, n) rows;
  /// NaN entries when fewer than 2 rows are available
  std::array<double, n_quantities> ls_slopes{};
  bool has_slopes = false;
};

/// Value of quantity q in {0: err_G, 1: err_u, 2: err_p, 3: err_Jhu_uh,
/// 4: err_u_Jhu_04} of a report.
double quantity_value(const ErrorReport& r, int q);

RateTable convergence_study(const std::vector<ErrorReport>& reports);

}  // namespace sdg
