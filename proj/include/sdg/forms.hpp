#pragma once

#include "sdg/spaces.hpp"

#include <Eigen/Sparse>

namespace sdg {

using SparseMat = Eigen::SparseMatrix<double>;

/// Knobs for the assembly routines.  quad_bump raises every quadrature degree
/// used during assembly; since all form integrands are polynomial (convection
/// against a polynomial transport field included), assembled matrices must be
/// invariant under a bump up to roundoff.  Used by the exactness audit tests.
struct AssemblyOptions {
  int quad_bump = 0;
};

/// Volume quadrature degree for form assembly: exact for the highest-degree
/// polynomial integrand, max(2k, 3k-1), plus one.
int assembly_volume_degree(int k);
/// Edge quadrature degree for form assembly (trilinear edge terms have degree
/// up to 3k).
int assembly_edge_degree(int k);

/// (G, H) over the domain; rows and columns are H DOFs.  Symmetric positive
/// definite.  The viscosity factor 1/nu is applied by the caller.
SparseMat assemble_mass_H(const DofMaps& maps, const AssemblyOptions& opt = {});

/// B_h(H, v) = sum_T (H, grad v) - sum_{primal e} <Hn, [v]>
///           - sum_{dual e} <t.Hn, [v.t]>; rows are V DOFs (test v), columns
/// are H DOFs (trial H).  The adjoint form B_h^* is -transpose(B).
SparseMat assemble_B(const DofMaps& maps, const AssemblyOptions& opt = {});

/// b_h(v, q) = -sum_T (v, grad q) + sum_{dual e} <v.n, [q]>; rows are Q DOFs
/// (test q), columns are V DOFs (trial v).  The adjoint form b_h^* is
/// -transpose(b).
SparseMat assemble_b(const DofMaps& maps, const AssemblyOptions& opt = {});

/// Convective form N_h(w; psi, v) = -sum_T (psi (x) w, grad v)
///   + sum_{interior e} <{w.n}, {psi}.[v]> + sum_{all e} <|{w.n}|, [psi].[v]>
/// linearized at transport field w; rows are V DOFs (test v), columns are
/// V DOFs (trial psi).
SparseMat assemble_N(const DofMaps& maps, const FEField& w,
                     const AssemblyOptions& opt = {});

/// Load vector (f, v) over V DOFs.
Eigen::VectorXd assemble_load_V(const DofMaps& maps, const VectorFn& f,
                                const AssemblyOptions& opt = {});

/// Boundary data terms of the scheme, driven by the Dirichlet datum g:
///   over H DOFs: sum_{boundary primal e} <g, Hn>;
///   over V DOFs: sum_{boundary e} <|g.n| - g.n, g.v>;
///   over Q DOFs: sum_{boundary primal e} <g.n, q>.
/// Boundary edges carry outward unit normals.
Eigen::VectorXd assemble_bdry_H(const DofMaps& maps, const VectorFn& g,
                                const AssemblyOptions& opt = {});
Eigen::VectorXd assemble_bdry_V(const DofMaps& maps, const VectorFn& g,
                                const AssemblyOptions& opt = {});
Eigen::VectorXd assemble_bdry_Q(const DofMaps& maps, const VectorFn& g,
                                const AssemblyOptions& opt = {});

/// Integral of every Q basis function over the domain (the zero-mean
/// constraint row of the saddle-point system).
Eigen::VectorXd assemble_q_integral(const DofMaps& maps);

}  // namespace sdg
