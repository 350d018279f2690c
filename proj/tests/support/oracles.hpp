#pragma once

#include "sdg/forms.hpp"

namespace sdg_test {

using sdg::AssemblyOptions;
using sdg::DofMaps;
using sdg::ScalarFn;
using sdg::SparseMat;
using sdg::TensorFn;
using sdg::Vec2;
using sdg::VectorFn;

// Direct assemblies of the adjoint forms, written from their printed
// definitions rather than by transposing the primal forms.  Rows index the
// test space written first.
//   B* rows: H DOFs (test H), cols: V DOFs (trial v):
//     B*(v,H) = sum_T (v, div H) - sum_{dual e} <v.n, [n.Hn]>.
//   b* rows: V DOFs (test v), cols: Q DOFs (trial q):
//     b*(q,v) = -sum_T (q, div v) + sum_{primal e} <q, [v.n]>.
SparseMat assemble_Bstar_oracle(const DofMaps& maps, const AssemblyOptions& opt = {});
SparseMat assemble_bstar_oracle(const DofMaps& maps, const AssemblyOptions& opt = {});

// Discrete forms applied to smooth exact fields in their first slot, returning
// the vector of form values against every test basis function.  Quadrature
// uses the interpolation moment rule so that the interpolant identities hold
// to roundoff.
Eigen::VectorXd apply_B_exact(const DofMaps& maps, const TensorFn& G);      // over V DOFs
Eigen::VectorXd apply_Bstar_exact(const DofMaps& maps, const VectorFn& u);  // over H DOFs
Eigen::VectorXd apply_b_exact(const DofMaps& maps, const VectorFn& u);      // over Q DOFs
Eigen::VectorXd apply_bstar_exact(const DofMaps& maps, const ScalarFn& p);  // over V DOFs

// N_h(u; u, v_i) for a continuous zero-trace velocity u (jumps of u vanish,
// so only the volume and interior central terms contribute).  quad_bump
// raises the quadrature degree; the integrands are transcendental, so the
// consistency comparison needs enough resolution on both sides.
Eigen::VectorXd apply_N_exact(const DofMaps& maps, const VectorFn& u,
                              int quad_bump = 0);  // over V DOFs

}  // namespace sdg_test
