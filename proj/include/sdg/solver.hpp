#pragma once

#include "sdg/forms.hpp"

#include <vector>

namespace sdg {

/// Fixed-point iteration controls.
struct SolverConfig {
  double tolerance = 1e-7;  // successive max-abs velocity DOF difference
  int max_iterations = 100;
  double theta = 1.0;  // damping factor in (0, 1]
};

/// Problem data for one solve: viscosity, volume load, Dirichlet datum.
/// Null functions mean identically zero data.
struct ProblemData {
  double nu = 1.0;
  VectorFn f;
  VectorFn g;
};

struct SolveResult {
  FEField G, u, p;
  double multiplier = 0.0;  // mean-constraint multiplier (zero at convergence)
  bool converged = false;
  int iterations = 0;
  std::vector<double> history;      // successive velocity DOF differences
  double final_residual = 0.0;      // relative residual of the last linear solve
  double condition_estimate = 0.0;  // probe-based estimate for the last matrix
  double mean_p = 0.0;              // integral mean of the returned pressure
};

/// Picard iteration for the nonlinear scheme: freeze the transport field at
/// the previous velocity iterate, solve the linear saddle-point system
/// bordered by the zero-mean pressure constraint, damp, repeat.  Starts from
/// zero velocity.  At convergence the returned triple is the final linear
/// solve, so the divergence constraint holds to solver precision.
SolveResult picard_solve(const DofMaps& maps, const ProblemData& prob,
                         const SolverConfig& cfg = {});

/// Single linear solve with the convective block omitted (Stokes problem;
/// the caller supplies the Stokes load).
SolveResult stokes_solve(const DofMaps& maps, const ProblemData& prob,
                         const SolverConfig& cfg = {});

}  // namespace sdg
