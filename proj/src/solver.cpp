#include "sdg/solver.hpp"

#include <Eigen/SparseLU>
#ifdef SDG_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif

#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace sdg {

namespace {

#ifdef SDG_HAVE_UMFPACK
using Factorization = Eigen::UmfPackLU<SparseMat>;
using FallbackFactorization = Eigen::SparseLU<SparseMat>;
#else
using Factorization = Eigen::SparseLU<SparseMat>;
#endif

/// Blocks of the saddle-point system that do not depend on the transport
/// field, plus the right-hand side.  Unknown ordering: gradient DOFs,
/// velocity DOFs, pressure DOFs.  The zero-mean pressure constraint borders
/// this system with the column/row c of Q-basis integrals and a scalar
/// multiplier.
struct FixedSystem {
  SparseMat M;  // (G, H) / nu
  SparseMat B;  // rows V, cols H
  SparseMat b;  // rows Q, cols V
  Eigen::VectorXd chat;  // border column: zeros over H and V DOFs, then c
  Eigen::VectorXd d;     // kernel of the unbordered matrix: DOFs of q == 1
  Eigen::VectorXd rhs;   // [r_G; r_u; r_p]
  int nH = 0, nV = 0, nQ = 0;
  int j0 = -1;  // pinned pressure DOF used to factor the singular block
  int n() const { return nH + nV + nQ; }
};

FixedSystem build_fixed(const DofMaps& maps, const ProblemData& prob,
                        bool with_convection) {
  FixedSystem s;
  s.nH = maps.dim(Space::H);
  s.nV = maps.dim(Space::V);
  s.nQ = maps.dim(Space::Q);
  s.M = assemble_mass_H(maps);
  s.M *= 1.0 / prob.nu;
  s.B = assemble_B(maps);
  s.b = assemble_b(maps);

  s.chat = Eigen::VectorXd::Zero(s.n());
  s.chat.segment(s.nH + s.nV, s.nQ) = assemble_q_integral(maps);
  s.d = Eigen::VectorXd::Zero(s.n());
  const FEField one = interpolate_Q(maps, [](const Vec2&) { return 1.0; });
  s.d.segment(s.nH + s.nV, s.nQ) = one.coeffs;
  int jmax = 0;
  s.d.segment(s.nH + s.nV, s.nQ).cwiseAbs().maxCoeff(&jmax);
  s.j0 = s.nH + s.nV + jmax;

  s.rhs = Eigen::VectorXd::Zero(s.n());
  if (prob.f) s.rhs.segment(s.nH, s.nV) = assemble_load_V(maps, prob.f);
  if (prob.g) {
    s.rhs.segment(0, s.nH) = assemble_bdry_H(maps, prob.g);
    // The convective boundary term <|g.n| - g.n, g.v> belongs to the
    // discretization of the transport term, so it is dropped together with
    // the convective block in Stokes mode.
    if (with_convection)
      s.rhs.segment(s.nH, s.nV) += assemble_bdry_V(maps, prob.g);
    // Integrating b_h(u, q) by parts elementwise for a solenoidal velocity
    // with boundary normal trace g.n leaves -<g.n, q> on the boundary, so
    // the datum enters the pressure equation with a minus sign.
    s.rhs.segment(s.nH + s.nV, s.nQ) = -assemble_bdry_Q(maps, prob.g);
  }
  return s;
}

/// Unbordered matrix
///   K = [ M   -B^T   0  ]
///       [ B    N   -b^T ]
///       [ 0    b    0   ]
/// K is singular with one-dimensional kernel and cokernel, both spanned by d
/// (the constant pressure mode).  Pass N = nullptr to omit the convective
/// block.
SparseMat assemble_K(const FixedSystem& s, const SparseMat* N) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(s.M.nonZeros() + 2 * s.B.nonZeros() +
                                        2 * s.b.nonZeros() +
                                        (N ? N->nonZeros() : 0)));
  auto add_block = [&trip](const SparseMat& A, int roff, int coff, double sgn,
                           bool transpose) {
    for (int o = 0; o < A.outerSize(); ++o)
      for (SparseMat::InnerIterator it(A, o); it; ++it) {
        const int r = transpose ? static_cast<int>(it.col())
                                : static_cast<int>(it.row());
        const int c = transpose ? static_cast<int>(it.row())
                                : static_cast<int>(it.col());
        trip.emplace_back(roff + r, coff + c, sgn * it.value());
      }
  };
  const int oV = s.nH;
  const int oQ = s.nH + s.nV;
  add_block(s.M, 0, 0, 1.0, false);
  add_block(s.B, 0, oV, -1.0, true);
  add_block(s.B, oV, 0, 1.0, false);
  if (N) add_block(*N, oV, oV, 1.0, false);
  add_block(s.b, oV, oQ, -1.0, true);
  add_block(s.b, oQ, oV, 1.0, false);
  SparseMat K(s.n(), s.n());
  K.setFromTriplets(trip.begin(), trip.end());
  K.makeCompressed();
  return K;
}

/// Copy of K with row and column j0 cleared and a unit diagonal put in their
/// place.  Since the kernel vector d has d[j0] != 0, the pinned matrix is
/// nonsingular; it is used only as a factorization device for the singular
/// consistent systems arising from the bordered formulation.  A direct
/// factorization of the bordered matrix itself would drag the dense
/// constraint row through the elimination and inflate fill-in by an order of
/// magnitude, so the border is handled by deflation instead (see below).
SparseMat pin(const SparseMat& K, int j0) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(K.nonZeros()) + 1);
  for (int o = 0; o < K.outerSize(); ++o)
    for (SparseMat::InnerIterator it(K, o); it; ++it)
      if (it.row() != j0 && it.col() != j0)
        trip.emplace_back(static_cast<int>(it.row()),
                          static_cast<int>(it.col()), it.value());
  trip.emplace_back(j0, j0, 1.0);
  SparseMat Kp(K.rows(), K.cols());
  Kp.setFromTriplets(trip.begin(), trip.end());
  Kp.makeCompressed();
  return Kp;
}

double inf_norm(const SparseMat& A) {
  Eigen::VectorXd rowsum = Eigen::VectorXd::Zero(A.rows());
  for (int o = 0; o < A.outerSize(); ++o)
    for (SparseMat::InnerIterator it(A, o); it; ++it)
      rowsum[it.row()] += std::abs(it.value());
  return A.rows() > 0 ? rowsum.maxCoeff() : 0.0;
}

/// Exact solve of the bordered system
///   K y + mu * chat = r,   chat^T y = rho
/// given a factorization of the pinned K.  Testing the first equation with
/// the cokernel vector d fixes mu = d^T r / d^T chat; the remaining singular
/// system is consistent and is solved with the pinned factorization (the
/// particular solution with y[j0] = 0); the kernel component is then chosen
/// so the constraint row holds exactly.
///
/// Tracks symbolic-analysis reuse across Picard iterations.  The sparsity
/// pattern is stable once the transport field is nonzero, but the very first
/// iteration (zero transport) assembles fewer stored entries, so the pattern
/// is re-analyzed whenever the stored structure changes.
struct FactorizationState {
  Factorization lu;
  bool analyzed = false;
  Eigen::Index pattern_nnz = -1;
#ifdef SDG_HAVE_UMFPACK
  // Engaged when the primary backend fails.  UMFPACK reports exhaustion of
  // its factor workspace the same way as a singular matrix, so a failure is
  // retried with SparseLU (slower, leaner left-looking factorization) before
  // the matrix is declared singular.  Sticky for the lifetime of the state so
  // a long Picard loop does not re-attempt a doomed factorization each step.
  std::unique_ptr<FallbackFactorization> fallback;
#endif

  Eigen::VectorXd solve(const Eigen::VectorXd& r) const {
#ifdef SDG_HAVE_UMFPACK
    if (fallback) return fallback->solve(r);
#endif
    return lu.solve(r);
  }
};

std::pair<Eigen::VectorXd, double> solve_bordered(const FactorizationState& fs,
                                                  const FixedSystem& s,
                                                  const Eigen::VectorXd& r,
                                                  double rho) {
  const double dc = s.d.dot(s.chat);  // integral of 1 = measure of the domain
  const double mu = s.d.dot(r) / dc;
  Eigen::VectorXd rhat = r - mu * s.chat;
  rhat[s.j0] = 0.0;
  Eigen::VectorXd y = fs.solve(rhat);
  y += ((rho - s.chat.dot(y)) / dc) * s.d;
  return {std::move(y), mu};
}

struct StepOutput {
  Eigen::VectorXd y;
  double mu = 0.0;
  double rel_residual = 0.0;
  double cond_estimate = 0.0;
};

/// Factorize the pinned matrix, reusing the symbolic analysis when the
/// stored structure is unchanged.  Throws only when every available backend
/// has rejected the matrix.
void factorize_pinned(FactorizationState& fs, const SparseMat& Kpin) {
  const bool fresh = !fs.analyzed || fs.pattern_nnz != Kpin.nonZeros();
  fs.analyzed = true;
  fs.pattern_nnz = Kpin.nonZeros();
#ifdef SDG_HAVE_UMFPACK
  if (!fs.fallback) {
#endif
    if (fresh) fs.lu.analyzePattern(Kpin);
    fs.lu.factorize(Kpin);
    if (fs.lu.info() != Eigen::Success && !fresh) {
      // A stale symbolic analysis (pattern drift with unchanged entry count)
      // also lands here; retry once from scratch.
      fs.lu.analyzePattern(Kpin);
      fs.lu.factorize(Kpin);
    }
    if (fs.lu.info() == Eigen::Success) return;
#ifdef SDG_HAVE_UMFPACK
  }
  const bool engage = !fs.fallback;
  if (engage) fs.fallback = std::make_unique<FallbackFactorization>();
  if (engage || fresh) fs.fallback->analyzePattern(Kpin);
  fs.fallback->factorize(Kpin);
  if (fs.fallback->info() == Eigen::Success) return;
#endif
  throw std::runtime_error(
      "sparse LU factorization failed (matrix numerically singular); "
      "suspected cause: disconnected mesh or rank-deficient system");
}

/// Factorize the pinned matrix, solve the bordered system, and polish with
/// two steps of iterative refinement measured against the true bordered
/// operator.
StepOutput linear_step(FactorizationState& fs, const SparseMat& K,
                       const SparseMat& Kpin, const FixedSystem& s) {
  factorize_pinned(fs, Kpin);

  StepOutput out;
  auto solved = solve_bordered(fs, s, s.rhs, 0.0);
  out.y = std::move(solved.first);
  out.mu = solved.second;

  const double k_norm = inf_norm(K) + s.chat.lpNorm<Eigen::Infinity>();
  double res_norm = 0.0;
  for (int step = 0; step < 3; ++step) {
    const Eigen::VectorXd res = s.rhs - K * out.y - out.mu * s.chat;
    const double res_rho = -s.chat.dot(out.y);
    res_norm = std::max(res.lpNorm<Eigen::Infinity>(), std::abs(res_rho));
    if (step == 2) break;  // last pass only measures the residual
    auto corr = solve_bordered(fs, s, res, res_rho);
    out.y += corr.first;
    out.mu += corr.second;
  }
  const double scale =
      s.rhs.lpNorm<Eigen::Infinity>() +
      k_norm * std::max(out.y.lpNorm<Eigen::Infinity>(), std::abs(out.mu));
  out.rel_residual = scale > 0.0 ? res_norm / scale : res_norm;

  // Probe-based lower bound on the condition number of the pinned matrix.
  std::mt19937 gen(0x5eedu);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  double kinv = 0.0;
  for (int probe = 0; probe < 3; ++probe) {
    Eigen::VectorXd v(Kpin.rows());
    for (int i = 0; i < v.size(); ++i) v[i] = dist(gen);
    const Eigen::VectorXd z = fs.solve(v);
    kinv = std::max(kinv,
                    z.lpNorm<Eigen::Infinity>() / v.lpNorm<Eigen::Infinity>());
  }
  out.cond_estimate = inf_norm(Kpin) * kinv;
  return out;
}

void validate(const ProblemData& prob, const SolverConfig& cfg) {
  if (!(prob.nu > 0.0))
    throw std::invalid_argument("viscosity must be positive");
  if (!(cfg.tolerance > 0.0))
    throw std::invalid_argument("solver tolerance must be positive");
  if (cfg.max_iterations < 1)
    throw std::invalid_argument("max_iterations must be at least 1");
  if (!(cfg.theta > 0.0) || cfg.theta > 1.0)
    throw std::invalid_argument("damping factor theta must lie in (0, 1]");
}

SolveResult run(const DofMaps& maps, const ProblemData& prob,
                const SolverConfig& cfg, bool with_convection) {
  validate(prob, cfg);
  const FixedSystem s = build_fixed(maps, prob, with_convection);

  SolveResult out;
  FactorizationState fs;
  Eigen::VectorXd u_prev = Eigen::VectorXd::Zero(s.nV);
  Eigen::VectorXd y_last;
  double mu_last = 0.0;

  const int max_iters = with_convection ? cfg.max_iterations : 1;
  for (int iter = 1; iter <= max_iters; ++iter) {
    SparseMat K;
    if (with_convection) {
      const FEField w{Space::V, u_prev};
      const SparseMat N = assemble_N(maps, w);
      K = assemble_K(s, &N);
    } else {
      K = assemble_K(s, nullptr);
    }
    const SparseMat Kpin = pin(K, s.j0);
    const StepOutput step = linear_step(fs, K, Kpin, s);
    y_last = step.y;
    mu_last = step.mu;
    out.iterations = iter;
    out.final_residual = step.rel_residual;
    out.condition_estimate = step.cond_estimate;
    if (!with_convection) {
      out.converged = true;  // linear problem: one exact solve
      break;
    }
    const Eigen::VectorXd u_new = step.y.segment(s.nH, s.nV);
    const double diff = cfg.theta * (u_new - u_prev).lpNorm<Eigen::Infinity>();
    out.history.push_back(diff);
    if (diff <= cfg.tolerance) {
      // Return the undamped final solve so the divergence constraint holds
      // to linear-solver precision.
      out.converged = true;
      break;
    }
    u_prev = cfg.theta * u_new + (1.0 - cfg.theta) * u_prev;
  }

  out.G = FEField{Space::H, y_last.segment(0, s.nH)};
  out.u = FEField{Space::V, y_last.segment(s.nH, s.nV)};
  out.p = FEField{Space::Q, y_last.segment(s.nH + s.nV, s.nQ)};
  out.multiplier = mu_last;
  out.mean_p = mean_value(maps, out.p);
  return out;
}

}  // namespace

SolveResult picard_solve(const DofMaps& maps, const ProblemData& prob,
                         const SolverConfig& cfg) {
  return run(maps, prob, cfg, true);
}

SolveResult stokes_solve(const DofMaps& maps, const ProblemData& prob,
                         const SolverConfig& cfg) {
  return run(maps, prob, cfg, false);
}

}  // namespace sdg
