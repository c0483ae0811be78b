#pragma once

// Residuals of the original (unreduced) system, refinement studies and dense
// oracles.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "sbp/dense.hpp"
#include "sbp/optimizer.hpp"

namespace sbp {

struct ResidualReport {
  /// -Delta u + q phi u - kappa |u|^{p-2} u - omega u with a fourth-order
  /// reference Laplacian, L2 over nodes at least two layers inside. Measures
  /// the truncation error of the computed state.
  double eq1_residual = 0.0;
  /// Same with the reference stencil, over all interior nodes (second order
  /// next to the boundary).
  double eq1_residual_full = 0.0;
  /// Same with the solver's own stencil: vanishes at exact discrete
  /// stationary points.
  double eq1_discrete = 0.0;
  /// Delta^2 phi - Delta phi - q u^2 written as (Delta_N - I)(psi + theta),
  /// deep-interior L2; eq2_residual_full covers every node.
  double eq2_residual = 0.0;
  double eq2_residual_full = 0.0;
  double bc_u = 0.0;       ///< max |u| on the boundary
  double bc_phi_n = 0.0;   ///< max |dphi/dn - h1|, one-sided differences
  double bc_dphi_n = 0.0;  ///< max |d(Delta phi)/dn - h2|
  double normalization = 0.0;
  double compatibility = 0.0;  ///< |int q u^2 - alpha|
  double theta_mean_identity = 0.0;
  double phi_mean_gap = 0.0;  ///< |mean(phi) - mu|

  double bc_max() const;
  bool all_finite() const;
};

/// phi = phi_u + chi + mu.
ScalarField reconstruct_phi(const SolveResult& result, const Problem& problem);

ResidualReport residual_original_system(const SolveResult& result, const Problem& problem);

/// Deep-interior and full L2 norms of the potential-equation residual for any u.
std::pair<double, double> eq2_residual(const ScalarField& u, const Problem& problem);

/// Discrete L2 norm over nodes whose index lies in [layer, n-1-layer] on
/// every axis.
double interior_norm(const ScalarField& f, int layer);

/// Fourth-order Laplacian where both neighbours on an axis exist, the
/// second-order stencil on the first interior layer, zero on the boundary.
ScalarField reference_laplacian(const ScalarField& f);

/// Outward normal derivative by one-sided second-order differences, per face.
BoundaryData one_sided_normal_derivative(const ScalarField& f);

struct RefinementRow {
  std::string label;
  int n = 0;
  double h = 0.0;
  double J = 0.0;
  double omega = 0.0;
  double mu = 0.0;
  ResidualReport residuals;
  int iterations = 0;
  bool converged = false;
  double tangent_grad_norm = 0.0;
};

RefinementRow make_row(const SolveResult& result, const Problem& problem,
                       const std::string& label = "");

using ProblemFactory = std::function<Problem(const GridSpec&)>;

/// Ground-state pipeline (feasible_init, minimize, polish) on every grid.
std::vector<RefinementRow> refinement_study(const ProblemFactory& factory,
                                            const std::vector<GridSpec>& grids,
                                            const OptimizeOptions& opts = {});

/// log2(|v_i - v_{i+1}| / |v_{i+1} - v_{i+2}|) for successive halvings.
std::vector<double> richardson_orders(const std::vector<double>& values);
/// log(e_i / e_{i+1}) / log(h_i / h_{i+1}).
std::vector<double> error_orders(const std::vector<double>& errors,
                                 const std::vector<double>& h);

/// Columns n,h,J,omega,mu,eq1_res,eq2_res,bc_res,norm_res,compat_res,iters
/// followed by label,converged,tangent_grad_norm,eq1_full,eq1_discrete,
/// theta_identity.
void write_residual_csv(std::ostream& os, const std::vector<RefinementRow>& rows);

struct KktSolution {
  ScalarField u;
  double omega = 0.0;
  double mu = 0.0;
  double J = 0.0;
  double residual = 0.0;  ///< max-norm of the KKT system at the returned point
  int newton_iterations = 0;
};

/// Stationary point of J on M from dense matrices only: a start from the
/// linear eigenproblem with the interaction dropped (mu found by bisection
/// so that int q u^2 = alpha), then damped Newton on (u, omega, mu).
/// Throws OracleTooLarge, NewtonDivergence.
KktSolution dense_kkt_oracle(const Problem& problem,
                             std::size_t max_nodes = dense::kMaxOracleNodes);

/// J from dense matrices (chi recomputed densely).
double dense_energy(const ScalarField& u, const Problem& problem);

struct DenseOracleReport {
  double helmholtz = 0.0;  ///< max |v_cg - v_dense| over the random trials
  double poisson_neumann = 0.0;
  double poisson_dirichlet = 0.0;
  double chi = 0.0;
  int neumann_null_dimension = 0;  ///< singular values below 1e-10 sigma_max
  bool has_kkt = false;
  KktSolution kkt;
  double d_J = 0.0;
  double d_omega = 0.0;
  double d_mu = 0.0;

  double linear_max() const;
};

/// Random right-hand sides and boundary data through both backends; when
/// kappa = 0 and `iterative` is given, its state is compared with the dense
/// KKT oracle.
DenseOracleReport dense_oracle_compare(const Problem& problem,
                                       std::size_t max_nodes = dense::kMaxOracleNodes,
                                       const SolveResult* iterative = nullptr,
                                       std::uint64_t seed = 1, int trials = 3);

void write_oracle_report(std::ostream& os, const DenseOracleReport& r);

}  // namespace sbp
