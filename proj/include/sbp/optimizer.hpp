#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sbp/functional.hpp"
#include "sbp/manifold.hpp"

namespace sbp {

struct OptimizeOptions {
  /// Descent metric. The stopping test always uses the Sobolev norm.
  GradientMetric metric = GradientMetric::SobolevH10;
  double grad_tol = 1e-7;
  int max_iters = 5000;
  double armijo_c = 1e-4;
  double backtrack_factor = 0.5;
  double initial_step = 1.0;
  double dedupe_l2 = 1e-3;
  /// Largest trial step after a run of accepted steps, in units of
  /// initial_step.
  double max_step_growth = 1e4;
  /// First trial step from the Barzilai-Borwein quotient of the last two
  /// iterates instead of growing the previous step.
  bool bb_step = true;

  void validate() const;
};

struct IterationRecord {
  double J = 0.0;
  double step = 0.0;
  double tangent_grad_norm = 0.0;  ///< Sobolev norm of the tangent gradient
  double ps_residual = 0.0;        ///< L2 norm of grad_J - lambda u - beta q u
};

struct SolveResult {
  ScalarField u;
  double omega = 0.0;
  double mu = 0.0;
  double J_value = 0.0;
  EnergyBreakdown energy;
  int iterations = 0;
  double tangent_grad_norm = 0.0;
  ConstraintValues constraint_residuals;
  PotentialPair phi_u;
  bool converged = false;
  std::string message;
  std::vector<IterationRecord> history;
};

/// Retraction-based projected gradient descent with Armijo backtracking.
/// Throws LineSearchStall when the step drops below 1e-14; on reaching
/// max_iters returns the best iterate with converged = false.
SolveResult minimize_on_M(const ScalarField& u0, const Problem& problem,
                          const OptimizeOptions& opts = {});

/// Result record for a given field (multipliers, energy, gradient norm)
/// without iterating; converged when the tangent gradient norm is within
/// grad_tol.
SolveResult evaluate_state(const ScalarField& u, const Problem& problem, double grad_tol = 1e-7);

/// (omega, mu) from r1 = omega m0 - mu m1, r2 = omega m1 - mu m2 where
/// r1 = J'(u)[u], r2 = J'(u)[q u] and m_k = int q^k u^2.
/// Throws SingularMultiplierSystem when m0 m2 - m1^2 vanishes to rounding.
std::pair<double, double> recover_multipliers(const ScalarField& u, const Problem& problem);

/// ||R(J'(u) - omega u + mu q u)||_L2 with R the Riesz map of `metric`.
double multiplier_residual(const ScalarField& u, double omega, double mu,
                           const Problem& problem, GradientMetric metric);

/// Restarts from |u| and returns a result whose field has min >= -1e-8.
SolveResult polish_positive(const SolveResult& result, const Problem& problem,
                            const OptimizeOptions& opts = {});

/// True when u and w agree up to sign within `l2_tol` and their energies
/// within 1e-6.
bool same_state(const SolveResult& a, const SolveResult& b, double l2_tol);

/// Keeps the first of every group of equal states (see same_state).
std::vector<SolveResult> dedupe(std::vector<SolveResult> states, double l2_tol);

struct ExcitedOptions {
  int sphere_samples = 4;
  std::uint64_t seed = 0;
};

/// Multi-start search: minimizes from every seed of the disjoint-support
/// families j = 1..k and from random points on the sphere spanned by each
/// family, keeps the converged runs, removes duplicates and sorts by J.
std::vector<SolveResult> excited_states(const Problem& problem, int k,
                                        const OptimizeOptions& opts = {},
                                        const ExcitedOptions& eopts = {},
                                        std::vector<std::string>* warnings = nullptr);

/// Block maxima (blocks of `block` iterations) of the residual norm over the
/// last `window` iterations are non-increasing.
bool ps_envelope_nonincreasing(const std::vector<IterationRecord>& history,
                               int window = 100, int block = 10);

}  // namespace sbp
