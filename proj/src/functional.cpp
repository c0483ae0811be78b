#include "sbp/functional.hpp"

#include <cmath>
#include <limits>

#include "sbp/errors.hpp"

namespace sbp {

namespace {

double signed_power(double u, double e) {
  if (u == 0.0) return 0.0;
  return std::pow(std::fabs(u), e) * u;
}

double weighted_qchi_u2(const ScalarField& u, const Problem& problem) {
  const auto w = problem.grid.weights();
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    s += w[i] * problem.q[i] * problem.chi[i] * (u[i] * u[i]);
  return s;
}

}  // namespace

double lp_integral(const ScalarField& u, double p) {
  const auto w = u.grid().weights();
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    if (u[i] != 0.0) s += w[i] * std::pow(std::fabs(u[i]), p);
  return s;
}

double eval_F(const ScalarField& u, const PotentialPair& pair, const Problem& problem) {
  const auto w = problem.grid.weights();
  double coupling = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    coupling += w[i] * problem.q[i] * (pair.phi[i] + problem.chi[i]) * (u[i] * u[i]);
  return 0.5 * gradient_energy(u) + 0.5 * coupling -
         problem.kappa / problem.p * lp_integral(u, problem.p) -
         0.25 * inner(pair.psi, pair.psi) - 0.25 * gradient_energy(pair.phi) -
         problem.alpha / (2.0 * problem.grid.volume()) * integrate(pair.phi);
}

JEvaluation eval_J(const ScalarField& u, const Problem& problem) {
  JEvaluation out;
  out.pair = phi_map(u, problem);
  const InteractionEnergy ie = interaction_energy(u, out.pair, problem);
  EnergyBreakdown& e = out.energy;
  e.dirichlet = 0.5 * gradient_energy(u);
  e.biharm = 0.25 * ie.biharm;
  e.grad_phi = 0.25 * ie.grad_phi;
  e.coupling_chi = 0.5 * weighted_qchi_u2(u, problem);
  e.nonlinear = -problem.kappa / problem.p * lp_integral(u, problem.p);
  e.total = e.dirichlet + e.biharm + e.grad_phi + e.coupling_chi + e.nonlinear;
  out.value = e.total;
  return out;
}

ScalarField strong_gradient(const ScalarField& u, const PotentialPair& pair,
                            const Problem& problem) {
  ScalarField g = -apply_laplacian_dirichlet(u);
  const double e = problem.p - 2.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (problem.grid.is_boundary(i)) continue;
    g[i] += problem.q[i] * (pair.phi[i] + problem.chi[i]) * u[i] -
            problem.kappa * signed_power(u[i], e);
  }
  return g;
}

ScalarField grad_J(const ScalarField& u, const Problem& problem, GradientMetric metric) {
  const PotentialPair pair = phi_map(u, problem);
  ScalarField g = strong_gradient(u, pair, problem);
  if (metric == GradientMetric::SobolevH10) return solve_poisson_dirichlet(g, problem.solver);
  return g;
}

double gn_ratio(const ScalarField& u, double p, double r) {
  const double l2sq = inner(u, u);
  const double grad = gradient_energy(u);
  if (l2sq == 0.0 || grad == 0.0) throw ZeroField("gn_ratio of a zero field");
  return lp_integral(u, p) / (std::pow(grad, 0.5 * (p - r)) * std::pow(l2sq, 0.5 * r));
}

std::pair<double, double> gn_window(int dim, double p) {
  const double lower = p - 2.0;
  if (dim <= 2) return {lower, static_cast<double>(dim)};
  const double s_star = 2.0 * dim / (dim - 2.0);
  return {lower, dim * (1.0 - p / s_star)};
}

double coercivity_lower_bound(const ScalarField& u, const Problem& problem,
                              double c_emp, double r) {
  const double grad = gradient_energy(u);
  double qchi = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    qchi = std::max(qchi, std::fabs(problem.q[i] * problem.chi[i]));
  return 0.5 * grad - qchi * problem.grid.volume() -
         c_emp * std::pow(grad, 0.5 * (problem.p - r));
}

}  // namespace sbp
