#include "sbp/reduction.hpp"

#include <cmath>

namespace sbp {

PotentialPair solve_fourth_order_split(const ScalarField& f, const BoundaryData& g1,
                                       const BoundaryData& g2,
                                       const LinearSolveOptions& opts) {
  PotentialPair out;
  if (g1.is_zero() && g2.is_zero()) {
    ScalarField centred = f;
    project_zero_mean(centred);
    out.psi = solve_helmholtz_neumann(centred, g2, opts);
  } else {
    out.psi = solve_helmholtz_neumann(f, g2, opts);
  }
  out.phi = solve_poisson_neumann_zeromean(out.psi, g1, opts);
  return out;
}

PotentialPair apply_L(const ScalarField& w, const LinearSolveOptions& opts) {
  const BoundaryData zero(w.grid());
  return solve_fourth_order_split(w, zero, zero, opts);
}

PotentialPair phi_map(const ScalarField& u, const Problem& problem) {
  ScalarField qu2(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) qu2[i] = problem.q[i] * (u[i] * u[i]);
  return apply_L(qu2, problem.solver);
}

PotentialPair make_pair(ScalarField phi) {
  PotentialPair out;
  out.psi = apply_laplacian_neumann(phi);
  out.phi = std::move(phi);
  return out;
}

InteractionEnergy interaction_energy(const ScalarField& u, const PotentialPair& pair,
                                     const Problem& problem) {
  InteractionEnergy e;
  ScalarField qu2(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) qu2[i] = problem.q[i] * (u[i] * u[i]);
  e.coupling = inner(qu2, pair.phi);
  e.biharm = inner(pair.psi, pair.psi);
  e.grad_phi = gradient_energy(pair.phi);
  return e;
}

double potential_norm(const PotentialPair& pair) {
  return std::sqrt(inner(pair.psi, pair.psi) + gradient_energy(pair.phi));
}

}  // namespace sbp
