#pragma once

// The solution operator L of the zero-mean Neumann problem
//   Delta^2 phi - Delta phi = w - mean(w),  dphi/dn = dDelta(phi)/dn = 0,
// and the reduction map Phi(u) = L(q u^2). The fourth-order operator factors
// as (Delta - I) Delta, so each application is a Helmholtz solve followed by
// a zero-mean Poisson solve.

#include "sbp/elliptic.hpp"
#include "sbp/grid.hpp"
#include "sbp/problem.hpp"

namespace sbp {

struct PotentialPair {
  ScalarField phi;  ///< zero mean, Neumann
  ScalarField psi;  ///< Delta phi, the Helmholtz intermediate
};

/// Delta^2 phi - Delta phi = f with dphi/dn = g1, dDelta(phi)/dn = g2 and
/// mean(phi) = 0. With g1 = g2 = 0 the source is replaced by f - mean(f).
PotentialPair solve_fourth_order_split(const ScalarField& f, const BoundaryData& g1,
                                       const BoundaryData& g2,
                                       const LinearSolveOptions& opts);

/// L(w).
PotentialPair apply_L(const ScalarField& w, const LinearSolveOptions& opts);

/// Phi(u) = L(q u^2).
PotentialPair phi_map(const ScalarField& u, const Problem& problem);

/// Pair for an arbitrary potential, with psi = Delta_N phi.
PotentialPair make_pair(ScalarField phi);

struct InteractionEnergy {
  double coupling = 0.0;  ///< int q u^2 phi
  double biharm = 0.0;    ///< int psi^2
  double grad_phi = 0.0;  ///< int |grad phi|^2
  /// b(phi, phi) = int psi^2 + int |grad phi|^2
  double bilinear() const { return biharm + grad_phi; }
};

InteractionEnergy interaction_energy(const ScalarField& u, const PotentialPair& pair,
                                     const Problem& problem);

/// Norm of phi in the zero-mean space, (int psi^2 + int |grad phi|^2)^(1/2).
double potential_norm(const PotentialPair& pair);

}  // namespace sbp
