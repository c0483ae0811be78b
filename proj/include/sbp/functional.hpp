#pragma once

#include <utility>

#include "sbp/problem.hpp"
#include "sbp/reduction.hpp"

namespace sbp {

enum class GradientMetric { L2, SobolevH10 };

/// Terms of the reduced energy J.
struct EnergyBreakdown {
  double dirichlet = 0.0;     ///< 1/2 int |grad u|^2
  double biharm = 0.0;        ///< 1/4 int (Delta phi_u)^2
  double grad_phi = 0.0;      ///< 1/4 int |grad phi_u|^2
  double coupling_chi = 0.0;  ///< 1/2 int q chi u^2
  double nonlinear = 0.0;     ///< -(kappa/p) int |u|^p
  double total = 0.0;
};

struct JEvaluation {
  double value = 0.0;
  EnergyBreakdown energy;
  PotentialPair pair;
};

/// F(u, phi) with psi standing in for Delta phi.
double eval_F(const ScalarField& u, const PotentialPair& pair, const Problem& problem);

/// J(u) = F(u, Phi(u)), evaluated in reduced form.
JEvaluation eval_J(const ScalarField& u, const Problem& problem);

/// -Delta u + q (phi_u + chi) u - kappa |u|^{p-2} u on interior nodes, zero on
/// the boundary: the L2 representer of J'(u). `pair` must be Phi(u).
ScalarField strong_gradient(const ScalarField& u, const PotentialPair& pair,
                            const Problem& problem);

/// J'(u) in the chosen metric; the Sobolev version is (-Delta_D)^{-1} applied
/// to the strong gradient. u must vanish on the boundary.
ScalarField grad_J(const ScalarField& u, const Problem& problem, GradientMetric metric);

/// int |u|^p
double lp_integral(const ScalarField& u, double p);

/// ||u||_p^p / (||grad u||_2^{p-r} ||u||_2^r). Throws ZeroField for u = 0.
double gn_ratio(const ScalarField& u, double p, double r);

/// Admissible r for the interpolation inequality with s = 2 in dimension d:
/// (p - 2, d (1 - p / 2*)) with 2* = 2d/(d-2) (infinite for d <= 2).
std::pair<double, double> gn_window(int dim, double p);

/// 1/2 int|grad u|^2 - ||q chi||_inf |Omega| - C (int|grad u|^2)^{(p-r)/2}.
double coercivity_lower_bound(const ScalarField& u, const Problem& problem,
                              double c_emp, double r);

}  // namespace sbp
