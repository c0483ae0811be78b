#pragma once

#include <string>
#include <variant>
#include <vector>

#include "sbp/elliptic.hpp"
#include "sbp/grid.hpp"

namespace sbp {

// Coupling families. x1 denotes the first coordinate.

/// q = a + b * x1
struct AffineCoupling {
  double a = 0.0;
  double b = 1.0;
};

/// q = base + height * (1 - (r/R)^2)^2 inside the ball, base outside.
struct RadialBumpCoupling {
  Point center{0.5, 0.5, 0.5};
  double radius = 0.25;
  double base = 0.0;
  double height = 1.0;
};

/// q = base + tilt * x1 + amplitude * sin(frequency * pi * x1)
struct OscillatingCoupling {
  double base = 0.0;
  double amplitude = 1.0;
  double frequency = 6.0;
  double tilt = 0.0;
};

/// Nodal values from a field dump (must match the grid).
struct TabulatedCoupling {
  std::string file;
};

using CouplingSpec = std::variant<AffineCoupling, RadialBumpCoupling,
                                  OscillatingCoupling, TabulatedCoupling>;

ScalarField evaluate_coupling(const CouplingSpec& spec, const GridSpec& grid);

/// Linear solver settings used inside the reduction and the optimizer. The
/// tolerance is tighter than the stand-alone default so that energies built
/// from solved potentials are accurate well beyond the line-search decrease.
LinearSolveOptions reduction_solver_defaults();

struct Problem {
  GridSpec grid;
  ScalarField q;
  double kappa = 1.0;
  double p = 3.0;
  BoundaryData h1;
  BoundaryData h2;
  double alpha = 0.0;
  ScalarField chi;
  ScalarField theta;
  LinearSolveOptions solver = reduction_solver_defaults();
};

/// alpha = oint h2 - oint h1.
double compute_alpha(const BoundaryData& h1, const BoundaryData& h2);

struct ChiSolution {
  ScalarField chi;
  ScalarField theta;
};

/// theta: Delta theta - theta = alpha/|Omega|, dtheta/dn = h2.
/// chi:   Delta chi = theta, dchi/dn = h1, mean(chi) = 0.
/// Throws ConsistencyViolation when |int theta - oint h1| > 5e-8 * scale.
ChiSolution solve_chi(const Problem& problem);

/// Validates parameters, derives alpha and solves for chi and theta.
Problem make_problem(ScalarField q, double kappa, double p, BoundaryData h1,
                     BoundaryData h2,
                     LinearSolveOptions solver = reduction_solver_defaults());

/// Scale used by the theta-mean identity: 1 + oint|h1| + oint|h2|.
double boundary_data_scale(const Problem& problem);

enum class FeasibilityClass { interior, boundary_degenerate, infeasible };
std::string to_string(FeasibilityClass c);

struct FeasibilityReport {
  double q_min = 0.0;
  double q_max = 0.0;
  double alpha = 0.0;
  FeasibilityClass cls = FeasibilityClass::infeasible;
  /// Fraction of nodes with |q - alpha| <= level_eps; the grid stand-in for
  /// the measure of the level set q = alpha.
  double level_set_fraction = 0.0;
  double gap_eps = 0.0;
  double level_eps = 0.0;
  /// Above 1% the level set is treated as having positive measure.
  bool level_set_warning() const { return level_set_fraction > 0.01; }
};

/// Negative eps values select the defaults 1e-9 (gap) and 1e-3 (level)
/// times q_max - q_min. `mask`, when given, restricts the statistics to nodes
/// with a nonzero entry.
FeasibilityReport classify_alpha(const ScalarField& q, double alpha,
                                 double level_eps = -1.0, double gap_eps = -1.0,
                                 const std::vector<char>* mask = nullptr);

}  // namespace sbp
