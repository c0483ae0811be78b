#pragma once

// The constraint set M = {u : int u^2 = 1, int q u^2 = alpha}, u = 0 on the
// boundary.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "sbp/functional.hpp"
#include "sbp/problem.hpp"

namespace sbp {

struct ConstraintValues {
  double g1 = 0.0;  ///< int u^2 - 1
  double g2 = 0.0;  ///< int q u^2 - alpha
};

ConstraintValues constraint_values(const ScalarField& u, const Problem& problem);

/// |g1| <= tol_norm and |g2| <= tol_compat * (1 + |alpha|).
bool on_manifold(const ScalarField& u, const Problem& problem, double tol_norm = 1e-10,
                 double tol_compat = 1e-8);

struct RetractOptions {
  double tol = 1e-12;
  int max_newton = 50;
};

/// u = (a + b q) v with (a, b) from Newton on the two constraints, started
/// at (1, 0). Throws DegenerateDirection when the Gram matrix of {v, q v} has
/// condition number above 1e12, NewtonDivergence when Newton fails.
ScalarField retract(const ScalarField& v, const Problem& problem,
                    const RetractOptions& opts = {},
                    std::array<double, 2>* coefficients = nullptr);

struct TangentProjection {
  ScalarField g_t;
  double lambda = 0.0;  ///< coefficient of the u direction
  double beta = 0.0;    ///< coefficient of the q u direction
};

/// Removes from g the metric representers of the constraint differentials
/// {u, q u}. Throws DegenerateConstraints when their Gram matrix is singular.
TangentProjection tangent_project(const ScalarField& u, const ScalarField& g,
                                  const Problem& problem, GradientMetric metric);

/// Axis-aligned sub-box [lo, hi].
struct Region {
  Point lo{0, 0, 0};
  Point hi{0, 0, 0};
  static Region whole(const GridSpec& grid);
  bool contains(const Point& x, int dim) const;
};

/// Two disjoint polynomial plateau bumps placed at the arg-min and arg-max of
/// q in the region, shrunk until their q-averages bracket alpha, mixed so
/// that both constraints hold. Throws InfeasibleRegion.
ScalarField feasible_init(const Problem& problem,
                          const std::optional<Region>& region = std::nullopt);

struct GenusSeeds {
  std::vector<ScalarField> seeds;  ///< in M, pairwise disjoint supports
  std::vector<Region> slabs;
  std::vector<std::vector<double>> sphere_coefficients;
  std::vector<ScalarField> sphere_samples;  ///< sum_i c_i u_i, |c| = 1
};

/// k seeds supported on k slabs along the first axis (equal widths, falling
/// back to slabs cut between crossings of q = alpha). Throws SlabInfeasible.
GenusSeeds genus_seeds(const Problem& problem, int k, int sphere_samples = 4,
                       std::uint64_t rng_seed = 0);

ScalarField sphere_combination(const std::vector<ScalarField>& seeds,
                               const std::vector<double>& c);

}  // namespace sbp
