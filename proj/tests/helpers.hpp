#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "sbp/problem.hpp"

namespace sbp::testing {

inline constexpr double pi = std::numbers::pi;

// q = x, h1 = 0, h2 = 0.25 on both ends (alpha = 0.5).
inline Problem benchmark_problem(int n, double kappa = 1.0, double p = 3.0) {
  const GridSpec g = GridSpec::uniform(1, n);
  return make_problem(evaluate_coupling(AffineCoupling{0.0, 1.0}, g), kappa, p,
                      BoundaryData(g, 0.0), BoundaryData(g, 0.25));
}

// q = x1 on the unit square, h2 = 0.125 on every edge (alpha = 0.5).
inline Problem square_problem(int n, double kappa = 1.0) {
  const GridSpec g = GridSpec::uniform(2, n);
  return make_problem(evaluate_coupling(AffineCoupling{0.0, 1.0}, g), kappa, 3.0,
                      BoundaryData(g, 0.0), BoundaryData(g, 0.125));
}

// Random combination of the first few Dirichlet sine modes per axis; vanishes
// on the boundary.
inline ScalarField random_smooth(const GridSpec& g, std::mt19937_64& rng, int modes = 5) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ScalarField f(g);
  const int total = g.dim() == 1 ? modes : modes * modes;
  for (int m = 0; m < total; ++m) {
    const int k1 = m % modes + 1, k2 = m / modes + 1;
    const double c = normal(rng) / (k1 * k2);
    for (std::size_t i = 0; i < f.size(); ++i) {
      const Point x = g.point(i);
      double v = std::sin(k1 * pi * x[0] / g.length(0));
      if (g.dim() > 1) v *= std::sin(k2 * pi * x[1] / g.length(1));
      if (g.dim() > 2) v *= std::sin(pi * x[2] / g.length(2));
      f[i] += c * v;
    }
  }
  zero_boundary(f);
  return f;
}

inline ScalarField random_nodal(const GridSpec& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  ScalarField f(g);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = uni(rng);
  return f;
}

}  // namespace sbp::testing

namespace sbp::testing {

// Oscillating coupling with strong focusing; several local minima on M.
inline Problem excited_problem(int n, double kappa = 40.0) {
  const GridSpec g = GridSpec::uniform(1, n);
  return make_problem(evaluate_coupling(OscillatingCoupling{0.0, 1.0, 6.0, 0.5}, g), kappa,
                      3.0, BoundaryData(g, 0.0), BoundaryData(g, 0.45));
}

}  // namespace sbp::testing
