#pragma once

// The three linear problems behind everything else:
//   Delta v - v = f,  dv/dn = g                 (Neumann Helmholtz)
//   Delta v = f,      dv/dn = g,  mean(v) = 0   (Neumann Poisson, zero-mean gauge)
//   -Delta v = f,     v = 0 on the boundary     (Dirichlet Poisson)
// solved matrix-free by preconditioned conjugate gradients in the quadrature
// inner product, or by dense LU for small oracle grids.

#include <cstddef>

#include "sbp/grid.hpp"

namespace sbp {

enum class Preconditioner { none, diagonal };
enum class LinearBackend { conjugate_gradient, dense };

struct LinearSolveOptions {
  double rel_tolerance = 1e-10;
  /// 0 selects 10 * node_count.
  std::size_t max_iterations = 0;
  Preconditioner preconditioner = Preconditioner::diagonal;
  LinearBackend backend = LinearBackend::conjugate_gradient;

  void validate() const;
};

struct SolveInfo {
  std::size_t iterations = 0;
  double relative_residual = 0.0;
};

ScalarField solve_helmholtz_neumann(const ScalarField& f, const BoundaryData& g,
                                    const LinearSolveOptions& opts = {},
                                    SolveInfo* info = nullptr);

/// Requires |int f - oint g| <= compat_tolerance; a negative tolerance selects
/// 1e-8 * (int|f| + oint|g|). The right-hand side is mean-projected before
/// solving. Throws IncompatibleData.
ScalarField solve_poisson_neumann_zeromean(const ScalarField& f,
                                           const BoundaryData& g,
                                           const LinearSolveOptions& opts = {},
                                           SolveInfo* info = nullptr,
                                           double compat_tolerance = -1.0);

ScalarField solve_poisson_dirichlet(const ScalarField& f,
                                    const LinearSolveOptions& opts = {},
                                    SolveInfo* info = nullptr);

/// Boundary source of the ghost-node closure: Delta_N(v, g) = Delta_N(v, 0) + B g.
ScalarField neumann_boundary_source(const BoundaryData& g);

/// Subtracts the quadrature mean.
void project_zero_mean(ScalarField& f);

}  // namespace sbp
