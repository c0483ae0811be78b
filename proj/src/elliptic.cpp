#include "sbp/elliptic.hpp"

#include <cmath>
#include <limits>
#include <functional>
#include <stdexcept>

#include "sbp/dense.hpp"
#include "sbp/errors.hpp"
#include "sbp/kernels.hpp"

namespace sbp {

void LinearSolveOptions::validate() const {
  if (!(rel_tolerance > 0.0 && rel_tolerance < 1.0))
    throw std::invalid_argument("rel_tolerance must lie in (0, 1)");
}

void project_zero_mean(ScalarField& f) {
  const double m = mean(f);
  for (double& v : f.values()) v -= m;
}

ScalarField neumann_boundary_source(const BoundaryData& g) {
  return apply_laplacian_neumann(ScalarField(g.grid()), g);
}

namespace {

using Operator = std::function<void(const ScalarField&, ScalarField&)>;

double diagonal_of_laplacian(const GridSpec& grid) {
  double d = 0.0;
  for (int a = 0; a < grid.dim(); ++a)
    d += 2.0 / (grid.spacing(a) * grid.spacing(a));
  return d;
}

// Preconditioned CG for a self-adjoint, positive (semi)definite operator in
// the quadrature inner product. `singular` keeps every vector mean-free.
ScalarField conjugate_gradient(const Operator& op, const ScalarField& b,
                               double diag, bool singular,
                               const LinearSolveOptions& opts, SolveInfo* info) {
  opts.validate();
  const GridSpec& grid = b.grid();
  const std::size_t n = grid.size();
  const double* w = grid.weights().data();
  const std::size_t max_it = opts.max_iterations ? opts.max_iterations : 10 * n;
  const double inv_diag = opts.preconditioner == Preconditioner::diagonal ? 1.0 / diag : 1.0;

  ScalarField x(grid);
  const double bnorm = std::sqrt(kernels::weighted_dot(w, b.data(), b.data(), n));
  if (bnorm == 0.0) {
    if (info) *info = {0, 0.0};
    return x;
  }

  ScalarField r = b, z(grid), p(grid), Ap(grid);
  std::size_t it = 0;
  double rel = 1.0;
  double target = opts.rel_tolerance;
  // Restarts refresh the recurrence residual with the true one.
  for (int restart = 0; restart < 4; ++restart) {
    if (restart > 0) {
      op(x, Ap);
      for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - Ap[i];
      if (singular) project_zero_mean(r);
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag * r[i];
    p = z;
    double rz = kernels::weighted_dot(w, r.data(), z.data(), n);
    rel = std::sqrt(kernels::weighted_dot(w, r.data(), r.data(), n)) / bnorm;
    while (rel > opts.rel_tolerance && it < max_it) {
      op(p, Ap);
      if (singular) project_zero_mean(Ap);
      const double pAp = kernels::weighted_dot(w, p.data(), Ap.data(), n);
      if (!(pAp > 0.0)) break;
      const double alpha = rz / pAp;
      kernels::axpy(alpha, p.data(), x.data(), n);
      kernels::axpy(-alpha, Ap.data(), r.data(), n);
      for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag * r[i];
      const double rz_new = kernels::weighted_dot(w, r.data(), z.data(), n);
      kernels::xpby(z.data(), rz_new / rz, p.data(), n);
      rz = rz_new;
      rel = std::sqrt(kernels::weighted_dot(w, r.data(), r.data(), n)) / bnorm;
      ++it;
    }
    op(x, Ap);
    double true_r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = b[i] - Ap[i];
      true_r2 += w[i] * d * d;
    }
    if (singular) {
      const double m = mean(b - Ap);
      true_r2 -= m * m * grid.volume();
    }
    rel = std::sqrt(std::max(true_r2, 0.0)) / bnorm;
    // The computed residual of an exact solution is already of size
    // eps ||A|| ||x||; tolerances below that are met at this floor.
    const double xnorm = std::sqrt(kernels::weighted_dot(w, x.data(), x.data(), n));
    target = std::max(opts.rel_tolerance,
                      std::numeric_limits<double>::epsilon() * 2.0 * diag * xnorm / bnorm);
    if (rel <= target || it >= max_it) break;
  }
  if (singular) project_zero_mean(x);
  if (info) *info = {it, rel};
  if (rel > target || !x.all_finite()) throw NoConvergence(it, rel);
  return x;
}

}  // namespace

ScalarField solve_helmholtz_neumann(const ScalarField& f, const BoundaryData& g,
                                    const LinearSolveOptions& opts,
                                    SolveInfo* info) {
  if (opts.backend == LinearBackend::dense) return dense::solve_helmholtz_neumann(f, g);
  // (I - Delta_N) v = B g - f
  ScalarField b = neumann_boundary_source(g) - f;
  const BoundaryData zero(f.grid());
  auto op = [&zero](const ScalarField& v, ScalarField& out) {
    out = v - apply_laplacian_neumann(v, zero);
  };
  return conjugate_gradient(op, b, 1.0 + diagonal_of_laplacian(f.grid()), false,
                            opts, info);
}

ScalarField solve_poisson_neumann_zeromean(const ScalarField& f,
                                           const BoundaryData& g,
                                           const LinearSolveOptions& opts,
                                           SolveInfo* info,
                                           double compat_tolerance) {
  const double mismatch = integrate(f) - boundary_integrate(g);
  const double tol = compat_tolerance >= 0.0
                         ? compat_tolerance
                         : 1e-8 * (integrate(abs(f)) + boundary_integrate_abs(g));
  if (std::fabs(mismatch) > tol)
    throw IncompatibleData("Neumann Poisson data incompatible: int f - oint g = " +
                           std::to_string(mismatch));
  if (opts.backend == LinearBackend::dense)
    return dense::solve_poisson_neumann_zeromean(f, g);
  // -Delta_N v = B g - f, right-hand side projected to mean zero
  ScalarField b = neumann_boundary_source(g) - f;
  project_zero_mean(b);
  const BoundaryData zero(f.grid());
  auto op = [&zero](const ScalarField& v, ScalarField& out) {
    out = -apply_laplacian_neumann(v, zero);
  };
  return conjugate_gradient(op, b, diagonal_of_laplacian(f.grid()), true, opts, info);
}

ScalarField solve_poisson_dirichlet(const ScalarField& f,
                                    const LinearSolveOptions& opts,
                                    SolveInfo* info) {
  if (opts.backend == LinearBackend::dense) return dense::solve_poisson_dirichlet(f);
  ScalarField b = f;
  zero_boundary(b);
  auto op = [](const ScalarField& v, ScalarField& out) {
    out = -apply_laplacian_dirichlet(v);
  };
  return conjugate_gradient(op, b, diagonal_of_laplacian(f.grid()), false, opts, info);
}

}  // namespace sbp
