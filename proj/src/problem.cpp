#include "sbp/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "sbp/errors.hpp"

namespace sbp {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

ScalarField evaluate_coupling(const CouplingSpec& spec, const GridSpec& grid) {
  using std::numbers::pi;
  return std::visit(
      overloaded{
          [&](const AffineCoupling& c) {
            return ScalarField::from_function(
                grid, [&](const Point& x) { return c.a + c.b * x[0]; });
          },
          [&](const RadialBumpCoupling& c) {
            return ScalarField::from_function(grid, [&](const Point& x) {
              double r2 = 0.0;
              for (int a = 0; a < grid.dim(); ++a)
                r2 += (x[a] - c.center[a]) * (x[a] - c.center[a]);
              const double s = r2 / (c.radius * c.radius);
              return s < 1.0 ? c.base + c.height * (1.0 - s) * (1.0 - s) : c.base;
            });
          },
          [&](const OscillatingCoupling& c) {
            return ScalarField::from_function(grid, [&](const Point& x) {
              return c.base + c.tilt * x[0] +
                     c.amplitude * std::sin(c.frequency * pi * x[0]);
            });
          },
          [&](const TabulatedCoupling& c) {
            ScalarField q = read_field_csv(c.file);
            if (!(q.grid() == grid))
              throw Error("tabulated coupling " + c.file + " has grid " +
                          q.grid().describe() + ", expected " + grid.describe());
            return ScalarField(grid, std::vector<double>(q.values().begin(),
                                                         q.values().end()));
          },
      },
      spec);
}

LinearSolveOptions reduction_solver_defaults() {
  LinearSolveOptions opts;
  opts.rel_tolerance = 1e-12;
  return opts;
}

double compute_alpha(const BoundaryData& h1, const BoundaryData& h2) {
  return boundary_integrate(h2) - boundary_integrate(h1);
}

double boundary_data_scale(const Problem& problem) {
  return 1.0 + boundary_integrate_abs(problem.h1) +
         boundary_integrate_abs(problem.h2);
}

ChiSolution solve_chi(const Problem& problem) {
  const GridSpec& grid = problem.grid;
  const ScalarField source(grid, problem.alpha / grid.volume());
  ChiSolution out;
  out.theta = solve_helmholtz_neumann(source, problem.h2, problem.solver);
  const double scale = boundary_data_scale(problem);
  const double gap = std::fabs(integrate(out.theta) - boundary_integrate(problem.h1));
  if (gap > 5e-8 * scale)
    throw ConsistencyViolation("int theta differs from oint h1 by " +
                               std::to_string(gap));
  out.chi = solve_poisson_neumann_zeromean(out.theta, problem.h1, problem.solver,
                                           nullptr, 5e-8 * scale);
  return out;
}

Problem make_problem(ScalarField q, double kappa, double p, BoundaryData h1,
                     BoundaryData h2, LinearSolveOptions solver) {
  if (!(p > 2.0 && p <= 10.0 / 3.0))
    throw std::invalid_argument("exponent p must lie in (2, 10/3]");
  if (!(kappa >= 0.0) || !std::isfinite(kappa))
    throw std::invalid_argument("kappa must be finite and non-negative");
  if (!q.all_finite()) throw std::invalid_argument("coupling q is not finite");
  if (!(h1.grid() == q.grid()) || !(h2.grid() == q.grid()))
    throw std::invalid_argument("boundary data and coupling live on different grids");
  if (!h1.all_finite() || !h2.all_finite())
    throw std::invalid_argument("boundary data is not finite");
  solver.validate();

  Problem pr;
  pr.grid = q.grid();
  pr.q = std::move(q);
  pr.kappa = kappa;
  pr.p = p;
  pr.h1 = std::move(h1);
  pr.h2 = std::move(h2);
  pr.alpha = compute_alpha(pr.h1, pr.h2);
  pr.solver = solver;
  auto chi = solve_chi(pr);
  pr.chi = std::move(chi.chi);
  pr.theta = std::move(chi.theta);
  return pr;
}

std::string to_string(FeasibilityClass c) {
  switch (c) {
    case FeasibilityClass::interior: return "interior";
    case FeasibilityClass::boundary_degenerate: return "boundary_degenerate";
    case FeasibilityClass::infeasible: return "infeasible";
  }
  return "unknown";
}

FeasibilityReport classify_alpha(const ScalarField& q, double alpha,
                                 double level_eps, double gap_eps,
                                 const std::vector<char>* mask) {
  FeasibilityReport rep;
  rep.alpha = alpha;
  rep.q_min = std::numeric_limits<double>::infinity();
  rep.q_max = -std::numeric_limits<double>::infinity();
  std::size_t count = 0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (mask && !(*mask)[i]) continue;
    rep.q_min = std::min(rep.q_min, q[i]);
    rep.q_max = std::max(rep.q_max, q[i]);
    ++count;
  }
  if (count == 0) return rep;
  const double range = rep.q_max - rep.q_min;
  rep.gap_eps = gap_eps >= 0.0 ? gap_eps : 1e-9 * range;
  rep.level_eps = level_eps >= 0.0 ? level_eps : 1e-3 * range;

  std::size_t on_level = 0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (mask && !(*mask)[i]) continue;
    if (std::fabs(q[i] - alpha) <= rep.level_eps) ++on_level;
  }
  rep.level_set_fraction = static_cast<double>(on_level) / static_cast<double>(count);

  if (rep.q_min + rep.gap_eps < alpha && alpha < rep.q_max - rep.gap_eps)
    rep.cls = FeasibilityClass::interior;
  else if (std::fabs(alpha - rep.q_min) <= rep.gap_eps ||
           std::fabs(alpha - rep.q_max) <= rep.gap_eps)
    rep.cls = FeasibilityClass::boundary_degenerate;
  else
    rep.cls = FeasibilityClass::infeasible;
  return rep;
}

}  // namespace sbp
