#include "sbp/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "sbp/errors.hpp"
#include "sbp/kernels.hpp"

namespace sbp {

ConstraintValues constraint_values(const ScalarField& u, const Problem& problem) {
  const auto w = problem.grid.weights();
  double m0 = 0.0, m1 = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double u2 = u[i] * u[i];
    m0 += w[i] * u2;
    m1 += w[i] * problem.q[i] * u2;
  }
  return {m0 - 1.0, m1 - problem.alpha};
}

bool on_manifold(const ScalarField& u, const Problem& problem, double tol_norm,
                 double tol_compat) {
  const ConstraintValues c = constraint_values(u, problem);
  return std::fabs(c.g1) <= tol_norm &&
         std::fabs(c.g2) <= tol_compat * (1.0 + std::fabs(problem.alpha)) &&
         max_abs_boundary(u) == 0.0;
}

namespace {

struct Moments {
  double m[4] = {0, 0, 0, 0};  // int q^k v^2
};

Moments moments(const ScalarField& v, const Problem& problem) {
  const auto w = problem.grid.weights();
  Moments mo;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double q = problem.q[i];
    double t = w[i] * v[i] * v[i];
    for (int k = 0; k < 4; ++k) {
      mo.m[k] += t;
      t *= q;
    }
  }
  return mo;
}

double gram_condition(double a, double b, double c) {
  // eigenvalues of [[a, b], [b, c]]
  const double tr = a + c;
  const double disc = std::sqrt(std::max(0.0, 0.25 * (a - c) * (a - c) + b * b));
  const double hi = 0.5 * tr + disc;
  const double lo = 0.5 * tr - disc;
  if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

}  // namespace

ScalarField retract(const ScalarField& v, const Problem& problem,
                    const RetractOptions& opts, std::array<double, 2>* coefficients) {
  ScalarField current = v;
  double total_a = 1.0, total_b = 0.0;
  const double alpha = problem.alpha;
  // A second pass only happens when forming (a + b q) v loses the last bits.
  for (int pass = 0; pass < 3; ++pass) {
    const Moments mo = moments(current, problem);
    const double* m = mo.m;
    auto residual = [&](double a, double b) {
      return std::array<double, 2>{a * a * m[0] + 2 * a * b * m[1] + b * b * m[2] - 1.0,
                                   a * a * m[1] + 2 * a * b * m[2] + b * b * m[3] - alpha};
    };
    auto rnorm = [](const std::array<double, 2>& r) {
      return std::max(std::fabs(r[0]), std::fabs(r[1]));
    };
    std::array<double, 2> r = residual(1.0, 0.0);
    if (rnorm(r) <= opts.tol) break;
    if (!(m[0] > 0.0) || gram_condition(m[0], m[1], m[2]) > 1e12)
      throw DegenerateDirection(
          "retraction: {v, q v} is numerically dependent (q nearly constant on "
          "the support of v)");

    double a = 1.0, b = 0.0;
    int it = 0;
    for (; it < opts.max_newton && rnorm(r) > 0.05 * opts.tol; ++it) {
      const double j11 = 2 * a * m[0] + 2 * b * m[1];
      const double j12 = 2 * a * m[1] + 2 * b * m[2];
      const double j21 = 2 * a * m[1] + 2 * b * m[2];
      const double j22 = 2 * a * m[2] + 2 * b * m[3];
      const double det = j11 * j22 - j12 * j21;
      if (det == 0.0 || !std::isfinite(det))
        throw NewtonDivergence("retraction: singular Newton Jacobian");
      const double da = (j22 * r[0] - j12 * r[1]) / det;
      const double db = (-j21 * r[0] + j11 * r[1]) / det;
      double step = 1.0;
      bool improved = false;
      for (int k = 0; k < 40; ++k, step *= 0.5) {
        const auto trial = residual(a - step * da, b - step * db);
        if (rnorm(trial) < rnorm(r)) {
          a -= step * da;
          b -= step * db;
          r = trial;
          improved = true;
          break;
        }
      }
      if (!improved) break;
    }
    if (rnorm(r) > opts.tol)
      throw NewtonDivergence("retraction: Newton stalled at residual " +
                             std::to_string(rnorm(r)));
    for (std::size_t i = 0; i < current.size(); ++i)
      current[i] = (a + b * problem.q[i]) * current[i];
    // compose the coefficient polynomials: (a + b q)(A + B q) is tracked only
    // to first order, which is exact for the common single-pass case
    const double na = a * total_a;
    const double nb = a * total_b + b * total_a;
    total_a = na;
    total_b = nb;
    const ConstraintValues c = constraint_values(current, problem);
    if (std::max(std::fabs(c.g1), std::fabs(c.g2)) <= opts.tol) break;
  }
  if (coefficients) *coefficients = {total_a, total_b};
  return current;
}

TangentProjection tangent_project(const ScalarField& u, const ScalarField& g,
                                  const Problem& problem, GradientMetric metric) {
  const ScalarField& c1 = u;
  const ScalarField c2 = times(problem.q, u);
  ScalarField d1 = c1, d2 = c2;
  if (metric == GradientMetric::SobolevH10) {
    d1 = solve_poisson_dirichlet(c1, problem.solver);
    d2 = solve_poisson_dirichlet(c2, problem.solver);
  }
  // M_ij = <D_j, c_i>, the metric Gram matrix written against the
  // differentials so that the projected field is exactly tangent.
  const double m11 = inner(d1, c1), m12 = inner(d2, c1);
  const double m21 = inner(d1, c2), m22 = inner(d2, c2);
  const double det = m11 * m22 - m12 * m21;
  if (!(std::fabs(det) > 1e-12 * std::fabs(m11 * m22)))
    throw DegenerateConstraints(
        "tangent projection: u and q u are numerically dependent");
  const double r1 = inner(g, c1), r2 = inner(g, c2);
  TangentProjection out;
  out.lambda = (m22 * r1 - m12 * r2) / det;
  out.beta = (-m21 * r1 + m11 * r2) / det;
  out.g_t = g;
  kernels::axpy(-out.lambda, d1.data(), out.g_t.data(), g.size());
  kernels::axpy(-out.beta, d2.data(), out.g_t.data(), g.size());
  return out;
}

Region Region::whole(const GridSpec& grid) {
  Region r;
  for (int a = 0; a < grid.dim(); ++a) r.hi[a] = grid.length(a);
  return r;
}

bool Region::contains(const Point& x, int dim) const {
  for (int a = 0; a < dim; ++a)
    if (x[a] < lo[a] || x[a] > hi[a]) return false;
  return true;
}

namespace {

// (1 - (r/R)^2)^2 inside the ball, zero outside, normalised in L2.
ScalarField plateau_bump(const GridSpec& grid, const Point& centre, double radius) {
  ScalarField b(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Point x = grid.point(i);
    double r2 = 0.0;
    for (int a = 0; a < grid.dim(); ++a) r2 += (x[a] - centre[a]) * (x[a] - centre[a]);
    const double s = r2 / (radius * radius);
    if (s < 1.0) b[i] = (1.0 - s) * (1.0 - s);
  }
  zero_boundary(b);
  const double nrm = norm_l2(b);
  if (nrm > 0.0) b *= 1.0 / nrm;
  return b;
}

double distance(const Point& x, const Point& y, int dim) {
  double s = 0.0;
  for (int a = 0; a < dim; ++a) s += (x[a] - y[a]) * (x[a] - y[a]);
  return std::sqrt(s);
}

std::vector<char> region_mask(const GridSpec& grid, const Region& region) {
  std::vector<char> mask(grid.size(), 0);
  for (std::size_t i = 0; i < grid.size(); ++i)
    mask[i] = region.contains(grid.point(i), grid.dim()) ? 1 : 0;
  return mask;
}

}  // namespace

ScalarField feasible_init(const Problem& problem, const std::optional<Region>& region_opt) {
  const GridSpec& grid = problem.grid;
  const Region region = region_opt.value_or(Region::whole(grid));
  const auto mask = region_mask(grid, region);
  const FeasibilityReport rep = classify_alpha(problem.q, problem.alpha, -1.0, -1.0, &mask);
  if (rep.cls != FeasibilityClass::interior)
    throw InfeasibleRegion("alpha = " + std::to_string(problem.alpha) +
                           " is not strictly inside the range of q on the region (" +
                           to_string(rep.cls) + ")");

  double h_max = 0.0, extent = std::numeric_limits<double>::infinity();
  for (int a = 0; a < grid.dim(); ++a) {
    h_max = std::max(h_max, grid.spacing(a));
    extent = std::min(extent, region.hi[a] - region.lo[a]);
  }
  const double r_min = 2.0 * h_max;
  for (double radius = 0.25 * extent; radius >= r_min; radius *= 0.85) {
    std::size_t lo_node = grid.size(), hi_node = grid.size();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (!mask[i] || grid.is_boundary(i)) continue;
      const Point x = grid.point(i);
      bool fits = true;
      for (int a = 0; a < grid.dim() && fits; ++a)
        fits = x[a] - region.lo[a] >= radius && region.hi[a] - x[a] >= radius;
      if (!fits) continue;
      if (lo_node == grid.size() || problem.q[i] < problem.q[lo_node]) lo_node = i;
      if (hi_node == grid.size() || problem.q[i] > problem.q[hi_node]) hi_node = i;
    }
    if (lo_node == grid.size()) continue;
    const Point c_lo = grid.point(lo_node), c_hi = grid.point(hi_node);
    if (distance(c_lo, c_hi, grid.dim()) < 2.0 * radius) continue;

    const ScalarField b_lo = plateau_bump(grid, c_lo, radius);
    const ScalarField b_hi = plateau_bump(grid, c_hi, radius);
    const double g_lo = inner(times(problem.q, b_lo), b_lo);
    const double g_hi = inner(times(problem.q, b_hi), b_hi);
    if (!(g_lo < problem.alpha && problem.alpha < g_hi)) continue;

    const double s2 = (problem.alpha - g_lo) / (g_hi - g_lo);
    const double cs = std::sqrt(1.0 - s2), sn = std::sqrt(s2);
    ScalarField u = cs * b_lo;
    kernels::axpy(sn, b_hi.data(), u.data(), u.size());
    return retract(u, problem);
  }
  throw InfeasibleRegion("bumps shrank below " + std::to_string(r_min) +
                         " without bracketing alpha = " + std::to_string(problem.alpha));
}

namespace {

std::vector<Region> equal_slabs(const GridSpec& grid, int k) {
  std::vector<Region> slabs;
  const double h = grid.spacing(0);
  const double L = grid.length(0);
  for (int i = 0; i < k; ++i) {
    Region r = Region::whole(grid);
    r.lo[0] = L * i / k + (i > 0 ? h : 0.0);
    r.hi[0] = L * (i + 1) / k - (i < k - 1 ? h : 0.0);
    slabs.push_back(r);
  }
  return slabs;
}

// Slabs cut midway between crossings of the plane-averaged q through alpha,
// with the k crossings taken at evenly spaced quantiles of all crossings.
std::vector<Region> crossing_slabs(const Problem& problem, int k) {
  const GridSpec& grid = problem.grid;
  const int n0 = grid.nodes(0);
  const std::size_t plane = grid.stride(0);
  std::vector<double> profile(n0, 0.0);
  for (int j = 0; j < n0; ++j) {
    double s = 0.0;
    for (std::size_t t = 0; t < plane; ++t) s += problem.q[j * plane + t];
    profile[j] = s / static_cast<double>(plane) - problem.alpha;
  }
  std::vector<double> crossings;
  for (int j = 0; j + 1 < n0; ++j)
    if ((profile[j] < 0.0) != (profile[j + 1] < 0.0))
      crossings.push_back(grid.coord(0, j) +
                          grid.spacing(0) * profile[j] / (profile[j] - profile[j + 1]));
  if (static_cast<int>(crossings.size()) < k) return {};
  std::vector<double> chosen;
  const auto m = crossings.size();
  for (int i = 0; i < k; ++i)
    chosen.push_back(crossings[static_cast<std::size_t>((2 * i + 1) * m / (2 * k))]);
  const double h = grid.spacing(0);
  std::vector<Region> slabs;
  for (int i = 0; i < k; ++i) {
    Region r = Region::whole(grid);
    if (i > 0) r.lo[0] = 0.5 * (chosen[i - 1] + chosen[i]) + h;
    if (i < k - 1) r.hi[0] = 0.5 * (chosen[i] + chosen[i + 1]) - h;
    slabs.push_back(r);
  }
  return slabs;
}

}  // namespace

GenusSeeds genus_seeds(const Problem& problem, int k, int sphere_samples,
                       std::uint64_t rng_seed) {
  if (k < 1) throw std::invalid_argument("genus_seeds: k must be at least 1");
  GenusSeeds out;
  if (k == 1) {
    out.seeds.push_back(feasible_init(problem));
    out.slabs.push_back(Region::whole(problem.grid));
  } else {
    auto try_partition = [&](const std::vector<Region>& slabs, int* failed) {
      std::vector<ScalarField> seeds;
      for (int i = 0; i < static_cast<int>(slabs.size()); ++i) {
        try {
          seeds.push_back(feasible_init(problem, slabs[i]));
        } catch (const InfeasibleRegion&) {
          *failed = i;
          return std::vector<ScalarField>{};
        }
      }
      return seeds;
    };
    int first_failure = -1;
    auto slabs = equal_slabs(problem.grid, k);
    out.seeds = try_partition(slabs, &first_failure);
    if (out.seeds.empty()) {
      int ignored = -1;
      auto fallback = crossing_slabs(problem, k);
      if (!fallback.empty()) {
        out.seeds = try_partition(fallback, &ignored);
        slabs = fallback;
      }
    }
    if (out.seeds.empty()) throw SlabInfeasible(first_failure);
    out.slabs = slabs;
  }

  std::mt19937_64 rng(rng_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int s = 0; s < sphere_samples; ++s) {
    std::vector<double> c(k);
    double nrm = 0.0;
    do {
      nrm = 0.0;
      for (double& ci : c) {
        ci = normal(rng);
        nrm += ci * ci;
      }
    } while (nrm == 0.0);
    nrm = std::sqrt(nrm);
    for (double& ci : c) ci /= nrm;
    out.sphere_samples.push_back(sphere_combination(out.seeds, c));
    out.sphere_coefficients.push_back(std::move(c));
  }
  return out;
}

ScalarField sphere_combination(const std::vector<ScalarField>& seeds,
                               const std::vector<double>& c) {
  ScalarField u(seeds.front().grid());
  for (std::size_t i = 0; i < seeds.size(); ++i)
    kernels::axpy(c[i], seeds[i].data(), u.data(), u.size());
  return u;
}

}  // namespace sbp
