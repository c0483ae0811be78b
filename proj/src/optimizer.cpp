#include "sbp/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sbp/errors.hpp"
#include "sbp/kernels.hpp"

namespace sbp {

void OptimizeOptions::validate() const {
  if (!(grad_tol > 0 && armijo_c > 0 && initial_step > 0 && dedupe_l2 > 0 &&
        max_step_growth >= 1 && max_iters > 0))
    throw std::invalid_argument("OptimizeOptions: parameters must be positive");
  if (!(backtrack_factor > 0 && backtrack_factor < 1))
    throw std::invalid_argument("OptimizeOptions: backtrack_factor must lie in (0, 1)");
}

namespace {

constexpr double kMinStep = 1e-14;

struct Direction {
  ScalarField d;          // descent direction, tangent in the descent metric
  double metric_sq = 0;   // ||d||^2 in the descent metric
  double sobolev_norm = 0;
  double ps_residual = 0;
};

Direction descent_direction(const ScalarField& u, const PotentialPair& pair,
                            const Problem& problem, GradientMetric metric) {
  const ScalarField g = strong_gradient(u, pair, problem);
  const ScalarField g_s = solve_poisson_dirichlet(g, problem.solver);
  TangentProjection ts = tangent_project(u, g_s, problem, GradientMetric::SobolevH10);
  Direction out;
  const double sob_sq = gradient_energy(ts.g_t);
  out.sobolev_norm = std::sqrt(sob_sq);
  if (metric == GradientMetric::SobolevH10) {
    out.metric_sq = sob_sq;
    out.ps_residual = norm_l2(ts.g_t);
    out.d = -std::move(ts.g_t);
  } else {
    TangentProjection tl = tangent_project(u, g, problem, GradientMetric::L2);
    out.metric_sq = inner(tl.g_t, tl.g_t);
    out.ps_residual = std::sqrt(out.metric_sq);
    out.d = -std::move(tl.g_t);
  }
  return out;
}

void finish(SolveResult& r, const Problem& problem, const JEvaluation& ev) {
  r.J_value = ev.value;
  r.energy = ev.energy;
  r.phi_u = ev.pair;
  r.constraint_residuals = constraint_values(r.u, problem);
  const auto [omega, mu] = recover_multipliers(r.u, problem);
  r.omega = omega;
  r.mu = mu;
}

}  // namespace

SolveResult minimize_on_M(const ScalarField& u0, const Problem& problem,
                          const OptimizeOptions& opts) {
  opts.validate();
  const ConstraintValues c0 = constraint_values(u0, problem);
  if (std::fabs(c0.g1) > 1e-8 || std::fabs(c0.g2) > 1e-8 * (1.0 + std::fabs(problem.alpha)) ||
      max_abs_boundary(u0) > 1e-12)
    throw std::invalid_argument("minimize_on_M: starting point is not on M");

  SolveResult r;
  r.u = retract(u0, problem);
  JEvaluation ev = eval_J(r.u, problem);
  double t_prev = opts.initial_step * opts.backtrack_factor;
  const double t_cap = opts.initial_step * opts.max_step_growth;
  ScalarField u_prev, d_prev;
  auto metric_inner = [&](const ScalarField& a, const ScalarField& b) {
    if (opts.metric == GradientMetric::L2) return inner(a, b);
    return 0.25 * (gradient_energy(a + b) - gradient_energy(a - b));
  };

  for (int iter = 0;; ++iter) {
    Direction dir = descent_direction(r.u, ev.pair, problem, opts.metric);
    r.tangent_grad_norm = dir.sobolev_norm;
    r.history.push_back({ev.value, 0.0, dir.sobolev_norm, dir.ps_residual});
    if (dir.sobolev_norm <= opts.grad_tol) {
      r.converged = true;
      break;
    }
    if (iter >= opts.max_iters) {
      r.message = "maximum iterations reached";
      break;
    }

    const double slack = 1e-13 * (1.0 + std::fabs(ev.value));
    double t = std::min(t_cap, t_prev / opts.backtrack_factor);
    if (opts.bb_step && iter > 0) {
      // s = u_k - u_{k-1}, y = d_{k-1} - d_k (the d are negative gradients)
      const ScalarField s_k = r.u - u_prev;
      const ScalarField y_k = d_prev - dir.d;
      const double sy = metric_inner(s_k, y_k);
      if (sy > 0.0) t = std::min(t_cap, metric_inner(s_k, s_k) / sy);
    }
    u_prev = r.u;
    d_prev = dir.d;
    for (;;) {
      if (t < kMinStep)
        throw LineSearchStall("line search stalled at iteration " + std::to_string(iter) +
                              " (tangent gradient norm " +
                              std::to_string(dir.sobolev_norm) + ")");
      ScalarField trial = r.u;
      kernels::axpy(t, dir.d.data(), trial.data(), trial.size());
      bool ok = true;
      try {
        trial = retract(trial, problem);
      } catch (const DegenerateDirection&) {
        ok = false;
      } catch (const NewtonDivergence&) {
        ok = false;
      }
      if (ok) {
        JEvaluation trial_ev = eval_J(trial, problem);
        if (trial_ev.value <= ev.value - opts.armijo_c * t * dir.metric_sq + slack) {
          r.u = std::move(trial);
          ev = std::move(trial_ev);
          r.history.back().step = t;
          t_prev = t;
          break;
        }
      }
      t *= opts.backtrack_factor;
    }
    ++r.iterations;
  }
  finish(r, problem, ev);
  return r;
}

SolveResult evaluate_state(const ScalarField& u, const Problem& problem, double grad_tol) {
  SolveResult r;
  r.u = u;
  const JEvaluation ev = eval_J(u, problem);
  const Direction dir = descent_direction(u, ev.pair, problem, GradientMetric::SobolevH10);
  r.tangent_grad_norm = dir.sobolev_norm;
  r.converged = dir.sobolev_norm <= grad_tol;
  finish(r, problem, ev);
  return r;
}

std::pair<double, double> recover_multipliers(const ScalarField& u, const Problem& problem) {
  const PotentialPair pair = phi_map(u, problem);
  const ScalarField g = strong_gradient(u, pair, problem);
  const ScalarField qu = times(problem.q, u);
  const double m0 = inner(u, u), m1 = inner(qu, u), m2 = inner(qu, qu);
  const double r1 = inner(g, u), r2 = inner(g, qu);
  // [m0 -m1; m1 -m2] (omega, mu) = (r1, r2)
  const double det = m1 * m1 - m0 * m2;
  if (!(std::fabs(det) > 1e-12 * m0 * m2))
    throw SingularMultiplierSystem(
        "int q^2 u^2 equals alpha^2 to rounding: q is constant on the support of u");
  const double omega = (-m2 * r1 + m1 * r2) / det;
  const double mu = (-m1 * r1 + m0 * r2) / det;
  return {omega, mu};
}

double multiplier_residual(const ScalarField& u, double omega, double mu,
                           const Problem& problem, GradientMetric metric) {
  const PotentialPair pair = phi_map(u, problem);
  ScalarField res = strong_gradient(u, pair, problem);
  const ScalarField qu = times(problem.q, u);
  kernels::axpy(-omega, u.data(), res.data(), res.size());
  kernels::axpy(mu, qu.data(), res.data(), res.size());
  if (metric == GradientMetric::SobolevH10) res = solve_poisson_dirichlet(res, problem.solver);
  return norm_l2(res);
}

SolveResult polish_positive(const SolveResult& result, const Problem& problem,
                            const OptimizeOptions& opts) {
  const ScalarField start = retract(abs(result.u), problem);
  SolveResult out = minimize_on_M(start, problem, opts);
  out.iterations += result.iterations;
  return out;
}

bool same_state(const SolveResult& a, const SolveResult& b, double l2_tol) {
  if (std::fabs(a.J_value - b.J_value) > 1e-6) return false;
  const double minus = norm_l2(a.u - b.u);
  const double plus = norm_l2(a.u + b.u);
  return std::min(minus, plus) <= l2_tol;
}

std::vector<SolveResult> dedupe(std::vector<SolveResult> states, double l2_tol) {
  std::vector<SolveResult> kept;
  for (auto& s : states) {
    bool dup = false;
    for (const auto& k : kept)
      if (same_state(s, k, l2_tol)) {
        dup = true;
        break;
      }
    if (!dup) kept.push_back(std::move(s));
  }
  return kept;
}

std::vector<SolveResult> excited_states(const Problem& problem, int k,
                                        const OptimizeOptions& opts,
                                        const ExcitedOptions& eopts,
                                        std::vector<std::string>* warnings) {
  if (k < 1) throw std::invalid_argument("excited_states: k must be at least 1");
  auto warn = [&](const std::string& msg) {
    if (warnings) warnings->push_back(msg);
  };
  std::vector<SolveResult> found;
  auto run = [&](const ScalarField& start, const std::string& label) {
    try {
      SolveResult r = minimize_on_M(start, problem, opts);
      if (r.converged)
        found.push_back(std::move(r));
      else
        warn(label + ": not converged (" + r.message + ")");
    } catch (const LineSearchStall& e) {
      warn(label + ": " + e.what());
    }
  };
  for (int j = 1; j <= k; ++j) {
    const GenusSeeds gs =
        genus_seeds(problem, j, j == 1 ? 0 : eopts.sphere_samples, eopts.seed + j);
    for (std::size_t i = 0; i < gs.seeds.size(); ++i)
      run(gs.seeds[i], "family " + std::to_string(j) + " seed " + std::to_string(i));
    for (std::size_t i = 0; i < gs.sphere_samples.size(); ++i)
      run(gs.sphere_samples[i],
          "family " + std::to_string(j) + " sphere sample " + std::to_string(i));
  }
  std::stable_sort(found.begin(), found.end(),
                   [](const SolveResult& a, const SolveResult& b) { return a.J_value < b.J_value; });
  std::vector<SolveResult> out = dedupe(std::move(found), opts.dedupe_l2);
  if (static_cast<int>(out.size()) < k)
    warn("found " + std::to_string(out.size()) + " distinct states, fewer than k = " +
         std::to_string(k));
  return out;
}

bool ps_envelope_nonincreasing(const std::vector<IterationRecord>& history, int window,
                               int block) {
  const int n = static_cast<int>(history.size());
  const int start = std::max(0, n - window);
  double prev = std::numeric_limits<double>::infinity();
  for (int b = start; b < n; b += block) {
    double m = 0.0;
    for (int i = b; i < std::min(n, b + block); ++i) m = std::max(m, history[i].ps_residual);
    if (m > prev) return false;
    prev = m;
  }
  return true;
}

}  // namespace sbp
