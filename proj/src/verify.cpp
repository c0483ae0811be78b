#include "sbp/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

#include <Eigen/Dense>

#include "sbp/dense.hpp"
#include "sbp/errors.hpp"

namespace sbp {

double ResidualReport::bc_max() const { return std::max({bc_u, bc_phi_n, bc_dphi_n}); }

bool ResidualReport::all_finite() const {
  for (double v : {eq1_residual, eq1_residual_full, eq1_discrete, eq2_residual,
                   eq2_residual_full, bc_u, bc_phi_n, bc_dphi_n, normalization,
                   compatibility, theta_mean_identity, phi_mean_gap})
    if (!std::isfinite(v) || v < 0.0) return false;
  return true;
}

namespace {

bool within_layer(const GridSpec& grid, std::size_t node, int layer) {
  const Index idx = grid.index(node);
  for (int a = 0; a < grid.dim(); ++a)
    if (idx[a] < layer || idx[a] > grid.nodes(a) - 1 - layer) return false;
  return true;
}

double signed_power(double u, double e) {
  if (u == 0.0) return 0.0;
  return std::pow(std::fabs(u), e) * u;
}

// -lap u + q phi u - kappa |u|^{p-2} u - omega u on interior nodes.
ScalarField eq1_field(const ScalarField& u, const ScalarField& lap_u, const ScalarField& phi,
                      double omega, const Problem& problem) {
  ScalarField r(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (problem.grid.is_boundary(i)) continue;
    r[i] = -lap_u[i] + problem.q[i] * phi[i] * u[i] -
           problem.kappa * signed_power(u[i], problem.p - 2.0) - omega * u[i];
  }
  return r;
}

}  // namespace

double interior_norm(const ScalarField& f, int layer) {
  const GridSpec& grid = f.grid();
  const auto w = grid.weights();
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (within_layer(grid, i, layer)) s += w[i] * f[i] * f[i];
  return std::sqrt(s);
}

ScalarField reference_laplacian(const ScalarField& f) {
  const GridSpec& grid = f.grid();
  ScalarField out(grid);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (grid.is_boundary(i)) continue;
    const Index idx = grid.index(i);
    double s = 0.0;
    for (int a = 0; a < grid.dim(); ++a) {
      const double h2 = grid.spacing(a) * grid.spacing(a);
      const std::size_t st = grid.stride(a);
      const int k = idx[a];
      if (k >= 2 && k <= grid.nodes(a) - 3) {
        s += (-f[i - 2 * st] + 16.0 * f[i - st] - 30.0 * f[i] + 16.0 * f[i + st] -
              f[i + 2 * st]) /
             (12.0 * h2);
      } else {
        s += (f[i - st] - 2.0 * f[i] + f[i + st]) / h2;
      }
    }
    out[i] = s;
  }
  return out;
}

BoundaryData one_sided_normal_derivative(const ScalarField& f) {
  const GridSpec& grid = f.grid();
  BoundaryData out(grid);
  for (std::size_t i : grid.boundary_nodes()) {
    const Index idx = grid.index(i);
    for (int a = 0; a < grid.dim(); ++a) {
      const double h = grid.spacing(a);
      const std::size_t s = grid.stride(a);
      const std::size_t slot = grid.face_slot(a, i);
      if (idx[a] == 0)
        out.face(2 * a)[slot] = (3.0 * f[i] - 4.0 * f[i + s] + f[i + 2 * s]) / (2.0 * h);
      if (idx[a] == grid.nodes(a) - 1)
        out.face(2 * a + 1)[slot] =
            (3.0 * f[i] - 4.0 * f[i - s] + f[i - 2 * s]) / (2.0 * h);
    }
  }
  return out;
}

namespace {

double max_face_gap(const BoundaryData& a, const BoundaryData& b) {
  double m = 0.0;
  for (int f = 0; f < a.grid().face_count(); ++f) {
    const auto fa = a.face(f), fb = b.face(f);
    for (std::size_t k = 0; k < fa.size(); ++k) m = std::max(m, std::fabs(fa[k] - fb[k]));
  }
  return m;
}

}  // namespace

ScalarField reconstruct_phi(const SolveResult& result, const Problem& problem) {
  ScalarField phi = result.phi_u.phi + problem.chi;
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i] += result.mu;
  return phi;
}

std::pair<double, double> eq2_residual(const ScalarField& u, const Problem& problem) {
  const PotentialPair pair = phi_map(u, problem);
  // Delta phi = psi + theta; Delta^2 phi - Delta phi = (Delta_N - I)(psi + theta)
  const ScalarField lap_phi = pair.psi + problem.theta;
  ScalarField r = apply_laplacian_neumann(lap_phi, problem.h2) - lap_phi;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= problem.q[i] * u[i] * u[i];
  return {interior_norm(r, 2), norm_l2(r)};
}

ResidualReport residual_original_system(const SolveResult& result, const Problem& problem) {
  ResidualReport rep;
  const ScalarField& u = result.u;
  const ScalarField phi = reconstruct_phi(result, problem);

  const ScalarField r4 = eq1_field(u, reference_laplacian(u), phi, result.omega, problem);
  rep.eq1_residual = interior_norm(r4, 2);
  rep.eq1_residual_full = interior_norm(r4, 1);
  const ScalarField r2 =
      eq1_field(u, apply_laplacian_dirichlet(u), phi, result.omega, problem);
  rep.eq1_discrete = interior_norm(r2, 1);

  const auto [e2, e2_full] = eq2_residual(u, problem);
  rep.eq2_residual = e2;
  rep.eq2_residual_full = e2_full;

  rep.bc_u = max_abs_boundary(u);
  rep.bc_phi_n = max_face_gap(one_sided_normal_derivative(phi), problem.h1);
  const ScalarField lap_phi = result.phi_u.psi + problem.theta;
  rep.bc_dphi_n = max_face_gap(one_sided_normal_derivative(lap_phi), problem.h2);

  const ConstraintValues c = constraint_values(u, problem);
  rep.normalization = std::fabs(c.g1);
  rep.compatibility = std::fabs(c.g2);
  rep.theta_mean_identity =
      std::fabs(integrate(problem.theta) - boundary_integrate(problem.h1));
  rep.phi_mean_gap = std::fabs(mean(phi) - result.mu);
  return rep;
}

RefinementRow make_row(const SolveResult& result, const Problem& problem,
                       const std::string& label) {
  RefinementRow row;
  row.label = label;
  row.n = problem.grid.nodes(0);
  row.h = problem.grid.spacing(0);
  row.J = result.J_value;
  row.omega = result.omega;
  row.mu = result.mu;
  row.residuals = residual_original_system(result, problem);
  row.iterations = result.iterations;
  row.converged = result.converged;
  row.tangent_grad_norm = result.tangent_grad_norm;
  return row;
}

std::vector<RefinementRow> refinement_study(const ProblemFactory& factory,
                                            const std::vector<GridSpec>& grids,
                                            const OptimizeOptions& opts) {
  std::vector<RefinementRow> rows;
  for (const GridSpec& grid : grids) {
    const Problem problem = factory(grid);
    const SolveResult first = minimize_on_M(feasible_init(problem), problem, opts);
    const SolveResult polished = polish_positive(first, problem, opts);
    rows.push_back(make_row(polished, problem, grid.describe()));
  }
  return rows;
}

std::vector<double> richardson_orders(const std::vector<double>& values) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 2 < values.size(); ++i)
    out.push_back(std::log2(std::fabs(values[i] - values[i + 1]) /
                            std::fabs(values[i + 1] - values[i + 2])));
  return out;
}

std::vector<double> error_orders(const std::vector<double>& errors,
                                 const std::vector<double>& h) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < errors.size(); ++i)
    out.push_back(std::log(errors[i] / errors[i + 1]) / std::log(h[i] / h[i + 1]));
  return out;
}

void write_residual_csv(std::ostream& os, const std::vector<RefinementRow>& rows) {
  os << "n,h,J,omega,mu,eq1_res,eq2_res,bc_res,norm_res,compat_res,iters,"
        "label,converged,tangent_grad_norm,eq1_full,eq1_discrete,theta_identity\n";
  char buf[512];
  for (const auto& r : rows) {
    const ResidualReport& e = r.residuals;
    std::snprintf(buf, sizeof buf,
                  "%d,%.17g,%.17g,%.17g,%.17g,%.6e,%.6e,%.6e,%.6e,%.6e,%d,%s,%d,%.6e,%.6e,"
                  "%.6e,%.6e\n",
                  r.n, r.h, r.J, r.omega, r.mu, e.eq1_residual, e.eq2_residual, e.bc_max(),
                  e.normalization, e.compatibility, r.iterations, r.label.c_str(),
                  r.converged ? 1 : 0, r.tangent_grad_norm, e.eq1_residual_full,
                  e.eq1_discrete, e.theta_mean_identity);
    os << buf;
  }
}

namespace {

struct DenseSystem {
  GridSpec grid;
  std::vector<std::size_t> interior;
  Eigen::VectorXd w;
  Eigen::MatrixXd lap_d;   // interior Dirichlet Laplacian
  Eigen::MatrixXd lap_n;   // Neumann Laplacian, all nodes
  Eigen::MatrixXd L;       // zero-mean solution operator of Delta^2 - Delta
  Eigen::VectorXd chi;
  Eigen::VectorXd q;
};

DenseSystem build_dense(const Problem& problem, std::size_t max_nodes) {
  dense::require_small(problem.grid, max_nodes);
  DenseSystem ds;
  ds.grid = problem.grid;
  ds.interior = dense::interior_nodes(problem.grid);
  ds.w = dense::weights(problem.grid);
  ds.lap_d = dense::laplacian_dirichlet(problem.grid);
  ds.lap_n = dense::laplacian_neumann(problem.grid);
  ds.q = dense::to_vector(problem.q);
  const auto n = ds.lap_n.rows();
  const double vol = ds.w.sum();

  // centring C = I - 1 w^T / |Omega|
  Eigen::MatrixXd C = Eigen::MatrixXd::Identity(n, n) -
                      Eigen::VectorXd::Ones(n) * ds.w.transpose() / vol;
  Eigen::MatrixXd H = ds.lap_n - Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd psi_map = H.partialPivLu().solve(C);
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + 1, n + 1);
  K.topLeftCorner(n, n) = ds.lap_n;
  K.col(n).head(n).setOnes();
  K.row(n).head(n) = ds.w.transpose();
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n + 1, n);
  rhs.topRows(n) = C * psi_map;
  ds.L = K.fullPivLu().solve(rhs).topRows(n);

  const ScalarField theta =
      dense::solve_helmholtz_neumann(ScalarField(problem.grid, problem.alpha / vol), problem.h2);
  ds.chi = dense::to_vector(dense::solve_poisson_neumann_zeromean(theta, problem.h1));
  return ds;
}

Eigen::VectorXd full_from_interior(const DenseSystem& ds, const Eigen::VectorXd& ui) {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(ds.w.size());
  for (std::size_t k = 0; k < ds.interior.size(); ++k) u(ds.interior[k]) = ui(k);
  return u;
}

double energy(const DenseSystem& ds, const Eigen::VectorXd& u, const Problem& problem) {
  const Eigen::VectorXd phi = ds.L * (ds.q.array() * u.array().square()).matrix();
  const Eigen::VectorXd psi = ds.lap_n * phi;
  Eigen::VectorXd ui(ds.interior.size());
  Eigen::VectorXd wi(ds.interior.size());
  for (std::size_t k = 0; k < ds.interior.size(); ++k) {
    ui(k) = u(ds.interior[k]);
    wi(k) = ds.w(ds.interior[k]);
  }
  const double dir = -ui.dot((wi.array() * (ds.lap_d * ui).array()).matrix());
  const double grad_phi = -phi.dot((ds.w.array() * (ds.lap_n * phi).array()).matrix());
  const double biharm = psi.dot((ds.w.array() * psi.array()).matrix());
  double coupling = 0.0, lp = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    coupling += ds.w(i) * ds.q(i) * ds.chi(i) * u(i) * u(i);
    if (u(i) != 0.0) lp += ds.w(i) * std::pow(std::fabs(u(i)), problem.p);
  }
  return 0.5 * dir + 0.25 * biharm + 0.25 * grad_phi + 0.5 * coupling -
         problem.kappa / problem.p * lp;
}

}  // namespace

double dense_energy(const ScalarField& u, const Problem& problem) {
  const DenseSystem ds = build_dense(problem, dense::kMaxOracleNodes);
  return energy(ds, dense::to_vector(u), problem);
}

KktSolution dense_kkt_oracle(const Problem& problem, std::size_t max_nodes) {
  const DenseSystem ds = build_dense(problem, max_nodes);
  const auto m = static_cast<Eigen::Index>(ds.interior.size());
  Eigen::VectorXd qi(m), wi(m), chii(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    qi(k) = ds.q(ds.interior[k]);
    wi(k) = ds.w(ds.interior[k]);
    chii(k) = ds.chi(ds.interior[k]);
  }

  // Start: lowest eigenpair of -Delta_D + q chi + mu q with mu chosen so that
  // int q u^2 = alpha. Interior weights are equal, so the matrix is symmetric.
  auto lowest = [&](double mu, Eigen::VectorXd& vec) {
    Eigen::MatrixXd H = -ds.lap_d;
    H.diagonal() += (qi.array() * chii.array() + mu * qi.array()).matrix();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (H + H.transpose()));
    vec = es.eigenvectors().col(0);
    vec /= std::sqrt(vec.dot((wi.array() * vec.array()).matrix()));
    return es.eigenvalues()(0);
  };
  auto q_moment = [&](double mu) {
    Eigen::VectorXd v;
    lowest(mu, v);
    return (wi.array() * qi.array() * v.array().square()).sum() - problem.alpha;
  };
  double lo = -1.0, hi = 1.0;
  while (q_moment(lo) < 0.0 && lo > -1e12) lo *= 2.0;
  while (q_moment(hi) > 0.0 && hi < 1e12) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + std::fabs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (q_moment(mid) > 0.0 ? lo : hi) = mid;
  }
  double mu = 0.5 * (lo + hi);
  Eigen::VectorXd ui;
  double omega = lowest(mu, ui);

  const double pe = problem.p - 2.0;
  auto residual = [&](const Eigen::VectorXd& x) {
    const Eigen::VectorXd u_i = x.head(m);
    const double om = x(m), mm = x(m + 1);
    const Eigen::VectorXd u = full_from_interior(ds, u_i);
    const Eigen::VectorXd phi = ds.L * (ds.q.array() * u.array().square()).matrix();
    Eigen::VectorXd F(m + 2);
    const Eigen::VectorXd lap = ds.lap_d * u_i;
    for (Eigen::Index k = 0; k < m; ++k) {
      const double uk = u_i(k);
      F(k) = -lap(k) + qi(k) * (phi(ds.interior[k]) + chii(k)) * uk -
             problem.kappa * signed_power(uk, pe) - om * uk + mm * qi(k) * uk;
    }
    F(m) = 0.5 * ((wi.array() * u_i.array().square()).sum() - 1.0);
    F(m + 1) = 0.5 * ((wi.array() * qi.array() * u_i.array().square()).sum() - problem.alpha);
    return F;
  };

  Eigen::MatrixXd Lii(m, m);
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = 0; b < m; ++b) Lii(a, b) = ds.L(ds.interior[a], ds.interior[b]);

  Eigen::VectorXd x(m + 2);
  x.head(m) = ui;
  x(m) = omega;
  x(m + 1) = mu;
  Eigen::VectorXd F = residual(x);
  KktSolution out;
  int it = 0;
  for (; it < 100 && F.lpNorm<Eigen::Infinity>() > 1e-11; ++it) {
    const Eigen::VectorXd u_i = x.head(m);
    const Eigen::VectorXd u = full_from_interior(ds, u_i);
    const Eigen::VectorXd phi = ds.L * (ds.q.array() * u.array().square()).matrix();
    Eigen::MatrixXd Jm = Eigen::MatrixXd::Zero(m + 2, m + 2);
    Jm.topLeftCorner(m, m) = -ds.lap_d;
    for (Eigen::Index k = 0; k < m; ++k) {
      const double uk = u_i(k);
      const double nl = uk == 0.0 ? 0.0 : (pe + 1.0) * std::pow(std::fabs(uk), pe);
      Jm(k, k) += qi(k) * (phi(ds.interior[k]) + chii(k)) - problem.kappa * nl - x(m) +
                  x(m + 1) * qi(k);
      for (Eigen::Index j = 0; j < m; ++j)
        Jm(k, j) += qi(k) * uk * Lii(k, j) * 2.0 * qi(j) * u_i(j);
      Jm(k, m) = -uk;
      Jm(k, m + 1) = qi(k) * uk;
      Jm(m, k) = wi(k) * uk;
      Jm(m + 1, k) = wi(k) * qi(k) * uk;
    }
    const Eigen::VectorXd dx = Jm.fullPivLu().solve(-F);
    double t = 1.0;
    bool accepted = false;
    for (int k = 0; k < 30; ++k, t *= 0.5) {
      const Eigen::VectorXd xt = x + t * dx;
      const Eigen::VectorXd Ft = residual(xt);
      if (Ft.lpNorm<Eigen::Infinity>() < F.lpNorm<Eigen::Infinity>()) {
        x = xt;
        F = Ft;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  const double rnorm = F.lpNorm<Eigen::Infinity>();
  if (!(rnorm <= 1e-8))
    throw NewtonDivergence("dense KKT oracle: Newton stalled at residual " +
                           std::to_string(rnorm));
  const Eigen::VectorXd u = full_from_interior(ds, x.head(m));
  out.u = dense::to_field(problem.grid, u);
  out.omega = x(m);
  out.mu = x(m + 1);
  out.J = energy(ds, u, problem);
  out.residual = rnorm;
  out.newton_iterations = it;
  return out;
}

double DenseOracleReport::linear_max() const {
  return std::max({helmholtz, poisson_neumann, poisson_dirichlet, chi});
}

DenseOracleReport dense_oracle_compare(const Problem& problem, std::size_t max_nodes,
                                       const SolveResult* iterative, std::uint64_t seed,
                                       int trials) {
  const GridSpec& grid = problem.grid;
  dense::require_small(grid, max_nodes);
  DenseOracleReport rep;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  auto random_field = [&] {
    ScalarField f(grid);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = uni(rng);
    return f;
  };
  auto random_boundary = [&] {
    BoundaryData g(grid);
    for (int f = 0; f < grid.face_count(); ++f)
      for (double& v : g.face(f)) v = uni(rng);
    return g;
  };
  LinearSolveOptions cg = problem.solver;
  cg.backend = LinearBackend::conjugate_gradient;
  for (int t = 0; t < trials; ++t) {
    const ScalarField f = random_field();
    const BoundaryData g = random_boundary();
    rep.helmholtz = std::max(rep.helmholtz,
                             max_abs(solve_helmholtz_neumann(f, g, cg) -
                                     dense::solve_helmholtz_neumann(f, g)));
    ScalarField fc = f;
    const double shift = (boundary_integrate(g) - integrate(fc)) / grid.volume();
    for (std::size_t i = 0; i < fc.size(); ++i) fc[i] += shift;
    rep.poisson_neumann = std::max(rep.poisson_neumann,
                                   max_abs(solve_poisson_neumann_zeromean(fc, g, cg) -
                                           dense::solve_poisson_neumann_zeromean(fc, g)));
    ScalarField fd = f;
    zero_boundary(fd);
    rep.poisson_dirichlet =
        std::max(rep.poisson_dirichlet,
                 max_abs(solve_poisson_dirichlet(fd, cg) - dense::solve_poisson_dirichlet(fd)));
  }
  const DenseSystem ds = build_dense(problem, max_nodes);
  rep.chi = (dense::to_vector(problem.chi) - ds.chi).lpNorm<Eigen::Infinity>();

  const Eigen::VectorXd sv = ds.lap_n.bdcSvd().singularValues();
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) < 1e-10 * sv(0)) ++rep.neumann_null_dimension;

  if (problem.kappa == 0.0 && iterative) {
    rep.kkt = dense_kkt_oracle(problem, max_nodes);
    rep.has_kkt = true;
    rep.d_J = std::fabs(rep.kkt.J - iterative->J_value);
    rep.d_omega = std::fabs(rep.kkt.omega - iterative->omega);
    rep.d_mu = std::fabs(rep.kkt.mu - iterative->mu);
  }
  return rep;
}

void write_oracle_report(std::ostream& os, const DenseOracleReport& r) {
  char buf[256];
  auto line = [&](const char* key, double v) {
    std::snprintf(buf, sizeof buf, "%s,%.6e\n", key, v);
    os << buf;
  };
  os << "quantity,value\n";
  line("helmholtz_max_diff", r.helmholtz);
  line("poisson_neumann_max_diff", r.poisson_neumann);
  line("poisson_dirichlet_max_diff", r.poisson_dirichlet);
  line("chi_max_diff", r.chi);
  line("neumann_null_dimension", r.neumann_null_dimension);
  if (r.has_kkt) {
    std::snprintf(buf, sizeof buf, "kkt_J,%.17g\nkkt_omega,%.17g\nkkt_mu,%.17g\n", r.kkt.J,
                  r.kkt.omega, r.kkt.mu);
    os << buf;
    line("kkt_residual", r.kkt.residual);
    line("diff_J", r.d_J);
    line("diff_omega", r.d_omega);
    line("diff_mu", r.d_mu);
  }
}

}  // namespace sbp
