// Acceptance suite: one PASS/FAIL line per criterion.
// usage: acceptance <sbp-binary> <configs-dir> <scratch-dir>

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "chi_oracle.hpp"
#include "helpers.hpp"
#include "sbp/config.hpp"
#include "sbp/errors.hpp"
#include "sbp/verify.hpp"

using namespace sbp;
using sbp::testing::pi;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("criterion %2d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

template <class F>
void guarded(int id, F&& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, false, std::string("exception: ") + e.what());
  }
}

double min_value(const ScalarField& f) {
  double m = f[0];
  for (std::size_t i = 0; i < f.size(); ++i) m = std::min(m, f[i]);
  return m;
}

bool all_near(const std::vector<double>& v, double target, double tol) {
  for (double x : v)
    if (!(std::fabs(x - target) <= tol)) return false;
  return !v.empty();
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : ",") + fmt("%.3f", x);
  return s;
}

void interaction_identity() {
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (const Problem& pr :
       {sbp::testing::benchmark_problem(129), sbp::testing::square_problem(33)}) {
    for (int t = 0; t < 50; ++t) {
      const auto u = sbp::testing::random_smooth(pr.grid, rng);
      const auto e = interaction_energy(u, phi_map(u, pr), pr);
      worst = std::max(worst, std::fabs(e.coupling - e.bilinear()) / std::fabs(e.coupling));
    }
  }
  report(1, worst <= 1e-7, fmt("interaction identity, max rel err %.2e (tol 1e-7)", worst));
}

void solution_operator() {
  const double c = 1.0 / (std::pow(pi, 4) + pi * pi);
  std::vector<double> errs;
  for (int n : {33, 65, 129, 257}) {
    const GridSpec g = GridSpec::uniform(1, n);
    const auto w = ScalarField::from_function(g, [](const Point& x) { return std::cos(pi * x[0]); });
    errs.push_back(max_abs(apply_L(w, reduction_solver_defaults()).phi - c * w));
  }
  std::vector<double> orders;
  for (std::size_t i = 0; i + 1 < errs.size(); ++i) orders.push_back(std::log2(errs[i] / errs[i + 1]));

  std::mt19937_64 rng(102);
  const GridSpec g = GridSpec::uniform(1, 129);
  const auto a = sbp::testing::random_nodal(g, rng), b = sbp::testing::random_nodal(g, rng);
  const auto opts = reduction_solver_defaults();
  const auto la = apply_L(a, opts).phi, lb = apply_L(b, opts).phi;
  const auto lab = apply_L(1.5 * a - 0.25 * b, opts).phi;
  const auto expect = 1.5 * la - 0.25 * lb;
  const double lin = max_abs(lab - expect) / max_abs(expect);
  report(2, all_near(orders, 2.0, 0.1) && lin <= 1e-8,
         "L(cos) orders " + join(orders) + fmt(", linearity %.2e (tol 1e-8)", lin));
}

void chi_manufactured() {
  const double h1l = 0.05, h1r = -0.1, h2l = 0.3, h2r = 0.2;
  const ChiExact1D ex(h1l, h1r, h2l, h2r);
  std::vector<double> errs;
  double worst_identity = 0.0;
  for (int n : {33, 65, 129, 257}) {
    const GridSpec g = GridSpec::uniform(1, n);
    const double h1[] = {h1l, h1r}, h2[] = {h2l, h2r};
    const Problem pr = make_problem(evaluate_coupling(AffineCoupling{0.0, 1.0}, g), 1.0, 3.0,
                                    BoundaryData::per_face(g, h1), BoundaryData::per_face(g, h2));
    double e = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      e = std::max(e, std::fabs(pr.chi[i] - ex.chi(g.point(i)[0])));
    errs.push_back(e);
    const double gap = std::fabs(integrate(pr.theta) - boundary_integrate(pr.h1));
    worst_identity = std::max(worst_identity, gap / boundary_data_scale(pr));
  }
  std::vector<double> orders;
  for (std::size_t i = 0; i + 1 < errs.size(); ++i) orders.push_back(std::log2(errs[i] / errs[i + 1]));
  report(3, all_near(orders, 2.0, 0.1) && worst_identity <= 5e-8,
         "chi orders " + join(orders) +
             fmt(", theta-mean identity %.2e * scale (tol 5e-8)", worst_identity));
}

void gradient_check() {
  std::mt19937_64 rng(104);
  const Problem pr = sbp::testing::benchmark_problem(129);
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    const auto u = sbp::testing::random_smooth(pr.grid, rng);
    const auto v = sbp::testing::random_smooth(pr.grid, rng);
    const double eps = 1e-5;
    const double fd = (eval_J(u + eps * v, pr).value - eval_J(u - eps * v, pr).value) / (2 * eps);
    const double an = inner(grad_J(u, pr, GradientMetric::L2), v);
    worst = std::max(worst, std::fabs(fd - an) / std::fabs(fd));
  }
  report(4, worst <= 1e-5, fmt("gradient vs central difference, max rel err %.2e (tol 1e-5)", worst));
}

void dense_oracle() {
  double linear = 0.0;
  int null_dim_ok = 1;
  for (const Problem& pr : {sbp::testing::benchmark_problem(17), sbp::testing::square_problem(9)}) {
    const auto rep = dense_oracle_compare(pr);
    linear = std::max(linear, rep.linear_max());
    null_dim_ok &= rep.neumann_null_dimension == 1;
  }
  const Problem pr = sbp::testing::benchmark_problem(65, 0.0);
  const auto it = polish_positive(minimize_on_M(feasible_init(pr), pr), pr);
  const auto rep = dense_oracle_compare(pr, dense::kMaxOracleNodes, &it);
  const double kkt = std::max({rep.d_J, rep.d_omega, rep.d_mu});
  report(5, linear <= 1e-9 && null_dim_ok && rep.has_kkt && kkt <= 1e-6,
         fmt("linear solves vs dense %.2e (tol 1e-9), kappa=0 KKT max diff %.2e (tol 1e-6)",
             linear, kkt));
}

void constraints() {
  std::mt19937_64 rng(106);
  double g1 = 0.0, g2 = 0.0, idem = 0.0;
  for (const Problem& pr :
       {sbp::testing::benchmark_problem(129), sbp::testing::square_problem(33)}) {
    const auto base = feasible_init(pr);
    for (int t = 0; t < 10; ++t) {
      const auto u = retract(base + 0.2 * sbp::testing::random_smooth(pr.grid, rng), pr);
      const auto c = constraint_values(u, pr);
      g1 = std::max(g1, std::fabs(c.g1));
      g2 = std::max(g2, std::fabs(c.g2) / (1 + std::fabs(pr.alpha)));
      idem = std::max(idem, max_abs(retract(u, pr) - u));
    }
  }
  report(6, g1 <= 1e-10 && g2 <= 1e-8 && idem <= 1e-12,
         fmt("|int u^2-1| %.1e, |int qu^2-alpha|/(1+|alpha|) %.1e, retract idempotence %.1e", g1,
             g2, idem));
}

void benchmark() {
  const auto t0 = std::chrono::steady_clock::now();
  const Problem p129 = sbp::testing::benchmark_problem(129);
  const auto r129 = polish_positive(minimize_on_M(feasible_init(p129), p129), p129);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::vector<GridSpec> grids;
  for (int n : {65, 129, 257, 513}) grids.push_back(GridSpec::uniform(1, n));
  const auto rows = refinement_study(
      [](const GridSpec& g) { return sbp::testing::benchmark_problem(g.nodes(0)); }, grids);
  const double dJ = std::fabs(rows[1].J - rows[2].J) / std::fabs(rows[2].J);
  std::vector<double> e, h;
  bool all_converged = r129.converged;
  for (const auto& r : rows) {
    e.push_back(r.residuals.eq1_residual);
    h.push_back(r.h);
    all_converged &= r.converged;
  }
  const auto orders = error_orders(e, h);
  double min_order = orders.empty() ? 0.0 : orders[0];
  for (double o : orders) min_order = std::min(min_order, o);
  const double umin = min_value(r129.u);
  report(7,
         all_converged && secs < 60.0 && dJ <= 1e-3 && min_order >= 1.8 && umin >= -1e-8,
         fmt("n=129 in %.2fs, |J129-J257|/|J257| %.1e, min eq1 order %.2f, min(u) %.1e", secs, dJ,
             min_order, umin));
}

void excited(const std::string& config_dir) {
  const RunConfig cfg = load_config(config_dir + "/excited_1d.cfg");
  const Problem pr = cfg.problem();
  OptimizeOptions opts = cfg.optimizer;
  const auto states =
      excited_states(pr, cfg.k, opts, ExcitedOptions{cfg.sphere_samples, cfg.seed});
  bool ordered = states.size() >= 2;
  std::string js;
  for (std::size_t i = 0; i < states.size(); ++i) {
    js += (i ? " < " : "") + fmt("%.4f", states[i].J_value);
    if (i > 0) {
      ordered &= states[i].J_value > states[i - 1].J_value;
      ordered &= gradient_energy(states[i].u) > gradient_energy(states[i - 1].u);
      ordered &= !same_state(states[i], states[i - 1], opts.dedupe_l2);
    }
  }
  report(8, ordered, fmt("%.0f distinct states, J: ", static_cast<double>(states.size())) + js);
}

int run_cli(const std::string& cmd) {
  const int raw = std::system((cmd + " > /dev/null 2>&1").c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

void infeasible(const std::string& sbp_bin, const std::string& config_dir,
                const std::string& scratch) {
  bool ok = true;
  std::string detail;
  for (const char* name : {"infeasible_alpha", "constant_q"}) {
    const fs::path out = fs::path(scratch) / name;
    fs::remove_all(out);
    const int code = run_cli(sbp_bin + " solve --quiet --config " + config_dir + "/" + name +
                             ".cfg --out " + out.string());
    const bool wrote = fs::exists(out / "summary.csv");
    ok &= code == 2 && !wrote;
    detail += std::string(name) + " exit " + std::to_string(code) +
              (wrote ? " (summary written) " : " ");
  }
  report(9, ok, detail);
}

void symmetry() {
  std::mt19937_64 rng(110);
  const Problem pr = sbp::testing::square_problem(17);
  bool even = true;
  for (int t = 0; t < 5; ++t) {
    const auto u = sbp::testing::random_smooth(pr.grid, rng);
    const auto a = phi_map(u, pr), b = phi_map(-u, pr);
    for (std::size_t i = 0; i < u.size(); ++i) even &= a.phi[i] == b.phi[i];
    even &= eval_J(u, pr).value == eval_J(-u, pr).value;
  }
  const auto u = feasible_init(pr);
  const auto cu = constraint_values(u, pr), cm = constraint_values(-u, pr);
  const bool m_sym = on_manifold(-u, pr) && cu.g1 == cm.g1 && cu.g2 == cm.g2;

  const auto r = evaluate_state(u, pr);
  auto neg = r;
  neg.u = -r.u;
  const bool dd = dedupe({r, neg}, 1e-3).size() == 1;
  report(10, even && m_sym && dd,
         std::string("Phi and J even: ") + (even ? "yes" : "no") +
             ", M symmetric: " + (m_sym ? "yes" : "no") + ", dedupe u~-u: " + (dd ? "yes" : "no"));
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 4) {
    std::fprintf(stderr, "usage: %s <sbp-binary> <configs-dir> <scratch-dir>\n", argv[0]);
    return 2;
  }
  const std::string sbp_bin = argv[1], config_dir = argv[2], scratch = argv[3];
  fs::create_directories(scratch);

  guarded(1, interaction_identity);
  guarded(2, solution_operator);
  guarded(3, chi_manufactured);
  guarded(4, gradient_check);
  guarded(5, dense_oracle);
  guarded(6, constraints);
  guarded(7, benchmark);
  guarded(8, [&] { excited(config_dir); });
  guarded(9, [&] { infeasible(sbp_bin, config_dir, scratch); });
  guarded(10, symmetry);

  std::printf("%d of 10 criteria passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
