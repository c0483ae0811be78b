// Command-line front end: solve, feasibility, verify, refine, oracle.
// Exit codes: 0 success, 1 solver failure, 2 infeasible alpha, 3 bad config.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "sbp/config.hpp"
#include "sbp/errors.hpp"
#include "sbp/verify.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace sbp;

namespace {

constexpr int kOk = 0;
constexpr int kSolverFailure = 1;
constexpr int kInfeasible = 2;
constexpr int kConfigError = 3;

struct Cli {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

struct Session {
  RunConfig cfg;
  bool quiet = false;
  fs::path out;

  void info(const std::string& msg) const {
    if (!quiet) std::cout << msg << "\n";
  }
};

Session open_session(const Cli& cli) {
  Session s;
  s.cfg = load_config(cli.config);
  if (cli.out) s.cfg.output_dir = *cli.out;
  if (cli.seed) s.cfg.seed = *cli.seed;
  s.quiet = cli.quiet;
  s.out = s.cfg.output_dir;
  return s;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string describe(const FeasibilityReport& r) {
  std::ostringstream os;
  os << "q_min=" << fmt("%.10g", r.q_min) << " q_max=" << fmt("%.10g", r.q_max)
     << " alpha=" << fmt("%.10g", r.alpha) << " class=" << to_string(r.cls)
     << " level_set_fraction=" << fmt("%.6g", r.level_set_fraction);
  return os.str();
}

json feasibility_json(const FeasibilityReport& r) {
  return json{{"q_min", r.q_min},
              {"q_max", r.q_max},
              {"alpha", r.alpha},
              {"class", to_string(r.cls)},
              {"level_set_fraction", r.level_set_fraction},
              {"level_set_warning", r.level_set_warning()}};
}

json residual_json(const ResidualReport& e) {
  return json{{"eq1_residual", e.eq1_residual},
              {"eq1_residual_full", e.eq1_residual_full},
              {"eq1_discrete", e.eq1_discrete},
              {"eq2_residual", e.eq2_residual},
              {"eq2_residual_full", e.eq2_residual_full},
              {"bc_u", e.bc_u},
              {"bc_phi_n", e.bc_phi_n},
              {"bc_dphi_n", e.bc_dphi_n},
              {"normalization", e.normalization},
              {"compatibility", e.compatibility},
              {"theta_mean_identity", e.theta_mean_identity},
              {"phi_mean_gap", e.phi_mean_gap}};
}

struct StateRecord {
  SolveResult result;
  ResidualReport residuals;
  double multiplier_residual = 0.0;
  bool accepted = false;  ///< converged and every tolerance met
};

StateRecord assess(SolveResult r, const Problem& problem, const OptimizeOptions& opts) {
  StateRecord s;
  s.residuals = residual_original_system(r, problem);
  s.multiplier_residual = multiplier_residual(r.u, r.omega, r.mu, problem, opts.metric);
  s.accepted = r.converged && s.residuals.normalization <= 1e-10 &&
               s.residuals.compatibility <= 1e-8 * (1.0 + std::fabs(problem.alpha)) &&
               s.residuals.bc_u == 0.0 && s.multiplier_residual <= 10.0 * opts.grad_tol;
  s.result = std::move(r);
  return s;
}

void write_summary(const fs::path& path, const std::vector<StateRecord>& states,
                   const Problem& problem) {
  std::ofstream os(path);
  os << "state,n,h,J,omega,mu,iterations,converged,tangent_grad_norm,grad_energy,"
        "eq1_res,eq1_discrete,eq2_res,bc_u,bc_phi_n,bc_dphi_n,norm_res,compat_res,"
        "theta_identity,multiplier_res\n";
  char buf[640];
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto& s = states[i];
    const auto& r = s.result;
    const auto& e = s.residuals;
    std::snprintf(buf, sizeof buf,
                  "%zu,%d,%.17g,%.17g,%.17g,%.17g,%d,%d,%.6e,%.17g,%.6e,%.6e,%.6e,%.6e,%.6e,"
                  "%.6e,%.6e,%.6e,%.6e,%.6e\n",
                  i, problem.grid.nodes(0), problem.grid.spacing(0), r.J_value, r.omega, r.mu,
                  r.iterations, s.accepted ? 1 : 0, r.tangent_grad_norm,
                  2.0 * r.energy.dirichlet, e.eq1_residual, e.eq1_discrete, e.eq2_residual,
                  e.bc_u, e.bc_phi_n, e.bc_dphi_n, e.normalization, e.compatibility,
                  e.theta_mean_identity, s.multiplier_residual);
    os << buf;
  }
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream os(path);
  os << j.dump(2) << "\n";
}

// Builds the problem and applies the feasibility gate. Returns an exit code
// when the run must stop.
std::optional<int> prepare(const Session& s, Problem& problem, FeasibilityReport& feas) {
  problem = s.cfg.problem();
  feas = classify_alpha(problem.q, problem.alpha);
  s.info("feasibility: " + describe(feas));
  if (feas.level_set_warning())
    std::cerr << "warning: the level set q = alpha covers "
              << fmt("%.3g", 100.0 * feas.level_set_fraction)
              << "% of the nodes; the constraint may be degenerate\n";
  if (feas.cls != FeasibilityClass::interior) {
    std::cerr << "infeasible: alpha must lie strictly between q_min and q_max; the "
                 "constraint set is empty or degenerate ("
              << describe(feas) << ")\n";
    return kInfeasible;
  }
  return std::nullopt;
}

int cmd_solve(const Session& s, bool excited) {
  Problem problem;
  FeasibilityReport feas;
  if (auto code = prepare(s, problem, feas)) return *code;
  const OptimizeOptions& opts = s.cfg.optimizer;

  std::vector<std::string> warnings;
  std::vector<StateRecord> states;
  if (excited) {
    ExcitedOptions eo;
    eo.sphere_samples = s.cfg.sphere_samples;
    eo.seed = s.cfg.seed;
    for (auto& r : excited_states(problem, s.cfg.k, opts, eo, &warnings))
      states.push_back(assess(std::move(r), problem, opts));
  } else {
    const SolveResult first = minimize_on_M(feasible_init(problem), problem, opts);
    if (!first.converged) warnings.push_back("ground state: " + first.message);
    SolveResult polished = first.converged ? polish_positive(first, problem, opts) : first;
    states.push_back(assess(std::move(polished), problem, opts));
  }
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";

  fs::create_directories(s.out);
  write_summary(s.out / "summary.csv", states, problem);
  if (s.cfg.dump_fields) {
    write_field_csv((s.out / "chi.csv").string(), problem.chi);
    for (std::size_t i = 0; i < states.size(); ++i) {
      write_field_csv((s.out / ("u_" + std::to_string(i) + ".csv")).string(), states[i].result.u);
      write_field_csv((s.out / ("phi_" + std::to_string(i) + ".csv")).string(),
                      reconstruct_phi(states[i].result, problem));
    }
  }
  json report{{"mode", excited ? "excited" : "ground"},
              {"grid", problem.grid.describe()},
              {"kappa", problem.kappa},
              {"p", problem.p},
              {"seed", s.cfg.seed},
              {"feasibility", feasibility_json(feas)},
              {"warnings", warnings},
              {"states", json::array()}};
  bool all_ok = !states.empty();
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto& st = states[i];
    const auto& r = st.result;
    all_ok = all_ok && st.accepted;
    report["states"].push_back(json{{"index", i},
                                    {"J", r.J_value},
                                    {"omega", r.omega},
                                    {"mu", r.mu},
                                    {"iterations", r.iterations},
                                    {"converged", st.accepted},
                                    {"tangent_grad_norm", r.tangent_grad_norm},
                                    {"grad_energy", 2.0 * r.energy.dirichlet},
                                    {"multiplier_residual", st.multiplier_residual},
                                    {"energy",
                                     {{"dirichlet", r.energy.dirichlet},
                                      {"biharm", r.energy.biharm},
                                      {"grad_phi", r.energy.grad_phi},
                                      {"coupling_chi", r.energy.coupling_chi},
                                      {"nonlinear", r.energy.nonlinear}}},
                                    {"residuals", residual_json(st.residuals)}});
    s.info("state " + std::to_string(i) + ": J=" + fmt("%.12g", r.J_value) +
           " omega=" + fmt("%.10g", r.omega) + " mu=" + fmt("%.10g", r.mu) +
           " iterations=" + std::to_string(r.iterations) +
           " grad_norm=" + fmt("%.3e", r.tangent_grad_norm) +
           (st.accepted ? " converged" : " NOT converged"));
  }
  write_json(s.out / "report.json", report);
  s.info("wrote " + (s.out / "summary.csv").string());
  return all_ok ? kOk : kSolverFailure;
}

int cmd_feasibility(const Session& s) {
  const Problem problem = s.cfg.problem();
  const FeasibilityReport r = classify_alpha(problem.q, problem.alpha);
  std::cout << describe(r) << "\n";
  if (r.level_set_warning())
    std::cout << "warning: level set fraction above 1%; treated as positive measure\n";
  return r.cls == FeasibilityClass::interior ? kOk : kInfeasible;
}

int cmd_verify(const Session& s) {
  const Problem problem = s.cfg.problem();
  std::vector<RefinementRow> rows;
  json report{{"grid", problem.grid.describe()}, {"states", json::array()}};
  for (int i = 0;; ++i) {
    const fs::path field = s.out / ("u_" + std::to_string(i) + ".csv");
    if (!fs::exists(field)) break;
    const ScalarField u = read_field_csv(field.string());
    if (!(u.grid() == problem.grid))
      throw ConfigError("output.dir", field.string() + " was written on a different grid");
    const SolveResult r = evaluate_state(u, problem, s.cfg.optimizer.grad_tol);
    rows.push_back(make_row(r, problem, "u_" + std::to_string(i)));
    report["states"].push_back(json{{"field", field.filename().string()},
                                    {"J", r.J_value},
                                    {"omega", r.omega},
                                    {"mu", r.mu},
                                    {"tangent_grad_norm", r.tangent_grad_norm},
                                    {"residuals", residual_json(rows.back().residuals)}});
  }
  if (rows.empty()) {
    std::cerr << "verify: no u_<i>.csv field dumps in " << s.out << "\n";
    return kSolverFailure;
  }
  std::ofstream os(s.out / "residuals.csv");
  write_residual_csv(os, rows);
  write_json(s.out / "verify_report.json", report);
  if (!s.quiet) write_residual_csv(std::cout, rows);
  return kOk;
}

int cmd_refine(const Session& s) {
  if (s.cfg.refine_n.size() < 3)
    throw ConfigError("refine.n", "a refinement study needs at least 3 grids");
  std::vector<GridSpec> grids;
  for (int n : s.cfg.refine_n) grids.push_back(s.cfg.grid(n));
  {
    Problem problem;
    FeasibilityReport feas;
    if (auto code = prepare(s, problem, feas)) return *code;
  }
  const auto rows = refinement_study([&](const GridSpec& g) { return s.cfg.problem(g); }, grids,
                                     s.cfg.optimizer);
  fs::create_directories(s.out);
  std::ofstream os(s.out / "refinement.csv");
  write_residual_csv(os, rows);

  std::vector<double> J, eq1, h;
  bool all_ok = true;
  for (const auto& r : rows) {
    J.push_back(r.J);
    eq1.push_back(r.residuals.eq1_residual);
    h.push_back(r.h);
    all_ok = all_ok && r.converged;
  }
  if (!s.quiet) {
    write_residual_csv(std::cout, rows);
    std::cout << "observed orders (J, Richardson):";
    for (double o : richardson_orders(J)) std::cout << " " << fmt("%.3f", o);
    std::cout << "\nobserved orders (eq1 residual):";
    for (double o : error_orders(eq1, h)) std::cout << " " << fmt("%.3f", o);
    std::cout << "\n";
  }
  return all_ok ? kOk : kSolverFailure;
}

int cmd_oracle(const Session& s) {
  const Problem problem = s.cfg.problem();
  std::optional<SolveResult> iterative;
  if (problem.kappa == 0.0) {
    const FeasibilityReport feas = classify_alpha(problem.q, problem.alpha);
    if (feas.cls == FeasibilityClass::interior)
      iterative = minimize_on_M(feasible_init(problem), problem, s.cfg.optimizer);
  }
  const DenseOracleReport rep = dense_oracle_compare(
      problem, s.cfg.oracle_max_nodes, iterative ? &*iterative : nullptr, s.cfg.seed + 1);
  fs::create_directories(s.out);
  std::ofstream os(s.out / "oracle.csv");
  write_oracle_report(os, rep);
  if (!s.quiet) write_oracle_report(std::cout, rep);
  bool ok = rep.linear_max() <= 1e-9 && rep.neumann_null_dimension == 1;
  if (rep.has_kkt) ok = ok && rep.d_J <= 1e-6 && rep.d_omega <= 1e-6 && rep.d_mu <= 1e-6;
  return ok ? kOk : kSolverFailure;
}

int dispatch(const std::string& command, const Cli& cli) {
  try {
    const Session s = open_session(cli);
    std::string cmd = command;
    if (cmd == "run") {
      switch (s.cfg.mode) {
        case RunMode::ground: return cmd_solve(s, false);
        case RunMode::excited: return cmd_solve(s, true);
        case RunMode::verify: return cmd_verify(s);
        case RunMode::refine: return cmd_refine(s);
        case RunMode::oracle: return cmd_oracle(s);
      }
    }
    if (cmd == "solve") return cmd_solve(s, s.cfg.mode == RunMode::excited);
    if (cmd == "feasibility") return cmd_feasibility(s);
    if (cmd == "verify") return cmd_verify(s);
    if (cmd == "refine") return cmd_refine(s);
    if (cmd == "oracle") return cmd_oracle(s);
    return kConfigError;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSolverFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constrained ground and excited states of the Schrodinger-Bopp-Podolsky system"};
  app.require_subcommand(1);
  Cli cli;
  std::string chosen;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"solve", "ground state (or excited states when run.mode = excited)"},
      {"feasibility", "classify alpha against the range of q without solving"},
      {"verify", "residuals of the original system for the fields in the output directory"},
      {"refine", "refinement study over refine.n"},
      {"oracle", "compare iterative solves with dense direct solves"},
      {"run", "execute run.mode from the config"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", cli.config, "configuration file")->required();
    sub->add_option("--out", cli.out, "output directory (overrides output.dir)");
    sub->add_option("--seed", cli.seed, "random seed (overrides run.seed)");
    sub->add_flag("--quiet", cli.quiet, "suppress progress output");
    sub->callback([&chosen, n = name] { chosen = n; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }
  return dispatch(chosen, cli);
}
