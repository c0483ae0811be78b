#include "sbp/config.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "sbp/errors.hpp"

namespace sbp {

namespace fs = std::filesystem;

std::string to_string(RunMode m) {
  switch (m) {
    case RunMode::ground: return "ground";
    case RunMode::excited: return "excited";
    case RunMode::verify: return "verify";
    case RunMode::refine: return "refine";
    case RunMode::oracle: return "oracle";
  }
  return "unknown";
}

const std::vector<std::string>& face_names() {
  static const std::vector<std::string> names{"xmin", "xmax", "ymin", "ymax", "zmin", "zmax"};
  return names;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw ConfigError(key, "expected a number, got '" + v + "'");
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long i = std::stoll(v, &pos);
    if (pos == v.size()) return i;
  } catch (const std::exception&) {
  }
  throw ConfigError(key, "expected an integer, got '" + v + "'");
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key, "expected true or false, got '" + v + "'");
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& s : split_list(v)) out.push_back(to_double(key, s));
  return out;
}

std::vector<int> to_ints(const std::string& key, const std::string& v) {
  std::vector<int> out;
  for (const auto& s : split_list(v)) out.push_back(static_cast<int>(to_int(key, s)));
  return out;
}

std::string resolve(const std::string& base_dir, const std::string& path) {
  if (path.empty() || fs::path(path).is_absolute() || base_dir.empty()) return path;
  return (fs::path(base_dir) / path).string();
}

std::vector<double> read_face_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("boundary", "cannot open face data file '" + path + "'");
  std::vector<double> out;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    out.push_back(to_double(path, line));
  }
  return out;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& source) {
  RunConfig cfg;
  cfg.source = source;
  const std::string base_dir =
      source.empty() ? std::string() : fs::path(source).parent_path().string();

  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno), "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno), "empty key");
    if (!kv.emplace(key, value).second) throw ConfigError(key, "duplicate key");
  }

  auto take = [&](const std::string& key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };

  if (auto v = take("domain.dim")) cfg.dim = static_cast<int>(to_int("domain.dim", *v));
  if (cfg.dim < 1 || cfg.dim > 3) throw ConfigError("domain.dim", "must be 1, 2 or 3");
  if (auto v = take("domain.lengths")) cfg.lengths = to_doubles("domain.lengths", *v);
  if (cfg.lengths.size() == 1) cfg.lengths.assign(cfg.dim, cfg.lengths[0]);
  if (static_cast<int>(cfg.lengths.size()) != cfg.dim)
    throw ConfigError("domain.lengths", "needs one value or one per axis");
  for (double L : cfg.lengths)
    if (!(L > 0)) throw ConfigError("domain.lengths", "lengths must be positive");
  if (auto v = take("grid.n")) cfg.n = to_ints("grid.n", *v);
  if (cfg.n.size() == 1) cfg.n.assign(cfg.dim, cfg.n[0]);
  if (static_cast<int>(cfg.n.size()) != cfg.dim)
    throw ConfigError("grid.n", "needs one value or one per axis");
  for (int n : cfg.n)
    if (n < 3) throw ConfigError("grid.n", "at least 3 nodes per axis");

  if (auto v = take("physics.kappa")) cfg.kappa = to_double("physics.kappa", *v);
  if (!(cfg.kappa >= 0)) throw ConfigError("physics.kappa", "must be non-negative");
  if (auto v = take("physics.p")) cfg.p = to_double("physics.p", *v);
  if (!(cfg.p > 2.0 && cfg.p <= 10.0 / 3.0))
    throw ConfigError("physics.p", "must lie in (2, 10/3]");

  const std::string kind = take("coupling.kind").value_or("affine");
  auto num = [&](const std::string& key, double def) {
    auto v = take(key);
    return v ? to_double(key, *v) : def;
  };
  if (kind == "affine") {
    AffineCoupling c;
    c.a = num("coupling.a", c.a);
    c.b = num("coupling.b", c.b);
    cfg.coupling = c;
  } else if (kind == "radial_bump") {
    RadialBumpCoupling c;
    if (auto v = take("coupling.center")) {
      const auto xs = to_doubles("coupling.center", *v);
      if (static_cast<int>(xs.size()) != cfg.dim)
        throw ConfigError("coupling.center", "needs one coordinate per axis");
      for (int a = 0; a < cfg.dim; ++a) c.center[a] = xs[a];
    }
    c.radius = num("coupling.radius", c.radius);
    c.base = num("coupling.base", c.base);
    c.height = num("coupling.height", c.height);
    if (!(c.radius > 0)) throw ConfigError("coupling.radius", "must be positive");
    cfg.coupling = c;
  } else if (kind == "oscillating") {
    OscillatingCoupling c;
    c.base = num("coupling.base", c.base);
    c.amplitude = num("coupling.amplitude", c.amplitude);
    c.frequency = num("coupling.frequency", c.frequency);
    c.tilt = num("coupling.tilt", c.tilt);
    cfg.coupling = c;
  } else if (kind == "tabulated") {
    auto f = take("coupling.file");
    if (!f) throw ConfigError("coupling.file", "required for coupling.kind = tabulated");
    cfg.coupling = TabulatedCoupling{resolve(base_dir, *f)};
  } else {
    throw ConfigError("coupling.kind", "unknown coupling '" + kind + "'");
  }

  for (int which : {1, 2}) {
    auto& faces = which == 1 ? cfg.h1 : cfg.h2;
    const std::string prefix = "boundary.h" + std::to_string(which) + ".";
    RunConfig::FaceValue fallback;
    if (auto v = take(prefix + "default")) fallback.constant = to_double(prefix + "default", *v);
    for (int f = 0; f < 2 * cfg.dim; ++f) {
      const std::string key = prefix + face_names()[f];
      RunConfig::FaceValue fv = fallback;
      if (auto v = take(key)) {
        if (v->rfind("file:", 0) == 0)
          fv.file = resolve(base_dir, trim(v->substr(5)));
        else
          fv.constant = to_double(key, *v);
      }
      faces[face_names()[f]] = fv;
    }
  }

  if (auto v = take("solver.rel_tolerance"))
    cfg.solver.rel_tolerance = to_double("solver.rel_tolerance", *v);
  if (auto v = take("solver.max_iterations"))
    cfg.solver.max_iterations = static_cast<std::size_t>(to_int("solver.max_iterations", *v));
  if (auto v = take("solver.preconditioner")) {
    if (*v == "diagonal") cfg.solver.preconditioner = Preconditioner::diagonal;
    else if (*v == "none") cfg.solver.preconditioner = Preconditioner::none;
    else throw ConfigError("solver.preconditioner", "expected diagonal or none");
  }
  if (auto v = take("solver.backend")) {
    if (*v == "cg") cfg.solver.backend = LinearBackend::conjugate_gradient;
    else if (*v == "dense") cfg.solver.backend = LinearBackend::dense;
    else throw ConfigError("solver.backend", "expected cg or dense");
  }
  try {
    cfg.solver.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("solver", e.what());
  }

  OptimizeOptions& o = cfg.optimizer;
  if (auto v = take("optimizer.metric")) {
    if (*v == "sobolev") o.metric = GradientMetric::SobolevH10;
    else if (*v == "l2") o.metric = GradientMetric::L2;
    else throw ConfigError("optimizer.metric", "expected sobolev or l2");
  }
  o.grad_tol = num("optimizer.grad_tol", o.grad_tol);
  if (auto v = take("optimizer.max_iters"))
    o.max_iters = static_cast<int>(to_int("optimizer.max_iters", *v));
  o.armijo_c = num("optimizer.armijo_c", o.armijo_c);
  o.backtrack_factor = num("optimizer.backtrack_factor", o.backtrack_factor);
  o.initial_step = num("optimizer.initial_step", o.initial_step);
  o.dedupe_l2 = num("optimizer.dedupe_l2", o.dedupe_l2);
  if (auto v = take("optimizer.bb_step")) o.bb_step = to_bool("optimizer.bb_step", *v);
  try {
    o.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("optimizer", e.what());
  }

  if (auto v = take("run.mode")) {
    if (*v == "ground") cfg.mode = RunMode::ground;
    else if (*v == "excited") cfg.mode = RunMode::excited;
    else if (*v == "verify") cfg.mode = RunMode::verify;
    else if (*v == "refine") cfg.mode = RunMode::refine;
    else if (*v == "oracle") cfg.mode = RunMode::oracle;
    else throw ConfigError("run.mode", "unknown mode '" + *v + "'");
  }
  if (auto v = take("run.k")) cfg.k = static_cast<int>(to_int("run.k", *v));
  if (cfg.k < 1) throw ConfigError("run.k", "must be at least 1");
  if (auto v = take("run.seed")) cfg.seed = static_cast<std::uint64_t>(to_int("run.seed", *v));
  if (auto v = take("run.sphere_samples"))
    cfg.sphere_samples = static_cast<int>(to_int("run.sphere_samples", *v));
  if (cfg.sphere_samples < 0) throw ConfigError("run.sphere_samples", "must be non-negative");
  if (auto v = take("refine.n")) cfg.refine_n = to_ints("refine.n", *v);
  if (cfg.mode == RunMode::refine && cfg.refine_n.size() < 3)
    throw ConfigError("refine.n", "a refinement study needs at least 3 grids");
  if (auto v = take("oracle.max_nodes"))
    cfg.oracle_max_nodes = static_cast<std::size_t>(to_int("oracle.max_nodes", *v));
  if (auto v = take("output.dir")) cfg.output_dir = *v;
  if (auto v = take("output.dump_fields")) cfg.dump_fields = to_bool("output.dump_fields", *v);

  if (!kv.empty()) throw ConfigError(kv.begin()->first, "unknown key");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

GridSpec RunConfig::grid() const { return GridSpec(lengths, n); }

GridSpec RunConfig::grid(int nodes) const {
  return GridSpec(lengths, std::vector<int>(dim, nodes));
}

BoundaryData RunConfig::boundary(const GridSpec& g, int which) const {
  const auto& faces = which == 1 ? h1 : h2;
  BoundaryData b(g);
  for (int f = 0; f < g.face_count(); ++f) {
    const auto& fv = faces.at(face_names()[f]);
    auto slots = b.face(f);
    if (fv.file.empty()) {
      std::fill(slots.begin(), slots.end(), fv.constant);
    } else {
      const auto values = read_face_file(fv.file);
      if (values.size() != slots.size())
        throw ConfigError("boundary.h" + std::to_string(which) + "." + face_names()[f],
                          "file has " + std::to_string(values.size()) + " values, face has " +
                              std::to_string(slots.size()) + " nodes");
      std::copy(values.begin(), values.end(), slots.begin());
    }
  }
  return b;
}

Problem RunConfig::problem() const { return problem(grid()); }

Problem RunConfig::problem(const GridSpec& g) const {
  return make_problem(evaluate_coupling(coupling, g), kappa, p, boundary(g, 1), boundary(g, 2),
                      solver);
}

}  // namespace sbp
