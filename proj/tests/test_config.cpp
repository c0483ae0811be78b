#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "sbp/config.hpp"
#include "sbp/errors.hpp"

using namespace sbp;

TEST_CASE("defaults and basic keys") {
  const auto c = parse_config(
      "# comment\n"
      "domain.dim = 2\n"
      "domain.lengths = 1, 2\n"
      "grid.n = 17, 33\n"
      "physics.kappa = 0.5\n"
      "coupling.kind = affine\n"
      "coupling.a = 1\n"
      "coupling.b = 2\n"
      "boundary.h2.default = 0.1\n"
      "boundary.h2.xmax = 0.3\n"
      "solver.backend = dense\n"
      "optimizer.metric = l2\n"
      "run.mode = excited\n"
      "run.k = 2\n"
      "refine.n = 9, 17\n");
  CHECK(c.dim == 2);
  CHECK(c.n == std::vector<int>{17, 33});
  CHECK(c.kappa == 0.5);
  CHECK(c.p == 3.0);
  CHECK(c.solver.backend == LinearBackend::dense);
  CHECK(c.optimizer.metric == GradientMetric::L2);
  CHECK(c.mode == RunMode::excited);
  CHECK(c.k == 2);
  CHECK(c.refine_n == std::vector<int>{9, 17});
  const GridSpec g = c.grid();
  CHECK(g.nodes(1) == 33);
  CHECK(g.length(1) == 2.0);
  const auto h2 = c.boundary(g, 2);
  CHECK(h2.face(1)[0] == 0.3);
  CHECK(h2.face(2)[0] == 0.1);
  // Perimeter weights: xmin/xmax have length 2, ymin/ymax length 1.
  CHECK(boundary_integrate(h2) == doctest::Approx(0.1 * 2 + 0.3 * 2 + 0.1 + 0.1));
}

TEST_CASE("errors name the offending key") {
  CHECK_THROWS_AS(parse_config("grid.nn = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("grid.n = 3\ngrid.n = 5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("physics.kappa = abc\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("coupling.kind = magic\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("no equals sign\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/path.cfg"), ConfigError);
  try {
    parse_config("physics.p = x\n");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("physics.p") != std::string::npos);
  }
}

TEST_CASE("tabulated data resolves relative to the config file") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "sbp_config_test";
  fs::create_directories(dir);
  const GridSpec g = GridSpec::uniform(1, 9);
  write_field_csv((dir / "q.csv").string(),
                  ScalarField::from_function(g, [](const Point& x) { return 2 * x[0]; }));
  {
    std::ofstream os(dir / "run.cfg");
    os << "grid.n = 9\ncoupling.kind = tabulated\ncoupling.file = q.csv\n"
          "boundary.h2.default = 0.5\n";
  }
  const auto c = load_config((dir / "run.cfg").string());
  const Problem pr = c.problem();
  CHECK(pr.q[8] == doctest::Approx(2.0));
  CHECK(pr.alpha == doctest::Approx(1.0));
}

TEST_CASE("shipped configs parse") {
  for (const char* name : {"ground_1d", "excited_1d", "infeasible_alpha", "constant_q",
                           "oracle_kappa0", "refine_1d", "ground_2d", "bump_2d"}) {
    CAPTURE(name);
    CHECK_NOTHROW(load_config(std::string(SBP_CONFIG_DIR) + "/" + name + ".cfg"));
  }
}

TEST_CASE("tabulated face data matches an independent quadrature") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "sbp_config_face";
  fs::create_directories(dir);
  const int n = 33;
  {
    std::ofstream os(dir / "h2_xmin.txt");
    os.precision(17);
    os << "# y^2 on x = 0\n";
    for (int j = 0; j < n; ++j) {
      const double y = static_cast<double>(j) / (n - 1);
      os << y * y << "\n";
    }
  }
  {
    std::ofstream os(dir / "run.cfg");
    os << "domain.dim = 2\ngrid.n = " << n << "\nboundary.h2.xmin = file:h2_xmin.txt\n";
  }
  const auto c = load_config((dir / "run.cfg").string());
  const GridSpec g = c.grid();
  const double got = boundary_integrate(c.boundary(g, 2));
  // Composite trapezoid of y^2 on [0,1].
  double ref = 0.0;
  const double h = 1.0 / (n - 1);
  for (int j = 0; j < n; ++j) {
    const double y = j * h;
    ref += (j == 0 || j == n - 1 ? 0.5 : 1.0) * h * y * y;
  }
  CHECK(std::fabs(got - ref) <= 1e-10);
  CHECK(std::fabs(got - 1.0 / 3.0) <= 1e-3);

  {
    std::ofstream os(dir / "short.cfg");
    os << "domain.dim = 2\ngrid.n = 9\nboundary.h2.xmin = file:h2_xmin.txt\n";
  }
  const auto bad = load_config((dir / "short.cfg").string());
  CHECK_THROWS_AS(bad.boundary(bad.grid(), 2), ConfigError);
}
