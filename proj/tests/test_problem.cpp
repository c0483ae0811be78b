#include <doctest.h>

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "chi_oracle.hpp"
#include "helpers.hpp"
#include "sbp/dense.hpp"
#include "sbp/errors.hpp"
#include "sbp/problem.hpp"

using namespace sbp;

namespace {

Problem problem_1d(int n, double h1l, double h1r, double h2l, double h2r) {
  const GridSpec g = GridSpec::uniform(1, n);
  const double h1[] = {h1l, h1r}, h2[] = {h2l, h2r};
  return make_problem(evaluate_coupling(AffineCoupling{0.0, 1.0}, g), 1.0, 3.0,
                      BoundaryData::per_face(g, h1), BoundaryData::per_face(g, h2));
}

}  // namespace

TEST_CASE("alpha from boundary data") {
  CHECK(sbp::testing::benchmark_problem(33).alpha == doctest::Approx(0.5));
  CHECK(problem_1d(33, 0.1, 0.2, 0.3, 0.7).alpha == doctest::Approx(0.7));
  const GridSpec cube = GridSpec::uniform(3, 5);
  CHECK(compute_alpha(BoundaryData(cube, 0.0), BoundaryData(cube, 0.2)) ==
        doctest::Approx(1.2));
  const GridSpec sq = GridSpec::uniform(2, 9);
  CHECK(compute_alpha(BoundaryData(sq, 0.1), BoundaryData(sq, 0.3)) == doctest::Approx(0.8));
}

TEST_CASE("chi matches the closed form at second order in 1D") {
  const ChiExact1D ex(0.05, -0.1, 0.3, 0.2);
  double prev_chi = 0.0, prev_theta = 0.0;
  for (int n : {33, 65, 129, 257}) {
    const Problem pr = problem_1d(n, 0.05, -0.1, 0.3, 0.2);
    double e_chi = 0.0, e_theta = 0.0;
    for (std::size_t i = 0; i < pr.grid.size(); ++i) {
      const double x = pr.grid.point(i)[0];
      e_chi = std::max(e_chi, std::fabs(pr.chi[i] - ex.chi(x)));
      e_theta = std::max(e_theta, std::fabs(pr.theta[i] - ex.theta(x)));
    }
    if (prev_chi > 0) {
      CHECK(std::log2(prev_chi / e_chi) == doctest::Approx(2.0).epsilon(0.05));
      CHECK(std::log2(prev_theta / e_theta) == doctest::Approx(2.0).epsilon(0.05));
    }
    prev_chi = e_chi;
    prev_theta = e_theta;
    CHECK(std::fabs(mean(pr.chi)) <= 1e-12);
    CHECK(std::fabs(integrate(pr.theta) - boundary_integrate(pr.h1)) <=
          5e-8 * boundary_data_scale(pr));
  }
}

TEST_CASE("chi in 2D with product data converges at second order") {
  // h1 = 0, h2 = c on every edge: theta is a sum of 1D profiles, alpha = 4c.
  const double c = 0.125;
  double prev = 0.0;
  for (int n : {17, 33, 65}) {
    const GridSpec g = GridSpec::uniform(2, n);
    const Problem pr = make_problem(ScalarField(g, 1.0), 1.0, 3.0, BoundaryData(g, 0.0),
                                    BoundaryData(g, c));
    // theta = a (cosh(x-1/2) + cosh(y-1/2)) - alpha with a sinh(1/2) = c.
    const double a = c / std::sinh(0.5), alpha = 4 * c;
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Point x = g.point(i);
      const double th = a * (std::cosh(x[0] - 0.5) + std::cosh(x[1] - 0.5)) - alpha;
      err = std::max(err, std::fabs(pr.theta[i] - th));
    }
    if (prev > 0) CHECK(std::log2(prev / err) == doctest::Approx(2.0).epsilon(0.05));
    prev = err;
  }
}

TEST_CASE("feasibility classification") {
  const GridSpec g = GridSpec::uniform(1, 101);
  const auto q = evaluate_coupling(AffineCoupling{0.0, 1.0}, g);
  CHECK(classify_alpha(q, 0.5).cls == FeasibilityClass::interior);
  CHECK(classify_alpha(q, 0.0).cls == FeasibilityClass::boundary_degenerate);
  CHECK(classify_alpha(q, 1.0).cls == FeasibilityClass::boundary_degenerate);
  CHECK(classify_alpha(q, 2.0).cls == FeasibilityClass::infeasible);
  CHECK(classify_alpha(q, -0.1).cls == FeasibilityClass::infeasible);
  const ScalarField flat(g, 3.0);
  CHECK(classify_alpha(flat, 3.0).cls != FeasibilityClass::interior);
  CHECK(classify_alpha(flat, 3.0).level_set_warning());
  CHECK(classify_alpha(flat, 2.0).cls == FeasibilityClass::infeasible);
  // Moving alpha deeper inside never worsens the class.
  int prev_rank = 0;
  for (double a : {1.5, 1.0, 0.9, 0.5}) {
    const auto cls = classify_alpha(q, a).cls;
    const int rank = cls == FeasibilityClass::interior ? 2
                     : cls == FeasibilityClass::boundary_degenerate ? 1 : 0;
    CHECK(rank >= prev_rank);
    prev_rank = rank;
  }
  std::vector<char> mask(g.size(), 0);
  for (std::size_t i = 0; i < 20; ++i) mask[i] = 1;
  CHECK(classify_alpha(q, 0.5, -1, -1, &mask).cls == FeasibilityClass::infeasible);
}

TEST_CASE("coupling families") {
  const GridSpec g = GridSpec::uniform(2, 9);
  const auto bump = evaluate_coupling(RadialBumpCoupling{{0.5, 0.5, 0}, 0.25, 0.1, 2.0}, g);
  CHECK(bump[g.node({4, 4, 0})] == doctest::Approx(2.1));
  CHECK(bump[0] == doctest::Approx(0.1));
  const auto osc = evaluate_coupling(OscillatingCoupling{1.0, 0.5, 2.0, 0.0}, g);
  CHECK(osc[g.node({2, 0, 0})] == doctest::Approx(1.5));

  const std::string path = "test_problem_q.csv";
  write_field_csv(path, bump);
  const auto tab = evaluate_coupling(TabulatedCoupling{path}, g);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(tab[i] == bump[i]);
  CHECK_THROWS_AS(evaluate_coupling(TabulatedCoupling{path}, GridSpec::uniform(2, 5)), Error);
}

TEST_CASE("parameter validation") {
  const GridSpec g = GridSpec::uniform(1, 17);
  const ScalarField q(g, 1.0);
  CHECK_THROWS_AS(make_problem(q, 1.0, 2.0, BoundaryData(g), BoundaryData(g)),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_problem(q, 1.0, 3.5, BoundaryData(g), BoundaryData(g)),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_problem(q, -1.0, 3.0, BoundaryData(g), BoundaryData(g)),
                  std::invalid_argument);
  CHECK_NOTHROW(make_problem(q, 0.0, 10.0 / 3.0, BoundaryData(g), BoundaryData(g)));
}

TEST_CASE("zero boundary data gives zero chi and theta") {
  const Problem pr = problem_1d(33, 0, 0, 0, 0);
  CHECK(pr.alpha == 0.0);
  CHECK(max_abs(pr.chi) == 0.0);
  CHECK(max_abs(pr.theta) == 0.0);
}

TEST_CASE("chi matches dense solves of the split system") {
  const double c = 0.3;
  const Problem pr = problem_1d(33, 0, 0, -c, c);
  const GridSpec& g = pr.grid;
  const auto theta = dense::solve_helmholtz_neumann(ScalarField(g, pr.alpha / g.volume()), pr.h2);
  const auto chi = dense::solve_poisson_neumann_zeromean(theta, pr.h1);
  CHECK(max_abs(pr.theta - theta) <= 1e-8);
  CHECK(max_abs(pr.chi - chi) <= 1e-8);
}
