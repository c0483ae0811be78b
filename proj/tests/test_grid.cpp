#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "sbp/errors.hpp"
#include "sbp/grid.hpp"

using namespace sbp;
using sbp::testing::pi;

TEST_CASE("layout and indexing") {
  const GridSpec g({1.0, 2.0}, {5, 9});
  CHECK(g.dim() == 2);
  CHECK(g.size() == 45);
  CHECK(g.spacing(0) == doctest::Approx(0.25));
  CHECK(g.spacing(1) == doctest::Approx(0.25));
  CHECK(g.coord(1, 8) == 2.0);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(g.node(g.index(i)) == i);
  CHECK(g.boundary_nodes().size() == 45 - 3 * 7);
  CHECK(g.volume() == doctest::Approx(2.0));
}

TEST_CASE("trapezoid weights integrate bilinear functions exactly") {
  for (int dim = 1; dim <= 3; ++dim) {
    const GridSpec g = GridSpec::uniform(dim, 9, 2.0);
    double s = 0.0;
    for (double w : g.weights()) s += w;
    CHECK(s == doctest::Approx(g.volume()).epsilon(1e-14));
    const auto f = ScalarField::from_function(g, [&](const Point& x) {
      double v = 1.0;
      for (int a = 0; a < dim; ++a) v *= (1.0 + x[a]);
      return v;
    });
    CHECK(integrate(f) == doctest::Approx(std::pow(4.0, dim)).epsilon(1e-13));
  }
}

TEST_CASE("quadrature of sin^2 converges at second order") {
  double prev = 0.0;
  for (int n : {17, 33, 65}) {
    const GridSpec g = GridSpec::uniform(1, n);
    const auto f = ScalarField::from_function(g, [](const Point& x) { return std::exp(x[0]); });
    const double err = std::fabs(integrate(f) - (std::exp(1.0) - 1.0));
    if (prev > 0) CHECK(std::log2(prev / err) == doctest::Approx(2.0).epsilon(0.02));
    prev = err;
  }
}

TEST_CASE("Dirichlet Laplacian is exact on quadratics and rejects boundary data") {
  const GridSpec g = GridSpec::uniform(2, 11);
  const auto f = ScalarField::from_function(
      g, [](const Point& x) { return x[0] * (1 - x[0]) * x[1] * (1 - x[1]); });
  const auto lap = apply_laplacian_dirichlet(f);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.is_boundary(i)) continue;
    const Point x = g.point(i);
    CHECK(lap[i] == doctest::Approx(-2 * x[1] * (1 - x[1]) - 2 * x[0] * (1 - x[0])));
  }
  ScalarField bad(g, 1.0);
  CHECK_THROWS_AS(apply_laplacian_dirichlet(bad), NonzeroBoundary);
}

TEST_CASE("Neumann Laplacian with flux is exact on quadratics") {
  const GridSpec g = GridSpec::uniform(1, 17);
  // f = x^2: outward derivative is 0 at x=0 and 2 at x=1.
  const auto f = ScalarField::from_function(g, [](const Point& x) { return x[0] * x[0]; });
  const BoundaryData flux = BoundaryData::from_function(
      g, [](int face, const Point&) { return face == 0 ? 0.0 : 2.0; });
  const auto lap = apply_laplacian_neumann(f, flux);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(lap[i] == doctest::Approx(2.0));
}

TEST_CASE("gradient energy matches the stencils") {
  std::mt19937_64 rng(5);
  for (int dim = 1; dim <= 3; ++dim) {
    const GridSpec g = GridSpec::uniform(dim, dim == 3 ? 7 : 13);
    const auto f = sbp::testing::random_nodal(g, rng);
    const double e = gradient_energy(f);
    CHECK(e == doctest::Approx(-inner(apply_laplacian_neumann(f), f)).epsilon(1e-12));
    auto d = f;
    zero_boundary(d);
    CHECK(gradient_energy(d) ==
          doctest::Approx(-inner(apply_laplacian_dirichlet(d), d)).epsilon(1e-12));
  }
  const GridSpec g = GridSpec::uniform(1, 257);
  const auto s = ScalarField::from_function(g, [](const Point& x) { return std::sin(pi * x[0]); });
  CHECK(gradient_energy(s) == doctest::Approx(pi * pi / 2).epsilon(1e-4));
}

TEST_CASE("boundary integrals") {
  const GridSpec g1 = GridSpec::uniform(1, 9);
  CHECK(boundary_integrate(BoundaryData(g1, 0.25)) == doctest::Approx(0.5));
  const GridSpec g2 = GridSpec::uniform(2, 9, 2.0);
  CHECK(boundary_integrate(BoundaryData(g2, 1.0)) == doctest::Approx(8.0));
  const double vals[] = {1, -1, 0, 2};
  CHECK(boundary_integrate(BoundaryData::per_face(g2, vals)) == doctest::Approx(4.0));
  CHECK(boundary_integrate_abs(BoundaryData::per_face(g2, vals)) == doctest::Approx(8.0));
}

TEST_CASE("field dump round trip") {
  std::mt19937_64 rng(9);
  const GridSpec g({1.0, 0.5}, {5, 7});
  const auto f = sbp::testing::random_nodal(g, rng);
  std::stringstream ss;
  write_field_csv(ss, f);
  const auto r = read_field_csv(ss);
  CHECK(r.grid() == g);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(r[i] == f[i]);
}

TEST_CASE("quadrature examples") {
  const GridSpec cube = GridSpec::uniform(3, 5);
  CHECK(integrate(ScalarField(cube, 1.0)) == 1.0);
  const GridSpec g65 = GridSpec::uniform(1, 65);
  const auto c = ScalarField::from_function(g65, [](const Point& x) { return std::cos(pi * x[0]); });
  CHECK(std::fabs(integrate(c)) <= 1e-12);
  auto sq = [](int n) {
    const GridSpec g = GridSpec::uniform(1, n);
    return std::fabs(integrate(ScalarField::from_function(g, [](const Point& x) { return x[0] * x[0]; })) -
                     1.0 / 3.0);
  };
  CHECK(sq(33) <= 1e-3);
  CHECK(sq(33) / sq(65) == doctest::Approx(4.0).epsilon(0.01));
}

TEST_CASE("boundary quadrature examples") {
  CHECK(boundary_integrate(BoundaryData(GridSpec::uniform(3, 5), 0.7)) == doctest::Approx(4.2));
  CHECK(boundary_integrate(BoundaryData(GridSpec::uniform(1, 5), 0.7)) == doctest::Approx(1.4));
  const GridSpec g = GridSpec::uniform(2, 33);
  const auto b = BoundaryData::from_function(
      g, [](int face, const Point& x) { return face == 0 ? x[1] : 0.0; });
  CHECK(std::fabs(boundary_integrate(b) - 0.5) <= 1e-3);
}

TEST_CASE("stencil examples") {
  // Dirichlet eigenvalue 2 pi^2 of sin(pi x) sin(pi y), Rayleigh quotient.
  std::vector<double> errs;
  for (int n : {17, 33, 65}) {
    const GridSpec g = GridSpec::uniform(2, n);
    const auto f = ScalarField::from_function(
        g, [](const Point& x) { return std::sin(pi * x[0]) * std::sin(pi * x[1]); });
    const double lam = -inner(apply_laplacian_dirichlet(f), f) / inner(f, f);
    errs.push_back(std::fabs(lam - 2 * pi * pi));
    CHECK(max_abs(apply_laplacian_dirichlet(ScalarField(g))) == 0.0);
  }
  CHECK(std::log2(errs[0] / errs[1]) == doctest::Approx(2.0).epsilon(0.05));
  CHECK(std::log2(errs[1] / errs[2]) == doctest::Approx(2.0).epsilon(0.05));

  const GridSpec g = GridSpec::uniform(1, 129);
  CHECK(max_abs(apply_laplacian_neumann(ScalarField(g, 3.7))) <= 1e-11);
  const auto c = ScalarField::from_function(g, [](const Point& x) { return std::cos(pi * x[0]); });
  CHECK(max_abs(apply_laplacian_neumann(c) + pi * pi * c) <= 1e-3);
  const auto half_sq = ScalarField::from_function(g, [](const Point& x) { return x[0] * x[0] / 2; });
  const BoundaryData flux = BoundaryData::from_function(
      g, [](int face, const Point&) { return face == 0 ? 0.0 : 1.0; });
  CHECK(max_abs(apply_laplacian_neumann(half_sq, flux) - ScalarField(g, 1.0)) <= 1e-10);
}

TEST_CASE("both Laplacians are symmetric in the quadrature inner product") {
  std::mt19937_64 rng(61);
  for (int dim = 1; dim <= 3; ++dim) {
    const GridSpec g = GridSpec::uniform(dim, dim == 3 ? 7 : 17);
    auto f = sbp::testing::random_nodal(g, rng), h = sbp::testing::random_nodal(g, rng);
    const double nn = norm_l2(f) * norm_l2(h);
    CHECK(std::fabs(inner(apply_laplacian_neumann(f), h) - inner(f, apply_laplacian_neumann(h))) <=
          1e-10 * nn);
    zero_boundary(f);
    zero_boundary(h);
    CHECK(std::fabs(inner(apply_laplacian_dirichlet(f), h) -
                    inner(f, apply_laplacian_dirichlet(h))) <= 1e-10 * nn);
  }
}
