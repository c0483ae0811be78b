#include "sbp/dense.hpp"

#include <cmath>
#include <string>

#include "sbp/errors.hpp"

namespace sbp::dense {

void require_small(const GridSpec& grid, std::size_t max_nodes) {
  if (grid.size() > max_nodes)
    throw OracleTooLarge("dense oracle limited to " + std::to_string(max_nodes) +
                         " nodes, grid has " + std::to_string(grid.size()));
}

Eigen::MatrixXd laplacian_neumann(const GridSpec& grid) {
  require_small(grid);
  const auto n = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Index idx = grid.index(i);
    for (int a = 0; a < grid.dim(); ++a) {
      const double c = 1.0 / (grid.spacing(a) * grid.spacing(a));
      const auto s = static_cast<Eigen::Index>(grid.stride(a));
      const auto r = static_cast<Eigen::Index>(i);
      const int k = idx[a];
      const int last = grid.nodes(a) - 1;
      A(r, r) -= 2.0 * c;
      if (k == 0) {
        A(r, r + s) += 2.0 * c;
      } else if (k == last) {
        A(r, r - s) += 2.0 * c;
      } else {
        A(r, r - s) += c;
        A(r, r + s) += c;
      }
    }
  }
  return A;
}

std::vector<std::size_t> interior_nodes(const GridSpec& grid) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (!grid.is_boundary(i)) out.push_back(i);
  return out;
}

Eigen::MatrixXd laplacian_dirichlet(const GridSpec& grid) {
  require_small(grid);
  const auto interior = interior_nodes(grid);
  std::vector<long> slot(grid.size(), -1);
  for (std::size_t k = 0; k < interior.size(); ++k) slot[interior[k]] = static_cast<long>(k);
  const auto m = static_cast<Eigen::Index>(interior.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
  for (std::size_t k = 0; k < interior.size(); ++k) {
    const std::size_t i = interior[k];
    for (int a = 0; a < grid.dim(); ++a) {
      const double c = 1.0 / (grid.spacing(a) * grid.spacing(a));
      const std::size_t s = grid.stride(a);
      A(k, k) -= 2.0 * c;
      if (slot[i - s] >= 0) A(k, slot[i - s]) += c;
      if (slot[i + s] >= 0) A(k, slot[i + s]) += c;
    }
  }
  return A;
}

Eigen::VectorXd neumann_source(const BoundaryData& g) {
  const GridSpec& grid = g.grid();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i : grid.boundary_nodes()) {
    const Index idx = grid.index(i);
    for (int a = 0; a < grid.dim(); ++a) {
      const double h = grid.spacing(a);
      if (idx[a] == 0) b(i) += 2.0 * g.at(a, 0, i) / h;
      if (idx[a] == grid.nodes(a) - 1) b(i) += 2.0 * g.at(a, 1, i) / h;
    }
  }
  return b;
}

Eigen::VectorXd weights(const GridSpec& grid) {
  Eigen::VectorXd w(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) w(i) = grid.weights()[i];
  return w;
}

Eigen::VectorXd to_vector(const ScalarField& f) {
  return Eigen::Map<const Eigen::VectorXd>(f.data(),
                                           static_cast<Eigen::Index>(f.size()));
}

ScalarField to_field(const GridSpec& grid, const Eigen::VectorXd& v) {
  return ScalarField(grid, std::vector<double>(v.data(), v.data() + v.size()));
}

ScalarField solve_helmholtz_neumann(const ScalarField& f, const BoundaryData& g) {
  const GridSpec& grid = f.grid();
  Eigen::MatrixXd M = laplacian_neumann(grid);
  M.diagonal().array() -= 1.0;
  const Eigen::VectorXd rhs = to_vector(f) - neumann_source(g);
  return to_field(grid, M.partialPivLu().solve(rhs));
}

ScalarField solve_poisson_neumann_zeromean(const ScalarField& f,
                                           const BoundaryData& g) {
  const GridSpec& grid = f.grid();
  const auto n = static_cast<Eigen::Index>(grid.size());
  const Eigen::VectorXd w = weights(grid);
  Eigen::VectorXd rhs = to_vector(f) - neumann_source(g);
  rhs.array() -= w.dot(rhs) / w.sum();

  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + 1, n + 1);
  K.topLeftCorner(n, n) = laplacian_neumann(grid);
  K.col(n).head(n).setOnes();
  K.row(n).head(n) = w.transpose();
  Eigen::VectorXd b(n + 1);
  b.head(n) = rhs;
  b(n) = 0.0;
  const Eigen::VectorXd x = K.fullPivLu().solve(b);
  return to_field(grid, x.head(n));
}

ScalarField solve_poisson_dirichlet(const ScalarField& f) {
  const GridSpec& grid = f.grid();
  const auto interior = interior_nodes(grid);
  const Eigen::MatrixXd A = laplacian_dirichlet(grid);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(interior.size()));
  for (std::size_t k = 0; k < interior.size(); ++k) rhs(k) = f[interior[k]];
  const Eigen::VectorXd x = (-A).llt().solve(rhs);
  ScalarField out(grid);
  for (std::size_t k = 0; k < interior.size(); ++k) out[interior[k]] = x(k);
  return out;
}

}  // namespace sbp::dense
