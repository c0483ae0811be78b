#pragma once

// Dense assembly of the discrete operators, entry by entry from the stencil
// formulas. Used as the direct-solve backend and as the oracle the iterative
// path is checked against; limited to small grids.

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "sbp/grid.hpp"

namespace sbp::dense {

inline constexpr std::size_t kMaxOracleNodes = 5000;

/// Throws OracleTooLarge above `max_nodes`.
void require_small(const GridSpec& grid, std::size_t max_nodes = kMaxOracleNodes);

/// Zero-flux Neumann Laplacian on all nodes (ghost reflection rows).
Eigen::MatrixXd laplacian_neumann(const GridSpec& grid);
/// Dirichlet Laplacian restricted to interior nodes.
Eigen::MatrixXd laplacian_dirichlet(const GridSpec& grid);
/// Boundary source vector B g of the flux closure.
Eigen::VectorXd neumann_source(const BoundaryData& g);
Eigen::VectorXd weights(const GridSpec& grid);
std::vector<std::size_t> interior_nodes(const GridSpec& grid);

Eigen::VectorXd to_vector(const ScalarField& f);
ScalarField to_field(const GridSpec& grid, const Eigen::VectorXd& v);

ScalarField solve_helmholtz_neumann(const ScalarField& f, const BoundaryData& g);
/// Bordered system [A w; w^T 0] with the mean constraint appended. The
/// right-hand side is mean-projected like the iterative path.
ScalarField solve_poisson_neumann_zeromean(const ScalarField& f,
                                           const BoundaryData& g);
ScalarField solve_poisson_dirichlet(const ScalarField& f);

}  // namespace sbp::dense
