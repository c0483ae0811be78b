#pragma once

// Node-centred box grids, nodal fields, trapezoidal quadrature and the two
// second-order Laplacian stencils (homogeneous Dirichlet, Neumann with flux).

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace sbp {

using Point = std::array<double, 3>;
using Index = std::array<int, 3>;

/// Uniform node-centred grid on [0,L1] x ... x [0,Ld], d in {1,2,3}.
/// Copies share one immutable layout.
class GridSpec {
 public:
  GridSpec() = default;
  GridSpec(std::vector<double> lengths, std::vector<int> nodes_per_axis);

  /// Same length and node count on every axis.
  static GridSpec uniform(int dim, int n, double length = 1.0);

  int dim() const { return layout_->dim; }
  double length(int axis) const { return layout_->lengths[axis]; }
  int nodes(int axis) const { return layout_->n[axis]; }
  double spacing(int axis) const { return layout_->h[axis]; }
  std::size_t size() const { return layout_->size; }
  std::size_t stride(int axis) const { return layout_->stride[axis]; }
  double volume() const { return layout_->volume; }

  Index index(std::size_t node) const;
  std::size_t node(const Index& idx) const;
  /// x_i = L * i / (n - 1): the last node sits exactly on L.
  double coord(int axis, int i) const;
  Point point(std::size_t node) const;
  bool is_boundary(std::size_t node) const;

  /// Trapezoidal weights (tensor product of the 1-D rules).
  std::span<const double> weights() const { return layout_->weights; }
  double axis_weight(int axis, int i) const;
  std::span<const std::size_t> boundary_nodes() const {
    return layout_->boundary;
  }

  // Faces are numbered 2*axis + side, side 0 at x_axis = 0.
  int face_count() const { return 2 * dim(); }
  std::size_t face_size(int axis) const;
  /// Position of a node in the face array of `axis` (other axes, row-major).
  std::size_t face_slot(int axis, std::size_t node) const;
  /// Surface quadrature weight of a face slot; 1 in d = 1.
  double face_weight(int axis, std::size_t slot) const;

  bool valid() const { return static_cast<bool>(layout_); }
  bool operator==(const GridSpec& other) const;
  std::string describe() const;

 private:
  struct Layout {
    int dim = 0;
    std::array<double, 3> lengths{1, 1, 1};
    std::array<int, 3> n{1, 1, 1};
    std::array<double, 3> h{0, 0, 0};
    std::array<std::size_t, 3> stride{1, 1, 1};
    std::size_t size = 0;
    double volume = 0;
    std::array<std::vector<double>, 3> axis_weights;
    std::vector<double> weights;
    std::vector<std::size_t> boundary;
    std::vector<char> boundary_mask;
  };
  std::shared_ptr<const Layout> layout_;
};

/// Real values on every node of a grid.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(GridSpec grid, double value = 0.0);
  ScalarField(GridSpec grid, std::vector<double> values);

  static ScalarField from_function(GridSpec grid,
                                   const std::function<double(const Point&)>& f);

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  bool all_finite() const;

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(double s);

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);
ScalarField operator-(ScalarField a);
/// Pointwise product.
ScalarField times(const ScalarField& a, const ScalarField& b);
ScalarField abs(ScalarField a);

/// Per-face scalar data on boundary nodes (corner nodes appear on every face
/// they touch).
class BoundaryData {
 public:
  BoundaryData() = default;
  explicit BoundaryData(GridSpec grid, double value = 0.0);

  static BoundaryData from_function(
      GridSpec grid, const std::function<double(int face, const Point&)>& f);
  /// One constant per face.
  static BoundaryData per_face(GridSpec grid, std::span<const double> values);

  const GridSpec& grid() const { return grid_; }
  std::span<double> face(int f) { return faces_[f]; }
  std::span<const double> face(int f) const { return faces_[f]; }
  double at(int axis, int side, std::size_t node) const;
  bool is_zero() const;
  bool all_finite() const;

 private:
  GridSpec grid_;
  std::vector<std::vector<double>> faces_;
};

/// Trapezoidal quadrature of f over the box.
double integrate(const ScalarField& f);
/// Quadrature of f*g.
double inner(const ScalarField& f, const ScalarField& g);
double norm_l2(const ScalarField& f);
double mean(const ScalarField& f);
double max_abs(const ScalarField& f);

/// Sum of per-face trapezoidal surface integrals; counting measure in d = 1.
double boundary_integrate(const BoundaryData& b);
/// Same quadrature applied to |b|.
double boundary_integrate_abs(const BoundaryData& b);

/// Delta f on interior nodes, zero on boundary nodes. f must vanish on the
/// boundary to 1e-12 (NonzeroBoundary otherwise).
ScalarField apply_laplacian_dirichlet(const ScalarField& f);
/// Delta f with ghost nodes ghost = inner + 2 h flux on every face.
ScalarField apply_laplacian_neumann(const ScalarField& f,
                                    const BoundaryData& flux);
/// Zero-flux variant.
ScalarField apply_laplacian_neumann(const ScalarField& f);

/// Edge-difference quadrature of |grad f|^2. Equals -<Delta_N f, f> for the
/// zero-flux stencil and -<Delta_D f, f> when f vanishes on the boundary.
double gradient_energy(const ScalarField& f);

double max_abs_boundary(const ScalarField& f);
void zero_boundary(ScalarField& f);

/// Field dump: `# dim=<d> n=<n1,...> L=<L1,...>` then one value per line,
/// last axis fastest.
void write_field_csv(std::ostream& os, const ScalarField& f);
void write_field_csv(const std::string& path, const ScalarField& f);
ScalarField read_field_csv(std::istream& is);
ScalarField read_field_csv(const std::string& path);

}  // namespace sbp
