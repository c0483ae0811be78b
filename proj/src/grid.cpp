#include "sbp/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "sbp/errors.hpp"
#include "sbp/kernels.hpp"

namespace sbp {

GridSpec::GridSpec(std::vector<double> lengths, std::vector<int> nodes_per_axis) {
  if (lengths.size() != nodes_per_axis.size() || lengths.empty() ||
      lengths.size() > 3)
    throw std::invalid_argument("grid: dimension must be 1, 2 or 3");
  auto layout = std::make_shared<Layout>();
  layout->dim = static_cast<int>(lengths.size());
  for (int a = 0; a < layout->dim; ++a) {
    if (!(lengths[a] > 0.0) || !std::isfinite(lengths[a]))
      throw std::invalid_argument("grid: lengths must be positive");
    if (nodes_per_axis[a] < 3)
      throw std::invalid_argument("grid: at least 3 nodes per axis");
    layout->lengths[a] = lengths[a];
    layout->n[a] = nodes_per_axis[a];
    layout->h[a] = lengths[a] / (nodes_per_axis[a] - 1);
  }
  layout->size = 1;
  for (int a = layout->dim - 1; a >= 0; --a) {
    layout->stride[a] = layout->size;
    layout->size *= static_cast<std::size_t>(layout->n[a]);
  }
  layout->volume = 1.0;
  for (int a = 0; a < layout->dim; ++a) {
    layout->volume *= layout->lengths[a];
    auto& w = layout->axis_weights[a];
    w.assign(layout->n[a], layout->h[a]);
    w.front() = w.back() = 0.5 * layout->h[a];
  }
  auto& l = *layout;
  l.weights.resize(l.size);
  l.boundary_mask.assign(l.size, 0);
  for (std::size_t i = 0; i < l.size; ++i) {
    std::size_t rest = i;
    double w = 1.0;
    bool bnd = false;
    for (int a = 0; a < l.dim; ++a) {
      const int k = static_cast<int>(rest / l.stride[a]);
      rest %= l.stride[a];
      w *= l.axis_weights[a][k];
      bnd = bnd || k == 0 || k == l.n[a] - 1;
    }
    l.weights[i] = w;
    if (bnd) {
      l.boundary_mask[i] = 1;
      l.boundary.push_back(i);
    }
  }
  layout_ = std::move(layout);
}

GridSpec GridSpec::uniform(int dim, int n, double length) {
  return GridSpec(std::vector<double>(dim, length), std::vector<int>(dim, n));
}

Index GridSpec::index(std::size_t node) const {
  Index idx{0, 0, 0};
  for (int a = 0; a < dim(); ++a) {
    idx[a] = static_cast<int>(node / layout_->stride[a]);
    node %= layout_->stride[a];
  }
  return idx;
}

std::size_t GridSpec::node(const Index& idx) const {
  std::size_t k = 0;
  for (int a = 0; a < dim(); ++a) k += idx[a] * layout_->stride[a];
  return k;
}

double GridSpec::coord(int axis, int i) const {
  return layout_->lengths[axis] * static_cast<double>(i) /
         static_cast<double>(layout_->n[axis] - 1);
}

Point GridSpec::point(std::size_t node) const {
  const Index idx = index(node);
  Point p{0, 0, 0};
  for (int a = 0; a < dim(); ++a) p[a] = coord(a, idx[a]);
  return p;
}

bool GridSpec::is_boundary(std::size_t node) const {
  return layout_->boundary_mask[node] != 0;
}

double GridSpec::axis_weight(int axis, int i) const {
  return layout_->axis_weights[axis][i];
}

std::size_t GridSpec::face_size(int axis) const {
  return layout_->size / static_cast<std::size_t>(layout_->n[axis]);
}

std::size_t GridSpec::face_slot(int axis, std::size_t node) const {
  const Index idx = index(node);
  std::size_t slot = 0;
  for (int b = 0; b < dim(); ++b) {
    if (b == axis) continue;
    slot = slot * layout_->n[b] + idx[b];
  }
  return slot;
}

double GridSpec::face_weight(int axis, std::size_t slot) const {
  double w = 1.0;
  for (int b = dim() - 1; b >= 0; --b) {
    if (b == axis) continue;
    const int n = layout_->n[b];
    w *= layout_->axis_weights[b][slot % n];
    slot /= n;
  }
  return w;
}

bool GridSpec::operator==(const GridSpec& other) const {
  if (layout_ == other.layout_) return true;
  if (!layout_ || !other.layout_ || dim() != other.dim()) return false;
  for (int a = 0; a < dim(); ++a)
    if (nodes(a) != other.nodes(a) || length(a) != other.length(a))
      return false;
  return true;
}

std::string GridSpec::describe() const {
  std::ostringstream os;
  os << "dim=" << dim() << " n=";
  for (int a = 0; a < dim(); ++a) os << (a ? "," : "") << nodes(a);
  os << " L=";
  char buf[64];
  for (int a = 0; a < dim(); ++a) {
    std::snprintf(buf, sizeof buf, "%.17g", length(a));
    os << (a ? "," : "") << buf;
  }
  return os.str();
}

// ---------------------------------------------------------------------------

ScalarField::ScalarField(GridSpec grid, double value)
    : grid_(std::move(grid)), values_(grid_.size(), value) {}

ScalarField::ScalarField(GridSpec grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw std::invalid_argument("field: value count does not match grid");
}

ScalarField ScalarField::from_function(
    GridSpec grid, const std::function<double(const Point&)>& f) {
  ScalarField out(grid);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(grid.point(i));
  return out;
}

bool ScalarField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  kernels::axpy(1.0, o.data(), data(), size());
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
  for (std::size_t i = 0; i < size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

ScalarField& ScalarField::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }
ScalarField operator-(ScalarField a) {
  for (double& v : a.values()) v = -v;
  return a;
}

ScalarField times(const ScalarField& a, const ScalarField& b) {
  ScalarField out(a.grid());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

ScalarField abs(ScalarField a) {
  for (double& v : a.values()) v = std::fabs(v);
  return a;
}

// ---------------------------------------------------------------------------

BoundaryData::BoundaryData(GridSpec grid, double value) : grid_(std::move(grid)) {
  faces_.resize(grid_.face_count());
  for (int f = 0; f < grid_.face_count(); ++f)
    faces_[f].assign(grid_.face_size(f / 2), value);
}

BoundaryData BoundaryData::from_function(
    GridSpec grid, const std::function<double(int, const Point&)>& f) {
  BoundaryData out(grid);
  for (std::size_t node : grid.boundary_nodes()) {
    const Index idx = grid.index(node);
    const Point p = grid.point(node);
    for (int a = 0; a < grid.dim(); ++a) {
      if (idx[a] == 0)
        out.faces_[2 * a][grid.face_slot(a, node)] = f(2 * a, p);
      if (idx[a] == grid.nodes(a) - 1)
        out.faces_[2 * a + 1][grid.face_slot(a, node)] = f(2 * a + 1, p);
    }
  }
  return out;
}

BoundaryData BoundaryData::per_face(GridSpec grid, std::span<const double> values) {
  if (static_cast<int>(values.size()) != grid.face_count())
    throw std::invalid_argument("boundary data: one value per face expected");
  BoundaryData out(grid);
  for (int f = 0; f < grid.face_count(); ++f)
    std::fill(out.faces_[f].begin(), out.faces_[f].end(), values[f]);
  return out;
}

double BoundaryData::at(int axis, int side, std::size_t node) const {
  return faces_[2 * axis + side][grid_.face_slot(axis, node)];
}

bool BoundaryData::is_zero() const {
  for (const auto& f : faces_)
    for (double v : f)
      if (v != 0.0) return false;
  return true;
}

bool BoundaryData::all_finite() const {
  for (const auto& f : faces_)
    for (double v : f)
      if (!std::isfinite(v)) return false;
  return true;
}

// ---------------------------------------------------------------------------

double integrate(const ScalarField& f) {
  return kernels::dot(f.grid().weights().data(), f.data(), f.size());
}

double inner(const ScalarField& f, const ScalarField& g) {
  return kernels::weighted_dot(f.grid().weights().data(), f.data(), g.data(),
                               f.size());
}

double norm_l2(const ScalarField& f) { return std::sqrt(inner(f, f)); }

double mean(const ScalarField& f) { return integrate(f) / f.grid().volume(); }

double max_abs(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::fabs(v));
  return m;
}

namespace {

template <class Fn>
double boundary_quadrature(const BoundaryData& b, Fn fn) {
  const GridSpec& g = b.grid();
  double total = 0.0;
  for (int f = 0; f < g.face_count(); ++f) {
    const auto vals = b.face(f);
    for (std::size_t s = 0; s < vals.size(); ++s)
      total += g.face_weight(f / 2, s) * fn(vals[s]);
  }
  return total;
}

// Adds the interior three-point second difference along every axis. Nodes on
// the two end planes of each axis are left for the caller.
void add_interior_stencil(const ScalarField& f, ScalarField& out) {
  const GridSpec& g = f.grid();
  for (int a = 0; a < g.dim(); ++a) {
    const std::size_t s = g.stride(a);
    const std::size_t n = g.nodes(a);
    const std::size_t outer = g.size() / (n * s);
    const double c = 1.0 / (g.spacing(a) * g.spacing(a));
    for (std::size_t o = 0; o < outer; ++o) {
      const std::size_t base = o * n * s;
      kernels::second_difference(out.data() + base + s, f.data() + base,
                                 f.data() + base + s, f.data() + base + 2 * s,
                                 c, (n - 2) * s);
    }
  }
}

}  // namespace

double boundary_integrate(const BoundaryData& b) {
  return boundary_quadrature(b, [](double v) { return v; });
}

double boundary_integrate_abs(const BoundaryData& b) {
  return boundary_quadrature(b, [](double v) { return std::fabs(v); });
}

double max_abs_boundary(const ScalarField& f) {
  double m = 0.0;
  for (std::size_t i : f.grid().boundary_nodes()) m = std::max(m, std::fabs(f[i]));
  return m;
}

void zero_boundary(ScalarField& f) {
  for (std::size_t i : f.grid().boundary_nodes()) f[i] = 0.0;
}

ScalarField apply_laplacian_dirichlet(const ScalarField& f) {
  const double b = max_abs_boundary(f);
  if (b > 1e-12) throw NonzeroBoundary(b);
  ScalarField out(f.grid());
  add_interior_stencil(f, out);
  zero_boundary(out);
  return out;
}

ScalarField apply_laplacian_neumann(const ScalarField& f,
                                    const BoundaryData& flux) {
  const GridSpec& g = f.grid();
  ScalarField out(g);
  add_interior_stencil(f, out);
  const bool has_flux = !flux.is_zero();
  for (int a = 0; a < g.dim(); ++a) {
    const std::size_t s = g.stride(a);
    const std::size_t n = g.nodes(a);
    const std::size_t outer = g.size() / (n * s);
    const double h = g.spacing(a);
    const double c = 1.0 / (h * h);
    const auto lo = flux.face(2 * a);
    const auto hi = flux.face(2 * a + 1);
    for (std::size_t o = 0; o < outer; ++o) {
      const std::size_t first = o * n * s;
      const std::size_t last = first + (n - 1) * s;
      for (std::size_t j = 0; j < s; ++j) {
        const std::size_t i0 = first + j;
        const std::size_t i1 = last + j;
        out[i0] += c * (2.0 * f[i0 + s] - 2.0 * f[i0]);
        out[i1] += c * (2.0 * f[i1 - s] - 2.0 * f[i1]);
        if (has_flux) {
          out[i0] += 2.0 * lo[g.face_slot(a, i0)] / h;
          out[i1] += 2.0 * hi[g.face_slot(a, i1)] / h;
        }
      }
    }
  }
  return out;
}

ScalarField apply_laplacian_neumann(const ScalarField& f) {
  return apply_laplacian_neumann(f, BoundaryData(f.grid()));
}

double gradient_energy(const ScalarField& f) {
  const GridSpec& g = f.grid();
  const auto w = g.weights();
  double total = 0.0;
  for (int a = 0; a < g.dim(); ++a) {
    const std::size_t s = g.stride(a);
    const std::size_t n = g.nodes(a);
    const std::size_t outer = g.size() / (n * s);
    const double h = g.spacing(a);
    const double w_end = g.axis_weight(a, 0);
    double axis_sum = 0.0;
    for (std::size_t o = 0; o < outer; ++o) {
      const std::size_t base = o * n * s;
      for (std::size_t j = 0; j < s; ++j) {
        const double perp = w[base + j] / w_end;
        double line = 0.0;
        for (std::size_t k = 0; k + 1 < n; ++k) {
          const std::size_t i = base + k * s + j;
          const double d = f[i + s] - f[i];
          line += d * d;
        }
        axis_sum += perp * line;
      }
    }
    total += axis_sum / h;
  }
  return total;
}

// ---------------------------------------------------------------------------

void write_field_csv(std::ostream& os, const ScalarField& f) {
  os << "# " << f.grid().describe() << '\n';
  char buf[40];
  for (double v : f.values()) {
    std::snprintf(buf, sizeof buf, "%.17g\n", v);
    os << buf;
  }
}

void write_field_csv(const std::string& path, const ScalarField& f) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  write_field_csv(os, f);
}

namespace {

template <class T>
std::vector<T> parse_list(const std::string& s) {
  std::vector<T> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::istringstream is(item);
    T v{};
    if (!(is >> v)) throw Error("field csv: bad header list '" + s + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace

ScalarField read_field_csv(std::istream& is) {
  std::string header;
  if (!std::getline(is, header) || header.rfind("#", 0) != 0)
    throw Error("field csv: missing '# dim=... n=... L=...' header");
  std::istringstream hs(header.substr(1));
  std::string tok;
  int dim = 0;
  std::vector<int> n;
  std::vector<double> L;
  while (hs >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
    if (key == "dim") dim = std::stoi(val);
    else if (key == "n") n = parse_list<int>(val);
    else if (key == "L") L = parse_list<double>(val);
  }
  if (dim < 1 || static_cast<int>(n.size()) != dim ||
      static_cast<int>(L.size()) != dim)
    throw Error("field csv: inconsistent header '" + header + "'");
  GridSpec grid(L, n);
  std::vector<double> values;
  values.reserve(grid.size());
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    values.push_back(std::stod(line));
  }
  if (values.size() != grid.size())
    throw Error("field csv: expected " + std::to_string(grid.size()) +
                " values, found " + std::to_string(values.size()));
  return ScalarField(grid, std::move(values));
}

ScalarField read_field_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot read " + path);
  return read_field_csv(is);
}

}  // namespace sbp
