#include "sbp/kernels.hpp"

namespace sbp::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double weighted_dot_scalar(const double* w, const double* a, const double* b,
                           std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * a[i] * b[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void xpby_scalar(const double* x, double beta, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + beta * y[i];
}

void second_difference_scalar(double* out, const double* minus,
                              const double* center, const double* plus,
                              double coef, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    out[i] += coef * ((minus[i] - 2.0 * center[i]) + plus[i]);
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{dot_scalar, weighted_dot_scalar, axpy_scalar,
                                 xpby_scalar, second_difference_scalar};
  return table;
}

}  // namespace sbp::kernels
