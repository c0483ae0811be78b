#pragma once

// Data-parallel inner loops shared by the stencils, the quadrature and the
// Krylov solver. Every kernel has a portable scalar reference; an AVX2/FMA
// variant is selected at startup when the CPU supports it.

#include <cstddef>
#include <string_view>

namespace sbp::kernels {

enum class Backend { scalar, avx2 };

struct KernelTable {
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // sum_i w[i] * a[i] * b[i]
  double (*weighted_dot)(const double* w, const double* a, const double* b,
                         std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y = x + beta * y
  void (*xpby)(const double* x, double beta, double* y, std::size_t n);
  // out[i] += coef * (minus[i] - 2 center[i] + plus[i])
  void (*second_difference)(double* out, const double* minus,
                            const double* center, const double* plus,
                            double coef, std::size_t n);
};

const KernelTable& scalar_table();
const KernelTable& avx2_table();
bool avx2_available();

/// The table chosen at startup. `SBP_KERNELS=scalar` in the environment
/// forces the reference path.
const KernelTable& active();
Backend active_backend();
std::string_view backend_name(Backend b);

inline double dot(const double* a, const double* b, std::size_t n) {
  return active().dot(a, b, n);
}
inline double weighted_dot(const double* w, const double* a, const double* b,
                           std::size_t n) {
  return active().weighted_dot(w, a, b, n);
}
inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
  active().axpy(alpha, x, y, n);
}
inline void xpby(const double* x, double beta, double* y, std::size_t n) {
  active().xpby(x, beta, y, n);
}
inline void second_difference(double* out, const double* minus,
                              const double* center, const double* plus,
                              double coef, std::size_t n) {
  active().second_difference(out, minus, center, plus, coef, n);
}

}  // namespace sbp::kernels
