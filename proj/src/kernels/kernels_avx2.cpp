#include "sbp/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define SBP_HAVE_X86 1
#include <immintrin.h>
#else
#define SBP_HAVE_X86 0
#endif

namespace sbp::kernels {

#if SBP_HAVE_X86
namespace {

#define SBP_AVX2 __attribute__((target("avx2,fma")))

SBP_AVX2 inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

SBP_AVX2 double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4),
                           _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

SBP_AVX2 double weighted_dot_avx2(const double* w, const double* a,
                                  const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256d wa0 = _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(a + i));
    __m256d wa1 =
        _mm256_mul_pd(_mm256_loadu_pd(w + i + 4), _mm256_loadu_pd(a + i + 4));
    acc0 = _mm256_fmadd_pd(wa0, _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(wa1, _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    __m256d wa = _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(a + i));
    acc0 = _mm256_fmadd_pd(wa, _mm256_loadu_pd(b + i), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += w[i] * a[i] * b[i];
  return s;
}

SBP_AVX2 void axpy_avx2(double alpha, const double* x, double* y,
                        std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

SBP_AVX2 void xpby_avx2(const double* x, double beta, double* y,
                        std::size_t n) {
  const __m256d vb = _mm256_set1_pd(beta);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(vb, _mm256_loadu_pd(y + i),
                                            _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) y[i] = x[i] + beta * y[i];
}

// The (minus - 2 center) + plus grouping matches the scalar kernel so that
// negated inputs give exactly negated outputs on both paths.
SBP_AVX2 void second_difference_avx2(double* out, const double* minus,
                                     const double* center, const double* plus,
                                     double coef, std::size_t n) {
  const __m256d vc = _mm256_set1_pd(coef);
  const __m256d two = _mm256_set1_pd(2.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d s = _mm256_sub_pd(_mm256_loadu_pd(minus + i),
                              _mm256_mul_pd(two, _mm256_loadu_pd(center + i)));
    s = _mm256_add_pd(s, _mm256_loadu_pd(plus + i));
    _mm256_storeu_pd(out + i,
                     _mm256_fmadd_pd(vc, s, _mm256_loadu_pd(out + i)));
  }
  for (; i < n; ++i)
    out[i] += coef * ((minus[i] - 2.0 * center[i]) + plus[i]);
}

#undef SBP_AVX2

}  // namespace

bool avx2_available() {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

const KernelTable& avx2_table() {
  static const KernelTable table{dot_avx2, weighted_dot_avx2, axpy_avx2,
                                 xpby_avx2, second_difference_avx2};
  return table;
}

#else

bool avx2_available() { return false; }
const KernelTable& avx2_table() { return scalar_table(); }

#endif

}  // namespace sbp::kernels
