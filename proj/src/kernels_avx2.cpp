#include "birm/kernels.hpp"

#if defined(BIRM_HAVE_AVX2_KERNELS)

#include <immintrin.h>

#include "kernels_detail.hpp"

namespace birm::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d hi64 = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, hi64));
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void scale(double* v, std::size_t n, double s) {
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(v + i, _mm256_mul_pd(_mm256_loadu_pd(v + i), vs));
  }
  for (; i < n; ++i) v[i] *= s;
}

// Mul/add kept unfused so every lane matches the scalar reference bit-exactly.
void adagrad_pair_update(double* w, double* c, double* gw_acc, double* gc_acc,
                         std::size_t n, double fdiff, double lr) {
  const __m256d vf = _mm256_set1_pd(fdiff);
  const __m256d vlr = _mm256_set1_pd(lr);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vw = _mm256_loadu_pd(w + i);
    const __m256d vc = _mm256_loadu_pd(c + i);
    const __m256d gw = _mm256_mul_pd(vf, vc);
    const __m256d gc = _mm256_mul_pd(vf, vw);
    const __m256d aw = _mm256_add_pd(_mm256_loadu_pd(gw_acc + i), _mm256_mul_pd(gw, gw));
    const __m256d ac = _mm256_add_pd(_mm256_loadu_pd(gc_acc + i), _mm256_mul_pd(gc, gc));
    _mm256_storeu_pd(gw_acc + i, aw);
    _mm256_storeu_pd(gc_acc + i, ac);
    const __m256d step_w = _mm256_div_pd(_mm256_mul_pd(vlr, gw), _mm256_sqrt_pd(aw));
    const __m256d step_c = _mm256_div_pd(_mm256_mul_pd(vlr, gc), _mm256_sqrt_pd(ac));
    _mm256_storeu_pd(w + i, _mm256_sub_pd(vw, step_w));
    _mm256_storeu_pd(c + i, _mm256_sub_pd(vc, step_c));
  }
  for (; i < n; ++i) {
    detail::adagrad_step(w[i], c[i], gw_acc[i], gc_acc[i], fdiff, lr);
  }
}

}  // namespace birm::kernels::avx2

#endif  // BIRM_HAVE_AVX2_KERNELS
