#include "coneflow/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

#define CONEFLOW_AVX2 __attribute__((target("avx2")))

namespace coneflow::kernels::avx2 {

namespace {

CONEFLOW_AVX2 inline double hsum(__m256d v)
{
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

CONEFLOW_AVX2 void sub_scale(const double* a, const double* b, double s, double* out, std::size_t n)
{
    const __m256d vs = _mm256_set1_pd(s);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k));
        _mm256_storeu_pd(out + k, _mm256_mul_pd(d, vs));
    }
    for (; k < n; ++k) out[k] = (a[k] - b[k]) * s;
}

CONEFLOW_AVX2 void second_diff(const double* a, const double* b, const double* c, double s, double* out,
                               std::size_t n)
{
    const __m256d vs = _mm256_set1_pd(s);
    const __m256d two = _mm256_set1_pd(2.0);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        __m256d t = _mm256_sub_pd(_mm256_loadu_pd(a + k), _mm256_mul_pd(two, _mm256_loadu_pd(b + k)));
        t = _mm256_add_pd(t, _mm256_loadu_pd(c + k));
        _mm256_storeu_pd(out + k, _mm256_mul_pd(t, vs));
    }
    for (; k < n; ++k) out[k] = ((a[k] - 2.0 * b[k]) + c[k]) * s;
}

CONEFLOW_AVX2 void mul_add_mul(const double* x, const double* y, const double* u, const double* z, double* out,
                               std::size_t n)
{
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d p = _mm256_mul_pd(_mm256_loadu_pd(x + k), _mm256_loadu_pd(y + k));
        const __m256d q = _mm256_mul_pd(_mm256_loadu_pd(u + k), _mm256_loadu_pd(z + k));
        _mm256_storeu_pd(out + k, _mm256_add_pd(p, q));
    }
    for (; k < n; ++k) out[k] = x[k] * y[k] + u[k] * z[k];
}

CONEFLOW_AVX2 double weighted_sum(const double* w, const double* a, std::size_t n)
{
    __m256d acc = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4)
        acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(w + k), _mm256_loadu_pd(a + k)));
    double s = hsum(acc);
    for (; k < n; ++k) s += w[k] * a[k];
    return s;
}

CONEFLOW_AVX2 double weighted_sum_sq(const double* w, const double* a, std::size_t n)
{
    __m256d acc = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d va = _mm256_loadu_pd(a + k);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_mul_pd(_mm256_loadu_pd(w + k), va), va));
    }
    double s = hsum(acc);
    for (; k < n; ++k) s += w[k] * a[k] * a[k];
    return s;
}

CONEFLOW_AVX2 double weighted_dot(const double* w, const double* a, const double* b, std::size_t n)
{
    __m256d acc = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d wa = _mm256_mul_pd(_mm256_loadu_pd(w + k), _mm256_loadu_pd(a + k));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(wa, _mm256_loadu_pd(b + k)));
    }
    double s = hsum(acc);
    for (; k < n; ++k) s += w[k] * a[k] * b[k];
    return s;
}

}  // namespace coneflow::kernels::avx2

#endif
