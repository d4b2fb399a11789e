#pragma once

#include <cstddef>

// Hot loops of the field operators and quadrature. Each kernel has a scalar
// reference and an AVX2 variant; the variant is chosen once at runtime.
// Elementwise kernels are bit-identical across variants; reductions agree to
// rounding (different summation order).
namespace coneflow::kernels {

enum class Backend { Scalar, Avx2 };

Backend active_backend();
// Returns false when the requested backend is unsupported on this CPU.
bool set_backend(Backend b);
bool avx2_supported();
const char* backend_name(Backend b);

// out[k] = (a[k] - b[k]) * s
void sub_scale(const double* a, const double* b, double s, double* out, std::size_t n);
// out[k] = ((a[k] - 2 b[k]) + c[k]) * s
void second_diff(const double* a, const double* b, const double* c, double s, double* out, std::size_t n);
// out[k] = x[k] * y[k] + u[k] * z[k]
void mul_add_mul(const double* x, const double* y, const double* u, const double* z, double* out, std::size_t n);
// sum w[k] * a[k]
double weighted_sum(const double* w, const double* a, std::size_t n);
// sum w[k] * a[k] * a[k]
double weighted_sum_sq(const double* w, const double* a, std::size_t n);
// sum w[k] * a[k] * b[k]
double weighted_dot(const double* w, const double* a, const double* b, std::size_t n);

namespace scalar {
void sub_scale(const double* a, const double* b, double s, double* out, std::size_t n);
void second_diff(const double* a, const double* b, const double* c, double s, double* out, std::size_t n);
void mul_add_mul(const double* x, const double* y, const double* u, const double* z, double* out, std::size_t n);
double weighted_sum(const double* w, const double* a, std::size_t n);
double weighted_sum_sq(const double* w, const double* a, std::size_t n);
double weighted_dot(const double* w, const double* a, const double* b, std::size_t n);
}  // namespace scalar

namespace avx2 {
void sub_scale(const double* a, const double* b, double s, double* out, std::size_t n);
void second_diff(const double* a, const double* b, const double* c, double s, double* out, std::size_t n);
void mul_add_mul(const double* x, const double* y, const double* u, const double* z, double* out, std::size_t n);
double weighted_sum(const double* w, const double* a, std::size_t n);
double weighted_sum_sq(const double* w, const double* a, std::size_t n);
double weighted_dot(const double* w, const double* a, const double* b, std::size_t n);
}  // namespace avx2

}  // namespace coneflow::kernels
