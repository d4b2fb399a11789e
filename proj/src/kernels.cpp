#include "coneflow/kernels.hpp"

namespace coneflow::kernels {

namespace scalar {

void sub_scale(const double* a, const double* b, double s, double* out, std::size_t n)
{
    for (std::size_t k = 0; k < n; ++k) out[k] = (a[k] - b[k]) * s;
}

void second_diff(const double* a, const double* b, const double* c, double s, double* out, std::size_t n)
{
    for (std::size_t k = 0; k < n; ++k) out[k] = ((a[k] - 2.0 * b[k]) + c[k]) * s;
}

void mul_add_mul(const double* x, const double* y, const double* u, const double* z, double* out, std::size_t n)
{
    for (std::size_t k = 0; k < n; ++k) out[k] = x[k] * y[k] + u[k] * z[k];
}

double weighted_sum(const double* w, const double* a, std::size_t n)
{
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += w[k] * a[k];
    return s;
}

double weighted_sum_sq(const double* w, const double* a, std::size_t n)
{
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += w[k] * a[k] * a[k];
    return s;
}

double weighted_dot(const double* w, const double* a, const double* b, std::size_t n)
{
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += w[k] * a[k] * b[k];
    return s;
}

}  // namespace scalar

namespace {

struct Table {
    decltype(&scalar::sub_scale) sub_scale;
    decltype(&scalar::second_diff) second_diff;
    decltype(&scalar::mul_add_mul) mul_add_mul;
    decltype(&scalar::weighted_sum) weighted_sum;
    decltype(&scalar::weighted_sum_sq) weighted_sum_sq;
    decltype(&scalar::weighted_dot) weighted_dot;
};

constexpr Table kScalar{scalar::sub_scale, scalar::second_diff, scalar::mul_add_mul,
                        scalar::weighted_sum, scalar::weighted_sum_sq, scalar::weighted_dot};

#if defined(__x86_64__) || defined(__i386__)
constexpr Table kAvx2{avx2::sub_scale, avx2::second_diff, avx2::mul_add_mul,
                      avx2::weighted_sum, avx2::weighted_sum_sq, avx2::weighted_dot};
#endif

Backend g_backend = avx2_supported() ? Backend::Avx2 : Backend::Scalar;

const Table& table()
{
#if defined(__x86_64__) || defined(__i386__)
    if (g_backend == Backend::Avx2) return kAvx2;
#endif
    return kScalar;
}

}  // namespace

bool avx2_supported()
{
#if defined(__x86_64__) || defined(__i386__)
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Backend active_backend() { return g_backend; }

bool set_backend(Backend b)
{
    if (b == Backend::Avx2 && !avx2_supported()) return false;
    g_backend = b;
    return true;
}

const char* backend_name(Backend b) { return b == Backend::Avx2 ? "avx2" : "scalar"; }

void sub_scale(const double* a, const double* b, double s, double* out, std::size_t n)
{
    table().sub_scale(a, b, s, out, n);
}

void second_diff(const double* a, const double* b, const double* c, double s, double* out, std::size_t n)
{
    table().second_diff(a, b, c, s, out, n);
}

void mul_add_mul(const double* x, const double* y, const double* u, const double* z, double* out, std::size_t n)
{
    table().mul_add_mul(x, y, u, z, out, n);
}

double weighted_sum(const double* w, const double* a, std::size_t n) { return table().weighted_sum(w, a, n); }

double weighted_sum_sq(const double* w, const double* a, std::size_t n)
{
    return table().weighted_sum_sq(w, a, n);
}

double weighted_dot(const double* w, const double* a, const double* b, std::size_t n)
{
    return table().weighted_dot(w, a, b, n);
}

}  // namespace coneflow::kernels
