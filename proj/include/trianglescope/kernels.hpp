#pragma once

#include <cstddef>
#include <string_view>

namespace tri::kernels {

/// Numeric kernels for the float paths. All variants implement the same
/// 4-lane blocked FMA accumulation order, so scalar and AVX2 results are
/// bitwise identical; equivalence tests assert exact equality.
struct Kernels {
    char const* name;
    // y = W x + b; W row-major (rows x cols)
    void (*gemv)(double const* W, double const* x, double const* b, double* y, size_t rows, size_t cols);
    // gx += W^T gy
    void (*gemv_t_acc)(double const* W, double const* gy, double* gx, size_t rows, size_t cols);
    // W += gy x^T
    void (*ger_acc)(double* W, double const* gy, double const* x, size_t rows, size_t cols);
    void (*relu)(double* x, size_t n);
    // grad[i] = pre[i] > 0 ? grad[i] : 0
    void (*relu_backward)(double const* pre, double* grad, size_t n);
    // y += a * x
    void (*axpy)(double a, double const* x, double* y, size_t n);
    double (*dot)(double const* x, double const* y, size_t n);
    double (*sumsq_diff)(double const* x, double const* y, size_t n);
    // out[(a*n + b)*n + c] += pa[a] pb[b] pc[c]
    void (*outer3_acc)(double const* pa, double const* pb, double const* pc, int n, double* out);
};

Kernels const& scalar();
bool avx2_supported();
#if defined(__x86_64__)
Kernels const& avx2();
#endif

/// Active variant: AVX2 when the CPU supports it, else scalar. May be pinned
/// with force() ("scalar", "avx2", "auto"); throws if unavailable.
Kernels const& active();
void force(std::string_view which);

}  // namespace tri::kernels
