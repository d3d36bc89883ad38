#include "trianglescope/kernels.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tri::kernels {

namespace {

// Reference kernels. Reductions run 4 striped lane accumulators combined in
// a fixed order; the AVX2 translation unit mirrors this exactly.

inline double reduce4(double const acc[4]) { return (acc[0] + acc[1]) + (acc[2] + acc[3]); }

double dot_scalar(double const* x, double const* y, size_t n) {
    double acc[4] = {0, 0, 0, 0};
    size_t i = 0;
    for (; i + 4 <= n; i += 4)
        for (int l = 0; l < 4; l++) acc[l] = std::fma(x[i + l], y[i + l], acc[l]);
    for (; i < n; i++) acc[i % 4] = std::fma(x[i], y[i], acc[i % 4]);
    return reduce4(acc);
}

void gemv_scalar(double const* W, double const* x, double const* b, double* y, size_t rows, size_t cols) {
    for (size_t r = 0; r < rows; r++) y[r] = b[r] + dot_scalar(W + r * cols, x, cols);
}

void gemv_t_acc_scalar(double const* W, double const* gy, double* gx, size_t rows, size_t cols) {
    for (size_t r = 0; r < rows; r++) {
        double g = gy[r];
        double const* row = W + r * cols;
        for (size_t c = 0; c < cols; c++) gx[c] = std::fma(g, row[c], gx[c]);
    }
}

void ger_acc_scalar(double* W, double const* gy, double const* x, size_t rows, size_t cols) {
    for (size_t r = 0; r < rows; r++) {
        double g = gy[r];
        double* row = W + r * cols;
        for (size_t c = 0; c < cols; c++) row[c] = std::fma(g, x[c], row[c]);
    }
}

void relu_scalar(double* x, size_t n) {
    for (size_t i = 0; i < n; i++) x[i] = x[i] > 0 ? x[i] : 0;
}

void relu_backward_scalar(double const* pre, double* grad, size_t n) {
    for (size_t i = 0; i < n; i++)
        if (!(pre[i] > 0)) grad[i] = 0;
}

void axpy_scalar(double a, double const* x, double* y, size_t n) {
    for (size_t i = 0; i < n; i++) y[i] = std::fma(a, x[i], y[i]);
}

double sumsq_diff_scalar(double const* x, double const* y, size_t n) {
    double acc[4] = {0, 0, 0, 0};
    size_t i = 0;
    for (; i + 4 <= n; i += 4)
        for (int l = 0; l < 4; l++) {
            double d = x[i + l] - y[i + l];
            acc[l] = std::fma(d, d, acc[l]);
        }
    for (; i < n; i++) {
        double d = x[i] - y[i];
        acc[i % 4] = std::fma(d, d, acc[i % 4]);
    }
    return reduce4(acc);
}

void outer3_acc_scalar(double const* pa, double const* pb, double const* pc, int n, double* out) {
    for (int a = 0; a < n; a++)
        for (int b = 0; b < n; b++) {
            double w = pa[a] * pb[b];
            double* row = out + (static_cast<size_t>(a) * n + b) * n;
            for (int c = 0; c < n; c++) row[c] = std::fma(w, pc[c], row[c]);
        }
}

Kernels const scalar_kernels = {
    "scalar",           gemv_scalar, gemv_t_acc_scalar, ger_acc_scalar,    relu_scalar,
    relu_backward_scalar, axpy_scalar, dot_scalar,        sumsq_diff_scalar, outer3_acc_scalar,
};

enum class Force { automatic, scalar_only, avx2_only };
Force g_force = Force::automatic;

}  // namespace

Kernels const& scalar() { return scalar_kernels; }

bool avx2_supported() {
#if defined(__x86_64__) && defined(TRI_HAVE_AVX2_TU)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Kernels const& active() {
    switch (g_force) {
        case Force::scalar_only: return scalar_kernels;
        case Force::avx2_only:
#if defined(__x86_64__) && defined(TRI_HAVE_AVX2_TU)
            return avx2();
#else
            throw std::runtime_error("kernels: avx2 variant not built");
#endif
        case Force::automatic: break;
    }
#if defined(__x86_64__) && defined(TRI_HAVE_AVX2_TU)
    if (avx2_supported()) return avx2();
#endif
    return scalar_kernels;
}

void force(std::string_view which) {
    if (which == "scalar")
        g_force = Force::scalar_only;
    else if (which == "avx2") {
        if (!avx2_supported()) throw std::runtime_error("kernels: avx2 not supported on this CPU");
        g_force = Force::avx2_only;
    } else if (which == "auto")
        g_force = Force::automatic;
    else
        throw std::invalid_argument("kernels: unknown variant '" + std::string(which) + "'");
}

}  // namespace tri::kernels
