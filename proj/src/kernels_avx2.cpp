// AVX2/FMA kernel variant. Accumulation order matches the scalar reference
// lane for lane, so outputs are bitwise identical.
#include <immintrin.h>

#include <cmath>

#include "trianglescope/kernels.hpp"

namespace tri::kernels {

namespace {

inline double reduce4(__m256d acc) {
    alignas(32) double a[4];
    _mm256_store_pd(a, acc);
    return (a[0] + a[1]) + (a[2] + a[3]);
}

double dot_avx2(double const* x, double const* y, size_t n) {
    __m256d acc = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
    alignas(32) double a[4];
    _mm256_store_pd(a, acc);
    for (; i < n; i++) a[i % 4] = std::fma(x[i], y[i], a[i % 4]);
    return (a[0] + a[1]) + (a[2] + a[3]);
}

void gemv_avx2(double const* W, double const* x, double const* b, double* y, size_t rows, size_t cols) {
    for (size_t r = 0; r < rows; r++) y[r] = b[r] + dot_avx2(W + r * cols, x, cols);
}

void gemv_t_acc_avx2(double const* W, double const* gy, double* gx, size_t rows, size_t cols) {
    for (size_t r = 0; r < rows; r++) {
        __m256d g = _mm256_set1_pd(gy[r]);
        double const* row = W + r * cols;
        size_t c = 0;
        for (; c + 4 <= cols; c += 4)
            _mm256_storeu_pd(gx + c, _mm256_fmadd_pd(g, _mm256_loadu_pd(row + c), _mm256_loadu_pd(gx + c)));
        for (; c < cols; c++) gx[c] = std::fma(gy[r], row[c], gx[c]);
    }
}

void ger_acc_avx2(double* W, double const* gy, double const* x, size_t rows, size_t cols) {
    for (size_t r = 0; r < rows; r++) {
        __m256d g = _mm256_set1_pd(gy[r]);
        double* row = W + r * cols;
        size_t c = 0;
        for (; c + 4 <= cols; c += 4)
            _mm256_storeu_pd(row + c, _mm256_fmadd_pd(g, _mm256_loadu_pd(x + c), _mm256_loadu_pd(row + c)));
        for (; c < cols; c++) row[c] = std::fma(gy[r], x[c], row[c]);
    }
}

void relu_avx2(double* x, size_t n) {
    __m256d zero = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(x + i, _mm256_max_pd(_mm256_loadu_pd(x + i), zero));
    for (; i < n; i++) x[i] = x[i] > 0 ? x[i] : 0;
}

void relu_backward_avx2(double const* pre, double* grad, size_t n) {
    __m256d zero = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(pre + i), zero, _CMP_GT_OQ);
        _mm256_storeu_pd(grad + i, _mm256_and_pd(_mm256_loadu_pd(grad + i), mask));
    }
    for (; i < n; i++)
        if (!(pre[i] > 0)) grad[i] = 0;
}

void axpy_avx2(double a, double const* x, double* y, size_t n) {
    __m256d va = _mm256_set1_pd(a);
    size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; i++) y[i] = std::fma(a, x[i], y[i]);
}

double sumsq_diff_avx2(double const* x, double const* y, size_t n) {
    __m256d acc = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    alignas(32) double a[4];
    _mm256_store_pd(a, acc);
    for (; i < n; i++) {
        double d = x[i] - y[i];
        a[i % 4] = std::fma(d, d, a[i % 4]);
    }
    return (a[0] + a[1]) + (a[2] + a[3]);
}

void outer3_acc_avx2(double const* pa, double const* pb, double const* pc, int n, double* out) {
    if (n == 4) {
        __m256d vc = _mm256_loadu_pd(pc);
        for (int a = 0; a < 4; a++)
            for (int b = 0; b < 4; b++) {
                double* row = out + (static_cast<size_t>(a) * 4 + b) * 4;
                __m256d w = _mm256_set1_pd(pa[a] * pb[b]);
                _mm256_storeu_pd(row, _mm256_fmadd_pd(w, vc, _mm256_loadu_pd(row)));
            }
        return;
    }
    for (int a = 0; a < n; a++)
        for (int b = 0; b < n; b++) {
            double w = pa[a] * pb[b];
            double* row = out + (static_cast<size_t>(a) * n + b) * n;
            int c = 0;
            __m256d vw = _mm256_set1_pd(w);
            for (; c + 4 <= n; c += 4)
                _mm256_storeu_pd(row + c, _mm256_fmadd_pd(vw, _mm256_loadu_pd(pc + c), _mm256_loadu_pd(row + c)));
            for (; c < n; c++) row[c] = std::fma(w, pc[c], row[c]);
        }
}

Kernels const avx2_kernels = {
    "avx2",             gemv_avx2, gemv_t_acc_avx2, ger_acc_avx2,    relu_avx2,
    relu_backward_avx2, axpy_avx2, dot_avx2,        sumsq_diff_avx2, outer3_acc_avx2,
};

}  // namespace

Kernels const& avx2() { return avx2_kernels; }

}  // namespace tri::kernels
