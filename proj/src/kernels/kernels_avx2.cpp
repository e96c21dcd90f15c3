#include "kernels_impl.hpp"

// AVX2 + FMA variants. This translation unit is compiled with
// -mavx2 -mfma on x86-64; entry happens only after a cpuid check, so the
// rest of the binary stays generic.

#if DLMO_KERNELS_X86

#include <immintrin.h>

namespace dlmo::kernels::avx2_impl {

namespace {

// Horizontal sum of a 4-lane double accumulator. Lane order is fixed, so
// results are deterministic run to run.
inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d shuf = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
    double s = hsum(acc);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void matvec_acc(const double* m, std::size_t rows, std::size_t cols,
                const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) y[r] += dot(m + r * cols, x, cols);
}

void matvec_t_acc(const double* m, std::size_t rows, std::size_t cols,
                  const double* v, double* out) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = m + r * cols;
        const __m256d vr = _mm256_set1_pd(v[r]);
        std::size_t c = 0;
        for (; c + 4 <= cols; c += 4) {
            __m256d o = _mm256_loadu_pd(out + c);
            o = _mm256_fmadd_pd(vr, _mm256_loadu_pd(row + c), o);
            _mm256_storeu_pd(out + c, o);
        }
        for (; c < cols; ++c) out[c] += v[r] * row[c];
    }
}

void ger_acc(double* m, std::size_t rows, std::size_t cols,
             const double* u, const double* v) {
    for (std::size_t r = 0; r < rows; ++r) {
        double* row = m + r * cols;
        const __m256d ur = _mm256_set1_pd(u[r]);
        std::size_t c = 0;
        for (; c + 4 <= cols; c += 4) {
            __m256d o = _mm256_loadu_pd(row + c);
            o = _mm256_fmadd_pd(ur, _mm256_loadu_pd(v + c), o);
            _mm256_storeu_pd(row + c, o);
        }
        for (; c < cols; ++c) row[c] += u[r] * v[c];
    }
}

void axpy(std::size_t n, double a, const double* x, double* y) {
    const __m256d av = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d o = _mm256_loadu_pd(y + i);
        o = _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), o);
        _mm256_storeu_pd(y + i, o);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

double sumsq(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(x + i);
        acc = _mm256_fmadd_pd(v, v, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += x[i] * x[i];
    return s;
}

}  // namespace dlmo::kernels::avx2_impl

#endif  // DLMO_KERNELS_X86
