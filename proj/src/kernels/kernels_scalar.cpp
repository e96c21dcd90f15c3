#include "kernels_impl.hpp"

// Reference kernels. Plain sequential loops; every SIMD variant is tested
// against these.

namespace dlmo::kernels::scalar_impl {

double dot(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void matvec_acc(const double* m, std::size_t rows, std::size_t cols,
                const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = m + r * cols;
        double acc = 0.0;
        for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
        y[r] += acc;
    }
}

void matvec_t_acc(const double* m, std::size_t rows, std::size_t cols,
                  const double* v, double* out) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = m + r * cols;
        const double vr = v[r];
        for (std::size_t c = 0; c < cols; ++c) out[c] += vr * row[c];
    }
}

void ger_acc(double* m, std::size_t rows, std::size_t cols,
             const double* u, const double* v) {
    for (std::size_t r = 0; r < rows; ++r) {
        double* row = m + r * cols;
        const double ur = u[r];
        for (std::size_t c = 0; c < cols; ++c) row[c] += ur * v[c];
    }
}

void axpy(std::size_t n, double a, const double* x, double* y) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double sumsq(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
    return acc;
}

}  // namespace dlmo::kernels::scalar_impl
