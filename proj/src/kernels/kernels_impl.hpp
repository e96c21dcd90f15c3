#pragma once

#include <cstddef>

// Internal: per-ISA kernel variants. The avx2 namespace is only populated
// on x86-64 builds; callers must gate on cpu_has_avx2().

namespace dlmo::kernels::scalar_impl {

double dot(const double* a, const double* b, std::size_t n);
void matvec_acc(const double* m, std::size_t rows, std::size_t cols,
                const double* x, double* y);
void matvec_t_acc(const double* m, std::size_t rows, std::size_t cols,
                  const double* v, double* out);
void ger_acc(double* m, std::size_t rows, std::size_t cols,
             const double* u, const double* v);
void axpy(std::size_t n, double a, const double* x, double* y);
double sumsq(const double* x, std::size_t n);

}  // namespace dlmo::kernels::scalar_impl

#if defined(__x86_64__) || defined(_M_X64)
#define DLMO_KERNELS_X86 1
#else
#define DLMO_KERNELS_X86 0
#endif

#if DLMO_KERNELS_X86
namespace dlmo::kernels::avx2_impl {

double dot(const double* a, const double* b, std::size_t n);
void matvec_acc(const double* m, std::size_t rows, std::size_t cols,
                const double* x, double* y);
void matvec_t_acc(const double* m, std::size_t rows, std::size_t cols,
                  const double* v, double* out);
void ger_acc(double* m, std::size_t rows, std::size_t cols,
             const double* u, const double* v);
void axpy(std::size_t n, double a, const double* x, double* y);
double sumsq(const double* x, std::size_t n);

}  // namespace dlmo::kernels::avx2_impl
#endif

namespace dlmo::kernels {
bool cpu_has_avx2();
}
