#pragma once

#include <cstddef>
#include <string>

namespace dlmo::kernels {

// Dense double-precision primitives behind the recurrent-network and
// Monte-Carlo inner loops. Each kernel has a scalar reference
// implementation and an AVX2+FMA variant; the active one is chosen at
// runtime from CPU capabilities (overridable through set_isa() or the
// DLMO_ISA environment variable, values "scalar" / "avx2").
//
// Variants are equivalence-tested against the scalar reference. Results
// may differ from scalar by reassociation rounding only.

enum class Isa { scalar, avx2 };

bool isa_available(Isa isa);
Isa active_isa();
void set_isa(Isa isa);  // throws ConfigError if unavailable on this CPU
const char* isa_name(Isa isa);

// sum_i a[i] * b[i]
double dot(const double* a, const double* b, std::size_t n);

// y += M x        (M row-major, rows x cols; y has rows entries)
void matvec_acc(const double* m, std::size_t rows, std::size_t cols,
                const double* x, double* y);

// out += M^T v    (out has cols entries, v has rows entries)
void matvec_t_acc(const double* m, std::size_t rows, std::size_t cols,
                  const double* v, double* out);

// M += u v^T      (rank-one update; u rows entries, v cols entries)
void ger_acc(double* m, std::size_t rows, std::size_t cols,
             const double* u, const double* v);

// y += a x
void axpy(std::size_t n, double a, const double* x, double* y);

// sum_i x[i]^2
double sumsq(const double* x, std::size_t n);

}  // namespace dlmo::kernels
