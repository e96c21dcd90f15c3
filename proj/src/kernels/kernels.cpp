#include "dlmo/kernels.hpp"

#include <cstdlib>

#include "dlmo/errors.hpp"
#include "kernels_impl.hpp"

namespace dlmo::kernels {

bool cpu_has_avx2() {
#if DLMO_KERNELS_X86
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {

struct Table {
    double (*dot)(const double*, const double*, std::size_t);
    void (*matvec_acc)(const double*, std::size_t, std::size_t, const double*, double*);
    void (*matvec_t_acc)(const double*, std::size_t, std::size_t, const double*, double*);
    void (*ger_acc)(double*, std::size_t, std::size_t, const double*, const double*);
    void (*axpy)(std::size_t, double, const double*, double*);
    double (*sumsq)(const double*, std::size_t);
};

constexpr Table kScalar = {
    &scalar_impl::dot,    &scalar_impl::matvec_acc, &scalar_impl::matvec_t_acc,
    &scalar_impl::ger_acc, &scalar_impl::axpy,      &scalar_impl::sumsq,
};

#if DLMO_KERNELS_X86
constexpr Table kAvx2 = {
    &avx2_impl::dot,    &avx2_impl::matvec_acc, &avx2_impl::matvec_t_acc,
    &avx2_impl::ger_acc, &avx2_impl::axpy,      &avx2_impl::sumsq,
};
#endif

struct Dispatch {
    Isa isa;
    const Table* table;

    Dispatch() {
        isa = cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
        if (const char* env = std::getenv("DLMO_ISA")) {
            std::string want(env);
            if (want == "scalar") isa = Isa::scalar;
            else if (want == "avx2" && cpu_has_avx2()) isa = Isa::avx2;
        }
        table = pick(isa);
    }

    static const Table* pick(Isa i) {
#if DLMO_KERNELS_X86
        if (i == Isa::avx2) return &kAvx2;
#endif
        (void)i;
        return &kScalar;
    }
};

Dispatch& dispatch() {
    static Dispatch d;
    return d;
}

}  // namespace

bool isa_available(Isa isa) {
    return isa == Isa::scalar || (isa == Isa::avx2 && cpu_has_avx2());
}

Isa active_isa() { return dispatch().isa; }

void set_isa(Isa isa) {
    if (!isa_available(isa))
        throw ConfigError(std::string("kernel ISA '") + isa_name(isa) +
                          "' is not available on this CPU");
    dispatch().isa = isa;
    dispatch().table = Dispatch::pick(isa);
}

const char* isa_name(Isa isa) {
    return isa == Isa::avx2 ? "avx2" : "scalar";
}

double dot(const double* a, const double* b, std::size_t n) {
    return dispatch().table->dot(a, b, n);
}

void matvec_acc(const double* m, std::size_t rows, std::size_t cols,
                const double* x, double* y) {
    dispatch().table->matvec_acc(m, rows, cols, x, y);
}

void matvec_t_acc(const double* m, std::size_t rows, std::size_t cols,
                  const double* v, double* out) {
    dispatch().table->matvec_t_acc(m, rows, cols, v, out);
}

void ger_acc(double* m, std::size_t rows, std::size_t cols,
             const double* u, const double* v) {
    dispatch().table->ger_acc(m, rows, cols, u, v);
}

void axpy(std::size_t n, double a, const double* x, double* y) {
    dispatch().table->axpy(n, a, x, y);
}

double sumsq(const double* x, std::size_t n) {
    return dispatch().table->sumsq(x, n);
}

}  // namespace dlmo::kernels
