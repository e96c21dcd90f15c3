#include <doctest.h>

#include <cmath>
#include <utility>
#include <vector>

#include "dlmo/kernels.hpp"
#include "dlmo/rng.hpp"

using namespace dlmo;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(-2.0, 2.0);
    return v;
}

// Run `fn` under both ISAs and return the two results.
template <typename Fn>
auto both_isas(Fn&& fn) {
    using R = decltype(fn());
    kernels::set_isa(kernels::Isa::scalar);
    R scalar = fn();
    if (kernels::isa_available(kernels::Isa::avx2)) {
        kernels::set_isa(kernels::Isa::avx2);
        R simd = fn();
        kernels::set_isa(kernels::Isa::scalar);
        return std::pair<R, R>(scalar, simd);
    }
    return std::pair<R, R>(scalar, scalar);
}

bool close(double a, double b, double tol = 1e-12) {
    return std::fabs(a - b) <= tol * (1.0 + std::fabs(a) + std::fabs(b));
}

}  // namespace

TEST_CASE("scalar ISA is always available") {
    CHECK(kernels::isa_available(kernels::Isa::scalar));
    kernels::set_isa(kernels::Isa::scalar);
    CHECK(kernels::active_isa() == kernels::Isa::scalar);
}

TEST_CASE("dot: scalar and SIMD variants agree") {
    Rng rng(42);
    for (std::size_t n : {std::size_t(0), std::size_t(1), std::size_t(3), std::size_t(4),
                          std::size_t(5), std::size_t(16), std::size_t(33), std::size_t(67),
                          std::size_t(256)}) {
        auto a = random_vec(rng, n);
        auto b = random_vec(rng, n);
        auto [s, v] = both_isas([&] { return kernels::dot(a.data(), b.data(), n); });
        CHECK(close(s, v, 1e-13 * static_cast<double>(n + 1)));
    }
}

TEST_CASE("matvec_acc / matvec_t_acc / ger_acc variants agree") {
    Rng rng(43);
    for (auto [rows, cols] : std::vector<std::pair<std::size_t, std::size_t>>{
             {1, 1}, {3, 5}, {8, 8}, {32, 5}, {32, 32}, {7, 13}}) {
        auto m = random_vec(rng, rows * cols);
        auto x = random_vec(rng, cols);
        auto v = random_vec(rng, rows);
        auto y0 = random_vec(rng, rows);
        auto o0 = random_vec(rng, cols);

        auto [y_s, y_v] = both_isas([&] {
            auto y = y0;
            kernels::matvec_acc(m.data(), rows, cols, x.data(), y.data());
            return y;
        });
        auto [o_s, o_v] = both_isas([&] {
            auto o = o0;
            kernels::matvec_t_acc(m.data(), rows, cols, v.data(), o.data());
            return o;
        });
        auto [m_s, m_v] = both_isas([&] {
            auto grad = m;
            kernels::ger_acc(grad.data(), rows, cols, v.data(), x.data());
            return grad;
        });
        for (std::size_t i = 0; i < rows; ++i) CHECK(close(y_s[i], y_v[i]));
        for (std::size_t i = 0; i < cols; ++i) CHECK(close(o_s[i], o_v[i]));
        for (std::size_t i = 0; i < rows * cols; ++i) CHECK(close(m_s[i], m_v[i]));
    }
}

TEST_CASE("axpy and sumsq variants agree") {
    Rng rng(44);
    for (std::size_t n : {std::size_t(1), std::size_t(4), std::size_t(7), std::size_t(64),
                          std::size_t(129)}) {
        auto x = random_vec(rng, n);
        auto y0 = random_vec(rng, n);
        auto [y_s, y_v] = both_isas([&] {
            auto y = y0;
            kernels::axpy(n, 1.7, x.data(), y.data());
            return y;
        });
        for (std::size_t i = 0; i < n; ++i) CHECK(close(y_s[i], y_v[i]));
        auto [s, v] = both_isas([&] { return kernels::sumsq(x.data(), n); });
        CHECK(close(s, v, 1e-13 * static_cast<double>(n)));
    }
}

TEST_CASE("dot with a one-hot vector extracts the entry exactly") {
    // The psi-passthrough construction relies on zero terms not perturbing
    // the selected entry, whichever variant runs.
    Rng rng(45);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 1 + static_cast<std::size_t>(rng.below(40));
        auto v = random_vec(rng, n);
        std::vector<double> onehot(n, 0.0);
        const std::size_t k = static_cast<std::size_t>(rng.below(n));
        onehot[k] = 1.0;
        auto [s, simd] = both_isas([&] { return kernels::dot(onehot.data(), v.data(), n); });
        CHECK(s == v[k]);
        CHECK(simd == v[k]);
    }
}
