#include <doctest.h>

#include <cmath>

#include "dlmo/errors.hpp"
#include "dlmo/mavg.hpp"
#include "dlmo/rng.hpp"

using namespace dlmo;

namespace {

MidpointWindow window(std::vector<double> mids) {
    MidpointWindow w;
    w.participant = "t";
    w.midpoints = std::move(mids);
    return w;
}

std::vector<MidpointWindow> random_windows(Rng& rng, int count, int n) {
    std::vector<MidpointWindow> out;
    for (int i = 0; i < count; ++i) {
        std::vector<double> m(n);
        for (double& x : m) x = rng.uniform(24.0, 30.0);
        out.push_back(window(m));
    }
    return out;
}

double rss_of(const MAParams& p, const MAConfig& cfg, const std::vector<MidpointWindow>& w,
              const std::vector<double>& phi) {
    double rss = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double e = predict(p, w[i], cfg) - phi[i];
        rss += e * e;
    }
    return rss;
}

}  // namespace

TEST_CASE("feature_vector") {
    MAConfig sma{MAKind::sma, 3, 0.9};
    MAConfig ema1{MAKind::ema, 3, 1.0};
    MAConfig ma{MAKind::ma, 3, 0.9};
    auto w = window({1.0, 2.0, 3.0});

    CHECK(feature_vector(w, sma) == Vec{6.0});
    CHECK(feature_vector(w, ema1) == Vec{6.0});  // alpha=1 degenerates to SMA
    CHECK(feature_vector(w, ma) == Vec{1.0, 2.0, 3.0});

    MAConfig ema2{MAKind::ema, 2, 0.9};
    auto w2 = window({10.0, 20.0});
    CHECK(feature_vector(w2, ema2)[0] == doctest::Approx(29.0));  // 0.9*10 + 1*20

    CHECK_THROWS_AS(feature_vector(w2, sma), LengthMismatch);
}

TEST_CASE("predict") {
    MAConfig sma{MAKind::sma, 7, 0.9};
    auto w = window({27, 27, 27, 27, 27, 27, 27});
    CHECK(predict(MAParams{{0.0}, 5.5}, w, sma) == doctest::Approx(5.5));
    CHECK(predict(MAParams{{1.0 / 7.0}, 0.0}, w, sma) == doctest::Approx(27.0));

    MAConfig ma{MAKind::ma, 3, 0.9};
    auto w3 = window({11.0, 22.0, 33.0});
    CHECK(predict(MAParams{{0.0, 1.0, 0.0}, 0.0}, w3, ma) == 22.0);  // selector weights
}

TEST_CASE("fit recovers exact generating parameters (no noise)") {
    Rng rng(21);
    const int n = 7;
    auto windows = random_windows(rng, 60, n);

    SUBCASE("SMA") {
        MAConfig cfg{MAKind::sma, n, 0.9};
        std::vector<double> phi;
        for (const auto& w : windows) phi.push_back(0.5 * feature_vector(w, cfg)[0] + 2.0);
        MAParams p = fit_least_squares(windows, phi, cfg);
        CHECK(std::fabs(p.weights[0] - 0.5) / 0.5 < 1e-9);
        CHECK(std::fabs(p.intercept - 2.0) / 2.0 < 1e-9);
    }
    SUBCASE("EMA") {
        MAConfig cfg{MAKind::ema, n, 0.9};
        std::vector<double> phi;
        for (const auto& w : windows) phi.push_back(-0.3 * feature_vector(w, cfg)[0] + 1.25);
        MAParams p = fit_least_squares(windows, phi, cfg);
        CHECK(std::fabs(p.weights[0] + 0.3) / 0.3 < 1e-9);
        CHECK(std::fabs(p.intercept - 1.25) / 1.25 < 1e-9);
    }
    SUBCASE("MA") {
        MAConfig cfg{MAKind::ma, n, 0.9};
        const Vec w_true = {0.1, 0.2, 0.3, -0.1, 0.25, 0.05, 0.4};
        std::vector<double> phi;
        for (const auto& w : windows) {
            double v = -3.0;
            for (int i = 0; i < n; ++i) v += w_true[i] * w.midpoints[i];
            phi.push_back(v);
        }
        MAParams p = fit_least_squares(windows, phi, cfg);
        for (int i = 0; i < n; ++i)
            CHECK(std::fabs(p.weights[i] - w_true[i]) / std::fabs(w_true[i]) < 1e-9);
        CHECK(std::fabs(p.intercept + 3.0) / 3.0 < 1e-9);
    }
}

TEST_CASE("constant labels give a ~ 0, b ~ c") {
    Rng rng(22);
    MAConfig cfg{MAKind::sma, 7, 0.9};
    auto windows = random_windows(rng, 30, 7);
    std::vector<double> phi(30, 23.25);
    MAParams p = fit_least_squares(windows, phi, cfg);
    CHECK(p.weights[0] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(p.intercept == doctest::Approx(23.25));
}

TEST_CASE("fit errors") {
    MAConfig ma{MAKind::ma, 7, 0.9};
    Rng rng(23);
    auto windows = random_windows(rng, 5, 7);
    std::vector<double> phi(5, 1.0);
    CHECK_THROWS_AS(fit_least_squares(windows, phi, ma), InsufficientData);
    phi.pop_back();
    CHECK_THROWS_AS(fit_least_squares(windows, phi, ma), LengthMismatch);
}

TEST_CASE("rank-deficient systems return the minimum-norm solution") {
    // All midpoints identical within each window makes MA columns collinear.
    MAConfig ma{MAKind::ma, 3, 0.9};
    std::vector<MidpointWindow> windows;
    std::vector<double> phi;
    Rng rng(24);
    for (int i = 0; i < 10; ++i) {
        double v = rng.uniform(24.0, 30.0);
        windows.push_back(window({v, v, v}));
        phi.push_back(2.0 * v + 1.0);
    }
    MAParams p = fit_least_squares(windows, phi, ma);
    // Exact fit, and symmetric weights (minimum-norm splits evenly).
    CHECK(rss_of(p, ma, windows, phi) == doctest::Approx(0.0).epsilon(1e-16));
    CHECK(p.weights[0] == doctest::Approx(p.weights[1]));
    CHECK(p.weights[1] == doctest::Approx(p.weights[2]));
}

TEST_CASE("MA training RSS never exceeds SMA or EMA RSS") {
    Rng rng(25);
    for (int rep = 0; rep < 10; ++rep) {
        const int n = 5;
        auto windows = random_windows(rng, 40, n);
        std::vector<double> phi;
        for (const auto& w : windows)
            phi.push_back(0.2 * w.midpoints[4] + 0.1 * w.midpoints[0] + rng.normal(23.0, 0.5));
        MAConfig sma{MAKind::sma, n, 0.9};
        MAConfig ema{MAKind::ema, n, 0.9};
        MAConfig ma{MAKind::ma, n, 0.9};
        const double rss_sma = rss_of(fit_least_squares(windows, phi, sma), sma, windows, phi);
        const double rss_ema = rss_of(fit_least_squares(windows, phi, ema), ema, windows, phi);
        const double rss_ma = rss_of(fit_least_squares(windows, phi, ma), ma, windows, phi);
        CHECK(rss_ma <= rss_sma + 1e-9);
        CHECK(rss_ma <= rss_ema + 1e-9);
    }
}

TEST_CASE("shifting every midpoint by one hour shifts psi by a * sum(weights)") {
    Rng rng(26);
    for (MAKind kind : {MAKind::sma, MAKind::ema, MAKind::ma}) {
        MAConfig cfg{kind, 4, 0.9};
        MAParams p;
        if (kind == MAKind::ma) p.weights = {0.3, -0.2, 0.5, 0.1};
        else p.weights = {rng.uniform(-1.0, 1.0)};
        p.intercept = rng.uniform(-5.0, 5.0);

        auto w = window({25.0, 26.0, 27.0, 25.5});
        auto shifted = w;
        for (double& t : shifted.midpoints) t += 1.0;

        double weight_sum = 0.0;
        if (kind == MAKind::ma)
            for (double x : p.weights) weight_sum += x;
        else if (kind == MAKind::sma)
            weight_sum = p.weights[0] * 4;
        else
            for (int i = 1; i <= 4; ++i) weight_sum += p.weights[0] * std::pow(0.9, 4 - i);

        CHECK(predict(p, shifted, cfg) - predict(p, w, cfg) ==
              doctest::Approx(weight_sum).epsilon(1e-9));
    }
}
