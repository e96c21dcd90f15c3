#include "dlmo/mavg.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "dlmo/errors.hpp"
#include "dlmo/kernels.hpp"

namespace dlmo {

const char* ma_kind_name(MAKind k) {
    switch (k) {
        case MAKind::sma: return "sma";
        case MAKind::ema: return "ema";
        case MAKind::ma: return "ma";
    }
    return "?";
}

MAKind ma_kind_from_name(const std::string& s) {
    if (s == "sma") return MAKind::sma;
    if (s == "ema") return MAKind::ema;
    if (s == "ma") return MAKind::ma;
    throw ConfigError("unknown moving-average kind '" + s + "'");
}

int param_count(const MAConfig& cfg) {
    return cfg.kind == MAKind::ma ? cfg.n + 1 : 2;
}

Vec feature_vector(const MidpointWindow& win, const MAConfig& cfg) {
    if (win.n() != cfg.n)
        throw LengthMismatch("midpoint window has " + std::to_string(win.n()) +
                             " entries, config expects " + std::to_string(cfg.n));
    switch (cfg.kind) {
        case MAKind::sma: {
            double sum = 0.0;
            for (double t : win.midpoints) sum += t;
            return {sum};
        }
        case MAKind::ema: {
            // weight alpha^(n-i) on T_i, most recent day gets alpha^0.
            double sum = 0.0;
            for (int i = 1; i <= cfg.n; ++i)
                sum += std::pow(cfg.alpha, cfg.n - i) * win.midpoints[static_cast<std::size_t>(i - 1)];
            return {sum};
        }
        case MAKind::ma:
            return win.midpoints;
    }
    return {};
}

double predict(const MAParams& params, const MidpointWindow& win, const MAConfig& cfg) {
    Vec f = feature_vector(win, cfg);
    if (f.size() != params.weights.size())
        throw LengthMismatch("parameter count does not match feature count");
    return kernels::dot(params.weights.data(), f.data(), f.size()) + params.intercept;
}

MAParams fit_least_squares(const std::vector<MidpointWindow>& windows,
                           const std::vector<double>& phi, const MAConfig& cfg) {
    if (windows.size() != phi.size())
        throw LengthMismatch("windows and targets differ in length");
    const int p = param_count(cfg);
    const auto m = static_cast<Eigen::Index>(windows.size());
    if (m < p)
        throw InsufficientData("need at least " + std::to_string(p) + " samples to fit " +
                               ma_kind_name(cfg.kind) + ", got " + std::to_string(windows.size()));

    Eigen::MatrixXd design(m, p);
    Eigen::VectorXd target(m);
    for (Eigen::Index r = 0; r < m; ++r) {
        Vec f = feature_vector(windows[static_cast<std::size_t>(r)], cfg);
        for (int c = 0; c < p - 1; ++c) design(r, c) = f[static_cast<std::size_t>(c)];
        design(r, p - 1) = 1.0;  // intercept column
        target(r) = phi[static_cast<std::size_t>(r)];
    }

    // Complete orthogonal decomposition: stable, and minimum-norm on
    // rank-deficient systems (collinear midpoints).
    Eigen::VectorXd sol = design.completeOrthogonalDecomposition().solve(target);

    MAParams params;
    params.weights.assign(sol.data(), sol.data() + p - 1);
    params.intercept = sol(p - 1);
    return params;
}

}  // namespace dlmo
