#pragma once

#include <string>
#include <vector>

#include "dlmo/linalg.hpp"
#include "dlmo/preprocess.hpp"

namespace dlmo {

// Moving-average models over past sleep midpoints. All three are linear in
// a feature map of the window:
//   SMA: psi = a * sum_i T_i + b                 (features [sum T])
//   EMA: psi = a * sum_i alpha^(n-i) * T_i + b   (features [weighted sum])
//   MA:  psi = sum_i w_i T_i + b                 (features [T_1..T_n])
// with T_n the most recent day, so EMA gives the most recent midpoint
// weight alpha^0 = 1.

enum class MAKind { sma, ema, ma };

const char* ma_kind_name(MAKind k);
MAKind ma_kind_from_name(const std::string& s);

struct MAConfig {
    MAKind kind = MAKind::ema;
    int n = 7;           // window size
    double alpha = 0.9;  // fixed decay rate, EMA only
};

struct MAParams {
    Vec weights;             // 1 entry for SMA/EMA, n entries for MA
    double intercept = 0.0;
};

int param_count(const MAConfig& cfg);  // trainable parameters incl. intercept

// Feature map of one window; throws LengthMismatch unless window length
// equals cfg.n.
Vec feature_vector(const MidpointWindow& win, const MAConfig& cfg);

// psi = weights . features + intercept
double predict(const MAParams& params, const MidpointWindow& win, const MAConfig& cfg);

// Minimum-L2-norm least-squares fit of [weights, intercept] against the
// targets. Rank-deficient systems get the minimum-norm solution. Throws
// InsufficientData when samples < parameter count and LengthMismatch on
// inconsistent shapes.
MAParams fit_least_squares(const std::vector<MidpointWindow>& windows,
                           const std::vector<double>& phi, const MAConfig& cfg);

}  // namespace dlmo
