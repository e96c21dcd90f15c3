#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "dlmo/linalg.hpp"
#include "dlmo/mavg.hpp"
#include "dlmo/preprocess.hpp"

namespace dlmo {

// Second step of the framework: a single-layer GRU consuming 24 hourly
// steps of [hour index, psi, standardized sensor features] and reading out
// DLMO from the final hidden state plus a direct psi term.

struct GruConfig {
    int hidden_size = 32;
    std::vector<Channel> channels = {Channel::LE, Channel::ST, Channel::AC};
    bool use_psi = true;  // false = sensor-only 24-hour baseline (psi fixed to 0)
    double lr_stage2 = 1e-3;
    double lr_stage3 = 1e-4;
    int max_epochs = 200;
    int patience = 20;
    int batch_size = 32;        // 0 = full batch
    double val_fraction = 0.1;  // participant share held out for early stopping
    std::uint64_t seed = 1;

    int input_size() const { return static_cast<int>(channels.size()) + 2; }
};

struct GruWeights {
    // Gate parameters, H x I (input) and H x H (recurrent) plus biases.
    Mat wz, wr, wh;
    Mat uz, ur, uh;
    Vec bz, br, bh;
    // Readout over [h_24, psi_std]; the last entry is the direct psi path.
    Vec readout_w;
    double readout_b = 0.0;
    // Standardization statistics frozen from the training split.
    Vec feat_mean, feat_std;  // per selected channel
    double psi_mean = 0.0;
    double psi_std = 1.0;
};

struct TwoStepModel {
    MAConfig ma_cfg;
    MAParams ma;
    GruConfig cfg;
    GruWeights w;

    // Model whose forward output equals the moving-average prediction
    // bitwise: zeroed GRU, identity psi standardization, readout picking
    // the psi path with unit weight.
    static TwoStepModel psi_passthrough(const MAParams& ma, const MAConfig& ma_cfg,
                                        int hidden_size = 32);

    std::string kind_name() const;  // "rnn-ema", "rnn-24h", ...
};

// Number of parameters actually trained (the dead psi readout entry is not
// counted for psi-free models). Used as k in AIC.
int trainable_param_count(const TwoStepModel& m);

// One GRU step:
//   z = sigmoid(Wz u + Uz h + bz)
//   r = sigmoid(Wr u + Ur h + br)
//   hcand = tanh(Wh u + Uh (r.h) + bh)
//   h' = (1-z).h + z.hcand
// Throws ShapeMismatch on inconsistent sizes.
Vec gru_cell(const GruWeights& w, const Vec& hidden, const Vec& input);

struct TrainSample {
    std::string participant;
    DayWindow day;
    MidpointWindow window;
    double phi = 0.0;  // target DLMO, hours relative to collection-day midnight
};

// phi_hat for one sample. The day window must carry every configured
// channel; the midpoint window must match the moving-average config (it is
// ignored for psi-free models).
double forward(const TwoStepModel& m, const DayWindow& day, const MidpointWindow& win);
double forward(const TwoStepModel& m, const TrainSample& s);

struct GruGradients {
    Mat wz, wr, wh, uz, ur, uh;
    Vec bz, br, bh;
    Vec readout_w;
    double readout_b = 0.0;
    Vec ma_weights;  // populated when include_ma
    double ma_intercept = 0.0;
};

// Exact gradients of mean-squared-error loss over the batch with respect
// to every trainable parameter; with include_ma, also through psi into the
// moving-average parameters.
GruGradients backward(const TwoStepModel& m, std::span<const TrainSample> batch,
                      bool include_ma);

double mse_loss(const TwoStepModel& m, std::span<const TrainSample> batch);

// Fixed-order views over trainable parameter storage; shared by the
// optimizer and by finite-difference checks.
std::vector<std::span<double>> trainable_views(TwoStepModel& m, bool include_ma);
std::vector<std::span<const double>> gradient_views(const GruGradients& g, bool include_ma);

// Three-stage training:
//   1. least-squares fit of the moving-average parameters,
//   2. GRU + readout trained with the moving average frozen,
//   3. everything fine-tuned at the lower learning rate.
// Early stopping tracks RMSE on an internal validation split of whole
// participants; the best-validation parameters seen anywhere are returned.
// Throws InsufficientData (< 2 participants) and NonFiniteLoss on
// divergence.
TwoStepModel train_three_stage(const std::vector<TrainSample>& data, const GruConfig& cfg,
                               const MAConfig& ma_cfg);

// Bit-exact JSON round-trip of parameters and config.
void save_model(const TwoStepModel& m, const std::filesystem::path& path);
TwoStepModel load_model(const std::filesystem::path& path);

}  // namespace dlmo
