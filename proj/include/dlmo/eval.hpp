#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dlmo/gru.hpp"
#include "dlmo/ingest.hpp"
#include "dlmo/mavg.hpp"

namespace dlmo {

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

double rmse(std::span<const double> residuals);     // throws EmptyInput
double rmse_val(std::span<const double> fold_rmses);  // sqrt(mean of squares)

// Fraction of residuals with |r| < 1.0 h (strict; exactly 1.0 is excluded).
double lt1h(std::span<const double> residuals);

// 1 - SS_res / SS_tot; throws DegenerateTarget when y_true is constant.
double r_squared(std::span<const double> y_true, std::span<const double> y_pred);

// Gaussian-likelihood form: n * ln(rss / n) + 2k.
double aic(double rss, int n_samples, int k_params);

// Closed-form variance factors of the normalized SMA/EMA weighted means of
// n i.i.d. unit-variance values: 1/n and sum(a^2i) / (sum(a^i))^2.
struct VarianceFactors {
    double sma_factor = 0.0;
    double ema_factor = 0.0;
};
VarianceFactors variance_ratio_check(int n, double alpha);

// ---------------------------------------------------------------------------
// Cross-validation folds (grouped: a participant never spans folds)
// ---------------------------------------------------------------------------

enum class CvScheme { lopo, kfold };

struct FoldPlan {
    CvScheme scheme = CvScheme::kfold;
    int k = 10;
    std::uint64_t seed = 0;
    std::map<std::string, int> assignment;  // participant -> fold id

    int n_folds() const;
};

FoldPlan make_folds(std::vector<std::string> participants, CvScheme scheme, int k,
                    std::uint64_t seed);
FoldPlan make_folds(const Dataset& ds, CvScheme scheme, int k, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Model specifications and evaluation
// ---------------------------------------------------------------------------

struct ModelSpec {
    enum class Kind { sma, ema, ma, rnn_sma, rnn_ema, rnn_ma, rnn_24h };
    Kind kind = Kind::rnn_ema;
    std::vector<Channel> channels = {Channel::LE, Channel::ST, Channel::AC};
    int window = 7;
    double alpha = 0.9;

    bool is_rnn() const;
    bool uses_psi() const;   // false only for rnn_24h
    MAKind ma_kind() const;  // moving-average step (ema placeholder for rnn_24h)
    std::string name() const;
};

ModelSpec::Kind model_kind_from_name(const std::string& s);  // "ema", "rnn-24h", ...

// One labeled sample per (participant, label) with the preprocessing the
// spec'd models need. Labels whose history or day window cannot be built
// are counted in `excluded`.
struct SampleSet {
    std::vector<TrainSample> samples;
    int excluded = 0;
};
SampleSet build_samples(const Dataset& ds, int window, const std::vector<Channel>& channels,
                        bool need_day_window);

struct ResidualRow {
    std::string participant;
    std::string split;  // "fold<i>" or "test"
    double y_true = 0.0;
    double y_pred = 0.0;
};

struct EvalReport {
    std::string model;
    std::vector<double> fold_rmse;       // r_i per validation fold
    double rmse_val = 0.0;               // sqrt(mean r_i^2)
    std::optional<double> rmse_test;
    double lt1h_fraction = 0.0;          // on test when present, else pooled validation
    std::optional<double> aic;
    std::vector<ResidualRow> residuals;
    int excluded_samples = 0;
    int train_samples = 0;
    int k_params = 0;
};

struct EvalOptions {
    CvScheme scheme = CvScheme::kfold;
    int k = 10;
    std::uint64_t seed = 7;
    GruConfig gru;           // epochs, learning rates, hidden size, batch
    bool with_aic = false;   // also report AIC from the full-train fit
};

// Cross-validated comparison of model specs on a shared sample set; when
// `test` is given, each spec is refit on the full training split and
// scored on the test split.
std::vector<EvalReport> run_model_comparison(const Dataset& train, const Dataset* test,
                                             const std::vector<ModelSpec>& specs,
                                             const EvalOptions& opt);

// The 7 channel subsets (all, singles, pairs) of the base two-step spec,
// with AIC. Sample set is shared across subsets so AIC values compare.
std::vector<EvalReport> feature_combination_sweep(const Dataset& train, const Dataset* test,
                                                  const ModelSpec& base, const EvalOptions& opt);

struct WindowSweepEntry {
    int window = 0;
    EvalReport report;
};

// Moving-average models refit per window size, LOPO metrics per size.
std::vector<WindowSweepEntry> window_size_sweep(const Dataset& train,
                                                const std::vector<MAKind>& kinds, int lo, int hi,
                                                const EvalOptions& opt);

// ---------------------------------------------------------------------------
// Moving-average noise sensitivity (Monte Carlo)
// ---------------------------------------------------------------------------

struct NoiseConfig {
    std::vector<double> sigmas = {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0};
    int repetitions = 2000;
    std::uint64_t seed = 7;
    bool refit = true;  // refit per repetition; false = fixed clean-fit coefficients
    int window = 7;
    double alpha = 0.9;
};

struct NoiseSummary {
    double sigma = 0.0;
    MAKind kind = MAKind::sma;
    int repetitions = 0;
    double mean_r2 = 0.0, sd_r2 = 0.0;
    double p05 = 0.0, p50 = 0.0, p95 = 0.0;
    double min_r2 = 0.0, max_r2 = 0.0;
};

// For each sigma and repetition: perturb every midpoint with iid N(0,
// sigma^2), fit SMA/EMA/MA on the perturbed windows and score in-sample r^2
// against the clean labels. Per-(sigma, rep) random substreams make the
// result independent of evaluation order.
std::vector<NoiseSummary> noise_experiment(const Dataset& ds, const NoiseConfig& cfg);

// ---------------------------------------------------------------------------
// Report files
// ---------------------------------------------------------------------------

void write_report_csv(const std::filesystem::path& path, const std::vector<EvalReport>& reports);
void write_fold_csv(const std::filesystem::path& path, const std::vector<EvalReport>& reports);
void write_residuals_csv(const std::filesystem::path& path,
                         const std::vector<EvalReport>& reports);
void write_noise_csv(const std::filesystem::path& path, const std::vector<NoiseSummary>& rows);
void write_window_sweep_csv(const std::filesystem::path& path,
                            const std::vector<WindowSweepEntry>& entries);
void write_summary_json(const std::filesystem::path& path,
                        const std::vector<EvalReport>& reports);

}  // namespace dlmo
