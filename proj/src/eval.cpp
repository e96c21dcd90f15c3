#include "dlmo/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

#include "dlmo/csv.hpp"
#include "dlmo/errors.hpp"
#include "dlmo/kernels.hpp"
#include "dlmo/rng.hpp"

namespace dlmo {

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

double rmse(std::span<const double> residuals) {
    if (residuals.empty()) throw EmptyInput("rmse of an empty residual set");
    return std::sqrt(kernels::sumsq(residuals.data(), residuals.size()) /
                     static_cast<double>(residuals.size()));
}

double rmse_val(std::span<const double> fold_rmses) {
    if (fold_rmses.empty()) throw EmptyInput("rmse_val of an empty fold set");
    return std::sqrt(kernels::sumsq(fold_rmses.data(), fold_rmses.size()) /
                     static_cast<double>(fold_rmses.size()));
}

double lt1h(std::span<const double> residuals) {
    if (residuals.empty()) throw EmptyInput("lt1h of an empty residual set");
    std::size_t hits = 0;
    for (double r : residuals)
        if (std::fabs(r) < 1.0) ++hits;
    return static_cast<double>(hits) / static_cast<double>(residuals.size());
}

double r_squared(std::span<const double> y_true, std::span<const double> y_pred) {
    if (y_true.size() != y_pred.size())
        throw LengthMismatch("r_squared inputs differ in length");
    if (y_true.size() < 2) throw EmptyInput("r_squared needs at least 2 samples");
    double mean = 0.0;
    for (double y : y_true) mean += y;
    mean /= static_cast<double>(y_true.size());
    double ss_tot = 0.0, ss_res = 0.0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        ss_tot += (y_true[i] - mean) * (y_true[i] - mean);
        ss_res += (y_true[i] - y_pred[i]) * (y_true[i] - y_pred[i]);
    }
    if (ss_tot == 0.0) throw DegenerateTarget("r_squared undefined for a constant target");
    return 1.0 - ss_res / ss_tot;
}

double aic(double rss, int n_samples, int k_params) {
    if (!(rss > 0.0)) throw DomainError("aic requires rss > 0");
    if (n_samples < 1) throw DomainError("aic requires n_samples >= 1");
    return static_cast<double>(n_samples) * std::log(rss / static_cast<double>(n_samples)) +
           2.0 * static_cast<double>(k_params);
}

VarianceFactors variance_ratio_check(int n, double alpha) {
    if (n < 1) throw ConfigError("variance_ratio_check requires n >= 1");
    if (!(alpha > 0.0) || alpha > 1.0)
        throw ConfigError("variance_ratio_check requires 0 < alpha <= 1");
    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        s1 += std::pow(alpha, i);
        s2 += std::pow(alpha, 2 * i);
    }
    return {1.0 / static_cast<double>(n), s2 / (s1 * s1)};
}

// ---------------------------------------------------------------------------
// Folds
// ---------------------------------------------------------------------------

int FoldPlan::n_folds() const {
    int f = 0;
    for (const auto& [pid, fold] : assignment) f = std::max(f, fold + 1);
    return f;
}

FoldPlan make_folds(std::vector<std::string> participants, CvScheme scheme, int k,
                    std::uint64_t seed) {
    std::sort(participants.begin(), participants.end());
    participants.erase(std::unique(participants.begin(), participants.end()),
                       participants.end());
    FoldPlan plan;
    plan.scheme = scheme;
    plan.seed = seed;
    if (scheme == CvScheme::lopo) {
        if (participants.size() < 2)
            throw TooFewParticipants("leave-one-participant-out needs >= 2 participants");
        plan.k = static_cast<int>(participants.size());
        for (std::size_t i = 0; i < participants.size(); ++i)
            plan.assignment[participants[i]] = static_cast<int>(i);
    } else {
        if (k < 2) throw ConfigError("k-fold needs k >= 2");
        if (participants.size() < static_cast<std::size_t>(k))
            throw TooFewParticipants("k-fold with k=" + std::to_string(k) + " needs >= " +
                                     std::to_string(k) + " participants, got " +
                                     std::to_string(participants.size()));
        plan.k = k;
        Rng rng = Rng(seed).substream(0xF01d);
        rng.shuffle(participants);
        for (std::size_t i = 0; i < participants.size(); ++i)
            plan.assignment[participants[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
    }
    return plan;
}

FoldPlan make_folds(const Dataset& ds, CvScheme scheme, int k, std::uint64_t seed) {
    std::vector<std::string> ids;
    for (const auto& p : ds.participants) ids.push_back(p.id);
    return make_folds(std::move(ids), scheme, k, seed);
}

// ---------------------------------------------------------------------------
// Model specs
// ---------------------------------------------------------------------------

bool ModelSpec::is_rnn() const {
    return kind == Kind::rnn_sma || kind == Kind::rnn_ema || kind == Kind::rnn_ma ||
           kind == Kind::rnn_24h;
}

bool ModelSpec::uses_psi() const { return kind != Kind::rnn_24h; }

MAKind ModelSpec::ma_kind() const {
    switch (kind) {
        case Kind::sma:
        case Kind::rnn_sma: return MAKind::sma;
        case Kind::ma:
        case Kind::rnn_ma: return MAKind::ma;
        default: return MAKind::ema;
    }
}

std::string ModelSpec::name() const {
    std::string base;
    switch (kind) {
        case Kind::sma: base = "SMA"; break;
        case Kind::ema: base = "EMA"; break;
        case Kind::ma: base = "MA"; break;
        case Kind::rnn_sma: base = "RNN_SMA"; break;
        case Kind::rnn_ema: base = "RNN_EMA"; break;
        case Kind::rnn_ma: base = "RNN_MA"; break;
        case Kind::rnn_24h: base = "RNN_24H"; break;
    }
    if (is_rnn() && channels.size() < 3) {
        base += "(";
        for (std::size_t i = 0; i < channels.size(); ++i) {
            if (i) base += ",";
            base += channel_name(channels[i]);
        }
        base += ")";
    }
    return base;
}

ModelSpec::Kind model_kind_from_name(const std::string& s) {
    if (s == "sma") return ModelSpec::Kind::sma;
    if (s == "ema") return ModelSpec::Kind::ema;
    if (s == "ma") return ModelSpec::Kind::ma;
    if (s == "rnn-sma") return ModelSpec::Kind::rnn_sma;
    if (s == "rnn-ema") return ModelSpec::Kind::rnn_ema;
    if (s == "rnn-ma") return ModelSpec::Kind::rnn_ma;
    if (s == "rnn-24h") return ModelSpec::Kind::rnn_24h;
    throw ConfigError("unknown model '" + s +
                      "' (expected sma|ema|ma|rnn-sma|rnn-ema|rnn-ma|rnn-24h)");
}

// ---------------------------------------------------------------------------
// Sample assembly
// ---------------------------------------------------------------------------

SampleSet build_samples(const Dataset& ds, int window, const std::vector<Channel>& channels,
                        bool need_day_window) {
    SampleSet out;
    for (const auto& rec : ds.participants) {
        for (const auto& label : rec.labels) {
            TrainSample s;
            s.participant = rec.id;
            s.phi = label.phi;
            try {
                s.window = assemble_midpoint_window(rec, label.collection_day, window);
                if (need_day_window)
                    s.day = assemble_day_window(rec, label.collection_day, channels);
            } catch (const DataError&) {
                ++out.excluded;
                continue;
            }
            out.samples.push_back(std::move(s));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Comparison harness
// ---------------------------------------------------------------------------

namespace {

struct FittedModel {
    bool is_rnn = false;
    TwoStepModel rnn;
    MAParams ma;
    MAConfig ma_cfg;

    double predict_sample(const TrainSample& s) const {
        return is_rnn ? forward(rnn, s) : predict(ma, s.window, ma_cfg);
    }
    int param_count_of() const {
        return is_rnn ? trainable_param_count(rnn) : param_count(ma_cfg);
    }
};

FittedModel fit_spec(const ModelSpec& spec, const std::vector<TrainSample>& train,
                     const EvalOptions& opt, std::uint64_t salt) {
    FittedModel fm;
    fm.ma_cfg = MAConfig{spec.ma_kind(), spec.window, spec.alpha};
    if (spec.is_rnn()) {
        fm.is_rnn = true;
        GruConfig cfg = opt.gru;
        cfg.channels = canonical_channels(spec.channels);
        cfg.use_psi = spec.uses_psi();
        cfg.seed = Rng(opt.seed).substream(Rng::hash_str(spec.name()) ^ salt).seed();
        fm.rnn = train_three_stage(train, cfg, fm.ma_cfg);
    } else {
        std::vector<MidpointWindow> wins;
        std::vector<double> phi;
        wins.reserve(train.size());
        phi.reserve(train.size());
        for (const TrainSample& s : train) {
            wins.push_back(s.window);
            phi.push_back(s.phi);
        }
        fm.ma = fit_least_squares(wins, phi, fm.ma_cfg);
    }
    return fm;
}

EvalReport evaluate_spec(const ModelSpec& spec, const std::vector<TrainSample>& samples,
                         const std::vector<TrainSample>& test_samples, bool have_test,
                         int excluded, const FoldPlan& plan, const EvalOptions& opt) {
    EvalReport rep;
    rep.model = spec.name();
    rep.excluded_samples = excluded;
    rep.train_samples = static_cast<int>(samples.size());

    std::vector<double> pooled_val_residuals;
    for (int f = 0; f < plan.n_folds(); ++f) {
        std::vector<TrainSample> train, val;
        for (const TrainSample& s : samples)
            (plan.assignment.at(s.participant) == f ? val : train).push_back(s);
        if (val.empty() || train.empty()) continue;

        FittedModel fm = fit_spec(spec, train, opt, 0x1000 + static_cast<std::uint64_t>(f));
        std::vector<double> residuals;
        for (const TrainSample& s : val) {
            const double pred = fm.predict_sample(s);
            residuals.push_back(pred - s.phi);
            rep.residuals.push_back({s.participant, "fold" + std::to_string(f), s.phi, pred});
        }
        rep.fold_rmse.push_back(rmse(residuals));
        pooled_val_residuals.insert(pooled_val_residuals.end(), residuals.begin(),
                                    residuals.end());
    }
    rep.rmse_val = rmse_val(rep.fold_rmse);

    if (have_test || opt.with_aic) {
        FittedModel full = fit_spec(spec, samples, opt, 0x2000);
        rep.k_params = full.param_count_of();
        if (have_test && !test_samples.empty()) {
            std::vector<double> residuals;
            for (const TrainSample& s : test_samples) {
                const double pred = full.predict_sample(s);
                residuals.push_back(pred - s.phi);
                rep.residuals.push_back({s.participant, "test", s.phi, pred});
            }
            rep.rmse_test = rmse(residuals);
            rep.lt1h_fraction = lt1h(residuals);
        } else {
            rep.lt1h_fraction = lt1h(pooled_val_residuals);
        }
        if (opt.with_aic) {
            double rss = 0.0;
            for (const TrainSample& s : samples) {
                const double e = full.predict_sample(s) - s.phi;
                rss += e * e;
            }
            if (rss > 0.0)
                rep.aic = aic(rss, static_cast<int>(samples.size()), rep.k_params);
        }
    } else {
        rep.lt1h_fraction = lt1h(pooled_val_residuals);
    }
    return rep;
}

}  // namespace

std::vector<EvalReport> run_model_comparison(const Dataset& train, const Dataset* test,
                                             const std::vector<ModelSpec>& specs,
                                             const EvalOptions& opt) {
    if (specs.empty()) throw ConfigError("no model specs to evaluate");

    // One shared sample set keeps the comparison honest: the union of the
    // channels any spec needs, and a single exclusion rule for all models.
    bool need_day = false;
    std::set<Channel> chan_union;
    int window = specs.front().window;
    for (const ModelSpec& s : specs) {
        if (s.window != window)
            throw ConfigError("model comparison requires a common window size");
        if (s.is_rnn()) {
            need_day = true;
            for (Channel c : s.channels) chan_union.insert(c);
        }
    }
    std::vector<Channel> channels = canonical_channels(
        std::vector<Channel>(chan_union.begin(), chan_union.end()));
    if (need_day && channels.empty()) throw ConfigError("two-step specs need channels");

    SampleSet train_set = build_samples(train, window, channels, need_day);
    if (train_set.samples.empty())
        throw InsufficientData("no usable training samples (all labels excluded)");

    std::vector<TrainSample> test_samples;
    int test_excluded = 0;
    const bool have_test = test != nullptr && !test->participants.empty();
    if (have_test) {
        SampleSet ts = build_samples(*test, window, channels, need_day);
        test_samples = std::move(ts.samples);
        test_excluded = ts.excluded;
    }

    std::vector<std::string> ids;
    for (const TrainSample& s : train_set.samples) ids.push_back(s.participant);
    FoldPlan plan = make_folds(std::move(ids), opt.scheme, opt.k, opt.seed);

    std::vector<EvalReport> reports;
    for (const ModelSpec& spec : specs) {
        EvalReport rep = evaluate_spec(spec, train_set.samples, test_samples, have_test,
                                       train_set.excluded + test_excluded, plan, opt);
        reports.push_back(std::move(rep));
    }
    return reports;
}

std::vector<EvalReport> feature_combination_sweep(const Dataset& train, const Dataset* test,
                                                  const ModelSpec& base,
                                                  const EvalOptions& opt) {
    if (!base.is_rnn() || !base.uses_psi())
        throw ConfigError("feature sweep needs a two-step model spec");
    static const std::vector<std::vector<Channel>> kSubsets = {
        {Channel::LE, Channel::ST, Channel::AC},
        {Channel::LE},
        {Channel::ST},
        {Channel::AC},
        {Channel::LE, Channel::ST},
        {Channel::LE, Channel::AC},
        {Channel::ST, Channel::AC},
    };
    std::vector<ModelSpec> specs;
    for (const auto& subset : kSubsets) {
        ModelSpec s = base;
        s.channels = subset;
        specs.push_back(std::move(s));
    }
    EvalOptions o = opt;
    o.with_aic = true;
    return run_model_comparison(train, test, specs, o);
}

std::vector<WindowSweepEntry> window_size_sweep(const Dataset& train,
                                                const std::vector<MAKind>& kinds, int lo,
                                                int hi, const EvalOptions& opt) {
    if (lo < 1 || hi < lo) throw ConfigError("window sweep range must satisfy 1 <= lo <= hi");
    std::vector<WindowSweepEntry> out;
    for (int n = lo; n <= hi; ++n) {
        for (MAKind kind : kinds) {
            ModelSpec spec;
            spec.kind = kind == MAKind::sma ? ModelSpec::Kind::sma
                        : kind == MAKind::ema ? ModelSpec::Kind::ema
                                              : ModelSpec::Kind::ma;
            spec.window = n;
            EvalOptions o = opt;
            o.scheme = CvScheme::lopo;
            std::vector<EvalReport> rep = run_model_comparison(train, nullptr, {spec}, o);
            out.push_back({n, std::move(rep.front())});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Noise experiment
// ---------------------------------------------------------------------------

std::vector<NoiseSummary> noise_experiment(const Dataset& ds, const NoiseConfig& cfg) {
    if (cfg.repetitions < 1) throw ConfigError("noise experiment needs repetitions >= 1");
    for (double s : cfg.sigmas)
        if (!(s >= 0.0) || !std::isfinite(s))
            throw ConfigError("noise sigma must be finite and >= 0");
    if (cfg.sigmas.empty()) throw ConfigError("noise experiment needs at least one sigma");

    SampleSet set = build_samples(ds, cfg.window, {}, /*need_day_window=*/false);
    const std::size_t n = set.samples.size();
    const MAConfig cfg_sma{MAKind::sma, cfg.window, cfg.alpha};
    const MAConfig cfg_ema{MAKind::ema, cfg.window, cfg.alpha};
    const MAConfig cfg_ma{MAKind::ma, cfg.window, cfg.alpha};
    if (n < static_cast<std::size_t>(param_count(cfg_ma)))
        throw InsufficientData("noise experiment needs at least " +
                               std::to_string(param_count(cfg_ma)) + " samples, got " +
                               std::to_string(n));

    std::vector<double> phi(n);
    for (std::size_t i = 0; i < n; ++i) phi[i] = set.samples[i].phi;

    // Optional fixed-coefficient mode: fit once on clean windows, only the
    // features are perturbed afterwards.
    std::vector<MidpointWindow> clean(n);
    for (std::size_t i = 0; i < n; ++i) clean[i] = set.samples[i].window;
    MAParams fixed_sma, fixed_ema, fixed_ma;
    if (!cfg.refit) {
        fixed_sma = fit_least_squares(clean, phi, cfg_sma);
        fixed_ema = fit_least_squares(clean, phi, cfg_ema);
        fixed_ma = fit_least_squares(clean, phi, cfg_ma);
    }

    Rng root = Rng(cfg.seed).substream(0x4015e);
    std::vector<NoiseSummary> out;
    std::vector<MidpointWindow> noisy(n);
    std::vector<double> preds(n);

    for (std::size_t si = 0; si < cfg.sigmas.size(); ++si) {
        const double sigma = cfg.sigmas[si];
        std::vector<std::vector<double>> r2(3, std::vector<double>(
                                                   static_cast<std::size_t>(cfg.repetitions)));
        for (int rep = 0; rep < cfg.repetitions; ++rep) {
            Rng rng = root.substream(si * 1000003ull + static_cast<std::uint64_t>(rep));
            for (std::size_t i = 0; i < n; ++i) {
                noisy[i] = clean[i];
                for (double& t : noisy[i].midpoints) t += sigma * rng.normal();
            }
            const MAConfig* cfgs[3] = {&cfg_sma, &cfg_ema, &cfg_ma};
            const MAParams* fixed[3] = {&fixed_sma, &fixed_ema, &fixed_ma};
            for (int k = 0; k < 3; ++k) {
                MAParams params = cfg.refit ? fit_least_squares(noisy, phi, *cfgs[k]) : *fixed[k];
                for (std::size_t i = 0; i < n; ++i)
                    preds[i] = predict(params, noisy[i], *cfgs[k]);
                r2[static_cast<std::size_t>(k)][static_cast<std::size_t>(rep)] =
                    r_squared(phi, preds);
            }
        }

        const MAKind kinds[3] = {MAKind::sma, MAKind::ema, MAKind::ma};
        for (int k = 0; k < 3; ++k) {
            std::vector<double>& v = r2[static_cast<std::size_t>(k)];
            NoiseSummary s;
            s.sigma = sigma;
            s.kind = kinds[k];
            s.repetitions = cfg.repetitions;
            double mean = 0.0;
            for (double x : v) mean += x;
            mean /= static_cast<double>(v.size());
            double var = 0.0;
            for (double x : v) var += (x - mean) * (x - mean);
            s.mean_r2 = mean;
            s.sd_r2 = v.size() > 1 ? std::sqrt(var / static_cast<double>(v.size() - 1)) : 0.0;
            std::vector<double> sorted = v;
            std::sort(sorted.begin(), sorted.end());
            auto quantile = [&sorted](double q) {
                const double pos = q * static_cast<double>(sorted.size() - 1);
                const std::size_t i = static_cast<std::size_t>(pos);
                const double frac = pos - static_cast<double>(i);
                return i + 1 < sorted.size() ? sorted[i] * (1.0 - frac) + sorted[i + 1] * frac
                                             : sorted[i];
            };
            s.p05 = quantile(0.05);
            s.p50 = quantile(0.50);
            s.p95 = quantile(0.95);
            s.min_r2 = sorted.front();
            s.max_r2 = sorted.back();
            out.push_back(s);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Report files
// ---------------------------------------------------------------------------

namespace {
std::string opt_field(const std::optional<double>& v) {
    return v ? csv::format_g9(*v) : std::string();
}
}  // namespace

void write_report_csv(const std::filesystem::path& path,
                      const std::vector<EvalReport>& reports) {
    csv::Writer w(path);
    w.row({"model", "rmse_val", "rmse_test", "lt1h", "aic", "folds", "train_samples",
           "excluded_samples", "k_params"});
    for (const auto& r : reports)
        w.row({r.model, csv::format_g9(r.rmse_val), opt_field(r.rmse_test),
               csv::format_g9(r.lt1h_fraction), opt_field(r.aic),
               std::to_string(r.fold_rmse.size()), std::to_string(r.train_samples),
               std::to_string(r.excluded_samples), std::to_string(r.k_params)});
    w.close();
}

void write_fold_csv(const std::filesystem::path& path, const std::vector<EvalReport>& reports) {
    csv::Writer w(path);
    w.row({"model", "fold", "rmse"});
    for (const auto& r : reports)
        for (std::size_t f = 0; f < r.fold_rmse.size(); ++f)
            w.row({r.model, std::to_string(f), csv::format_g9(r.fold_rmse[f])});
    w.close();
}

void write_residuals_csv(const std::filesystem::path& path,
                         const std::vector<EvalReport>& reports) {
    csv::Writer w(path);
    w.row({"model", "participant", "split", "y_true", "y_pred", "residual"});
    for (const auto& r : reports)
        for (const auto& row : r.residuals)
            w.row({r.model, row.participant, row.split, csv::format_g9(row.y_true),
                   csv::format_g9(row.y_pred), csv::format_g9(row.y_pred - row.y_true)});
    w.close();
}

void write_noise_csv(const std::filesystem::path& path, const std::vector<NoiseSummary>& rows) {
    csv::Writer w(path);
    w.row({"sigma", "model", "repetitions", "mean_r2", "sd_r2", "p05", "p50", "p95", "min_r2",
           "max_r2"});
    for (const auto& r : rows)
        w.row({csv::format_g9(r.sigma), ma_kind_name(r.kind), std::to_string(r.repetitions),
               csv::format_g9(r.mean_r2), csv::format_g9(r.sd_r2), csv::format_g9(r.p05),
               csv::format_g9(r.p50), csv::format_g9(r.p95), csv::format_g9(r.min_r2),
               csv::format_g9(r.max_r2)});
    w.close();
}

void write_window_sweep_csv(const std::filesystem::path& path,
                            const std::vector<WindowSweepEntry>& entries) {
    csv::Writer w(path);
    w.row({"window", "model", "rmse_val", "lt1h", "train_samples", "excluded_samples"});
    for (const auto& e : entries)
        w.row({std::to_string(e.window), e.report.model, csv::format_g9(e.report.rmse_val),
               csv::format_g9(e.report.lt1h_fraction), std::to_string(e.report.train_samples),
               std::to_string(e.report.excluded_samples)});
    w.close();
}

void write_summary_json(const std::filesystem::path& path,
                        const std::vector<EvalReport>& reports) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& r : reports) {
        nlohmann::ordered_json e;
        e["model"] = r.model;
        e["rmse_val"] = r.rmse_val;
        e["fold_rmse"] = r.fold_rmse;
        if (r.rmse_test) e["rmse_test"] = *r.rmse_test;
        e["lt1h"] = r.lt1h_fraction;
        if (r.aic) e["aic"] = *r.aic;
        e["train_samples"] = r.train_samples;
        e["excluded_samples"] = r.excluded_samples;
        e["k_params"] = r.k_params;
        j.push_back(std::move(e));
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

}  // namespace dlmo
