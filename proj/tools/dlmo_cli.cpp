// dlmo: batch front end for the DLMO estimation pipeline.
//
// Subcommands: simulate, extract-dlmo, preprocess-check, train, evaluate,
// noise-exp. Every run writes a manifest.json (resolved options + seed)
// next to its outputs. Exit codes: 0 success, 1 validation/config error,
// 2 data error, 3 numerical failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dlmo/csv.hpp"
#include "dlmo/errors.hpp"
#include "dlmo/eval.hpp"
#include "dlmo/ingest.hpp"
#include "dlmo/kernels.hpp"
#include "dlmo/melatonin.hpp"
#include "dlmo/model_io.hpp"
#include "dlmo/preprocess.hpp"
#include "dlmo/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct GlobalOpts {
    std::uint64_t seed = 7;
    bool seed_given = false;
    std::string out_dir = ".";
    bool verbose = false;
};

void info(const GlobalOpts& g, const std::string& msg) {
    if (g.verbose) std::cerr << "[dlmo] " << msg << "\n";
}

void write_manifest(const GlobalOpts& g, const std::string& command, ordered_json options,
                    const std::vector<std::string>& outputs) {
    ordered_json j;
    j["command"] = command;
    j["version"] = kVersion;
    j["seed"] = g.seed;
    j["kernel_isa"] = dlmo::kernels::isa_name(dlmo::kernels::active_isa());
    j["options"] = std::move(options);
    j["outputs"] = outputs;
    fs::path path = fs::path(g.out_dir) / "manifest.json";
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw dlmo::IoError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

dlmo::Dataset load_train_split(const dlmo::Dataset& ds) {
    return ds.has_split(dlmo::SplitTag::train) ? ds.subset(dlmo::SplitTag::train) : ds;
}

std::vector<double> parse_sigma_list(const std::string& s) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        std::size_t comma = s.find(',', start);
        std::string tok =
            s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!tok.empty()) {
            char* end = nullptr;
            double v = std::strtod(tok.c_str(), &end);
            if (end != tok.c_str() + tok.size())
                throw dlmo::ConfigError("malformed sigma '" + tok + "'");
            out.push_back(v);
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (out.empty()) throw dlmo::ConfigError("empty sigma list");
    return out;
}

struct GruFlags {
    int hidden = 32;
    int epochs = 200;
    int patience = 20;
    int batch = 32;
    double lr2 = 1e-3;
    double lr3 = 1e-4;
    double val_fraction = 0.1;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--hidden", hidden, "GRU hidden size");
        cmd->add_option("--epochs", epochs, "max training epochs per stage");
        cmd->add_option("--patience", patience, "early-stopping patience (epochs)");
        cmd->add_option("--batch", batch, "mini-batch size (0 = full batch)");
        cmd->add_option("--lr-stage2", lr2, "stage-2 learning rate");
        cmd->add_option("--lr-stage3", lr3, "stage-3 fine-tuning learning rate");
        cmd->add_option("--val-fraction", val_fraction,
                        "participant share held out for early stopping");
    }

    dlmo::GruConfig to_config(std::uint64_t seed) const {
        dlmo::GruConfig cfg;
        cfg.hidden_size = hidden;
        cfg.max_epochs = epochs;
        cfg.patience = patience;
        cfg.batch_size = batch;
        cfg.lr_stage2 = lr2;
        cfg.lr_stage3 = lr3;
        cfg.val_fraction = val_fraction;
        cfg.seed = seed;
        if (hidden < 1) throw dlmo::ConfigError("--hidden must be >= 1");
        if (epochs < 0) throw dlmo::ConfigError("--epochs must be >= 0");
        if (lr2 <= 0.0 || lr3 <= 0.0) throw dlmo::ConfigError("learning rates must be > 0");
        return cfg;
    }
};

// ---------------------------------------------------------------------------

int cmd_simulate(const GlobalOpts& g, const std::string& spec_file,
                 const ordered_json& echoed) {
    dlmo::CohortSpec spec;
    if (!spec_file.empty()) spec = dlmo::parse_spec_file(spec_file);
    if (g.seed_given || spec_file.empty()) spec.seed = g.seed;

    auto [ds, gt] = dlmo::generate_cohort(spec);
    fs::create_directories(g.out_dir);
    dlmo::write_dataset(ds, gt, g.out_dir);
    write_manifest(g, "simulate", echoed,
                   {"sensors.csv", "sleep.csv", "labels.csv", "melatonin.csv", "splits.csv",
                    "ground_truth.csv"});
    std::cout << "wrote cohort of " << ds.participants.size() << " participants to " << g.out_dir
              << "\n";
    return 0;
}

int cmd_extract_dlmo(const GlobalOpts& g, const std::string& data_root, double threshold,
                     const ordered_json& echoed) {
    const fs::path mel = fs::path(data_root) / "melatonin.csv";
    std::vector<dlmo::MelatoninProfile> profiles = dlmo::load_melatonin_csv(mel);

    std::vector<dlmo::DlmoLabel> labels;
    int warnings = 0;
    fs::create_directories(g.out_dir);
    dlmo::csv::Writer status(fs::path(g.out_dir) / "extract_report.csv");
    status.row({"participant_id", "collection_date", "status", "dlmo_hours"});
    for (const auto& prof : profiles) {
        try {
            dlmo::DlmoLabel label = dlmo::extract_dlmo(prof, threshold);
            labels.push_back(label);
            status.row({prof.participant, dlmo::format_date(prof.collection_day), "ok",
                        dlmo::csv::format_g9(label.phi)});
        } catch (const dlmo::NoOnset&) {
            ++warnings;
            status.row({prof.participant, dlmo::format_date(prof.collection_day), "no_onset", ""});
        } catch (const dlmo::AlreadyAbove&) {
            ++warnings;
            status.row(
                {prof.participant, dlmo::format_date(prof.collection_day), "already_above", ""});
        } catch (const dlmo::TooFewSamples&) {
            ++warnings;
            status.row(
                {prof.participant, dlmo::format_date(prof.collection_day), "too_few_samples", ""});
        }
    }
    status.close();
    dlmo::write_labels_csv(fs::path(g.out_dir) / "labels.csv", labels);
    write_manifest(g, "extract-dlmo", echoed, {"labels.csv", "extract_report.csv"});
    std::cout << "extracted " << labels.size() << " onsets from " << profiles.size()
              << " profiles (" << warnings << " warnings)\n";
    return 0;
}

int cmd_preprocess_check(const GlobalOpts& g, const std::string& data_root, int window,
                         const std::string& features, const ordered_json& echoed) {
    dlmo::Dataset ds = dlmo::load_dataset(data_root);
    const std::vector<dlmo::Channel> channels = dlmo::parse_channel_list(features);

    fs::create_directories(g.out_dir);
    dlmo::csv::Writer w(fs::path(g.out_dir) / "preprocess_report.csv");
    w.row({"participant_id", "collection_date", "midpoint_window", "day_window"});
    int ok = 0, total = 0;
    for (const auto& rec : ds.participants) {
        for (const auto& label : rec.labels) {
            ++total;
            std::string mid = "ok", day = "ok";
            try {
                dlmo::assemble_midpoint_window(rec, label.collection_day, window);
            } catch (const dlmo::InsufficientHistory& e) {
                mid = "insufficient_history:" + std::to_string(e.available());
            }
            try {
                dlmo::assemble_day_window(rec, label.collection_day, channels);
            } catch (const dlmo::ExcessiveGap& e) {
                day = "excessive_gap:" + e.channel() + ":" + std::to_string(e.run_hours());
            } catch (const dlmo::MissingSleepRecord&) {
                day = "missing_sleep_record";
            } catch (const dlmo::ValidationError&) {
                day = "missing_channel";
            }
            if (mid == "ok" && day == "ok") ++ok;
            w.row({rec.id, dlmo::format_date(label.collection_day), mid, day});
        }
    }
    w.close();
    write_manifest(g, "preprocess-check", echoed, {"preprocess_report.csv"});
    std::cout << ok << "/" << total << " labels pass preprocessing\n";
    return 0;
}

int cmd_train(const GlobalOpts& g, const std::string& data_root, const std::string& model_name,
              const std::string& features, int window, double alpha, const GruFlags& gru,
              const std::string& out_name, const ordered_json& echoed) {
    dlmo::ModelSpec spec;
    spec.kind = dlmo::model_kind_from_name(model_name);
    spec.channels = dlmo::parse_channel_list(features);
    spec.window = window;
    spec.alpha = alpha;

    dlmo::Dataset all = dlmo::load_dataset(data_root);
    dlmo::Dataset train = load_train_split(all);
    dlmo::SampleSet set =
        dlmo::build_samples(train, spec.window, spec.channels, spec.is_rnn());
    if (set.samples.empty()) throw dlmo::InsufficientData("no usable training samples");
    info(g, "training on " + std::to_string(set.samples.size()) + " samples (" +
                std::to_string(set.excluded) + " excluded)");

    fs::create_directories(g.out_dir);
    const fs::path model_path = fs::path(g.out_dir) / out_name;
    double train_rmse = 0.0;
    if (spec.is_rnn()) {
        dlmo::GruConfig cfg = gru.to_config(g.seed);
        cfg.channels = spec.channels;
        cfg.use_psi = spec.uses_psi();
        dlmo::MAConfig ma_cfg{spec.ma_kind(), spec.window, spec.alpha};
        dlmo::TwoStepModel model = dlmo::train_three_stage(set.samples, cfg, ma_cfg);
        std::vector<double> residuals;
        for (const auto& s : set.samples) residuals.push_back(dlmo::forward(model, s) - s.phi);
        train_rmse = dlmo::rmse(residuals);
        dlmo::save_model(model, model_path);
    } else {
        dlmo::MAConfig ma_cfg{spec.ma_kind(), spec.window, spec.alpha};
        std::vector<dlmo::MidpointWindow> wins;
        std::vector<double> phi;
        for (const auto& s : set.samples) {
            wins.push_back(s.window);
            phi.push_back(s.phi);
        }
        dlmo::MAParams params = dlmo::fit_least_squares(wins, phi, ma_cfg);
        std::vector<double> residuals;
        for (std::size_t i = 0; i < wins.size(); ++i)
            residuals.push_back(dlmo::predict(params, wins[i], ma_cfg) - phi[i]);
        train_rmse = dlmo::rmse(residuals);
        dlmo::save_mavg_model(params, ma_cfg, model_path);
    }

    ordered_json report;
    report["model"] = spec.name();
    report["train_samples"] = set.samples.size();
    report["excluded_samples"] = set.excluded;
    report["train_rmse"] = train_rmse;
    std::ofstream rep(fs::path(g.out_dir) / "training_report.json", std::ios::trunc);
    rep << report.dump(2) << '\n';

    write_manifest(g, "train", echoed, {out_name, "training_report.json"});
    std::cout << spec.name() << ": train RMSE " << dlmo::csv::format_g9(train_rmse) << " on "
              << set.samples.size() << " samples -> " << model_path.string() << "\n";
    return 0;
}

int cmd_evaluate(const GlobalOpts& g, const std::string& data_root, const std::string& models,
                 const std::string& model_file, const std::string& cv_spec,
                 const std::string& sweep, const std::string& features, int window, double alpha,
                 const GruFlags& gru, const ordered_json& echoed) {
    dlmo::Dataset all = dlmo::load_dataset(data_root);
    dlmo::Dataset train = load_train_split(all);
    dlmo::Dataset test = all.subset(dlmo::SplitTag::test);
    const bool have_test = !test.participants.empty();
    fs::create_directories(g.out_dir);

    // Scoring a saved model file on the held-out split.
    if (!model_file.empty()) {
        dlmo::SavedModel saved = dlmo::load_any_model(model_file);
        const dlmo::Dataset& score_ds = have_test ? test : all;
        std::vector<dlmo::Channel> chans =
            saved.is_two_step ? saved.rnn->cfg.channels : std::vector<dlmo::Channel>{};
        const int n = saved.is_two_step
                          ? (saved.rnn->cfg.use_psi ? saved.rnn->ma_cfg.n : window)
                          : saved.ma_cfg.n;
        dlmo::SampleSet set = dlmo::build_samples(score_ds, n, chans, saved.is_two_step);
        if (set.samples.empty()) throw dlmo::InsufficientData("no usable samples to score");
        std::vector<double> residuals;
        dlmo::csv::Writer w(fs::path(g.out_dir) / "score.csv");
        w.row({"participant_id", "y_true", "y_pred", "residual"});
        for (const auto& s : set.samples) {
            const double pred = saved.is_two_step
                                    ? dlmo::forward(*saved.rnn, s)
                                    : dlmo::predict(saved.ma, s.window, saved.ma_cfg);
            residuals.push_back(pred - s.phi);
            w.row({s.participant, dlmo::csv::format_g9(s.phi), dlmo::csv::format_g9(pred),
                   dlmo::csv::format_g9(pred - s.phi)});
        }
        w.close();
        std::cout << "scored " << set.samples.size() << " samples: RMSE "
                  << dlmo::csv::format_g9(dlmo::rmse(residuals)) << ", <1h "
                  << dlmo::csv::format_g9(dlmo::lt1h(residuals)) << "\n";
        write_manifest(g, "evaluate", echoed, {"score.csv"});
        return 0;
    }

    dlmo::EvalOptions opt;
    opt.seed = g.seed;
    opt.gru = gru.to_config(g.seed);
    if (cv_spec == "lopo") {
        opt.scheme = dlmo::CvScheme::lopo;
    } else if (cv_spec.rfind("kfold:", 0) == 0) {
        opt.scheme = dlmo::CvScheme::kfold;
        opt.k = std::atoi(cv_spec.c_str() + 6);
        if (opt.k < 2) throw dlmo::ConfigError("malformed --cv '" + cv_spec + "'");
    } else {
        throw dlmo::ConfigError("--cv must be lopo or kfold:<k>, got '" + cv_spec + "'");
    }

    std::vector<std::string> outputs;
    if (sweep == "features") {
        dlmo::ModelSpec base;
        base.kind = models.empty() ? dlmo::ModelSpec::Kind::rnn_ema
                                   : dlmo::model_kind_from_name(models);
        base.window = window;
        base.alpha = alpha;
        auto reports = dlmo::feature_combination_sweep(train, have_test ? &test : nullptr,
                                                       base, opt);
        dlmo::write_report_csv(fs::path(g.out_dir) / "report.csv", reports);
        dlmo::write_fold_csv(fs::path(g.out_dir) / "folds.csv", reports);
        dlmo::write_residuals_csv(fs::path(g.out_dir) / "residuals.csv", reports);
        dlmo::write_summary_json(fs::path(g.out_dir) / "summary.json", reports);
        outputs = {"report.csv", "folds.csv", "residuals.csv", "summary.json"};
    } else if (sweep.rfind("window", 0) == 0) {
        int lo = 3, hi = 8;
        if (sweep.size() > 7 && sweep[6] == ':') {
            if (std::sscanf(sweep.c_str() + 7, "%d..%d", &lo, &hi) != 2)
                throw dlmo::ConfigError("malformed --sweep '" + sweep +
                                        "', expected window:<lo>..<hi>");
        } else if (sweep != "window") {
            throw dlmo::ConfigError("malformed --sweep '" + sweep + "'");
        }
        auto entries = dlmo::window_size_sweep(
            train, {dlmo::MAKind::sma, dlmo::MAKind::ema, dlmo::MAKind::ma}, lo, hi, opt);
        dlmo::write_window_sweep_csv(fs::path(g.out_dir) / "window_sweep.csv", entries);
        outputs = {"window_sweep.csv"};
    } else if (!sweep.empty()) {
        throw dlmo::ConfigError("--sweep must be 'features' or 'window:<lo>..<hi>'");
    } else {
        std::vector<dlmo::ModelSpec> specs;
        std::string tok;
        std::istringstream iss(models.empty() ? std::string("ema,rnn-ema,rnn-24h") : models);
        while (std::getline(iss, tok, ',')) {
            if (tok.empty()) continue;
            dlmo::ModelSpec s;
            s.kind = dlmo::model_kind_from_name(tok);
            s.channels = dlmo::parse_channel_list(features);
            s.window = window;
            s.alpha = alpha;
            specs.push_back(std::move(s));
        }
        auto reports = dlmo::run_model_comparison(train, have_test ? &test : nullptr, specs, opt);
        dlmo::write_report_csv(fs::path(g.out_dir) / "report.csv", reports);
        dlmo::write_fold_csv(fs::path(g.out_dir) / "folds.csv", reports);
        dlmo::write_residuals_csv(fs::path(g.out_dir) / "residuals.csv", reports);
        dlmo::write_summary_json(fs::path(g.out_dir) / "summary.json", reports);
        outputs = {"report.csv", "folds.csv", "residuals.csv", "summary.json"};
        for (const auto& r : reports)
            std::cout << r.model << ": RMSE_val " << dlmo::csv::format_g9(r.rmse_val)
                      << (r.rmse_test ? ", RMSE_test " + dlmo::csv::format_g9(*r.rmse_test) : "")
                      << ", <1h " << dlmo::csv::format_g9(r.lt1h_fraction) << "\n";
    }
    write_manifest(g, "evaluate", echoed, outputs);
    return 0;
}

int cmd_noise_exp(const GlobalOpts& g, const std::string& data_root, const std::string& sigmas,
                  int reps, int window, double alpha, bool no_refit,
                  const ordered_json& echoed) {
    dlmo::NoiseConfig cfg;
    cfg.sigmas = parse_sigma_list(sigmas);
    cfg.repetitions = reps;
    cfg.window = window;
    cfg.alpha = alpha;
    cfg.refit = !no_refit;
    cfg.seed = g.seed;

    dlmo::Dataset ds = dlmo::load_dataset(data_root);
    auto rows = dlmo::noise_experiment(ds, cfg);
    fs::create_directories(g.out_dir);
    dlmo::write_noise_csv(fs::path(g.out_dir) / "noise.csv", rows);
    write_manifest(g, "noise-exp", echoed, {"noise.csv"});
    std::cout << "noise experiment: " << cfg.sigmas.size() << " sigmas x " << reps
              << " repetitions -> noise.csv\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DLMO estimation from two time scales of wearable data"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key = value file; command-line flags override it");

    GlobalOpts g;
    app.add_option("--seed", g.seed, "random seed")->capture_default_str();
    app.add_option("--out-dir", g.out_dir, "output directory")->capture_default_str();
    app.add_flag("--verbose", g.verbose, "progress output on stderr");
    app.fallthrough();

    // simulate
    auto* sim = app.add_subcommand("simulate", "generate a synthetic cohort");
    std::string spec_file;
    sim->add_option("--spec", spec_file, "cohort spec file (key = value)");

    // extract-dlmo
    auto* ext = app.add_subcommand("extract-dlmo", "threshold-crossing DLMO from melatonin.csv");
    std::string ext_root = ".";
    double threshold = 5.0;
    ext->add_option("--data-root", ext_root, "directory holding melatonin.csv")->required();
    ext->add_option("--threshold", threshold, "pg/mL threshold")->capture_default_str();

    // preprocess-check
    auto* pre = app.add_subcommand("preprocess-check", "report window assembly per label");
    std::string pre_root = ".";
    int pre_window = 7;
    std::string pre_features = "le,st,ac";
    pre->add_option("--data-root", pre_root)->required();
    pre->add_option("--window", pre_window, "midpoint window size")->capture_default_str();
    pre->add_option("--features", pre_features, "channel list")->capture_default_str();

    // train
    auto* tr = app.add_subcommand("train", "fit one model on the train split");
    std::string tr_root = ".", tr_model = "rnn-ema", tr_features = "le,st,ac";
    std::string tr_out = "model.json";
    int tr_window = 7;
    double tr_alpha = 0.9;
    GruFlags tr_gru;
    tr->add_option("--data-root", tr_root)->required();
    tr->add_option("--model", tr_model, "sma|ema|ma|rnn-sma|rnn-ema|rnn-ma|rnn-24h")
        ->capture_default_str();
    tr->add_option("--features", tr_features)->capture_default_str();
    tr->add_option("--window", tr_window)->capture_default_str();
    tr->add_option("--alpha", tr_alpha, "EMA decay rate")->capture_default_str();
    tr->add_option("--out", tr_out, "model file name under --out-dir")->capture_default_str();
    tr_gru.add_to(tr);

    // evaluate
    auto* ev = app.add_subcommand("evaluate", "cross-validated comparison, sweeps, or scoring");
    std::string ev_root = ".", ev_models, ev_model_file, ev_cv = "kfold:10", ev_sweep;
    std::string ev_features = "le,st,ac";
    int ev_window = 7;
    double ev_alpha = 0.9;
    GruFlags ev_gru;
    ev->add_option("--data-root", ev_root)->required();
    ev->add_option("--models", ev_models, "comma list of model names (default ema,rnn-ema,rnn-24h)");
    ev->add_option("--model-file", ev_model_file, "score a saved model on the test split");
    ev->add_option("--cv", ev_cv, "lopo or kfold:<k>")->capture_default_str();
    ev->add_option("--sweep", ev_sweep, "'features' or 'window:<lo>..<hi>'");
    ev->add_option("--features", ev_features)->capture_default_str();
    ev->add_option("--window", ev_window)->capture_default_str();
    ev->add_option("--alpha", ev_alpha)->capture_default_str();
    ev_gru.add_to(ev);

    // noise-exp
    auto* ne = app.add_subcommand("noise-exp", "moving-average noise sensitivity Monte Carlo");
    std::string ne_root = ".", ne_sigmas = "0,0.5,1,1.5,2,2.5,3,3.5,4";
    int ne_reps = 2000, ne_window = 7;
    double ne_alpha = 0.9;
    bool ne_no_refit = false;
    ne->add_option("--data-root", ne_root)->required();
    ne->add_option("--sigmas", ne_sigmas, "comma list of noise SDs (hours)")
        ->capture_default_str();
    ne->add_option("--reps", ne_reps, "repetitions per sigma")->capture_default_str();
    ne->add_option("--window", ne_window)->capture_default_str();
    ne->add_option("--alpha", ne_alpha)->capture_default_str();
    ne->add_flag("--no-refit", ne_no_refit, "keep clean-fit coefficients, only perturb features");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    g.seed_given = app.count("--seed") > 0;

    try {
        if (sim->parsed()) {
            ordered_json o{{"spec", spec_file}, {"out_dir", g.out_dir}};
            return cmd_simulate(g, spec_file, o);
        }
        if (ext->parsed()) {
            ordered_json o{{"data_root", ext_root}, {"threshold", threshold}};
            return cmd_extract_dlmo(g, ext_root, threshold, o);
        }
        if (pre->parsed()) {
            ordered_json o{{"data_root", pre_root}, {"window", pre_window},
                           {"features", pre_features}};
            return cmd_preprocess_check(g, pre_root, pre_window, pre_features, o);
        }
        if (tr->parsed()) {
            ordered_json o{{"data_root", tr_root},   {"model", tr_model},
                           {"features", tr_features}, {"window", tr_window},
                           {"alpha", tr_alpha},       {"hidden", tr_gru.hidden},
                           {"epochs", tr_gru.epochs}, {"patience", tr_gru.patience},
                           {"batch", tr_gru.batch},   {"out", tr_out}};
            return cmd_train(g, tr_root, tr_model, tr_features, tr_window, tr_alpha, tr_gru,
                             tr_out, o);
        }
        if (ev->parsed()) {
            ordered_json o{{"data_root", ev_root}, {"models", ev_models},
                           {"model_file", ev_model_file}, {"cv", ev_cv},
                           {"sweep", ev_sweep},     {"features", ev_features},
                           {"window", ev_window},   {"alpha", ev_alpha},
                           {"hidden", ev_gru.hidden}, {"epochs", ev_gru.epochs}};
            return cmd_evaluate(g, ev_root, ev_models, ev_model_file, ev_cv, ev_sweep,
                                ev_features, ev_window, ev_alpha, ev_gru, o);
        }
        if (ne->parsed()) {
            ordered_json o{{"data_root", ne_root}, {"sigmas", ne_sigmas},
                           {"reps", ne_reps},      {"window", ne_window},
                           {"alpha", ne_alpha},    {"refit", !ne_no_refit}};
            return cmd_noise_exp(g, ne_root, ne_sigmas, ne_reps, ne_window, ne_alpha,
                                 ne_no_refit, o);
        }
    } catch (const dlmo::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
