#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dlmo/ingest.hpp"
#include "dlmo/rng.hpp"

namespace dlmo {

// Synthetic cohorts with known ground truth. The latent circadian phase of
// each participant is a per-day random walk nudged by evening-light
// deviations; sleep midpoints track the phase with additive noise; the
// DLMO label on a day adds the acute effect of that evening's light, which
// is visible only in the sensor stream. Melatonin profiles are logistic
// curves whose threshold crossing equals the true DLMO exactly.

struct MelatoninShape {
    double baseline = 1.0;       // pg/mL, must stay below the 5 pg/mL threshold
    double peak = 9.0;           // pg/mL
    double rise_scale_hours = 1.0;
};

enum class LabelMode { last_day, every_day };

struct CohortSpec {
    int n_participants = 24;
    int days_per_participant = 14;
    double phase_drift_sd = 0.35;    // h/day random-walk step
    double sleep_noise_sd = 0.30;    // h, sigma_T on observed midpoints
    double light_coupling = 0.0;     // h of phase shift per unit evening-light deviation
    double evening_light_var = 0.5;  // relative evening LE amplitude modulation
    double le_noise_sd = 4.0;        // lux
    double st_noise_sd = 0.15;       // degC
    double ac_noise_sd = 0.03;       // g
    double gap_rate_per_day = 0.0;   // expected missing runs per channel-day
    double gap_mean_hours = 1.5;
    double long_gap_prob = 0.0;      // chance a gap is drawn from an 18 h-mean tail
    MelatoninShape melatonin;
    LabelMode labels = LabelMode::last_day;
    double train_fraction = 0.8;     // leading share of participants tagged train
    bool generate_sensors = true;    // in-memory cohorts may skip minute streams
    std::uint64_t seed = 1;
};

struct GroundTruthRow {
    std::string participant;
    int day_index = 0;
    double latent_phase = 0.0;   // slow-walk phase, hours relative to own midnight
    double true_midpoint = 0.0;  // noise-free sleep midpoint, same axis
    double true_dlmo = 0.0;      // latent phase plus the acute evening-light term
};

struct GroundTruth {
    std::vector<GroundTruthRow> rows;
    const GroundTruthRow* find(const std::string& participant, int day_index) const;
};

// Throws SpecError (naming the field) on invalid specs. Deterministic per
// seed; every stored real is quantized to the 9-significant-digit file
// representation so write_dataset -> load_dataset round-trips exactly.
std::pair<Dataset, GroundTruth> generate_cohort(const CohortSpec& spec);

// Emit the ingest CSV schema plus ground_truth.csv and splits.csv.
void write_dataset(const Dataset& ds, const GroundTruth& gt,
                   const std::filesystem::path& root);

// Logistic melatonin profile sampled on [start_rel, end_rel] hours
// (relative to collection-day midnight) with the threshold crossing placed
// analytically at true_dlmo.
MelatoninProfile make_melatonin_profile(const std::string& participant, const Date& day,
                                        double true_dlmo, const MelatoninShape& shape,
                                        double start_rel = 15.0, double end_rel = 31.0,
                                        double step_hours = 1.0);

// Key = value spec files for the simulate command. Unknown keys raise
// SpecError naming the key.
CohortSpec parse_spec_file(const std::filesystem::path& path);

}  // namespace dlmo
