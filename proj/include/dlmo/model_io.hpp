#pragma once

#include <filesystem>
#include <optional>

#include "dlmo/gru.hpp"
#include "dlmo/mavg.hpp"

namespace dlmo {

// Model files are JSON with a schema_version and a "kind" of either a
// moving-average model (sma|ema|ma) or a two-step model (rnn-sma|rnn-ema|
// rnn-ma|rnn-24h). save_model/load_model in gru.hpp cover the two-step
// case; the helpers here cover plain moving-average files and dispatch.

void save_mavg_model(const MAParams& params, const MAConfig& cfg,
                     const std::filesystem::path& path);

struct SavedModel {
    bool is_two_step = false;
    MAConfig ma_cfg;      // valid when !is_two_step
    MAParams ma;          // valid when !is_two_step
    std::optional<TwoStepModel> rnn;  // valid when is_two_step
    std::string kind;     // as stored in the file
};

SavedModel load_any_model(const std::filesystem::path& path);

}  // namespace dlmo
