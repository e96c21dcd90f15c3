#include "dlmo/model_io.hpp"

#include <fstream>

#include <json.hpp>

#include "dlmo/errors.hpp"

namespace dlmo {

namespace {

using json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

json mat_to_json(const Mat& m) {
    return json{{"rows", m.rows}, {"cols", m.cols}, {"data", m.a}};
}

Mat mat_from_json(const json& j, const char* name) {
    if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data"))
        throw SchemaVersionError(std::string("malformed tensor '") + name + "'");
    Mat m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
    std::vector<double> data = j.at("data").get<std::vector<double>>();
    if (data.size() != m.rows * m.cols)
        throw SchemaVersionError(std::string("tensor '") + name + "' has wrong element count");
    m.a = std::move(data);
    return m;
}

json ma_to_json(const MAParams& params, const MAConfig& cfg) {
    std::vector<double> flat = params.weights;
    flat.push_back(params.intercept);
    return json{{"kind", ma_kind_name(cfg.kind)},
                {"n", cfg.n},
                {"alpha", cfg.alpha},
                {"params", flat}};  // weights..., intercept last
}

void ma_from_json(const json& j, MAParams& params, MAConfig& cfg) {
    try {
        cfg.kind = ma_kind_from_name(j.at("kind").get<std::string>());
    } catch (const ConfigError& e) {
        throw SchemaVersionError(e.what());
    }
    cfg.n = j.at("n").get<int>();
    cfg.alpha = j.at("alpha").get<double>();
    std::vector<double> flat = j.at("params").get<std::vector<double>>();
    const std::size_t expect = static_cast<std::size_t>(param_count(cfg));
    if (flat.size() != expect)
        throw SchemaVersionError("moving-average params length " + std::to_string(flat.size()) +
                                 ", expected " + std::to_string(expect));
    params.intercept = flat.back();
    flat.pop_back();
    params.weights = std::move(flat);
}

json parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open model file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw IoError("cannot parse model file " + path.string() + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("schema_version"))
        throw SchemaVersionError("model file " + path.string() + " lacks schema_version");
    if (j.at("schema_version").get<int>() != kSchemaVersion)
        throw SchemaVersionError("unsupported schema_version in " + path.string());
    return j;
}

void write_file(const json& j, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write model file " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed for " + path.string());
}

TwoStepModel two_step_from_json(const json& j) {
    TwoStepModel m;
    const json& g = j.at("gru");
    m.cfg.hidden_size = g.at("hidden_size").get<int>();
    m.cfg.use_psi = g.at("use_psi").get<bool>();
    m.cfg.lr_stage2 = g.at("lr_stage2").get<double>();
    m.cfg.lr_stage3 = g.at("lr_stage3").get<double>();
    m.cfg.max_epochs = g.at("max_epochs").get<int>();
    m.cfg.patience = g.at("patience").get<int>();
    m.cfg.batch_size = g.at("batch_size").get<int>();
    m.cfg.val_fraction = g.at("val_fraction").get<double>();
    m.cfg.seed = g.at("seed").get<std::uint64_t>();
    m.cfg.channels.clear();
    for (const auto& c : g.at("channels")) {
        try {
            m.cfg.channels.push_back(channel_from_name(c.get<std::string>()));
        } catch (const ValidationError& e) {
            throw SchemaVersionError(e.what());
        }
    }
    if (m.cfg.channels.empty()) throw SchemaVersionError("model has an empty channel list");

    if (m.cfg.use_psi) {
        if (!j.contains("ma")) throw SchemaVersionError("two-step model lacks 'ma' block");
        ma_from_json(j.at("ma"), m.ma, m.ma_cfg);
    }

    const json& w = j.at("weights");
    m.w.wz = mat_from_json(w.at("wz"), "wz");
    m.w.wr = mat_from_json(w.at("wr"), "wr");
    m.w.wh = mat_from_json(w.at("wh"), "wh");
    m.w.uz = mat_from_json(w.at("uz"), "uz");
    m.w.ur = mat_from_json(w.at("ur"), "ur");
    m.w.uh = mat_from_json(w.at("uh"), "uh");
    m.w.bz = w.at("bz").get<Vec>();
    m.w.br = w.at("br").get<Vec>();
    m.w.bh = w.at("bh").get<Vec>();
    m.w.readout_w = w.at("readout_w").get<Vec>();
    m.w.readout_b = w.at("readout_b").get<double>();

    const json& s = j.at("standardization");
    m.w.feat_mean = s.at("feature_mean").get<Vec>();
    m.w.feat_std = s.at("feature_std").get<Vec>();
    m.w.psi_mean = s.at("psi_mean").get<double>();
    m.w.psi_std = s.at("psi_std").get<double>();

    const auto hs = static_cast<std::size_t>(m.cfg.hidden_size);
    const auto in = static_cast<std::size_t>(m.cfg.input_size());
    if (m.w.wz.rows != hs || m.w.wz.cols != in || m.w.uz.rows != hs || m.w.uz.cols != hs ||
        !m.w.wz.same_shape(m.w.wr) || !m.w.wz.same_shape(m.w.wh) ||
        !m.w.uz.same_shape(m.w.ur) || !m.w.uz.same_shape(m.w.uh) ||
        m.w.bz.size() != hs || m.w.br.size() != hs || m.w.bh.size() != hs ||
        m.w.readout_w.size() != hs + 1 ||
        m.w.feat_mean.size() != m.cfg.channels.size() ||
        m.w.feat_std.size() != m.cfg.channels.size())
        throw SchemaVersionError("model weight shapes do not match its config");
    for (double sd : m.w.feat_std)
        if (!(sd > 0.0)) throw SchemaVersionError("feature standardization std must be > 0");
    if (!(m.w.psi_std > 0.0)) throw SchemaVersionError("psi standardization std must be > 0");
    return m;
}

}  // namespace

void save_model(const TwoStepModel& m, const std::filesystem::path& path) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = m.kind_name();
    if (m.cfg.use_psi) j["ma"] = ma_to_json(m.ma, m.ma_cfg);
    json ch = json::array();
    for (Channel c : m.cfg.channels) ch.push_back(channel_name(c));
    j["gru"] = json{{"hidden_size", m.cfg.hidden_size},
                    {"channels", ch},
                    {"use_psi", m.cfg.use_psi},
                    {"lr_stage2", m.cfg.lr_stage2},
                    {"lr_stage3", m.cfg.lr_stage3},
                    {"max_epochs", m.cfg.max_epochs},
                    {"patience", m.cfg.patience},
                    {"batch_size", m.cfg.batch_size},
                    {"val_fraction", m.cfg.val_fraction},
                    {"seed", m.cfg.seed}};
    j["weights"] = json{{"wz", mat_to_json(m.w.wz)},   {"wr", mat_to_json(m.w.wr)},
                        {"wh", mat_to_json(m.w.wh)},   {"uz", mat_to_json(m.w.uz)},
                        {"ur", mat_to_json(m.w.ur)},   {"uh", mat_to_json(m.w.uh)},
                        {"bz", m.w.bz},                {"br", m.w.br},
                        {"bh", m.w.bh},                {"readout_w", m.w.readout_w},
                        {"readout_b", m.w.readout_b}};
    j["standardization"] = json{{"feature_mean", m.w.feat_mean},
                                {"feature_std", m.w.feat_std},
                                {"psi_mean", m.w.psi_mean},
                                {"psi_std", m.w.psi_std}};
    write_file(j, path);
}

TwoStepModel load_model(const std::filesystem::path& path) {
    json j = parse_file(path);
    try {
        const std::string kind = j.at("kind").get<std::string>();
        if (kind.rfind("rnn-", 0) != 0)
            throw SchemaVersionError(path.string() + " holds a '" + kind +
                                     "' model, expected a two-step model");
        return two_step_from_json(j);
    } catch (const json::exception& e) {
        throw SchemaVersionError("malformed model file " + path.string() + ": " + e.what());
    }
}

void save_mavg_model(const MAParams& params, const MAConfig& cfg,
                     const std::filesystem::path& path) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = ma_kind_name(cfg.kind);
    j["ma"] = ma_to_json(params, cfg);
    write_file(j, path);
}

SavedModel load_any_model(const std::filesystem::path& path) {
    json j = parse_file(path);
    SavedModel out;
    try {
        out.kind = j.at("kind").get<std::string>();
        if (out.kind.rfind("rnn-", 0) == 0) {
            out.is_two_step = true;
            out.rnn = two_step_from_json(j);
        } else {
            ma_from_json(j.at("ma"), out.ma, out.ma_cfg);
            if (ma_kind_name(out.ma_cfg.kind) != out.kind)
                throw SchemaVersionError("model kind does not match its ma block in " +
                                         path.string());
        }
    } catch (const json::exception& e) {
        throw SchemaVersionError("malformed model file " + path.string() + ": " + e.what());
    }
    return out;
}

}  // namespace dlmo
