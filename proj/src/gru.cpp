#include "dlmo/gru.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "dlmo/errors.hpp"
#include "dlmo/kernels.hpp"
#include "dlmo/rng.hpp"

namespace dlmo {

namespace {

constexpr int kSteps = 24;

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void check_shapes(const TwoStepModel& m) {
    const auto h = static_cast<std::size_t>(m.cfg.hidden_size);
    const auto in = static_cast<std::size_t>(m.cfg.input_size());
    auto bad = [&](const Mat& mat, std::size_t r, std::size_t c) {
        return mat.rows != r || mat.cols != c;
    };
    if (bad(m.w.wz, h, in) || bad(m.w.wr, h, in) || bad(m.w.wh, h, in) ||
        bad(m.w.uz, h, h) || bad(m.w.ur, h, h) || bad(m.w.uh, h, h) ||
        m.w.bz.size() != h || m.w.br.size() != h || m.w.bh.size() != h ||
        m.w.readout_w.size() != h + 1 ||
        m.w.feat_mean.size() != m.cfg.channels.size() ||
        m.w.feat_std.size() != m.cfg.channels.size())
        throw ShapeMismatch("model weight shapes do not match its config");
}

struct ForwardCache {
    double psi_raw = 0.0;
    double psi_std = 0.0;
    std::vector<Vec> inputs;           // kSteps x I
    std::vector<Vec> z, r, hcand;      // kSteps x H
    std::vector<Vec> h;                // kSteps+1 x H, h[0] = 0
    double prediction = 0.0;
};

// Column mapping from the model's channel list into the day window.
std::vector<int> channel_columns(const TwoStepModel& m, const DayWindow& day) {
    std::vector<int> cols;
    for (Channel c : m.cfg.channels) {
        int col = day.channel_column(c);
        if (col < 0)
            throw ShapeMismatch("day window lacks channel " + std::string(channel_name(c)));
        cols.push_back(col);
    }
    return cols;
}

void gru_step(const GruWeights& w, const Vec& h_prev, const Vec& u,
              Vec& z, Vec& r, Vec& hcand, Vec& h_next, Vec& rh) {
    const std::size_t hs = h_prev.size();
    z.assign(w.bz.begin(), w.bz.end());
    r.assign(w.br.begin(), w.br.end());
    kernels::matvec_acc(w.wz.data(), hs, u.size(), u.data(), z.data());
    kernels::matvec_acc(w.uz.data(), hs, hs, h_prev.data(), z.data());
    kernels::matvec_acc(w.wr.data(), hs, u.size(), u.data(), r.data());
    kernels::matvec_acc(w.ur.data(), hs, hs, h_prev.data(), r.data());
    for (std::size_t i = 0; i < hs; ++i) {
        z[i] = sigmoid(z[i]);
        r[i] = sigmoid(r[i]);
    }
    rh.resize(hs);
    for (std::size_t i = 0; i < hs; ++i) rh[i] = r[i] * h_prev[i];
    hcand.assign(w.bh.begin(), w.bh.end());
    kernels::matvec_acc(w.wh.data(), hs, u.size(), u.data(), hcand.data());
    kernels::matvec_acc(w.uh.data(), hs, hs, rh.data(), hcand.data());
    for (std::size_t i = 0; i < hs; ++i) hcand[i] = std::tanh(hcand[i]);
    h_next.resize(hs);
    for (std::size_t i = 0; i < hs; ++i)
        h_next[i] = (1.0 - z[i]) * h_prev[i] + z[i] * hcand[i];
}

ForwardCache forward_cached(const TwoStepModel& m, const DayWindow& day,
                            const MidpointWindow& win) {
    check_shapes(m);
    if (day.features.rows != kSteps)
        throw ShapeMismatch("day window must have 24 hourly rows");
    const std::vector<int> cols = channel_columns(m, day);
    const auto hs = static_cast<std::size_t>(m.cfg.hidden_size);
    const auto in = static_cast<std::size_t>(m.cfg.input_size());

    ForwardCache c;
    if (m.cfg.use_psi) {
        c.psi_raw = predict(m.ma, win, m.ma_cfg);
        c.psi_std = (c.psi_raw - m.w.psi_mean) / m.w.psi_std;
    }

    c.inputs.resize(kSteps);
    c.z.resize(kSteps);
    c.r.resize(kSteps);
    c.hcand.resize(kSteps);
    c.h.assign(kSteps + 1, Vec(hs, 0.0));
    Vec rh;
    for (int t = 0; t < kSteps; ++t) {
        Vec& u = c.inputs[static_cast<std::size_t>(t)];
        u.resize(in);
        u[0] = static_cast<double>(t) / 24.0;
        u[1] = c.psi_std;
        for (std::size_t f = 0; f < cols.size(); ++f)
            u[2 + f] = (day.features(static_cast<std::size_t>(t),
                                     static_cast<std::size_t>(cols[f])) -
                        m.w.feat_mean[f]) /
                       m.w.feat_std[f];
        gru_step(m.w, c.h[static_cast<std::size_t>(t)], u, c.z[static_cast<std::size_t>(t)],
                 c.r[static_cast<std::size_t>(t)], c.hcand[static_cast<std::size_t>(t)],
                 c.h[static_cast<std::size_t>(t + 1)], rh);
    }

    const Vec& h_final = c.h[kSteps];
    c.prediction = kernels::dot(m.w.readout_w.data(), h_final.data(), hs) +
                   m.w.readout_w[hs] * c.psi_std + m.w.readout_b;
    return c;
}

GruGradients zero_gradients(const TwoStepModel& m) {
    const auto h = static_cast<std::size_t>(m.cfg.hidden_size);
    const auto in = static_cast<std::size_t>(m.cfg.input_size());
    GruGradients g;
    g.wz = Mat(h, in);
    g.wr = Mat(h, in);
    g.wh = Mat(h, in);
    g.uz = Mat(h, h);
    g.ur = Mat(h, h);
    g.uh = Mat(h, h);
    g.bz.assign(h, 0.0);
    g.br.assign(h, 0.0);
    g.bh.assign(h, 0.0);
    g.readout_w.assign(h + 1, 0.0);
    g.ma_weights.assign(m.ma.weights.size(), 0.0);
    return g;
}

// Backprop through time for one sample; dpred is the upstream dL/dphi_hat.
void accumulate_backward(const TwoStepModel& m, const ForwardCache& c,
                         const MidpointWindow& win, double dpred, bool include_ma,
                         GruGradients& g) {
    const auto hs = static_cast<std::size_t>(m.cfg.hidden_size);
    const auto in = static_cast<std::size_t>(m.cfg.input_size());

    kernels::axpy(hs, dpred, c.h[kSteps].data(), g.readout_w.data());
    g.readout_w[hs] += dpred * c.psi_std;
    g.readout_b += dpred;

    Vec dh(hs);
    for (std::size_t i = 0; i < hs; ++i) dh[i] = dpred * m.w.readout_w[i];
    double dpsi_std = dpred * m.w.readout_w[hs];

    Vec dz(hs), dhc(hs), dh_prev(hs), dac(hs), daz(hs), dar(hs), drh(hs), rh(hs), du(in);
    for (int t = kSteps - 1; t >= 0; --t) {
        const Vec& h_prev = c.h[static_cast<std::size_t>(t)];
        const Vec& z = c.z[static_cast<std::size_t>(t)];
        const Vec& r = c.r[static_cast<std::size_t>(t)];
        const Vec& hc = c.hcand[static_cast<std::size_t>(t)];
        const Vec& u = c.inputs[static_cast<std::size_t>(t)];

        for (std::size_t i = 0; i < hs; ++i) {
            dz[i] = dh[i] * (hc[i] - h_prev[i]);
            dhc[i] = dh[i] * z[i];
            dh_prev[i] = dh[i] * (1.0 - z[i]);
            dac[i] = dhc[i] * (1.0 - hc[i] * hc[i]);
            daz[i] = dz[i] * z[i] * (1.0 - z[i]);
            rh[i] = r[i] * h_prev[i];
        }

        // candidate path
        for (std::size_t i = 0; i < hs; ++i) g.bh[i] += dac[i];
        kernels::ger_acc(g.wh.data(), hs, in, dac.data(), u.data());
        kernels::ger_acc(g.uh.data(), hs, hs, dac.data(), rh.data());
        std::fill(drh.begin(), drh.end(), 0.0);
        kernels::matvec_t_acc(m.w.uh.data(), hs, hs, dac.data(), drh.data());
        for (std::size_t i = 0; i < hs; ++i) {
            const double dr = drh[i] * h_prev[i];
            dar[i] = dr * r[i] * (1.0 - r[i]);
            dh_prev[i] += drh[i] * r[i];
        }

        // reset gate
        for (std::size_t i = 0; i < hs; ++i) g.br[i] += dar[i];
        kernels::ger_acc(g.wr.data(), hs, in, dar.data(), u.data());
        kernels::ger_acc(g.ur.data(), hs, hs, dar.data(), h_prev.data());
        kernels::matvec_t_acc(m.w.ur.data(), hs, hs, dar.data(), dh_prev.data());

        // update gate
        for (std::size_t i = 0; i < hs; ++i) g.bz[i] += daz[i];
        kernels::ger_acc(g.wz.data(), hs, in, daz.data(), u.data());
        kernels::ger_acc(g.uz.data(), hs, hs, daz.data(), h_prev.data());
        kernels::matvec_t_acc(m.w.uz.data(), hs, hs, daz.data(), dh_prev.data());

        if (m.cfg.use_psi) {
            std::fill(du.begin(), du.end(), 0.0);
            kernels::matvec_t_acc(m.w.wz.data(), hs, in, daz.data(), du.data());
            kernels::matvec_t_acc(m.w.wr.data(), hs, in, dar.data(), du.data());
            kernels::matvec_t_acc(m.w.wh.data(), hs, in, dac.data(), du.data());
            dpsi_std += du[1];
        }
        dh = dh_prev;
    }

    if (include_ma && m.cfg.use_psi) {
        const double dpsi = dpsi_std / m.w.psi_std;
        Vec f = feature_vector(win, m.ma_cfg);
        kernels::axpy(f.size(), dpsi, f.data(), g.ma_weights.data());
        g.ma_intercept += dpsi;
    }
}

GruGradients backward_impl(const TwoStepModel& m, std::span<const TrainSample> batch,
                           bool include_ma, double* loss_out) {
    GruGradients g = zero_gradients(m);
    double loss = 0.0;
    const double inv_n = batch.empty() ? 0.0 : 1.0 / static_cast<double>(batch.size());
    for (const TrainSample& s : batch) {
        ForwardCache c = forward_cached(m, s.day, s.window);
        const double err = c.prediction - s.phi;
        loss += err * err * inv_n;
        accumulate_backward(m, c, s.window, 2.0 * err * inv_n, include_ma, g);
    }
    if (loss_out) *loss_out = loss;
    return g;
}

}  // namespace

std::string TwoStepModel::kind_name() const {
    return cfg.use_psi ? std::string("rnn-") + ma_kind_name(ma_cfg.kind) : "rnn-24h";
}

int trainable_param_count(const TwoStepModel& m) {
    int k = 0;
    for (const Mat* mat : {&m.w.wz, &m.w.wr, &m.w.wh, &m.w.uz, &m.w.ur, &m.w.uh})
        k += static_cast<int>(mat->size());
    k += static_cast<int>(m.w.bz.size() + m.w.br.size() + m.w.bh.size());
    k += static_cast<int>(m.w.readout_w.size()) + 1;  // + readout bias
    if (m.cfg.use_psi)
        k += static_cast<int>(m.ma.weights.size()) + 1;
    else
        k -= 1;  // the psi readout entry never receives gradient
    return k;
}

Vec gru_cell(const GruWeights& w, const Vec& hidden, const Vec& input) {
    const std::size_t hs = hidden.size();
    if (w.wz.rows != hs || w.wz.cols != input.size() || w.uz.rows != hs || w.uz.cols != hs ||
        w.bz.size() != hs || !w.wz.same_shape(w.wr) || !w.wz.same_shape(w.wh) ||
        !w.uz.same_shape(w.ur) || !w.uz.same_shape(w.uh))
        throw ShapeMismatch("gru_cell: weight shapes do not match state/input sizes");
    Vec z, r, hcand, h_next, rh;
    gru_step(w, hidden, input, z, r, hcand, h_next, rh);
    return h_next;
}

double forward(const TwoStepModel& m, const DayWindow& day, const MidpointWindow& win) {
    return forward_cached(m, day, win).prediction;
}

double forward(const TwoStepModel& m, const TrainSample& s) {
    return forward(m, s.day, s.window);
}

GruGradients backward(const TwoStepModel& m, std::span<const TrainSample> batch,
                      bool include_ma) {
    return backward_impl(m, batch, include_ma, nullptr);
}

double mse_loss(const TwoStepModel& m, std::span<const TrainSample> batch) {
    double loss = 0.0;
    for (const TrainSample& s : batch) {
        const double err = forward(m, s) - s.phi;
        loss += err * err;
    }
    return batch.empty() ? 0.0 : loss / static_cast<double>(batch.size());
}

std::vector<std::span<double>> trainable_views(TwoStepModel& m, bool include_ma) {
    std::vector<std::span<double>> v;
    for (Mat* mat : {&m.w.wz, &m.w.wr, &m.w.wh, &m.w.uz, &m.w.ur, &m.w.uh})
        v.emplace_back(mat->data(), mat->size());
    for (Vec* b : {&m.w.bz, &m.w.br, &m.w.bh}) v.emplace_back(b->data(), b->size());
    v.emplace_back(m.w.readout_w.data(), m.w.readout_w.size());
    v.emplace_back(&m.w.readout_b, 1);
    if (include_ma && m.cfg.use_psi) {
        v.emplace_back(m.ma.weights.data(), m.ma.weights.size());
        v.emplace_back(&m.ma.intercept, 1);
    }
    return v;
}

std::vector<std::span<const double>> gradient_views(const GruGradients& g, bool include_ma) {
    std::vector<std::span<const double>> v;
    for (const Mat* mat : {&g.wz, &g.wr, &g.wh, &g.uz, &g.ur, &g.uh})
        v.emplace_back(mat->data(), mat->size());
    for (const Vec* b : {&g.bz, &g.br, &g.bh}) v.emplace_back(b->data(), b->size());
    v.emplace_back(g.readout_w.data(), g.readout_w.size());
    v.emplace_back(&g.readout_b, 1);
    if (include_ma) {
        v.emplace_back(g.ma_weights.data(), g.ma_weights.size());
        v.emplace_back(&g.ma_intercept, 1);
    }
    return v;
}

TwoStepModel TwoStepModel::psi_passthrough(const MAParams& ma, const MAConfig& ma_cfg,
                                           int hidden_size) {
    TwoStepModel m;
    m.ma_cfg = ma_cfg;
    m.ma = ma;
    m.cfg.hidden_size = hidden_size;
    m.cfg.use_psi = true;
    const auto h = static_cast<std::size_t>(hidden_size);
    const auto in = static_cast<std::size_t>(m.cfg.input_size());
    m.w.wz = Mat(h, in);
    m.w.wr = Mat(h, in);
    m.w.wh = Mat(h, in);
    m.w.uz = Mat(h, h);
    m.w.ur = Mat(h, h);
    m.w.uh = Mat(h, h);
    m.w.bz.assign(h, 0.0);
    m.w.br.assign(h, 0.0);
    m.w.bh.assign(h, 0.0);
    // With zero weights and h_0 = 0 the hidden state stays 0 on every step,
    // so the readout reduces to 1 * psi_std. Identity standardization makes
    // psi_std == psi, hence prediction == moving-average output bitwise.
    m.w.readout_w.assign(h + 1, 0.0);
    m.w.readout_w[h] = 1.0;
    m.w.readout_b = 0.0;
    m.w.feat_mean.assign(m.cfg.channels.size(), 0.0);
    m.w.feat_std.assign(m.cfg.channels.size(), 1.0);
    m.w.psi_mean = 0.0;
    m.w.psi_std = 1.0;
    return m;
}

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

namespace {

// Adam with bias correction; the adaptive per-parameter scaling keeps the
// same learning rate usable for gate weights and readout.
class Adam {
public:
    Adam(double lr, std::size_t n) : lr_(lr), m_(n, 0.0), v_(n, 0.0) {}

    void step(std::vector<std::span<double>>& params,
              const std::vector<std::span<const double>>& grads) {
        ++t_;
        const double c1 = 1.0 - std::pow(kBeta1, t_);
        const double c2 = 1.0 - std::pow(kBeta2, t_);
        std::size_t k = 0;
        for (std::size_t s = 0; s < params.size(); ++s) {
            std::span<double> p = params[s];
            std::span<const double> g = grads[s];
            for (std::size_t i = 0; i < p.size(); ++i, ++k) {
                m_[k] = kBeta1 * m_[k] + (1.0 - kBeta1) * g[i];
                v_[k] = kBeta2 * v_[k] + (1.0 - kBeta2) * g[i] * g[i];
                p[i] -= lr_ * (m_[k] / c1) / (std::sqrt(v_[k] / c2) + kEps);
            }
        }
    }

private:
    static constexpr double kBeta1 = 0.9;
    static constexpr double kBeta2 = 0.999;
    static constexpr double kEps = 1e-8;
    double lr_;
    int t_ = 0;
    std::vector<double> m_, v_;
};

double val_rmse(const TwoStepModel& m, std::span<const TrainSample> val) {
    double ss = 0.0;
    for (const TrainSample& s : val) {
        const double err = forward(m, s) - s.phi;
        ss += err * err;
    }
    return std::sqrt(ss / static_cast<double>(val.size()));
}

struct Checkpoint {
    GruWeights w;
    MAParams ma;
    double rmse = std::numeric_limits<double>::infinity();
};

void take_checkpoint(const TwoStepModel& m, double rmse, Checkpoint& best) {
    if (rmse < best.rmse) {
        best.w = m.w;
        best.ma = m.ma;
        best.rmse = rmse;
    }
}

void run_stage(TwoStepModel& m, const std::vector<TrainSample>& train,
               const std::vector<TrainSample>& val, double lr, bool include_ma,
               const char* stage, Rng& rng, Checkpoint& best) {
    auto params = trainable_views(m, include_ma);
    std::size_t total = 0;
    for (const auto& p : params) total += p.size();
    Adam opt(lr, total);

    std::vector<std::size_t> order(train.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    const std::size_t batch =
        m.cfg.batch_size <= 0 ? train.size()
                              : std::min<std::size_t>(static_cast<std::size_t>(m.cfg.batch_size),
                                                      train.size());
    int patience_left = m.cfg.patience;
    std::vector<TrainSample> scratch;

    for (int epoch = 1; epoch <= m.cfg.max_epochs; ++epoch) {
        Rng epoch_rng = rng.substream(Rng::hash_str(stage) ^ static_cast<std::uint64_t>(epoch));
        epoch_rng.shuffle(order);
        for (std::size_t off = 0; off < order.size(); off += batch) {
            scratch.clear();
            for (std::size_t i = off; i < std::min(off + batch, order.size()); ++i)
                scratch.push_back(train[order[i]]);
            double loss = 0.0;
            GruGradients g = backward_impl(m, scratch, include_ma, &loss);
            if (!std::isfinite(loss)) throw NonFiniteLoss(epoch, stage);
            auto gviews = gradient_views(g, include_ma && m.cfg.use_psi);
            // For psi-free models trainable_views drops the MA block too,
            // so the two lists always align.
            auto pviews = trainable_views(m, include_ma);
            opt.step(pviews, gviews);
        }
        const double rmse = val_rmse(m, val);
        if (!std::isfinite(rmse)) throw NonFiniteLoss(epoch, stage);
        if (rmse < best.rmse - 1e-12) {
            take_checkpoint(m, rmse, best);
            patience_left = m.cfg.patience;
        } else if (--patience_left <= 0) {
            break;
        }
    }
}

}  // namespace

TwoStepModel train_three_stage(const std::vector<TrainSample>& data, const GruConfig& cfg,
                               const MAConfig& ma_cfg) {
    if (data.empty()) throw InsufficientData("training split is empty");

    std::set<std::string> id_set;
    for (const TrainSample& s : data) id_set.insert(s.participant);
    if (id_set.size() < 2)
        throw InsufficientData("need >= 2 participants for the internal validation split");
    std::vector<std::string> ids(id_set.begin(), id_set.end());

    Rng rng(cfg.seed);
    Rng split_rng = rng.substream(0x5117ULL);
    split_rng.shuffle(ids);
    std::size_t n_val = static_cast<std::size_t>(
        std::max(1.0, std::floor(cfg.val_fraction * static_cast<double>(ids.size()) + 0.5)));
    n_val = std::min(n_val, ids.size() - 1);
    std::set<std::string> val_ids(ids.begin(), ids.begin() + static_cast<long>(n_val));

    std::vector<TrainSample> train, val;
    for (const TrainSample& s : data)
        (val_ids.count(s.participant) ? val : train).push_back(s);

    TwoStepModel m;
    m.ma_cfg = ma_cfg;
    m.cfg = cfg;
    m.cfg.channels = canonical_channels(cfg.channels);
    if (m.cfg.channels.empty()) throw ConfigError("channel set is empty");

    // Stage 1: least squares on the inner-train midpoints.
    if (m.cfg.use_psi) {
        std::vector<MidpointWindow> wins;
        std::vector<double> phi;
        for (const TrainSample& s : train) {
            wins.push_back(s.window);
            phi.push_back(s.phi);
        }
        m.ma = fit_least_squares(wins, phi, ma_cfg);
    } else {
        m.ma.weights.clear();
        m.ma.intercept = 0.0;
    }

    // Standardization statistics from the inner-train split only.
    const std::size_t f_count = m.cfg.channels.size();
    m.w.feat_mean.assign(f_count, 0.0);
    m.w.feat_std.assign(f_count, 1.0);
    for (std::size_t f = 0; f < f_count; ++f) {
        double sum = 0.0, sumsq = 0.0;
        std::size_t n = 0;
        for (const TrainSample& s : train) {
            int col = s.day.channel_column(m.cfg.channels[f]);
            if (col < 0)
                throw ShapeMismatch("training sample lacks channel " +
                                    std::string(channel_name(m.cfg.channels[f])));
            for (int h = 0; h < kSteps; ++h) {
                const double v = s.day.features(static_cast<std::size_t>(h),
                                                static_cast<std::size_t>(col));
                sum += v;
                sumsq += v * v;
                ++n;
            }
        }
        const double mean = sum / static_cast<double>(n);
        const double var = std::max(0.0, sumsq / static_cast<double>(n) - mean * mean);
        m.w.feat_mean[f] = mean;
        m.w.feat_std[f] = var > 1e-24 ? std::sqrt(var) : 1.0;
    }
    double phi_sum = 0.0, phi_sumsq = 0.0;
    for (const TrainSample& s : train) {
        phi_sum += s.phi;
        phi_sumsq += s.phi * s.phi;
    }
    const double phi_mean = phi_sum / static_cast<double>(train.size());
    const double phi_var =
        std::max(0.0, phi_sumsq / static_cast<double>(train.size()) - phi_mean * phi_mean);
    m.w.psi_mean = phi_mean;
    m.w.psi_std = phi_var > 1e-24 ? std::sqrt(phi_var) : 1.0;

    // Weight init: gates uniform in [-1/sqrt(H), 1/sqrt(H)], readout weights
    // zero, readout bias at the training-mean DLMO so the initial model
    // predicts a sane constant.
    const auto hs = static_cast<std::size_t>(m.cfg.hidden_size);
    const auto in = static_cast<std::size_t>(m.cfg.input_size());
    const double bound = 1.0 / std::sqrt(static_cast<double>(m.cfg.hidden_size));
    Rng init_rng = rng.substream(0x1217ULL);
    auto init_mat = [&](Mat& mat, std::size_t r, std::size_t c) {
        mat = Mat(r, c);
        for (double& x : mat.a) x = init_rng.uniform(-bound, bound);
    };
    auto init_vec = [&](Vec& v, std::size_t n) {
        v.resize(n);
        for (double& x : v) x = init_rng.uniform(-bound, bound);
    };
    init_mat(m.w.wz, hs, in);
    init_mat(m.w.wr, hs, in);
    init_mat(m.w.wh, hs, in);
    init_mat(m.w.uz, hs, hs);
    init_mat(m.w.ur, hs, hs);
    init_mat(m.w.uh, hs, hs);
    init_vec(m.w.bz, hs);
    init_vec(m.w.br, hs);
    init_vec(m.w.bh, hs);
    m.w.readout_w.assign(hs + 1, 0.0);
    m.w.readout_b = phi_mean;

    Checkpoint best;
    take_checkpoint(m, val_rmse(m, val), best);

    // Stage 2: moving average frozen, GRU + readout trained.
    run_stage(m, train, val, m.cfg.lr_stage2, /*include_ma=*/false, "stage2", rng, best);

    // Stage 3: fine-tune everything (including the MA parameters through
    // psi) from the best stage-2 checkpoint at the lower learning rate.
    m.w = best.w;
    m.ma = best.ma;
    run_stage(m, train, val, m.cfg.lr_stage3, /*include_ma=*/true, "stage3", rng, best);

    m.w = best.w;
    m.ma = best.ma;
    return m;
}

}  // namespace dlmo
