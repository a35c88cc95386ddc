#pragma once

// Adam on 1 - Q with plateau early stopping, and multi-seed aggregation.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <tuple>
#include <vector>

#include "entforge/gradient.hpp"
#include "entforge/measures.hpp"
#include "entforge/parallel.hpp"
#include "entforge/random.hpp"

namespace entforge {

struct TrainConfig {
    double learning_rate = 5e-3;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    int max_epochs = 2000;
    bool early_stopping = true;
    int early_stop_patience = 100;
    double early_stop_min_delta = 1e-6;
    std::uint64_t seed = 0;
    GradientMode gradient_mode = GradientMode::adjoint;
    double fd_step = 1e-4;
    /// Epoch stride for negativity logging; 0 picks 1 for n <= 6, else 10.
    int negativity_every = 0;

    void validate() const {
        if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
        if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0) || !(adam_beta2 > 0.0 && adam_beta2 < 1.0))
            throw ConfigError("Adam betas must lie in (0, 1)");
        if (!(adam_eps > 0.0)) throw ConfigError("adam_eps must be > 0");
        if (max_epochs < 0) throw ConfigError("max_epochs must be >= 0");
        if (early_stop_patience < 1) throw ConfigError("early_stop_patience must be >= 1");
        if (!(fd_step > 0.0)) throw ConfigError("fd_step must be > 0");
        if (negativity_every < 0) throw ConfigError("negativity_every must be >= 0");
    }

    int negativity_stride(int num_qubits) const {
        if (negativity_every > 0) return negativity_every;
        return num_qubits <= 6 ? 1 : 10;
    }
};

/// Pure states are lifted for negativity only up to this width.
inline constexpr int kMaxNegativityQubits = 12;

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;

    explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

/// One bias-corrected Adam update; `epoch` is the 1-based step count.
inline void adam_step(std::vector<double> &params, std::span<const double> grads, AdamState &state,
                      const TrainConfig &cfg, int epoch) {
    if (grads.size() != params.size() || state.m.size() != params.size() || state.v.size() != params.size())
        throw ConfigError("adam_step: shape mismatch");
    const double b1 = cfg.adam_beta1, b2 = cfg.adam_beta2;
    const double c1 = 1.0 - std::pow(b1, epoch);
    const double c2 = 1.0 - std::pow(b2, epoch);
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        state.m[i] = b1 * state.m[i] + (1.0 - b1) * g;
        state.v[i] = b2 * state.v[i] + (1.0 - b2) * g * g;
        const double mhat = state.m[i] / c1;
        const double vhat = state.v[i] / c2;
        params[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.adam_eps);
    }
}

struct EpochRecord {
    int epoch = 0;
    double loss = 0.0;
    double mw = 0.0;
    /// One entry per tracked bipartition; empty on epochs that were not logged.
    std::vector<std::optional<double>> negativity;
};

struct TrainingTrace {
    std::vector<Bipartition> bipartitions;
    std::vector<EpochRecord> epochs;
    std::vector<double> initial_params;
    /// Parameters at the lowest observed loss.
    std::vector<double> final_params;
    double final_loss = 1.0;
    double final_mw = 0.0;
    std::vector<std::optional<double>> final_negativity;
    int best_epoch = 0;
    int stop_epoch = 0;
    bool stopped_early = false;
};

inline std::vector<double> initial_parameters(std::size_t count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> p(count);
    for (auto &x : p) x = rng.uniform(-kPi, kPi);
    return p;
}

inline bool negativity_available(const Circuit &c, const std::optional<NoiseModel> &noise) {
    return noise.has_value() || c.num_qubits() <= kMaxNegativityQubits;
}

inline std::vector<std::optional<double>> tracked_negativities(const State &s, const std::vector<Bipartition> &parts) {
    std::vector<std::optional<double>> out;
    out.reserve(parts.size());
    for (const auto &p : parts) out.emplace_back(negativity(s, p));
    return out;
}

inline TrainingTrace train(const Circuit &circuit, const TrainConfig &cfg, const std::optional<NoiseModel> &noise,
                           const std::vector<Bipartition> &tracked) {
    circuit.validate();
    cfg.validate();
    if (noise) noise->validate();
    for (const auto &b : tracked) b.validate(circuit.num_qubits());

    TrainingTrace trace;
    trace.bipartitions = tracked;
    std::vector<double> params = initial_parameters(circuit.num_params(), cfg.seed);
    trace.initial_params = params;

    const bool can_log = !tracked.empty() && negativity_available(circuit, noise);
    const int stride = cfg.negativity_stride(circuit.num_qubits());
    auto log_negativity = [&](std::span<const double> p) {
        return tracked_negativities(forward(circuit, p, noise), tracked);
    };

    AdamState adam(params.size());
    double best = std::numeric_limits<double>::infinity();
    double plateau_ref = std::numeric_limits<double>::infinity();
    int waited = 0;
    std::vector<double> best_params = params;

    for (int epoch = 0;; ++epoch) {
        const LossAndGradient lg = value_and_gradient(circuit, params, noise, cfg.gradient_mode, cfg.fd_step);
        if (!std::isfinite(lg.loss)) throw NumericalError("training produced a non-finite loss");
        EpochRecord rec{epoch, lg.loss, 1.0 - lg.loss, {}};
        if (lg.loss < best) {
            best = lg.loss;
            best_params = params;
            trace.best_epoch = epoch;
        }
        if (lg.loss < plateau_ref - cfg.early_stop_min_delta) {
            plateau_ref = lg.loss;
            waited = 0;
        } else {
            ++waited;
        }
        const bool last = epoch == cfg.max_epochs || (cfg.early_stopping && waited >= cfg.early_stop_patience);
        if (can_log && (last || epoch % stride == 0)) rec.negativity = log_negativity(params);
        trace.epochs.push_back(std::move(rec));
        if (last) {
            trace.stop_epoch = epoch;
            trace.stopped_early = epoch != cfg.max_epochs;
            break;
        }
        adam_step(params, lg.grad, adam, cfg, epoch + 1);
    }

    trace.final_params = best_params;
    trace.final_loss = best;
    trace.final_mw = 1.0 - best;
    if (can_log) trace.final_negativity = log_negativity(best_params);
    else trace.final_negativity.assign(tracked.size(), std::nullopt);
    return trace;
}

struct CurvePoint {
    int epoch = 0;
    double loss_mean = 0.0, loss_std = 0.0;
    double mw_mean = 0.0, mw_std = 0.0;
    std::vector<std::optional<double>> neg_mean, neg_std;
};

struct SeedStats {
    std::vector<TrainingTrace> runs;
    std::vector<CurvePoint> curve;
};

namespace detail {

inline std::pair<double, double> mean_std(const std::vector<double> &xs) {
    double m = 0.0;
    for (double x : xs) m += x;
    m /= static_cast<double>(xs.size());
    double v = 0.0;
    for (double x : xs) v += (x - m) * (x - m);
    return {m, std::sqrt(v / static_cast<double>(xs.size()))};
}

}  // namespace detail

/// Pointwise mean and population std over traces aligned by epoch; shorter
/// traces are padded with their final record.
inline std::vector<CurvePoint> aggregate_traces(const std::vector<TrainingTrace> &runs) {
    std::vector<CurvePoint> curve;
    if (runs.empty()) return curve;
    std::size_t len = 0;
    for (const auto &r : runs) len = std::max(len, r.epochs.size());
    const std::size_t nb = runs.front().bipartitions.size();
    for (std::size_t e = 0; e < len; ++e) {
        std::vector<double> losses, mws;
        std::vector<std::vector<double>> negs(nb);
        for (const auto &r : runs) {
            const EpochRecord &rec = e < r.epochs.size() ? r.epochs[e] : r.epochs.back();
            losses.push_back(rec.loss);
            mws.push_back(rec.mw);
            for (std::size_t b = 0; b < nb && b < rec.negativity.size(); ++b)
                if (rec.negativity[b]) negs[b].push_back(*rec.negativity[b]);
        }
        CurvePoint pt;
        pt.epoch = static_cast<int>(e);
        std::tie(pt.loss_mean, pt.loss_std) = detail::mean_std(losses);
        std::tie(pt.mw_mean, pt.mw_std) = detail::mean_std(mws);
        for (std::size_t b = 0; b < nb; ++b) {
            if (negs[b].empty()) {
                pt.neg_mean.emplace_back();
                pt.neg_std.emplace_back();
            } else {
                const auto [m, s] = detail::mean_std(negs[b]);
                pt.neg_mean.emplace_back(m);
                pt.neg_std.emplace_back(s);
            }
        }
        curve.push_back(std::move(pt));
    }
    return curve;
}

/// k runs with seeds cfg.seed, cfg.seed + 1, ...; runs execute in parallel
/// and are merged in seed order.
inline SeedStats multi_seed_stats(const Circuit &circuit, const TrainConfig &cfg, const std::optional<NoiseModel> &noise,
                                  int k, const std::vector<Bipartition> &tracked = {}) {
    if (k < 1) throw ConfigError("multi_seed_stats needs k >= 1");
    SeedStats s;
    s.runs = parallel_map<TrainingTrace>(static_cast<std::size_t>(k), [&](std::size_t i) {
        TrainConfig c = cfg;
        c.seed = cfg.seed + i;
        return train(circuit, c, noise, tracked);
    });
    s.curve = aggregate_traces(s.runs);
    return s;
}

}  // namespace entforge
