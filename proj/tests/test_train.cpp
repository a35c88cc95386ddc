#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "entforge/train.hpp"

using namespace entforge;

namespace {

TrainConfig quick(int epochs, std::uint64_t seed = 1) {
    TrainConfig c;
    c.max_epochs = epochs;
    c.seed = seed;
    c.learning_rate = 0.05;
    return c;
}

void expect_same(const TrainingTrace &a, const TrainingTrace &b) {
    ASSERT_EQ(a.epochs.size(), b.epochs.size());
    for (std::size_t e = 0; e < a.epochs.size(); ++e) {
        ASSERT_EQ(a.epochs[e].loss, b.epochs[e].loss);
        ASSERT_EQ(a.epochs[e].mw, b.epochs[e].mw);
        ASSERT_EQ(a.epochs[e].negativity, b.epochs[e].negativity);
    }
    ASSERT_EQ(a.final_params, b.final_params);
    ASSERT_EQ(a.stop_epoch, b.stop_epoch);
}

}  // namespace

TEST(Adam, ZeroGradientKeepsParams) {
    std::vector<double> p{0.3, -1.2, 2.0};
    const std::vector<double> before = p;
    AdamState s(3);
    s.m = {0.5, -0.5, 0.1};
    s.v = {0.2, 0.2, 0.2};
    TrainConfig cfg;
    cfg.adam_eps = 1e300;
    adam_step(p, std::vector<double>(3, 0.0), s, cfg, 1);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(p[i], before[i], 1e-250);
    EXPECT_DOUBLE_EQ(s.m[0], 0.45);
    EXPECT_DOUBLE_EQ(s.v[0], 0.2 * 0.999);

    std::vector<double> q{0.3, -1.2};
    AdamState fresh(2);
    adam_step(q, std::vector<double>(2, 0.0), fresh, TrainConfig{}, 1);
    EXPECT_EQ(q, (std::vector<double>{0.3, -1.2}));
}

TEST(Adam, FirstStepMovesByLearningRate) {
    std::mt19937_64 rng(107);
    std::normal_distribution<double> g(0.0, 3.0);
    TrainConfig cfg;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> p(6, 0.0), grad(6);
        for (auto &x : grad) x = g(rng);
        AdamState s(6);
        adam_step(p, grad, s, cfg, 1);
        for (std::size_t i = 0; i < 6; ++i) {
            ASSERT_NEAR(std::abs(p[i]), cfg.learning_rate, 1e-7);
            ASSERT_EQ(std::signbit(p[i]), !std::signbit(grad[i]));
        }
    }
}

TEST(Adam, MatchesHandRolledUpdate) {
    TrainConfig cfg;
    cfg.learning_rate = 0.01;
    std::vector<double> p{1.0};
    AdamState s(1);
    double m = 0, v = 0, x = 1.0;
    const double gs[] = {0.5, -0.2, 0.9, 0.0, -1.5};
    for (int t = 1; t <= 5; ++t) {
        const double g = gs[t - 1];
        adam_step(p, std::vector<double>{g}, s, cfg, t);
        m = 0.9 * m + 0.1 * g;
        v = 0.999 * v + 0.001 * g * g;
        x -= 0.01 * (m / (1 - std::pow(0.9, t))) / (std::sqrt(v / (1 - std::pow(0.999, t))) + 1e-8);
        ASSERT_NEAR(p[0], x, 1e-15);
    }
    EXPECT_THROW(adam_step(p, std::vector<double>{1.0, 2.0}, s, cfg, 6), ConfigError);
}

TEST(TrainConfig, Validation) {
    EXPECT_NO_THROW(TrainConfig{}.validate());
    TrainConfig c;
    c.learning_rate = 0.0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = {};
    c.adam_beta1 = 1.0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = {};
    c.early_stop_patience = 0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = {};
    c.max_epochs = -1;
    EXPECT_THROW(c.validate(), ConfigError);
    EXPECT_EQ(TrainConfig{}.negativity_stride(5), 1);
    EXPECT_EQ(TrainConfig{}.negativity_stride(10), 10);
    const TrainConfig d;
    EXPECT_DOUBLE_EQ(d.learning_rate, 5e-3);
    EXPECT_EQ(d.max_epochs, 2000);
    EXPECT_EQ(d.early_stop_patience, 100);
    EXPECT_DOUBLE_EQ(d.early_stop_min_delta, 1e-6);
}

TEST(Train, InitialParametersUniformAndSeeded) {
    const auto a = initial_parameters(4000, 9);
    EXPECT_EQ(a, initial_parameters(4000, 9));
    EXPECT_NE(a, initial_parameters(4000, 10));
    double mean = 0.0;
    for (double x : a) {
        ASSERT_GE(x, -kPi);
        ASSERT_LT(x, kPi);
        mean += x;
    }
    EXPECT_NEAR(mean / 4000.0, 0.0, 0.15);
}

TEST(Train, ZeroEpochsEvaluatesOnce) {
    const Circuit c{staircase_plus_1(4), 1, Activation::sine(), 2};
    const auto t = train(c, quick(0), std::nullopt, {Bipartition{0, 1}});
    ASSERT_EQ(t.epochs.size(), 1u);
    EXPECT_EQ(t.final_params, t.initial_params);
    EXPECT_EQ(t.stop_epoch, 0);
    EXPECT_FALSE(t.stopped_early);
    EXPECT_EQ(t.epochs[0].loss, loss(c, t.initial_params, std::nullopt));
    ASSERT_TRUE(t.final_negativity[0].has_value());
}

TEST(Train, DeterministicPerSeed) {
    const Circuit c{staircase_plus_1(4), 1, Activation::bm(4.0, 1.0), 2};
    const auto noise = NoiseModel::dephasing_and_damping(0.01, 0.01);
    const std::vector<Bipartition> parts{Bipartition{0, 1}};
    expect_same(train(c, quick(40, 5), noise, parts), train(c, quick(40, 5), noise, parts));
    const auto other = train(c, quick(40, 6), noise, parts);
    EXPECT_NE(other.initial_params, train(c, quick(40, 5), noise, parts).initial_params);
}

TEST(Train, TraceInvariants) {
    const Activation acts[] = {Activation::linear(), Activation::sine(), Activation::bm(4.0, 1.0)};
    for (int k = 0; k < 6; ++k) {
        const Circuit c{staircase_plus_1(4), 1 + k % 2, acts[k % 3], 1 + k % 2};
        const std::optional<NoiseModel> noise =
            k % 2 ? std::optional(NoiseModel::dephasing_and_damping(0.02, 0.02)) : std::nullopt;
        const auto t = train(c, quick(150, 30 + static_cast<std::uint64_t>(k)), noise, {Bipartition{0, 1}});
        double best = 2.0;
        for (const auto &e : t.epochs) {
            ASSERT_TRUE(std::isfinite(e.loss));
            ASSERT_GE(e.loss, -1e-12);
            ASSERT_LE(e.loss, 1.0 + 1e-12);
            ASSERT_NEAR(e.loss, 1.0 - e.mw, 1e-12);
            best = std::min(best, e.loss);
        }
        EXPECT_NEAR(t.final_loss, best, 1e-12);
        EXPECT_NEAR(t.final_loss, loss(c, t.final_params, noise), 1e-12);
        EXPECT_EQ(t.epochs[static_cast<std::size_t>(t.best_epoch)].loss, t.final_loss);
        EXPECT_LE(t.final_loss, t.epochs.front().loss);
    }
}

TEST(Train, EarlyStopsOnPlateau) {
    // bm(1, 1) pins every angle, so the loss never moves.
    const Circuit c{staircase(3), 1, Activation::bm(1.0, 1.0), 1};
    TrainConfig cfg = quick(2000);
    cfg.early_stop_patience = 25;
    const auto t = train(c, cfg, std::nullopt, {});
    EXPECT_TRUE(t.stopped_early);
    EXPECT_EQ(t.stop_epoch, 25);
    EXPECT_EQ(t.epochs.size(), 26u);
    cfg.early_stopping = false;
    cfg.max_epochs = 60;
    const auto full = train(c, cfg, std::nullopt, {});
    EXPECT_FALSE(full.stopped_early);
    EXPECT_EQ(full.epochs.size(), 61u);
}

TEST(Train, NegativityCadence) {
    const Circuit c{staircase_plus_1(4), 1, Activation::sine(), 1};
    TrainConfig cfg = quick(23);
    cfg.early_stopping = false;
    cfg.negativity_every = 5;
    const auto t = train(c, cfg, std::nullopt, {Bipartition{0, 1}, Bipartition{3}});
    for (const auto &e : t.epochs) {
        const bool logged = e.epoch % 5 == 0 || e.epoch == 23;
        ASSERT_EQ(!e.negativity.empty(), logged) << e.epoch;
        if (logged) {
            ASSERT_EQ(e.negativity.size(), 2u);
        }
    }
    EXPECT_TRUE(train(c, cfg, std::nullopt, {}).epochs[0].negativity.empty());
}

TEST(Train, ReducesLossOnSmallNetwork) {
    const Circuit c{staircase_plus_1(3), 1, Activation::sine(), 2};
    TrainConfig cfg = quick(300, 4);
    const auto t = train(c, cfg, std::nullopt, {});
    EXPECT_LT(t.final_loss, t.epochs.front().loss - 0.1);
}

TEST(Train, RejectsBadInput) {
    const Circuit c{staircase(3), 1, Activation::sine(), 1};
    EXPECT_THROW(train(c, quick(5), std::nullopt, {Bipartition{3}}), ConfigError);
    EXPECT_THROW(train(c, quick(5), NoiseModel::damping_only(2.0), {}), ConfigError);
    TrainConfig bad = quick(5);
    bad.learning_rate = -1.0;
    EXPECT_THROW(train(c, bad, std::nullopt, {}), ConfigError);
}

TEST(MultiSeed, IdenticalRunsHaveZeroSpread) {
    // The constant landscape makes every seed produce the same trace.
    const Circuit c{staircase(3), 1, Activation::bm(1.0, 1.0), 1};
    TrainConfig cfg = quick(30);
    cfg.early_stopping = false;
    const auto s = multi_seed_stats(c, cfg, std::nullopt, 4, {Bipartition{0}});
    ASSERT_EQ(s.curve.size(), 31u);
    for (const auto &pt : s.curve) {
        EXPECT_NEAR(pt.loss_std, 0.0, 1e-12);
        EXPECT_NEAR(pt.mw_std, 0.0, 1e-12);
        EXPECT_NEAR(*pt.neg_std[0], 0.0, 1e-12);
    }
}

TEST(MultiSeed, TwoSeedMeanIsAverage) {
    const Circuit c{staircase_plus_1(4), 1, Activation::sine(), 2};
    TrainConfig cfg = quick(40, 11);
    const auto s = multi_seed_stats(c, cfg, std::nullopt, 2, {Bipartition{0, 1}});
    ASSERT_EQ(s.runs.size(), 2u);
    TrainConfig c2 = cfg;
    c2.seed = 12;
    expect_same(s.runs[0], train(c, cfg, std::nullopt, {Bipartition{0, 1}}));
    expect_same(s.runs[1], train(c, c2, std::nullopt, {Bipartition{0, 1}}));
    for (std::size_t e = 0; e < s.curve.size(); ++e) {
        const auto &a = s.runs[0].epochs[std::min(e, s.runs[0].epochs.size() - 1)];
        const auto &b = s.runs[1].epochs[std::min(e, s.runs[1].epochs.size() - 1)];
        ASSERT_NEAR(s.curve[e].loss_mean, 0.5 * (a.loss + b.loss), 1e-15);
        ASSERT_NEAR(s.curve[e].loss_std, 0.5 * std::abs(a.loss - b.loss), 1e-15);
    }
}

TEST(MultiSeed, PadsShorterTracesWithFinalRecord) {
    TrainingTrace a, b;
    a.epochs = {{0, 0.8, 0.2, {}}, {1, 0.6, 0.4, {}}, {2, 0.5, 0.5, {}}};
    b.epochs = {{0, 0.9, 0.1, {}}};
    const auto curve = aggregate_traces({a, b});
    ASSERT_EQ(curve.size(), 3u);
    EXPECT_NEAR(curve[2].loss_mean, 0.7, 1e-15);
    EXPECT_NEAR(curve[2].loss_std, 0.2, 1e-15);
    EXPECT_THROW(multi_seed_stats(Circuit{staircase(2), 1, Activation::sine(), 1}, quick(1), std::nullopt, 0),
                 ConfigError);
}
