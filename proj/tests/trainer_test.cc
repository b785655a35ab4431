#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "dendrram/device.h"
#include "dendrram/encoding.h"
#include "dendrram/errors.h"
#include "dendrram/network.h"
#include "dendrram/rng.h"
#include "dendrram/trainer.h"

namespace dendrram {
namespace {

NetworkConfig SmallNetwork(SeededRng& rng, double v_threshold) {
  NetworkConfig c;
  c.channels = 2;
  for (int i = 0; i < 2; ++i) {
    BranchConfig b;
    b.tau_s = i == 0 ? 0.02 : 0.1;
    for (int j = 0; j < 6; ++j) {
      b.synapses.push_back({i, j % 2, static_cast<std::int64_t>(rng.UniformIndex(60)),
                            rng.Uniform(0.0, 1.0), 0.0});
    }
    c.branches.push_back(b);
  }
  c.soma.v_threshold = v_threshold;
  return c;
}

EncodedWindow RandomWindow(SeededRng& rng, std::int64_t steps, double p, Label label) {
  SpikeRaster r(1e-3, 2, steps);
  for (int c = 0; c < 2; ++c) {
    for (std::int64_t t = 0; t < steps; ++t) {
      if (rng.Uniform() < p) r.set(c, t);
    }
  }
  return {ChannelSpikes::FromRaster(r), label, 0};
}

// Encoded windows from the default synthetic generator and a network from
// the default device law, as the experiment pipeline builds them.
struct Fixture {
  NetworkConfig net;
  std::vector<EncodedWindow> windows;
};

Fixture SyntheticFixture(int n_beats, std::uint64_t seed) {
  SynthEcgParams p;
  p.n_beats = n_beats;
  SeededRng data(seed, 10);
  const Recording rec = SynthEcg(p, data);
  const SpikeRaster raster = DeltaModulate(rec.trace, kDefaultDeltaThresholdMv, kDefaultDtS);
  Fixture f;
  for (const auto& w : SegmentBeats(raster, rec.annotations)) {
    f.windows.push_back(EncodedWindow::FromLabeled(w));
  }
  NetworkSpec spec;
  spec.hrs = {HrsDistribution(400e9, 0.5)};
  spec.init_weight_max = 0.1;
  SeededRng device(seed, 11), init(seed, 12);
  f.net = InitNetwork(spec, device, init);
  return f;
}

TEST(LossAndGrad, MatchesFiniteDifferences) {
  SeededRng rng(1, 0);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const NetworkConfig c = SmallNetwork(rng, 1e3);
    const Label label = trial % 2 ? Label::kAnomalous : Label::kNormal;
    const EncodedWindow w = RandomWindow(rng, 300, 0.03, label);
    std::vector<double> weights = c.Weights();
    // Scale so the peak sits near the threshold and the sigmoid is not flat.
    const double peak = LossAndGrad(c, w, weights, 1.0).v_peak;
    if (peak <= 0.0) continue;
    for (double& x : weights) x *= 1e3 / peak;
    const double slope = 0.01;
    const LossGrad lg = LossAndGrad(c, w, weights, slope);
    for (std::size_t j = 0; j < weights.size(); ++j) {
      const double h = 1e-6 * std::max(1.0, weights[j]);
      std::vector<double> up = weights, down = weights;
      up[j] += h;
      down[j] = std::max(0.0, down[j] - h);
      const double fd = (LossAndGrad(c, w, up, slope).loss -
                         LossAndGrad(c, w, down, slope).loss) / (up[j] - down[j]);
      const double err = std::abs(fd - lg.grad[j]) /
                         std::max({std::abs(fd), std::abs(lg.grad[j]), 1e-8});
      worst = std::max(worst, err);
    }
  }
  EXPECT_LT(worst, 1e-3);
}

TEST(LossAndGrad, ClosedForms) {
  SeededRng rng(2, 0);
  NetworkConfig c = SmallNetwork(rng, 0.5);
  const EncodedWindow normal = RandomWindow(rng, 200, 0.05, Label::kNormal);
  EncodedWindow anomalous = normal;
  anomalous.label = Label::kAnomalous;
  const std::vector<double> zero(c.synapse_count(), 0.0);
  const double a = 4.0, theta = 0.5;
  // Zero weights: V_peak = 0, so z = -a * theta.
  EXPECT_NEAR(LossAndGrad(c, normal, zero, a).loss,
              -std::log(1.0 / (1.0 + std::exp(-a * theta))), 1e-12);
  EXPECT_NEAR(LossAndGrad(c, anomalous, zero, a).loss,
              -std::log(1.0 / (1.0 + std::exp(a * theta))), 1e-12);
  EXPECT_EQ(LossAndGrad(c, normal, zero, a).spike_count, 0);

  // Threshold exactly at the peak: both labels cost ln 2.
  const std::vector<double> w = c.Weights();
  c.soma.v_threshold = 1e9;
  const double peak = LossAndGrad(c, normal, w, a).v_peak;
  ASSERT_GT(peak, 0.0);
  c.soma.v_threshold = peak;
  EXPECT_NEAR(LossAndGrad(c, normal, w, a).loss, std::log(2.0), 1e-12);
  EXPECT_NEAR(LossAndGrad(c, anomalous, w, a).loss, std::log(2.0), 1e-12);
}

TEST(LossAndGrad, GradientSignFollowsLabel) {
  SeededRng rng(3, 0);
  const NetworkConfig c = SmallNetwork(rng, 1e3);
  EncodedWindow w = RandomWindow(rng, 300, 0.05, Label::kNormal);
  const auto g_normal = LossAndGrad(c, w, c.Weights(), 0.01).grad;
  w.label = Label::kAnomalous;
  const auto g_anom = LossAndGrad(c, w, c.Weights(), 0.01).grad;
  for (std::size_t j = 0; j < g_normal.size(); ++j) {
    EXPECT_GE(g_normal[j], 0.0);
    EXPECT_LE(g_anom[j], 0.0);
  }
}

TEST(LossAndGrad, RejectsBadInput) {
  SeededRng rng(4, 0);
  const NetworkConfig c = SmallNetwork(rng, 1.0);
  const EncodedWindow w = RandomWindow(rng, 50, 0.05, Label::kNormal);
  std::vector<double> weights = c.Weights();
  weights[0] = -1.0;
  EXPECT_THROW(LossAndGrad(c, w, weights, 1.0), DomainError);
  EncodedWindow empty = w;
  empty.input.duration_steps = 0;
  empty.input.steps.assign(2, {});
  EXPECT_THROW(LossAndGrad(c, empty, c.Weights(), 1.0), DomainError);
}

TEST(TrainConfig, Validation) {
  TrainConfig ok;
  EXPECT_NO_THROW(ok.Validate());
  auto bad = [&](auto mutate) {
    TrainConfig t;
    mutate(t);
    EXPECT_THROW(t.Validate(), ConfigError);
  };
  bad([](TrainConfig& t) { t.n_pre = -1; });
  bad([](TrainConfig& t) { t.learning_rate = -0.1; });
  bad([](TrainConfig& t) { t.surrogate_slope = 0.0; });
  bad([](TrainConfig& t) { t.batch_size = 0; });
  bad([](TrainConfig& t) { t.decision_threshold = 0; });
  bad([](TrainConfig& t) { t.decision_threshold_max = 0; });
  bad([](TrainConfig& t) { t.init_weight_max = 0.5; });
  bad([](TrainConfig& t) { t.w_max_pre = 0.0; });
}

TEST(Pretrain, ZeroEpochsKeepsWeights) {
  const Fixture f = SyntheticFixture(30, 1);
  TrainConfig t;
  t.n_pre = 0;
  const auto w0 = f.net.Weights();
  const PretrainResult r = Pretrain(f.net, f.windows, w0, t);
  EXPECT_EQ(r.weights, w0);
  EXPECT_TRUE(r.metrics.empty());
}

TEST(Pretrain, DeterministicClippedAndLearning) {
  const Fixture f = SyntheticFixture(60, 2);
  TrainConfig t;
  t.n_pre = 15;
  t.learning_rate = 0.01;
  const PretrainResult a = Pretrain(f.net, f.windows, f.net.Weights(), t);
  const PretrainResult b = Pretrain(f.net, f.windows, f.net.Weights(), t);
  EXPECT_EQ(a.weights, b.weights);
  ASSERT_EQ(a.metrics.size(), 15u);
  for (const double w : a.weights) {
    EXPECT_GE(w, 0.0);
    EXPECT_LE(w, t.w_max_pre);
  }
  EXPECT_LT(a.metrics.back().loss, a.metrics.front().loss);
  EXPECT_EQ(a.metrics.front().phase, "pretrain");
  EXPECT_EQ(a.metrics.back().epoch, 15);

  t.seed = 99;
  EXPECT_NE(Pretrain(f.net, f.windows, f.net.Weights(), t).weights, a.weights);
  EXPECT_THROW(Pretrain(f.net, {}, f.net.Weights(), t), ConfigError);
  EXPECT_THROW(Pretrain(f.net, f.windows, {1.0}, t), ConfigError);
}

TEST(Scale, ComputeScaleExamples) {
  const LrsLevelTable table = LrsLevelTable::EqualConductance();
  const std::vector<double> w = {0.1, 0.5, 0.25, 0.0};
  const ScaleFactor s = ComputeScale(w, table);
  EXPECT_DOUBLE_EQ(s.s_w, (1.0 / 7000.0) / 0.5);
  const std::vector<double> zeros(4, 0.0);
  EXPECT_THROW(ComputeScale(zeros, table), ScaleError);
  EXPECT_THROW(ComputeScale(std::vector<double>{}, table), ScaleError);
}

TEST(Scale, GridTopLevelEqualsLargestWeight) {
  const LrsLevelTable table = LrsLevelTable::EqualConductance();
  const std::vector<double> w = {0.1, 0.5, 0.25};
  const auto grid = WeightGrid(table, ComputeScale(w, table), false);
  ASSERT_EQ(grid.size(), 8u);
  EXPECT_NEAR(grid.front(), 0.5, 1e-15);
  // Equal conductance spacing shows up as equal weight spacing.
  const double step = grid[0] - grid[1];
  for (std::size_t i = 1; i < grid.size(); ++i) {
    EXPECT_NEAR(grid[i - 1] - grid[i], step, 1e-12);
  }
  EXPECT_NEAR(grid.back(), 0.5 * 7000.0 / 50000.0, 1e-12);
  const auto with_off = WeightGrid(table, ComputeScale(w, table), true);
  ASSERT_EQ(with_off.size(), 9u);
  EXPECT_EQ(with_off.back(), 0.0);
}

TEST(Scale, AssignmentIsScaleInvariant) {
  const LrsLevelTable table = LrsLevelTable::EqualConductance();
  SeededRng rng(5, 0);
  std::vector<double> w(200);
  for (double& x : w) x = rng.Uniform(0.0, 0.3);
  for (const double k : {0.01, 3.0, 1e4}) {
    std::vector<double> scaled = w;
    for (double& x : scaled) x *= k;
    for (const bool off : {false, true}) {
      const Quantizer q1{table, ComputeScale(w, table),
                         off ? std::optional(HrsDistribution(400e9, 0.5)) : std::nullopt};
      const Quantizer q2{table, ComputeScale(scaled, table), q1.off_state};
      SeededRng r1(6, 0), r2(6, 0);
      EXPECT_EQ(QuantizeAll(w, q1, r1).level_index, QuantizeAll(scaled, q2, r2).level_index);
    }
  }
}

Quantizer DefaultQuantizer(std::span<const double> w, bool off) {
  const LrsLevelTable table = LrsLevelTable::EqualConductance();
  return {table, ComputeScale(w, table),
          off ? std::optional(HrsDistribution(400e9, 0.5)) : std::nullopt};
}

TEST(Quantizer, ProgramsNearestStates) {
  SeededRng rng(7, 0);
  std::vector<double> w(500);
  for (double& x : w) x = rng.Uniform(0.0, 0.2);
  const Quantizer q = DefaultQuantizer(w, true);
  const auto grid = q.Grid();
  const HiddenWeights s = QuantizeAll(w, q, rng);
  EXPECT_EQ(s.w, w);
  for (std::size_t j = 0; j < w.size(); ++j) {
    // Brute-force nearest, ties to the lower index.
    int best = 0;
    for (int i = 1; i < static_cast<int>(grid.size()); ++i) {
      if (std::abs(grid[i] - w[j]) < std::abs(grid[best] - w[j])) best = i;
    }
    EXPECT_EQ(s.level_index[j], best);
    if (best == 8) {
      EXPECT_GT(s.programmed_ohm[j], 1e9);
    } else {
      EXPECT_GE(s.programmed_ohm[j], 7000.0);
      EXPECT_LE(s.programmed_ohm[j], 50000.0);
    }
  }
  const auto eff = EffectiveWeights(s, q);
  for (std::size_t j = 0; j < w.size(); ++j) {
    EXPECT_NEAR(eff[j], q.EffectiveWeight(s.programmed_ohm[j]), 1e-15);
    EXPECT_LE(eff[j], q.w_max() * 7000.0 / 6000.0);
  }
}

TEST(Quantizer, BoundaryCrossingReprogramsOnce) {
  SeededRng rng(8, 0);
  std::vector<double> w(50);
  for (double& x : w) x = rng.Uniform(0.05, 0.2);
  const Quantizer q = DefaultQuantizer(w, false);
  HiddenWeights s = QuantizeAll(w, q, rng);
  EXPECT_EQ(ReprogramChanged(s, q, rng), 0);
  const auto grid = q.Grid();
  const int from = s.level_index[3];
  const int to = from == 0 ? 1 : from - 1;
  const double before = s.programmed_ohm[3];
  s.w[3] = grid[to];
  EXPECT_EQ(ReprogramChanged(s, q, rng), 1);
  EXPECT_EQ(s.level_index[3], to);
  EXPECT_NE(s.programmed_ohm[3], before);
  EXPECT_EQ(ReprogramChanged(s, q, rng), 0);
}

TEST(TrainQuantized, ZeroLearningRateIsStatic) {
  const Fixture f = SyntheticFixture(30, 3);
  TrainConfig t;
  t.n_training = 3;
  t.learning_rate = 0.0;
  const auto w = f.net.Weights();
  const Quantizer q = DefaultQuantizer(w, true);
  SeededRng rng(9, 0);
  const HiddenWeights s0 = QuantizeAll(w, q, rng);
  const QuantizedResult r = TrainQuantized(f.net, f.windows, s0, q, t, rng);
  ASSERT_EQ(r.metrics.size(), 3u);
  for (const auto& m : r.metrics) {
    EXPECT_EQ(m.reprogram_count, 0);
    EXPECT_EQ(m.phase, "quantized");
  }
  EXPECT_EQ(r.state.w, s0.w);
  EXPECT_EQ(r.state.level_index, s0.level_index);
  EXPECT_EQ(r.state.programmed_ohm, s0.programmed_ohm);
  EXPECT_DOUBLE_EQ(r.metrics.front().loss, r.metrics.back().loss);
}

TEST(TrainQuantized, HiddenWeightsStayInRange) {
  const Fixture f = SyntheticFixture(40, 4);
  TrainConfig t;
  t.n_training = 4;
  t.learning_rate = 0.05;
  const auto w = f.net.Weights();
  const Quantizer q = DefaultQuantizer(w, true);
  SeededRng a(10, 0), b(10, 0);
  const QuantizedResult r1 = TrainQuantized(f.net, f.windows, QuantizeAll(w, q, a), q, t, a);
  const QuantizedResult r2 = TrainQuantized(f.net, f.windows, QuantizeAll(w, q, b), q, t, b);
  EXPECT_EQ(r1.state.programmed_ohm, r2.state.programmed_ohm);
  for (const double x : r1.state.w) {
    EXPECT_GE(x, 0.0);
    EXPECT_LE(x, q.w_max());
  }
}

// Balanced accuracy computed directly from the definition.
double OracleBalanced(const std::vector<std::int64_t>& counts,
                      const std::vector<Label>& labels, std::int64_t th) {
  double tp = 0, fn = 0, tn = 0, fp = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const bool flagged = counts[i] >= th;
    if (labels[i] == Label::kAnomalous) {
      (flagged ? tp : fn) += 1;
    } else {
      (flagged ? fp : tn) += 1;
    }
  }
  if (tp + fn == 0) return tn / (tn + fp);
  if (tn + fp == 0) return tp / (tp + fn);
  return 0.5 * (tp / (tp + fn) + tn / (tn + fp));
}

TEST(Score, MatchesDefinition) {
  SeededRng rng(11, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.UniformIndex(40);
    std::vector<std::int64_t> counts(n);
    std::vector<Label> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      counts[i] = static_cast<std::int64_t>(rng.UniformIndex(6));
      labels[i] = rng.Uniform() < 0.5 ? Label::kNormal : Label::kAnomalous;
    }
    const std::int64_t th = 1 + static_cast<std::int64_t>(rng.UniformIndex(5));
    const EvalResult r = ScoreCounts(counts, labels, th);
    EXPECT_NEAR(r.balanced_accuracy, OracleBalanced(counts, labels, th), 1e-15);
    EXPECT_EQ(r.true_positive + r.true_negative + r.false_positive + r.false_negative,
              static_cast<std::int64_t>(n));
  }
}

TEST(Score, BalancedAccuracyIgnoresClassSizes) {
  const std::vector<std::int64_t> counts = {0, 2, 1, 0};
  const std::vector<Label> labels = {Label::kNormal, Label::kNormal, Label::kAnomalous,
                                     Label::kAnomalous};
  const double base = ScoreCounts(counts, labels, 1).balanced_accuracy;
  EXPECT_DOUBLE_EQ(base, 0.5);
  std::vector<std::int64_t> c3 = counts;
  std::vector<Label> l3 = labels;
  for (int k = 0; k < 2; ++k) {
    c3.insert(c3.end(), counts.begin(), counts.begin() + 2);
    l3.insert(l3.end(), labels.begin(), labels.begin() + 2);
  }
  EXPECT_DOUBLE_EQ(ScoreCounts(c3, l3, 1).balanced_accuracy, base);
  EXPECT_THROW(ScoreCounts(std::vector<std::int64_t>{}, std::vector<Label>{}, 1),
               EvaluationError);
}

TEST(Evaluate, SilentNetworkOnNormalWindowIsPerfect) {
  SeededRng rng(12, 0);
  const NetworkConfig c = SmallNetwork(rng, 1e9);
  const std::vector<EncodedWindow> one = {RandomWindow(rng, 100, 0.05, Label::kNormal)};
  const EvalResult r = Evaluate(c, c.Weights(), one, 1);
  EXPECT_EQ(r.balanced_accuracy, 1.0);
  EXPECT_EQ(r.true_negative, 1);
  EXPECT_THROW(Evaluate(c, c.Weights(), std::vector<EncodedWindow>{}, 1), EvaluationError);
}

TEST(SelectDecisionThreshold, MatchesExhaustiveSearch) {
  SeededRng rng(13, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const NetworkConfig c = SmallNetwork(rng, rng.Uniform(0.005, 0.03));
    std::vector<EncodedWindow> windows;
    std::vector<std::int64_t> counts;
    std::vector<Label> labels;
    for (int i = 0; i < 30; ++i) {
      const Label l = rng.Uniform() < 0.5 ? Label::kNormal : Label::kAnomalous;
      windows.push_back(RandomWindow(rng, 200, rng.Uniform(0.0, 0.08), l));
      counts.push_back(dendrram::Run(c, [&] {
                         SpikeRaster r(1e-3, 2, 200);
                         for (int ch = 0; ch < 2; ++ch) {
                           for (auto t : windows.back().input.steps[ch]) r.set(ch, t);
                         }
                         return r;
                       }()).spike_count);
      labels.push_back(l);
    }
    std::int64_t best = 1;
    for (std::int64_t th = 2; th <= 6; ++th) {
      if (OracleBalanced(counts, labels, th) > OracleBalanced(counts, labels, best)) {
        best = th;
      }
    }
    EXPECT_EQ(SelectDecisionThreshold(c, c.Weights(), windows, 1, 6), best) << trial;
  }
  const NetworkConfig c = SmallNetwork(rng, 1.0);
  EXPECT_THROW(SelectDecisionThreshold(c, c.Weights(), std::vector<EncodedWindow>{}),
               EvaluationError);
}

}  // namespace
}  // namespace dendrram
