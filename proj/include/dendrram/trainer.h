#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dendrram/device.h"
#include "dendrram/encoding.h"
#include "dendrram/network.h"
#include "dendrram/rng.h"

namespace dendrram {

struct TrainConfig {
  int n_pre = 50;
  int n_training = 100;
  double learning_rate = 0.005;
  double surrogate_slope = 10.0;
  int batch_size = 16;
  // A window is anomalous when it emits at least decision_threshold spikes.
  // When decision_threshold_max is larger, the threshold is chosen in
  // [decision_threshold, decision_threshold_max] on the training split.
  std::int64_t decision_threshold = 1;
  std::int64_t decision_threshold_max = 5;
  // Initial weights are uniform in [0, init_weight_max].
  double init_weight_max = 0.1;
  // Upper clip of the hidden weights before the precision transition.
  double w_max_pre = 0.2;
  // Let a synapse fall back to the HRS (effectively zero weight) when its
  // hidden weight is closer to zero than to the lowest LRS level.
  bool hrs_off_level = true;
  std::uint64_t seed = 1;

  void Validate() const;
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

// Spikes of one window prepared for the event-driven simulator.
struct EncodedWindow {
  ChannelSpikes input;
  Label label = Label::kNormal;
  std::int64_t id = 0;

  static EncodedWindow FromLabeled(const LabeledWindow& window);
};

struct LossGrad {
  double loss = 0.0;
  std::vector<double> grad;  // dL/dw per synapse, flat branch-major order
  double v_peak = 0.0;
  std::int64_t peak_step = 0;
  std::int64_t spike_count = 0;
};

// Binary cross-entropy of sigmoid(slope * (V_peak - v_threshold)) against the
// label, where V_peak is the largest pre-reset membrane value in the window.
// The gradient is exact for this loss with the reset path detached.
LossGrad LossAndGrad(const NetworkConfig& config, const EncodedWindow& window,
                     std::span<const double> weights, double surrogate_slope);

struct EpochMetrics {
  std::string phase;  // "pretrain" or "quantized"
  int epoch = 0;      // 1-based within the phase
  double loss = 0.0;  // mean over the epoch's training passes
  double accuracy = 0.0;  // balanced, from the same passes
  std::int64_t reprogram_count = 0;
};

struct EvalResult {
  double balanced_accuracy = 0.0;
  double accuracy = 0.0;
  // Anomalous is the positive class.
  std::int64_t true_positive = 0;
  std::int64_t true_negative = 0;
  std::int64_t false_positive = 0;
  std::int64_t false_negative = 0;
};

struct PretrainResult {
  std::vector<double> weights;
  std::vector<EpochMetrics> metrics;
};

// Minibatch gradient descent on full-precision weights, clipped to
// [0, w_max_pre] after every update.
PretrainResult Pretrain(const NetworkConfig& config,
                        std::span<const EncodedWindow> dataset,
                        std::vector<double> initial_weights, const TrainConfig& train);

struct ScaleFactor {
  // Conductance per unit hidden weight.
  double s_w = 1.0;
};

// s_w = largest level conductance / max(W).
ScaleFactor ComputeScale(std::span<const double> trained_weights,
                         const LrsLevelTable& table);

// Effective weight of every programmable state, indexed like the level table
// (index 0 = lowest resistance = largest weight). With the off level, index
// table.size() stands for the HRS and maps to weight 0.
std::vector<double> WeightGrid(const LrsLevelTable& table, ScaleFactor scale,
                               bool hrs_off_level);

struct HiddenWeights {
  std::vector<double> w;           // full-precision shadow weights
  std::vector<double> grad_accum;  // gradient summed over the current epoch
  std::vector<int> level_index;    // table.size() = HRS off state
  std::vector<double> programmed_ohm;

  std::size_t size() const { return w.size(); }
};

struct Quantizer {
  LrsLevelTable table;
  ScaleFactor scale;
  // Present when synapses may be reset to the HRS.
  std::optional<HrsDistribution> off_state;

  std::vector<double> Grid() const;
  int NearestState(double weight) const;
  // Programs a device to `state`; HRS draws use off_state.
  double Program(int state, SeededRng& rng) const;
  double EffectiveWeight(double programmed_ohm) const;
  // Largest reachable effective weight (top level mean).
  double w_max() const;
};

HiddenWeights QuantizeAll(std::span<const double> weights, const Quantizer& quantizer,
                          SeededRng& program_rng);

std::vector<double> EffectiveWeights(const HiddenWeights& state,
                                     const Quantizer& quantizer);

// Epoch-end check: reprogram every synapse whose nearest state changed.
// Returns the number of reprogrammed devices.
std::int64_t ReprogramChanged(HiddenWeights& state, const Quantizer& quantizer,
                              SeededRng& program_rng);

struct QuantizedResult {
  HiddenWeights state;
  std::vector<EpochMetrics> metrics;
};

// Forward and backward passes see the programmed (noisy) weights; updates go
// to the hidden weights, clipped to [0, quantizer.w_max()]; devices are
// reprogrammed only at epoch end and only where the nearest state changed.
QuantizedResult TrainQuantized(const NetworkConfig& config,
                               std::span<const EncodedWindow> dataset,
                               HiddenWeights state, const Quantizer& quantizer,
                               const TrainConfig& train, SeededRng& program_rng);

EvalResult Evaluate(const NetworkConfig& config, std::span<const double> weights,
                    std::span<const EncodedWindow> dataset,
                    std::int64_t decision_threshold);

// Balanced accuracy from per-window spike counts. Classes absent from
// `labels` are left out of the balance.
EvalResult ScoreCounts(std::span<const std::int64_t> spike_counts,
                       std::span<const Label> labels, std::int64_t decision_threshold);

// Threshold in [lo, hi] maximising balanced accuracy; ties go to the lower.
std::int64_t SelectDecisionThreshold(const NetworkConfig& config,
                                     std::span<const double> weights,
                                     std::span<const EncodedWindow> validation,
                                     std::int64_t lo = 1, std::int64_t hi = 5);

}  // namespace dendrram
