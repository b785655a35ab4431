#include "dendrram/trainer.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dendrram/errors.h"

namespace dendrram {
namespace {

// log(1 + exp(x)) without overflow.
double Softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double Sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

std::vector<std::size_t> ShuffledOrder(std::size_t n, std::uint64_t seed,
                                       std::string_view phase, int epoch) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  SeededRng rng = SeededRng::Named(seed, phase, static_cast<std::uint64_t>(epoch));
  for (std::size_t i = n; i > 1; --i) {
    std::swap(order[i - 1], order[rng.UniformIndex(i)]);
  }
  return order;
}

struct EpochPass {
  double mean_loss = 0.0;
  double balanced_accuracy = 0.0;
};

// One epoch of minibatch descent. `forward_weights` produces the weights the
// network sees; `apply` receives the averaged batch gradient.
template <typename ForwardWeights, typename Apply>
EpochPass RunEpoch(const NetworkConfig& config, std::span<const EncodedWindow> dataset,
                   const TrainConfig& train, std::string_view phase, int epoch,
                   ForwardWeights&& forward_weights, Apply&& apply) {
  const auto order = ShuffledOrder(dataset.size(), train.seed, phase, epoch);
  const std::size_t n_syn = config.synapse_count();
  std::vector<double> batch_grad(n_syn);
  std::vector<std::int64_t> counts(dataset.size());
  std::vector<Label> labels(dataset.size());
  double loss_sum = 0.0;
  const std::size_t batch = static_cast<std::size_t>(train.batch_size);
  for (std::size_t begin = 0; begin < order.size(); begin += batch) {
    const std::size_t end = std::min(order.size(), begin + batch);
    const std::vector<double>& weights = forward_weights();
    std::fill(batch_grad.begin(), batch_grad.end(), 0.0);
    for (std::size_t b = begin; b < end; ++b) {
      const EncodedWindow& window = dataset[order[b]];
      LossGrad lg = LossAndGrad(config, window, weights, train.surrogate_slope);
      loss_sum += lg.loss;
      counts[b] = lg.spike_count;
      labels[b] = window.label;
      for (std::size_t j = 0; j < n_syn; ++j) batch_grad[j] += lg.grad[j];
    }
    const double inv = 1.0 / static_cast<double>(end - begin);
    for (double& g : batch_grad) g *= inv;
    apply(batch_grad);
  }
  EpochPass pass;
  pass.mean_loss = loss_sum / static_cast<double>(dataset.size());
  for (std::int64_t th = train.decision_threshold; th <= train.decision_threshold_max;
       ++th) {
    pass.balanced_accuracy = std::max(pass.balanced_accuracy,
                                      ScoreCounts(counts, labels, th).balanced_accuracy);
  }
  return pass;
}

}  // namespace

void TrainConfig::Validate() const {
  if (n_pre < 0 || n_training < 0) throw ConfigError("epoch counts must be >= 0");
  if (!(learning_rate >= 0.0)) throw ConfigError("learning_rate must be >= 0");
  if (!(surrogate_slope > 0.0)) throw ConfigError("surrogate_slope must be > 0");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (decision_threshold < 1) throw ConfigError("decision_threshold must be >= 1");
  if (decision_threshold_max < decision_threshold) {
    throw ConfigError("decision_threshold_max must be >= decision_threshold");
  }
  if (!(init_weight_max >= 0.0 && init_weight_max <= w_max_pre)) {
    throw ConfigError("init_weight_max must lie in [0, w_max_pre]");
  }
  if (!(w_max_pre > 0.0)) throw ConfigError("w_max_pre must be > 0");
}

EncodedWindow EncodedWindow::FromLabeled(const LabeledWindow& window) {
  return {ChannelSpikes::FromRaster(window.raster), window.label, window.id};
}

LossGrad LossAndGrad(const NetworkConfig& config, const EncodedWindow& window,
                     std::span<const double> weights, double surrogate_slope) {
  for (const double w : weights) {
    if (!(w >= 0.0)) throw DomainError("effective weights must be non-negative");
  }
  const WindowResponse resp = Simulate(config, weights, window.input);
  const std::int64_t steps = window.input.duration_steps;

  LossGrad out;
  out.spike_count = resp.spike_count;
  out.grad.assign(weights.size(), 0.0);
  if (steps == 0) {
    throw DomainError("window " + std::to_string(window.id) + " is empty");
  }
  const auto peak = std::max_element(resp.membrane_v.begin(), resp.membrane_v.end());
  out.peak_step = peak - resp.membrane_v.begin();
  out.v_peak = *peak;

  const double a = surrogate_slope;
  const double z = a * (out.v_peak - config.soma.v_threshold);
  const double y = window.label == Label::kAnomalous ? 1.0 : 0.0;
  // -[y ln s(z) + (1 - y) ln(1 - s(z))]
  out.loss = y > 0.5 ? Softplus(-z) : Softplus(z);
  if (!std::isfinite(out.loss)) {
    throw NumericalError("non-finite loss on window " + std::to_string(window.id));
  }
  const double dl_dpeak = a * (Sigmoid(z) - y);

  // Membrane adjoint: nonzero on (last spike before the peak, peak].
  const double dt = config.dt_s;
  const double soma_decay = std::exp(-dt / config.soma.tau_mem_s);
  std::vector<double> lambda_v(steps, 0.0);
  lambda_v[out.peak_step] = dl_dpeak;
  for (std::int64_t t = out.peak_step - 1; t >= 0; --t) {
    if (resp.spikes[t]) break;  // reset path detached
    lambda_v[t] = soma_decay * lambda_v[t + 1];
  }

  std::vector<double> lambda_i(steps);
  std::size_t k = 0;
  for (const BranchConfig& branch : config.branches) {
    const double decay = std::exp(-dt / branch.tau_s);
    double acc = 0.0;
    for (std::int64_t t = out.peak_step + 1; t < steps; ++t) lambda_i[t] = 0.0;
    for (std::int64_t t = out.peak_step; t >= 0; --t) {
      acc = dt * lambda_v[t] + decay * acc;
      lambda_i[t] = acc;
    }
    for (const SynapseConfig& s : branch.synapses) {
      double g = 0.0;
      for (const std::int64_t t : window.input.steps[s.source_channel]) {
        const std::int64_t arrival = t + s.delay_steps;
        if (arrival > out.peak_step) break;
        g += lambda_i[arrival];
      }
      out.grad[k++] = g;
    }
  }
  return out;
}

PretrainResult Pretrain(const NetworkConfig& config,
                        std::span<const EncodedWindow> dataset,
                        std::vector<double> initial_weights, const TrainConfig& train) {
  train.Validate();
  if (dataset.empty()) throw ConfigError("pretraining needs a non-empty dataset");
  if (initial_weights.size() != config.synapse_count()) {
    throw ConfigError("initial weights do not match the synapse count");
  }
  PretrainResult result;
  result.weights = std::move(initial_weights);
  std::vector<double>& w = result.weights;
  for (int epoch = 1; epoch <= train.n_pre; ++epoch) {
    const EpochPass pass = RunEpoch(
        config, dataset, train, "shuffle/pretrain", epoch,
        [&]() -> const std::vector<double>& { return w; },
        [&](const std::vector<double>& g) {
          for (std::size_t j = 0; j < w.size(); ++j) {
            w[j] = std::clamp(w[j] - train.learning_rate * g[j], 0.0, train.w_max_pre);
          }
        });
    if (!std::isfinite(pass.mean_loss)) {
      throw NumericalError("pretraining diverged at epoch " + std::to_string(epoch));
    }
    result.metrics.push_back({"pretrain", epoch, pass.mean_loss,
                              pass.balanced_accuracy, 0});
  }
  return result;
}

ScaleFactor ComputeScale(std::span<const double> trained_weights,
                         const LrsLevelTable& table) {
  double max_w = 0.0;
  for (const double w : trained_weights) max_w = std::max(max_w, w);
  if (!(max_w > 0.0)) {
    throw ScaleError("cannot scale: every trained weight is zero");
  }
  return {table.max_conductance() / max_w};
}

std::vector<double> WeightGrid(const LrsLevelTable& table, ScaleFactor scale,
                               bool hrs_off_level) {
  std::vector<double> grid;
  grid.reserve(table.size() + 1);
  for (const LrsLevel& level : table.levels()) {
    grid.push_back(1.0 / level.mu_ohm / scale.s_w);
  }
  if (hrs_off_level) grid.push_back(0.0);
  return grid;
}

std::vector<double> Quantizer::Grid() const {
  return WeightGrid(table, scale, off_state.has_value());
}

int Quantizer::NearestState(double weight) const {
  const std::vector<double> grid = Grid();
  return NearestIndex(grid, weight);
}

double Quantizer::Program(int state, SeededRng& rng) const {
  if (off_state && state == static_cast<int>(table.size())) {
    return SampleHrs(*off_state, rng);
  }
  return ProgramLrs(table, state, rng);
}

double Quantizer::EffectiveWeight(double programmed_ohm) const {
  return 1.0 / programmed_ohm / scale.s_w;
}

double Quantizer::w_max() const { return table.max_conductance() / scale.s_w; }

HiddenWeights QuantizeAll(std::span<const double> weights, const Quantizer& quantizer,
                          SeededRng& program_rng) {
  const std::vector<double> grid = quantizer.Grid();
  HiddenWeights state;
  state.w.assign(weights.begin(), weights.end());
  state.grad_accum.assign(weights.size(), 0.0);
  state.level_index.resize(weights.size());
  state.programmed_ohm.resize(weights.size());
  for (std::size_t j = 0; j < weights.size(); ++j) {
    state.level_index[j] = NearestIndex(grid, weights[j]);
    state.programmed_ohm[j] = quantizer.Program(state.level_index[j], program_rng);
  }
  return state;
}

std::vector<double> EffectiveWeights(const HiddenWeights& state,
                                     const Quantizer& quantizer) {
  std::vector<double> out(state.size());
  for (std::size_t j = 0; j < state.size(); ++j) {
    out[j] = quantizer.EffectiveWeight(state.programmed_ohm[j]);
  }
  return out;
}

std::int64_t ReprogramChanged(HiddenWeights& state, const Quantizer& quantizer,
                              SeededRng& program_rng) {
  const std::vector<double> grid = quantizer.Grid();
  std::int64_t count = 0;
  for (std::size_t j = 0; j < state.size(); ++j) {
    const int nearest = NearestIndex(grid, state.w[j]);
    if (nearest == state.level_index[j]) continue;
    state.level_index[j] = nearest;
    state.programmed_ohm[j] = quantizer.Program(nearest, program_rng);
    ++count;
  }
  return count;
}

QuantizedResult TrainQuantized(const NetworkConfig& config,
                               std::span<const EncodedWindow> dataset,
                               HiddenWeights state, const Quantizer& quantizer,
                               const TrainConfig& train, SeededRng& program_rng) {
  train.Validate();
  if (dataset.empty()) throw ConfigError("training needs a non-empty dataset");
  if (state.size() != config.synapse_count()) {
    throw ConfigError("hidden weights do not match the synapse count");
  }
  QuantizedResult result;
  const double w_max = quantizer.w_max();
  for (int epoch = 1; epoch <= train.n_training; ++epoch) {
    std::fill(state.grad_accum.begin(), state.grad_accum.end(), 0.0);
    // Programmed resistances only change at epoch end.
    const std::vector<double> effective = EffectiveWeights(state, quantizer);
    const EpochPass pass = RunEpoch(
        config, dataset, train, "shuffle/quantized", epoch,
        [&]() -> const std::vector<double>& { return effective; },
        [&](const std::vector<double>& g) {
          for (std::size_t j = 0; j < state.size(); ++j) {
            state.grad_accum[j] += g[j];
            state.w[j] =
                std::clamp(state.w[j] - train.learning_rate * g[j], 0.0, w_max);
          }
        });
    if (!std::isfinite(pass.mean_loss)) {
      throw NumericalError("quantized training diverged at epoch " +
                           std::to_string(epoch));
    }
    const std::int64_t reprogrammed = ReprogramChanged(state, quantizer, program_rng);
    result.metrics.push_back({"quantized", epoch, pass.mean_loss,
                              pass.balanced_accuracy, reprogrammed});
  }
  result.state = std::move(state);
  return result;
}

EvalResult ScoreCounts(std::span<const std::int64_t> spike_counts,
                       std::span<const Label> labels, std::int64_t decision_threshold) {
  if (spike_counts.empty() || spike_counts.size() != labels.size()) {
    throw EvaluationError("evaluation needs a non-empty labelled dataset");
  }
  EvalResult r;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const Label predicted = Classify(spike_counts[i], decision_threshold);
    if (labels[i] == Label::kAnomalous) {
      (predicted == Label::kAnomalous ? r.true_positive : r.false_negative)++;
    } else {
      (predicted == Label::kNormal ? r.true_negative : r.false_positive)++;
    }
  }
  const std::int64_t pos = r.true_positive + r.false_negative;
  const std::int64_t neg = r.true_negative + r.false_positive;
  double sum = 0.0;
  int classes = 0;
  if (pos > 0) {
    sum += static_cast<double>(r.true_positive) / pos;
    ++classes;
  }
  if (neg > 0) {
    sum += static_cast<double>(r.true_negative) / neg;
    ++classes;
  }
  r.balanced_accuracy = sum / classes;
  r.accuracy = static_cast<double>(r.true_positive + r.true_negative) /
               static_cast<double>(labels.size());
  return r;
}

namespace {

std::vector<std::int64_t> CountSpikes(const NetworkConfig& config,
                                      std::span<const double> weights,
                                      std::span<const EncodedWindow> dataset) {
  std::vector<std::int64_t> counts;
  counts.reserve(dataset.size());
  for (const EncodedWindow& w : dataset) {
    counts.push_back(Simulate(config, weights, w.input).spike_count);
  }
  return counts;
}

std::vector<Label> LabelsOf(std::span<const EncodedWindow> dataset) {
  std::vector<Label> labels;
  labels.reserve(dataset.size());
  for (const EncodedWindow& w : dataset) labels.push_back(w.label);
  return labels;
}

}  // namespace

EvalResult Evaluate(const NetworkConfig& config, std::span<const double> weights,
                    std::span<const EncodedWindow> dataset,
                    std::int64_t decision_threshold) {
  if (dataset.empty()) throw EvaluationError("cannot evaluate an empty dataset");
  return ScoreCounts(CountSpikes(config, weights, dataset), LabelsOf(dataset),
                     decision_threshold);
}

std::int64_t SelectDecisionThreshold(const NetworkConfig& config,
                                     std::span<const double> weights,
                                     std::span<const EncodedWindow> validation,
                                     std::int64_t lo, std::int64_t hi) {
  if (validation.empty()) throw EvaluationError("empty validation set");
  if (lo < 1 || hi < lo) throw DomainError("invalid threshold range");
  const auto counts = CountSpikes(config, weights, validation);
  const auto labels = LabelsOf(validation);
  std::int64_t best = lo;
  double best_acc = -1.0;
  for (std::int64_t th = lo; th <= hi; ++th) {
    const double acc = ScoreCounts(counts, labels, th).balanced_accuracy;
    if (acc > best_acc) {
      best_acc = acc;
      best = th;
    }
  }
  return best;
}

}  // namespace dendrram
