#include "dendrram/network.h"

#include <cmath>
#include <string>

#include "dendrram/errors.h"

namespace dendrram {

std::size_t NetworkConfig::synapse_count() const {
  std::size_t n = 0;
  for (const auto& b : branches) n += b.synapses.size();
  return n;
}

std::vector<double> NetworkConfig::Weights() const {
  std::vector<double> w;
  w.reserve(synapse_count());
  for (const auto& b : branches) {
    for (const auto& s : b.synapses) w.push_back(s.weight);
  }
  return w;
}

void NetworkConfig::SetWeights(std::span<const double> weights) {
  if (weights.size() != synapse_count()) {
    throw ConfigError("weight vector has " + std::to_string(weights.size()) +
                      " entries for " + std::to_string(synapse_count()) +
                      " synapses");
  }
  std::size_t k = 0;
  for (auto& b : branches) {
    for (auto& s : b.synapses) s.weight = weights[k++];
  }
}

void NetworkConfig::Validate() const {
  if (!(dt_s > 0.0)) throw ConfigError("dt_s must be positive");
  if (channels < 1) throw ConfigError("network needs at least one channel");
  if (branches.empty()) throw ConfigError("network needs at least one branch");
  if (!(soma.tau_mem_s > 0.0)) throw ConfigError("tau_mem_s must be positive");
  if (!(soma.v_threshold > soma.v_reset)) {
    throw ConfigError("v_threshold must exceed v_reset");
  }
  for (std::size_t i = 0; i < branches.size(); ++i) {
    const BranchConfig& b = branches[i];
    if (!(b.tau_s > 0.0)) throw ConfigError("branch tau must be positive");
    for (const SynapseConfig& s : b.synapses) {
      if (s.branch_index != static_cast<int>(i)) {
        throw ConfigError("synapse branch_index does not match its branch");
      }
      if (s.source_channel < 0 || s.source_channel >= channels) {
        throw ConfigError("synapse source channel out of range");
      }
      if (s.delay_steps < 0) throw ConfigError("negative synaptic delay");
      if (!(s.weight >= 0.0)) throw ConfigError("synaptic weights must be >= 0");
    }
  }
}

std::int64_t DelayToSteps(double delay_s, double dt_s) {
  return std::llround(delay_s / dt_s);
}

NetworkConfig InitNetwork(const NetworkSpec& spec, SeededRng& device_rng,
                          SeededRng& init_rng) {
  if (spec.n_branches < 1 || spec.synapses_per_branch < 1 || spec.channels < 1) {
    throw ConfigError("branch, synapse and channel counts must be >= 1");
  }
  if (spec.synapses_per_branch % spec.channels != 0) {
    throw ConfigError("synapses_per_branch (" +
                      std::to_string(spec.synapses_per_branch) +
                      ") is not divisible by channels (" +
                      std::to_string(spec.channels) + ")");
  }
  if (spec.hrs.size() != 1 && spec.hrs.size() != static_cast<std::size_t>(spec.n_branches)) {
    throw ConfigError("need one HRS law, or one per branch");
  }
  if (spec.tau_branch_s.size() != 1 &&
      spec.tau_branch_s.size() != static_cast<std::size_t>(spec.n_branches)) {
    throw ConfigError("need one branch tau, or one per branch");
  }
  if (!(spec.init_weight_max >= 0.0)) {
    throw ConfigError("init_weight_max must be >= 0");
  }

  NetworkConfig config;
  config.dt_s = spec.dt_s;
  config.channels = spec.channels;
  config.soma = spec.soma;
  config.branches.resize(spec.n_branches);
  for (int i = 0; i < spec.n_branches; ++i) {
    BranchConfig& branch = config.branches[i];
    branch.tau_s = spec.tau_branch_s.size() == 1 ? spec.tau_branch_s[0]
                                                 : spec.tau_branch_s[i];
    const HrsDistribution& hrs = spec.hrs.size() == 1 ? spec.hrs[0] : spec.hrs[i];
    branch.synapses.resize(spec.synapses_per_branch);
    for (int j = 0; j < spec.synapses_per_branch; ++j) {
      SynapseConfig& s = branch.synapses[j];
      const DelayElement delay = MakeDelayElement(hrs, spec.capacitance_f, device_rng);
      s.branch_index = i;
      s.source_channel = j % spec.channels;
      s.delay_resistance_ohm = delay.resistance_ohm;
      s.delay_steps = DelayToSteps(delay.delay_s, spec.dt_s);
      s.weight = init_rng.Uniform(0.0, spec.init_weight_max);
    }
  }
  config.Validate();
  return config;
}

NetworkState::NetworkState(const NetworkConfig& config) {
  currents_.assign(config.branches.size(), 0.0);
  std::size_t offset = 0;
  for (const auto& b : config.branches) {
    for (const auto& s : b.synapses) {
      ring_offset_.push_back(offset);
      ring_depth_.push_back(static_cast<std::size_t>(s.delay_steps) + 1);
      offset += ring_depth_.back();
    }
  }
  rings_.assign(offset, 0);
}

void NetworkState::Reset() {
  std::fill(currents_.begin(), currents_.end(), 0.0);
  std::fill(rings_.begin(), rings_.end(), std::uint8_t{0});
  membrane_v_ = 0.0;
  step_index_ = 0;
}

int Step(const NetworkConfig& config, NetworkState& state,
         std::span<const std::uint8_t> input_spikes, double* pre_reset_v) {
  const double dt = config.dt_s;
  const auto t = static_cast<std::size_t>(state.step_index_);
  std::size_t k = 0;
  double soma_input = 0.0;
  for (std::size_t i = 0; i < config.branches.size(); ++i) {
    const BranchConfig& branch = config.branches[i];
    double drive = 0.0;
    for (const SynapseConfig& s : branch.synapses) {
      const std::size_t depth = state.ring_depth_[k];
      std::uint8_t* ring = state.rings_.data() + state.ring_offset_[k];
      ring[t % depth] = input_spikes[s.source_channel];
      // Written delay_steps steps ago; with depth = delay_steps + 1 this is
      // the slot after the one just written.
      if (ring[(t + 1) % depth] != 0) drive += s.weight;
      ++k;
    }
    double& current = state.currents_[i];
    current = current * std::exp(-dt / branch.tau_s) + drive;
    soma_input += current * dt;
  }
  double& v = state.membrane_v_;
  v = v * std::exp(-dt / config.soma.tau_mem_s) + soma_input;
  if (pre_reset_v != nullptr) *pre_reset_v = v;
  ++state.step_index_;
  if (v >= config.soma.v_threshold) {
    v = config.soma.v_reset;
    return 1;
  }
  return 0;
}

RunResult Run(const NetworkConfig& config, const SpikeRaster& raster, bool record) {
  if (raster.channels() != config.channels) {
    throw ConfigError("raster has " + std::to_string(raster.channels()) +
                      " channels, network expects " +
                      std::to_string(config.channels));
  }
  NetworkState state(config);
  RunResult result;
  if (record) {
    result.trace.emplace();
    result.trace->branch_currents.reserve(raster.duration_steps());
    result.trace->membrane_v.reserve(raster.duration_steps());
    result.trace->spikes.reserve(raster.duration_steps());
  }
  std::vector<std::uint8_t> input(config.channels);
  for (std::int64_t t = 0; t < raster.duration_steps(); ++t) {
    for (int c = 0; c < config.channels; ++c) input[c] = raster.at(c, t) ? 1 : 0;
    double v = 0.0;
    const int spike = Step(config, state, input, &v);
    result.spike_count += spike;
    if (record) {
      const auto currents = state.branch_currents();
      result.trace->branch_currents.emplace_back(currents.begin(), currents.end());
      result.trace->membrane_v.push_back(v);
      result.trace->spikes.push_back(static_cast<std::uint8_t>(spike));
    }
  }
  return result;
}

Label Classify(std::int64_t spike_count, std::int64_t decision_threshold) {
  if (decision_threshold < 1) throw DomainError("decision threshold must be >= 1");
  return spike_count >= decision_threshold ? Label::kAnomalous : Label::kNormal;
}

ChannelSpikes ChannelSpikes::FromRaster(const SpikeRaster& raster) {
  ChannelSpikes out;
  out.duration_steps = raster.duration_steps();
  out.steps.resize(raster.channels());
  for (int c = 0; c < raster.channels(); ++c) out.steps[c] = raster.SpikeSteps(c);
  return out;
}

WindowResponse Simulate(const NetworkConfig& config, std::span<const double> weights,
                        const ChannelSpikes& input) {
  if (input.steps.size() != static_cast<std::size_t>(config.channels)) {
    throw ConfigError("input has " + std::to_string(input.steps.size()) +
                      " channels, network expects " +
                      std::to_string(config.channels));
  }
  if (weights.size() != config.synapse_count()) {
    throw ConfigError("weight vector does not match the synapse count");
  }
  const std::int64_t steps = input.duration_steps;
  const std::size_t n_branches = config.branches.size();
  std::vector<double> drive(n_branches * steps, 0.0);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n_branches; ++i) {
    double* row = drive.data() + i * steps;
    for (const SynapseConfig& s : config.branches[i].synapses) {
      const double w = weights[k++];
      for (const std::int64_t t : input.steps[s.source_channel]) {
        const std::int64_t arrival = t + s.delay_steps;
        if (arrival >= steps) break;
        row[arrival] += w;
      }
    }
  }

  WindowResponse out;
  out.membrane_v.resize(steps);
  out.spikes.resize(steps);
  std::vector<double> decay(n_branches);
  for (std::size_t i = 0; i < n_branches; ++i) {
    decay[i] = std::exp(-config.dt_s / config.branches[i].tau_s);
  }
  const double soma_decay = std::exp(-config.dt_s / config.soma.tau_mem_s);
  std::vector<double> current(n_branches, 0.0);
  double v = 0.0;
  for (std::int64_t t = 0; t < steps; ++t) {
    double soma_input = 0.0;
    for (std::size_t i = 0; i < n_branches; ++i) {
      current[i] = current[i] * decay[i] + drive[i * steps + t];
      soma_input += current[i] * config.dt_s;
    }
    v = v * soma_decay + soma_input;
    out.membrane_v[t] = v;
    if (v >= config.soma.v_threshold) {
      out.spikes[t] = 1;
      ++out.spike_count;
      v = config.soma.v_reset;
    }
  }
  return out;
}

}  // namespace dendrram
