#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "dendrram/device.h"
#include "dendrram/encoding.h"
#include "dendrram/rng.h"

namespace dendrram {

struct SynapseConfig {
  int branch_index = 0;
  int source_channel = 0;
  std::int64_t delay_steps = 0;
  double weight = 0.0;
  // Sampled HRS resistance behind the delay; kept for reporting.
  double delay_resistance_ohm = 0.0;

  friend bool operator==(const SynapseConfig&, const SynapseConfig&) = default;
};

struct BranchConfig {
  double tau_s = 0.02;
  std::vector<SynapseConfig> synapses;

  friend bool operator==(const BranchConfig&, const BranchConfig&) = default;
};

struct SomaConfig {
  double tau_mem_s = 0.02;
  double v_threshold = 1.0;
  double v_reset = 0.0;

  friend bool operator==(const SomaConfig&, const SomaConfig&) = default;
};

// Immutable topology plus weights. Synapses are addressed in branch-major
// order by a flat index everywhere a weight vector is passed around.
struct NetworkConfig {
  double dt_s = 1e-3;
  int channels = 0;
  std::vector<BranchConfig> branches;
  SomaConfig soma;

  std::size_t synapse_count() const;
  std::vector<double> Weights() const;
  void SetWeights(std::span<const double> weights);
  // Throws ConfigError when the configuration is internally inconsistent.
  void Validate() const;

  friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

// Parameters for InitNetwork. hrs has either one entry shared by all branches
// or one entry per branch.
struct NetworkSpec {
  int n_branches = 2;
  int synapses_per_branch = 64;
  int channels = 2;
  std::vector<HrsDistribution> hrs;
  std::vector<double> tau_branch_s{0.02, 0.1};
  SomaConfig soma;
  double capacitance_f = kDefaultCapacitanceF;
  double dt_s = 1e-3;
  double init_weight_max = 0.5;
};

// Samples one fixed delay per synapse from its branch's HRS law (device_rng)
// and draws initial weights uniformly on [0, init_weight_max] (init_rng).
// Source channels are assigned round-robin within each branch.
NetworkConfig InitNetwork(const NetworkSpec& spec, SeededRng& device_rng,
                          SeededRng& init_rng);

std::int64_t DelayToSteps(double delay_s, double dt_s);

class NetworkState {
 public:
  explicit NetworkState(const NetworkConfig& config);

  void Reset();

  std::span<const double> branch_currents() const { return currents_; }
  double membrane_v() const { return membrane_v_; }
  std::int64_t step_index() const { return step_index_; }

 private:
  friend int Step(const NetworkConfig&, NetworkState&, std::span<const std::uint8_t>,
                  double*);

  std::vector<double> currents_;
  double membrane_v_ = 0.0;
  std::int64_t step_index_ = 0;
  // One ring per synapse of depth delay_steps + 1, packed back to back.
  std::vector<std::uint8_t> rings_;
  std::vector<std::size_t> ring_offset_;
  std::vector<std::size_t> ring_depth_;
};

// Advances one dt. input_spikes holds one 0/1 entry per channel. Returns the
// soma spike. If pre_reset_v is non-null it receives the membrane value
// before any reset.
int Step(const NetworkConfig& config, NetworkState& state,
         std::span<const std::uint8_t> input_spikes, double* pre_reset_v = nullptr);

struct ForwardTrace {
  // [step][branch]
  std::vector<std::vector<double>> branch_currents;
  // Membrane value before reset at each step.
  std::vector<double> membrane_v;
  std::vector<std::uint8_t> spikes;

  std::size_t size() const { return membrane_v.size(); }
};

struct RunResult {
  std::int64_t spike_count = 0;
  std::optional<ForwardTrace> trace;
};

// Runs the whole raster from a zeroed state through Step.
RunResult Run(const NetworkConfig& config, const SpikeRaster& raster,
              bool record = false);

Label Classify(std::int64_t spike_count, std::int64_t decision_threshold);

// Input spike steps per channel; the form the event-driven path consumes.
struct ChannelSpikes {
  std::int64_t duration_steps = 0;
  std::vector<std::vector<std::int64_t>> steps;  // [channel] -> ascending steps

  static ChannelSpikes FromRaster(const SpikeRaster& raster);
};

struct WindowResponse {
  std::vector<double> membrane_v;  // pre-reset, per step
  std::vector<std::uint8_t> spikes;
  std::int64_t spike_count = 0;
};

// Event-driven equivalent of Run with `weights` overriding the config
// weights: delayed input spikes are scattered into per-branch drive buffers
// instead of being shifted through ring buffers. The summation order matches
// Step, so the membrane trace is bit-identical.
WindowResponse Simulate(const NetworkConfig& config, std::span<const double> weights,
                        const ChannelSpikes& input);

}  // namespace dendrram
