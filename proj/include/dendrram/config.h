#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dendrram/device.h"
#include "dendrram/encoding.h"
#include "dendrram/network.h"
#include "dendrram/trainer.h"

namespace dendrram {

struct EncodingConfig {
  std::string source = "synthetic";  // "synthetic" or "csv"
  std::string recording_csv;
  std::string annotation_csv;
  double threshold_mv = kDefaultDeltaThresholdMv;
  double dt_s = kDefaultDtS;
  double window_s = kDefaultWindowS;
  int n_train = 400;
  int n_test = 100;
  SynthEcgParams synth;

  friend bool operator==(const EncodingConfig&, const EncodingConfig&) = default;
};

struct NetworkSection {
  int n_branches = 2;
  int synapses_per_branch = 64;
  int channels = 2;
  // Per-branch HRS medians; empty means every branch uses device.hrs.
  std::vector<double> branch_hrs_median_ohm;
  std::vector<double> tau_branch_s{0.02, 0.1};
  SomaConfig soma;

  friend bool operator==(const NetworkSection&, const NetworkSection&) = default;
};

struct SweepConfig {
  std::vector<double> hrs_median_ohm;
  int repetitions = 3;
  int jobs = 1;

  // 7 log-spaced points from 10 GOhm to 1 TOhm.
  static std::vector<double> DefaultGrid();
  friend bool operator==(const SweepConfig&, const SweepConfig&) = default;
};

struct ExperimentConfig {
  DeviceConfig device;
  EncodingConfig encoding;
  NetworkSection network;
  TrainConfig training;
  SweepConfig sweep{SweepConfig::DefaultGrid()};
  std::string output_dir = "out";
  std::uint64_t seed = 42;

  // Cross-section checks (channel counts, split sizes, ...).
  void Validate() const;
  // Spec consumed by InitNetwork, resolving per-branch HRS overrides.
  NetworkSpec MakeNetworkSpec() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

// Strict JSON: unknown keys and wrong types are ConfigErrors. Missing keys
// keep their defaults.
ExperimentConfig ParseExperimentConfig(std::string_view json_text);
ExperimentConfig LoadExperimentConfig(const std::filesystem::path& path);
std::string SerializeExperimentConfig(const ExperimentConfig& config);

// Standalone device-config file; same schema as the "device" section.
DeviceConfig ParseDeviceConfig(std::string_view json_text);
DeviceConfig LoadDeviceConfig(const std::filesystem::path& path);
std::string SerializeDeviceConfig(const DeviceConfig& device);

// 64-bit FNV-1a, hex encoded.
std::string ContentHash(std::string_view bytes);

}  // namespace dendrram
