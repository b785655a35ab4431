#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dendrram/config.h"
#include "dendrram/encoding.h"
#include "dendrram/network.h"
#include "dendrram/trainer.h"

namespace dendrram {

// Memory footprint reported for the reference network (2 x 64 synapses).
inline constexpr std::int64_t kReferenceFootprintBits = 256;
inline constexpr int kReferenceBranches = 2;
inline constexpr int kReferenceSynapsesPerBranch = 64;

inline constexpr int kModelFormatVersion = 1;
inline constexpr int kDatasetFormatVersion = 1;

struct PreparedDataset {
  double dt_s = kDefaultDtS;
  int channels = 0;
  std::int64_t window_steps = 0;
  std::vector<LabeledWindow> train;
  std::vector<LabeledWindow> test;
};

// Generate or load the recording, delta-modulate, segment and split. The
// first n_train windows form the training split, the next n_test the test
// split.
PreparedDataset PrepareDataset(const ExperimentConfig& config, std::uint64_t seed);

std::string SerializeDataset(const PreparedDataset& dataset);
PreparedDataset ParseDataset(std::string_view json_text);

std::vector<EncodedWindow> Encode(const std::vector<LabeledWindow>& windows);

struct TrainedModel {
  std::string config_hash;
  std::uint64_t seed = 0;
  NetworkConfig network;  // synapse weights hold the effective weights
  DeviceConfig device;
  bool hrs_off_level = true;
  ScaleFactor scale;
  HiddenWeights hidden;
  std::vector<double> pretrained_weights;
  std::int64_t decision_threshold = 1;
  std::int64_t pretrain_decision_threshold = 1;
  double pretrain_test_accuracy = 0.0;
  double final_test_accuracy = 0.0;

  Quantizer MakeQuantizer() const;
};

std::string SerializeModel(const TrainedModel& model);
TrainedModel ParseModel(std::string_view json_text);
TrainedModel LoadModel(const std::filesystem::path& path);

struct TrainOutcome {
  TrainedModel model;
  std::vector<EpochMetrics> metrics;
  EvalResult pretrain_eval;  // full-precision weights on the test split
  EvalResult final_eval;     // programmed weights on the test split
};

// pretrain -> compute_scale -> quantize_all -> train_quantized, then
// evaluation of both stages on the test split.
TrainOutcome TrainModel(const ExperimentConfig& config, const PreparedDataset& dataset,
                        std::uint64_t seed);

std::string MetricsCsv(const std::vector<EpochMetrics>& metrics);

// File names inside the output directory.
struct OutputPaths {
  std::filesystem::path dir;
  std::filesystem::path dataset() const { return dir / "dataset.json"; }
  std::filesystem::path manifest() const { return dir / "manifest.json"; }
  std::filesystem::path model() const { return dir / "model.json"; }
  std::filesystem::path metrics() const { return dir / "metrics.csv"; }
  std::filesystem::path summary() const { return dir / "summary.json"; }
  std::filesystem::path sweep() const { return dir / "sweep.csv"; }
  std::filesystem::path sweep_summary() const { return dir / "sweep_summary.json"; }
};

struct PrepareResult {
  std::string content_hash;
  std::size_t n_windows = 0;
  std::size_t n_normal = 0;
  std::size_t n_anomalous = 0;
};

PrepareResult CmdPrepare(const ExperimentConfig& config);
TrainOutcome CmdTrain(const ExperimentConfig& config);
// Evaluates a model file on the prepared test split.
EvalResult CmdEval(const ExperimentConfig& config, const std::filesystem::path& model);

struct SweepRow {
  double hrs_median_ohm = 0.0;
  double mean_delay_ms = 0.0;  // median R * C, the nominal delay
  double empirical_mean_delay_ms = 0.0;
  double accuracy = 0.0;
  std::uint64_t seed = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<std::string> failures;
  // Point with the highest mean accuracy over repetitions.
  double best_hrs_median_ohm = 0.0;
  double best_mean_delay_ms = 0.0;
  double best_accuracy = 0.0;

  // Mean accuracy per sweep point, in grid order.
  std::vector<std::pair<double, double>> MeanAccuracyByDelay() const;
};

// Runs every (grid point, repetition) cycle in memory; rows come back in grid
// order. Failing points are recorded and skipped.
SweepResult RunSweep(const ExperimentConfig& config);
SweepResult CmdSweep(const ExperimentConfig& config);
std::string SweepCsv(const SweepResult& result);

struct Report {
  std::int64_t synapse_count = 0;
  std::int64_t level_count = 0;
  std::int64_t footprint_bits = 0;
  double delay_min_ms = 0.0;
  double delay_mean_ms = 0.0;
  double delay_max_ms = 0.0;

  std::string Text() const;
};

Report MakeReport(const TrainedModel& model);
Report CmdReport(const std::filesystem::path& model);

}  // namespace dendrram
