#include "dendrram/experiment.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "dendrram/errors.h"
#include "json.hpp"

namespace dendrram {
namespace {

using nlohmann::json;

std::string ReadText(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteText(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

json ParseJson(std::string_view text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(what + ": " + e.what());
  }
}

json WindowsToJson(const std::vector<LabeledWindow>& windows) {
  json arr = json::array();
  for (const LabeledWindow& w : windows) {
    json spikes = json::array();
    for (int c = 0; c < w.raster.channels(); ++c) spikes.push_back(w.raster.SpikeSteps(c));
    arr.push_back({{"id", w.id}, {"label", LabelName(w.label)}, {"spikes", spikes}});
  }
  return arr;
}

std::vector<LabeledWindow> WindowsFromJson(const json& arr, double dt_s, int channels,
                                           std::int64_t steps) {
  std::vector<LabeledWindow> out;
  for (const json& w : arr) {
    LabeledWindow window;
    window.id = w.at("id").get<std::int64_t>();
    window.label = ParseLabel(w.at("label").get<std::string>());
    window.raster = SpikeRaster(dt_s, channels, steps);
    const json& spikes = w.at("spikes");
    if (spikes.size() != static_cast<std::size_t>(channels)) {
      throw ParseError("dataset window " + std::to_string(window.id) +
                       " has the wrong channel count");
    }
    for (int c = 0; c < channels; ++c) {
      for (const json& t : spikes[c]) {
        const auto step = t.get<std::int64_t>();
        if (step < 0 || step >= steps) {
          throw ParseError("dataset window " + std::to_string(window.id) +
                           " has a spike outside the window");
        }
        window.raster.set(c, step);
      }
    }
    out.push_back(std::move(window));
  }
  return out;
}

template <typename T>
std::vector<T> ArrayOf(const json& j, const char* key) {
  return j.at(key).get<std::vector<T>>();
}

// The output location does not identify the experiment.
std::string ConfigHash(ExperimentConfig config) {
  config.output_dir.clear();
  return ContentHash(SerializeExperimentConfig(config));
}

}  // namespace

PreparedDataset PrepareDataset(const ExperimentConfig& config, std::uint64_t seed) {
  const EncodingConfig& enc = config.encoding;
  Recording rec;
  if (enc.source == "synthetic") {
    SeededRng data_rng = SeededRng::Named(seed, "data");
    rec = SynthEcg(enc.synth, data_rng);
  } else {
    rec = LoadRecording(enc.recording_csv, enc.annotation_csv);
  }
  const SpikeRaster raster = DeltaModulate(rec.trace, enc.threshold_mv, enc.dt_s);
  if (raster.channels() != config.network.channels) {
    throw ConfigError("recording yields " + std::to_string(raster.channels()) +
                      " spike channels but network.channels is " +
                      std::to_string(config.network.channels));
  }
  std::vector<LabeledWindow> windows = SegmentBeats(raster, rec.annotations, enc.window_s);
  const std::size_t need = static_cast<std::size_t>(enc.n_train + enc.n_test);
  if (windows.size() < need) {
    throw ConfigError("only " + std::to_string(windows.size()) +
                      " windows available, n_train + n_test = " + std::to_string(need));
  }
  PreparedDataset ds;
  ds.dt_s = enc.dt_s;
  ds.channels = raster.channels();
  ds.window_steps = std::llround(enc.window_s / enc.dt_s);
  ds.train.assign(windows.begin(), windows.begin() + enc.n_train);
  ds.test.assign(windows.begin() + enc.n_train, windows.begin() + need);
  return ds;
}

std::string SerializeDataset(const PreparedDataset& dataset) {
  json j = {{"format", "dendrram-dataset"},
            {"version", kDatasetFormatVersion},
            {"dt_s", dataset.dt_s},
            {"channels", dataset.channels},
            {"window_steps", dataset.window_steps},
            {"train", WindowsToJson(dataset.train)},
            {"test", WindowsToJson(dataset.test)}};
  return j.dump() + "\n";
}

PreparedDataset ParseDataset(std::string_view json_text) {
  const json j = ParseJson(json_text, "dataset");
  try {
    if (j.at("format") != "dendrram-dataset") throw ParseError("not a dataset file");
    if (j.at("version") != kDatasetFormatVersion) {
      throw ParseError("unsupported dataset version");
    }
    PreparedDataset ds;
    ds.dt_s = j.at("dt_s").get<double>();
    ds.channels = j.at("channels").get<int>();
    ds.window_steps = j.at("window_steps").get<std::int64_t>();
    ds.train = WindowsFromJson(j.at("train"), ds.dt_s, ds.channels, ds.window_steps);
    ds.test = WindowsFromJson(j.at("test"), ds.dt_s, ds.channels, ds.window_steps);
    return ds;
  } catch (const json::exception& e) {
    throw ParseError(std::string("dataset: ") + e.what());
  }
}

std::vector<EncodedWindow> Encode(const std::vector<LabeledWindow>& windows) {
  std::vector<EncodedWindow> out;
  out.reserve(windows.size());
  for (const LabeledWindow& w : windows) out.push_back(EncodedWindow::FromLabeled(w));
  return out;
}

Quantizer TrainedModel::MakeQuantizer() const {
  Quantizer q{device.lrs, scale, std::nullopt};
  if (hrs_off_level) q.off_state = device.hrs;
  return q;
}

std::string SerializeModel(const TrainedModel& m) {
  json branches = json::array();
  for (const BranchConfig& b : m.network.branches) {
    json synapses = json::array();
    for (const SynapseConfig& s : b.synapses) {
      synapses.push_back({{"channel", s.source_channel},
                          {"delay_steps", s.delay_steps},
                          {"delay_resistance_ohm", s.delay_resistance_ohm},
                          {"weight", s.weight}});
    }
    branches.push_back({{"tau_s", b.tau_s}, {"synapses", synapses}});
  }
  json j = {
      {"format", "dendrram-model"},
      {"version", kModelFormatVersion},
      {"config_hash", m.config_hash},
      {"seed", m.seed},
      {"network",
       {{"dt_s", m.network.dt_s},
        {"channels", m.network.channels},
        {"soma",
         {{"tau_mem_s", m.network.soma.tau_mem_s},
          {"v_threshold", m.network.soma.v_threshold},
          {"v_reset", m.network.soma.v_reset}}},
        {"branches", branches}}},
      {"device", json::parse(SerializeDeviceConfig(m.device))},
      {"quantization",
       {{"s_w", m.scale.s_w},
        {"hrs_off_level", m.hrs_off_level},
        {"hidden_weights", m.hidden.w},
        {"level_index", m.hidden.level_index},
        {"programmed_ohm", m.hidden.programmed_ohm}}},
      {"pretrained_weights", m.pretrained_weights},
      {"decision_threshold", m.decision_threshold},
      {"pretrain_decision_threshold", m.pretrain_decision_threshold},
      {"results",
       {{"pretrain_test_accuracy", m.pretrain_test_accuracy},
        {"final_test_accuracy", m.final_test_accuracy}}},
  };
  return j.dump(1) + "\n";
}

TrainedModel ParseModel(std::string_view json_text) {
  if (json_text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw ParseError("model file is empty");
  }
  const json j = ParseJson(json_text, "model");
  try {
    if (j.at("format") != "dendrram-model") throw ParseError("not a model file");
    if (j.at("version") != kModelFormatVersion) {
      throw ParseError("unsupported model version " + j.at("version").dump());
    }
    TrainedModel m;
    m.config_hash = j.at("config_hash").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    const json& net = j.at("network");
    m.network.dt_s = net.at("dt_s").get<double>();
    m.network.channels = net.at("channels").get<int>();
    const json& soma = net.at("soma");
    m.network.soma = {soma.at("tau_mem_s").get<double>(),
                      soma.at("v_threshold").get<double>(),
                      soma.at("v_reset").get<double>()};
    for (const json& b : net.at("branches")) {
      BranchConfig branch;
      branch.tau_s = b.at("tau_s").get<double>();
      const int index = static_cast<int>(m.network.branches.size());
      for (const json& s : b.at("synapses")) {
        SynapseConfig syn;
        syn.branch_index = index;
        syn.source_channel = s.at("channel").get<int>();
        syn.delay_steps = s.at("delay_steps").get<std::int64_t>();
        syn.delay_resistance_ohm = s.at("delay_resistance_ohm").get<double>();
        syn.weight = s.at("weight").get<double>();
        branch.synapses.push_back(syn);
      }
      m.network.branches.push_back(std::move(branch));
    }
    m.network.Validate();
    m.device = ParseDeviceConfig(j.at("device").dump());
    const json& q = j.at("quantization");
    m.scale.s_w = q.at("s_w").get<double>();
    m.hrs_off_level = q.at("hrs_off_level").get<bool>();
    m.hidden.w = ArrayOf<double>(q, "hidden_weights");
    m.hidden.level_index = ArrayOf<int>(q, "level_index");
    m.hidden.programmed_ohm = ArrayOf<double>(q, "programmed_ohm");
    m.hidden.grad_accum.assign(m.hidden.w.size(), 0.0);
    m.pretrained_weights = ArrayOf<double>(j, "pretrained_weights");
    m.decision_threshold = j.at("decision_threshold").get<std::int64_t>();
    m.pretrain_decision_threshold =
        j.at("pretrain_decision_threshold").get<std::int64_t>();
    if (m.decision_threshold < 1 || m.pretrain_decision_threshold < 1) {
      throw ParseError("decision thresholds must be >= 1");
    }
    m.pretrain_test_accuracy = j.at("results").at("pretrain_test_accuracy").get<double>();
    m.final_test_accuracy = j.at("results").at("final_test_accuracy").get<double>();
    const std::size_t n = m.network.synapse_count();
    if (n == 0) throw ParseError("model has no synapses");
    if (m.hidden.w.size() != n || m.hidden.level_index.size() != n ||
        m.hidden.programmed_ohm.size() != n || m.pretrained_weights.size() != n) {
      throw ParseError("model arrays do not match the synapse count");
    }
    return m;
  } catch (const json::exception& e) {
    throw ParseError(std::string("model: ") + e.what());
  } catch (const ConfigError& e) {
    throw ParseError(std::string("model: ") + e.what());
  }
}

TrainedModel LoadModel(const std::filesystem::path& path) {
  try {
    return ParseModel(ReadText(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

TrainOutcome TrainModel(const ExperimentConfig& config, const PreparedDataset& dataset,
                        std::uint64_t seed) {
  if (dataset.train.empty()) throw ConfigError("training split is empty");
  if (dataset.test.empty()) throw EvaluationError("test split is empty");
  SeededRng device_rng = SeededRng::Named(seed, "device");
  SeededRng init_rng = SeededRng::Named(seed, "init");
  SeededRng program_rng = SeededRng::Named(seed, "program");

  NetworkConfig net = InitNetwork(config.MakeNetworkSpec(), device_rng, init_rng);
  const std::vector<EncodedWindow> train = Encode(dataset.train);
  const std::vector<EncodedWindow> test = Encode(dataset.test);
  TrainConfig tc = config.training;
  tc.seed = seed;

  TrainOutcome out;
  PretrainResult pre = Pretrain(net, train, net.Weights(), tc);
  const std::int64_t pre_threshold = SelectDecisionThreshold(
      net, pre.weights, train, tc.decision_threshold, tc.decision_threshold_max);
  out.pretrain_eval = Evaluate(net, pre.weights, test, pre_threshold);

  TrainedModel& m = out.model;
  m.device = config.device;
  m.hrs_off_level = tc.hrs_off_level;
  m.scale = ComputeScale(pre.weights, config.device.lrs);
  const Quantizer quantizer = m.MakeQuantizer();
  HiddenWeights hidden = QuantizeAll(pre.weights, quantizer, program_rng);
  QuantizedResult quant =
      TrainQuantized(net, train, std::move(hidden), quantizer, tc, program_rng);

  const std::vector<double> effective = EffectiveWeights(quant.state, quantizer);
  net.SetWeights(effective);
  const std::int64_t threshold = SelectDecisionThreshold(
      net, effective, train, tc.decision_threshold, tc.decision_threshold_max);
  out.final_eval = Evaluate(net, effective, test, threshold);

  ExperimentConfig hashed = config;
  hashed.seed = seed;
  m.config_hash = ConfigHash(hashed);
  m.seed = seed;
  m.network = std::move(net);
  m.hidden = std::move(quant.state);
  m.pretrained_weights = std::move(pre.weights);
  m.decision_threshold = threshold;
  m.pretrain_decision_threshold = pre_threshold;
  m.pretrain_test_accuracy = out.pretrain_eval.balanced_accuracy;
  m.final_test_accuracy = out.final_eval.balanced_accuracy;

  out.metrics = std::move(pre.metrics);
  out.metrics.insert(out.metrics.end(), quant.metrics.begin(), quant.metrics.end());
  return out;
}

std::string MetricsCsv(const std::vector<EpochMetrics>& metrics) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "phase,epoch,loss,accuracy,reprogram_count\n";
  for (const EpochMetrics& m : metrics) {
    out << m.phase << ',' << m.epoch << ',' << m.loss << ',' << m.accuracy << ','
        << m.reprogram_count << '\n';
  }
  return out.str();
}

PrepareResult CmdPrepare(const ExperimentConfig& config) {
  const OutputPaths paths{config.output_dir};
  const PreparedDataset ds = PrepareDataset(config, config.seed);
  const std::string text = SerializeDataset(ds);
  WriteText(paths.dataset(), text);

  PrepareResult result;
  result.content_hash = ContentHash(text);
  json listing = json::array();
  const auto list = [&](const std::vector<LabeledWindow>& windows, const char* split) {
    for (const LabeledWindow& w : windows) {
      listing.push_back({{"id", w.id}, {"label", LabelName(w.label)}, {"split", split}});
      (w.label == Label::kAnomalous ? result.n_anomalous : result.n_normal)++;
    }
  };
  list(ds.train, "train");
  list(ds.test, "test");
  result.n_windows = ds.train.size() + ds.test.size();

  const EncodingConfig& enc = config.encoding;
  json source = {{"kind", enc.source}};
  if (enc.source == "synthetic") {
    source["generator"] = json::parse(SerializeExperimentConfig(config))["encoding"]["synth"];
  } else {
    source["recording_csv"] = enc.recording_csv;
    source["annotation_csv"] = enc.annotation_csv;
  }
  const json manifest = {
      {"format", "dendrram-manifest"},
      {"version", kDatasetFormatVersion},
      {"dataset_file", paths.dataset().filename().string()},
      {"content_hash", result.content_hash},
      {"seed", config.seed},
      {"dt_s", ds.dt_s},
      {"threshold_mv", enc.threshold_mv},
      {"window_s", enc.window_s},
      {"channels", ds.channels},
      {"n_train", ds.train.size()},
      {"n_test", ds.test.size()},
      {"class_counts",
       {{"normal", result.n_normal}, {"anomalous", result.n_anomalous}}},
      {"source", source},
      {"windows", listing},
  };
  WriteText(paths.manifest(), manifest.dump(1) + "\n");
  return result;
}

TrainOutcome CmdTrain(const ExperimentConfig& config) {
  const OutputPaths paths{config.output_dir};
  if (!std::filesystem::exists(paths.dataset())) {
    throw IoError("no prepared dataset at " + paths.dataset().string() +
                  "; run prepare first");
  }
  const PreparedDataset ds = ParseDataset(ReadText(paths.dataset()));
  TrainOutcome out = TrainModel(config, ds, config.seed);
  WriteText(paths.model(), SerializeModel(out.model));
  WriteText(paths.metrics(), MetricsCsv(out.metrics));
  const auto eval_json = [](const EvalResult& e) {
    return json{{"balanced_accuracy", e.balanced_accuracy},
                {"accuracy", e.accuracy},
                {"true_positive", e.true_positive},
                {"true_negative", e.true_negative},
                {"false_positive", e.false_positive},
                {"false_negative", e.false_negative}};
  };
  std::int64_t reprograms = 0;
  for (const EpochMetrics& m : out.metrics) reprograms += m.reprogram_count;
  const json summary = {{"config_hash", out.model.config_hash},
                        {"seed", config.seed},
                        {"pretrain_test", eval_json(out.pretrain_eval)},
                        {"final_test", eval_json(out.final_eval)},
                        {"pretrain_decision_threshold",
                         out.model.pretrain_decision_threshold},
                        {"decision_threshold", out.model.decision_threshold},
                        {"s_w", out.model.scale.s_w},
                        {"total_reprogram_events", reprograms}};
  WriteText(paths.summary(), summary.dump(1) + "\n");
  return out;
}

EvalResult CmdEval(const ExperimentConfig& config, const std::filesystem::path& model_path) {
  const OutputPaths paths{config.output_dir};
  const TrainedModel model = LoadModel(model_path);
  const PreparedDataset ds = ParseDataset(ReadText(paths.dataset()));
  const std::vector<EncodedWindow> test = Encode(ds.test);
  return Evaluate(model.network, model.network.Weights(), test, model.decision_threshold);
}

std::vector<std::pair<double, double>> SweepResult::MeanAccuracyByDelay() const {
  std::vector<std::pair<double, double>> out;
  std::vector<int> counts;
  for (const SweepRow& row : rows) {
    if (out.empty() || out.back().first != row.mean_delay_ms) {
      out.emplace_back(row.mean_delay_ms, 0.0);
      counts.push_back(0);
    }
    out.back().second += row.accuracy;
    ++counts.back();
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i].second /= counts[i];
  return out;
}

SweepResult RunSweep(const ExperimentConfig& config) {
  if (config.sweep.hrs_median_ohm.empty()) {
    throw ConfigError("sweep.hrs_median_ohm is empty");
  }
  struct Job {
    double median;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (double median : config.sweep.hrs_median_ohm) {
    for (int r = 0; r < config.sweep.repetitions; ++r) {
      jobs.push_back({median, config.seed + static_cast<std::uint64_t>(r)});
    }
  }
  std::vector<std::optional<SweepRow>> rows(jobs.size());
  std::vector<std::string> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const Job& job = jobs[i];
      try {
        ExperimentConfig point = config;
        point.device.hrs = HrsDistribution(job.median, config.device.hrs.sigma_log(),
                                           config.device.hrs.label());
        point.network.branch_hrs_median_ohm.clear();
        const PreparedDataset ds = PrepareDataset(point, job.seed);
        const TrainOutcome out = TrainModel(point, ds, job.seed);
        double delay_sum = 0.0;
        std::size_t n = 0;
        for (const BranchConfig& b : out.model.network.branches) {
          for (const SynapseConfig& s : b.synapses) {
            delay_sum += s.delay_steps * out.model.network.dt_s;
            ++n;
          }
        }
        SweepRow row;
        row.hrs_median_ohm = job.median;
        row.mean_delay_ms = 1e3 * job.median * config.device.capacitance_f;
        row.empirical_mean_delay_ms = 1e3 * delay_sum / static_cast<double>(n);
        row.accuracy = out.final_eval.balanced_accuracy;
        row.seed = job.seed;
        rows[i] = row;
      } catch (const std::exception& e) {
        std::ostringstream msg;
        msg << "median " << job.median << " ohm, seed " << job.seed << ": " << e.what();
        errors[i] = msg.str();
      }
    }
  };
  const int n_threads = std::min<int>(config.sweep.jobs, static_cast<int>(jobs.size()));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }

  SweepResult result;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (rows[i]) {
      result.rows.push_back(*rows[i]);
    } else {
      result.failures.push_back(errors[i]);
    }
  }
  // Best point by mean accuracy; the first in grid order wins ties.
  std::map<double, std::pair<double, int>> by_median;
  for (const SweepRow& row : result.rows) {
    auto& [sum, count] = by_median[row.hrs_median_ohm];
    sum += row.accuracy;
    ++count;
  }
  result.best_accuracy = -1.0;
  for (double median : config.sweep.hrs_median_ohm) {
    const auto it = by_median.find(median);
    if (it == by_median.end()) continue;
    const double mean = it->second.first / it->second.second;
    if (mean > result.best_accuracy) {
      result.best_accuracy = mean;
      result.best_hrs_median_ohm = median;
      result.best_mean_delay_ms = 1e3 * median * config.device.capacitance_f;
    }
  }
  return result;
}

std::string SweepCsv(const SweepResult& result) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "hrs_median_ohm,mean_delay_ms,empirical_mean_delay_ms,accuracy,seed\n";
  for (const SweepRow& r : result.rows) {
    out << r.hrs_median_ohm << ',' << r.mean_delay_ms << ',' << r.empirical_mean_delay_ms
        << ',' << r.accuracy << ',' << r.seed << '\n';
  }
  return out.str();
}

SweepResult CmdSweep(const ExperimentConfig& config) {
  const OutputPaths paths{config.output_dir};
  SweepResult result = RunSweep(config);
  WriteText(paths.sweep(), SweepCsv(result));
  json points = json::array();
  for (const auto& [delay, acc] : result.MeanAccuracyByDelay()) {
    points.push_back({{"mean_delay_ms", delay}, {"mean_accuracy", acc}});
  }
  const json summary = {
      {"grid_hrs_median_ohm", config.sweep.hrs_median_ohm},
      {"repetitions", config.sweep.repetitions},
      {"base_seed", config.seed},
      {"capacitance_f", config.device.capacitance_f},
      {"grid_note", "sweep grid and repetition count are run parameters"},
      {"points", points},
      {"best", {{"hrs_median_ohm", result.best_hrs_median_ohm},
                {"mean_delay_ms", result.best_mean_delay_ms},
                {"mean_accuracy", result.best_accuracy}}},
      {"failures", result.failures},
  };
  WriteText(paths.sweep_summary(), summary.dump(1) + "\n");
  return result;
}

Report MakeReport(const TrainedModel& model) {
  Report r;
  r.synapse_count = static_cast<std::int64_t>(model.network.synapse_count());
  r.level_count = static_cast<std::int64_t>(model.device.lrs.size());
  r.footprint_bits = FootprintBits(r.synapse_count, r.level_count);
  double sum = 0.0;
  r.delay_min_ms = INFINITY;
  r.delay_max_ms = -INFINITY;
  for (const BranchConfig& b : model.network.branches) {
    for (const SynapseConfig& s : b.synapses) {
      const double ms = 1e3 * s.delay_steps * model.network.dt_s;
      sum += ms;
      r.delay_min_ms = std::min(r.delay_min_ms, ms);
      r.delay_max_ms = std::max(r.delay_max_ms, ms);
    }
  }
  r.delay_mean_ms = sum / static_cast<double>(r.synapse_count);
  return r;
}

Report CmdReport(const std::filesystem::path& model) {
  return MakeReport(LoadModel(model));
}

std::string Report::Text() const {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2);
  out << "synapses:          " << synapse_count << '\n';
  out << "weight levels:     " << level_count << '\n';
  out << "footprint_bits:    " << footprint_bits << '\n';
  out << "delay_ms min/mean/max: " << delay_min_ms << " / " << delay_mean_ms << " / "
      << delay_max_ms << '\n';
  out << "reference:         " << kReferenceFootprintBits << " b for "
      << kReferenceBranches << " x " << kReferenceSynapsesPerBranch << " synapses\n";
  const std::int64_t ref_synapses =
      static_cast<std::int64_t>(kReferenceBranches) * kReferenceSynapsesPerBranch;
  if (footprint_bits != kReferenceFootprintBits) {
    out << "note: " << synapse_count << " synapses x ceil(log2(" << level_count
        << ")) bits = " << footprint_bits << " b differs from the " << kReferenceFootprintBits
        << " b reference; " << ref_synapses << " synapses give "
        << kReferenceFootprintBits << " b only at 2 bits per weight ("
        << FootprintBits(ref_synapses, 4) << " b at 4 levels, "
        << FootprintBits(ref_synapses, 8) << " b at 8 levels)\n";
  }
  return out.str();
}

}  // namespace dendrram
