#include "dendrram/config.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "dendrram/errors.h"
#include "json.hpp"

namespace dendrram {
namespace {

using nlohmann::json;

// Reads fields from one JSON object, remembering which keys were consumed so
// that leftovers can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }
  ~ObjectReader() = default;

  bool Has(const std::string& key) const { return j_.contains(key); }

  const json* Get(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string Path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  void Read(const std::string& key, double& out) {
    if (const json* v = Get(key)) {
      if (!v->is_number()) throw ConfigError(Path(key) + ": expected a number");
      out = v->get<double>();
      if (!std::isfinite(out)) throw ConfigError(Path(key) + ": must be finite");
    }
  }
  void Read(const std::string& key, int& out) {
    if (const json* v = Get(key)) {
      if (!v->is_number_integer()) throw ConfigError(Path(key) + ": expected an integer");
      out = v->get<int>();
    }
  }
  void Read(const std::string& key, std::int64_t& out) {
    if (const json* v = Get(key)) {
      if (!v->is_number_integer()) throw ConfigError(Path(key) + ": expected an integer");
      out = v->get<std::int64_t>();
    }
  }
  void Read(const std::string& key, std::uint64_t& out) {
    if (const json* v = Get(key)) {
      if (!v->is_number_unsigned()) {
        throw ConfigError(Path(key) + ": expected a non-negative integer");
      }
      out = v->get<std::uint64_t>();
    }
  }
  void Read(const std::string& key, bool& out) {
    if (const json* v = Get(key)) {
      if (!v->is_boolean()) throw ConfigError(Path(key) + ": expected a boolean");
      out = v->get<bool>();
    }
  }
  void Read(const std::string& key, std::string& out) {
    if (const json* v = Get(key)) {
      if (!v->is_string()) throw ConfigError(Path(key) + ": expected a string");
      out = v->get<std::string>();
    }
  }
  void Read(const std::string& key, std::vector<double>& out) {
    if (const json* v = Get(key)) {
      if (!v->is_array()) throw ConfigError(Path(key) + ": expected an array");
      out.clear();
      for (const json& x : *v) {
        if (!x.is_number()) throw ConfigError(Path(key) + ": expected numbers");
        out.push_back(x.get<double>());
      }
    }
  }

  // Rejects any key that no Read/Get call asked for.
  void Finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError(Path(key) + ": unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

json HrsToJson(const HrsDistribution& h) {
  return {{"median_ohm", h.median_ohm()}, {"sigma_log", h.sigma_log()},
          {"label", h.label()}};
}

HrsDistribution HrsFromJson(const json& j, const std::string& path,
                            const HrsDistribution& defaults) {
  ObjectReader r(j, path);
  double median = defaults.median_ohm();
  double sigma = defaults.sigma_log();
  std::string label = defaults.label();
  r.Read("median_ohm", median);
  r.Read("sigma_log", sigma);
  r.Read("label", label);
  r.Finish();
  try {
    return HrsDistribution(median, sigma, label);
  } catch (const DomainError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

json DeviceToJson(const DeviceConfig& d) {
  json levels = json::array();
  for (const LrsLevel& l : d.lrs.levels()) {
    levels.push_back({{"mu_ohm", l.mu_ohm}, {"sigma_ohm", l.sigma_ohm}});
  }
  return {{"hrs", HrsToJson(d.hrs)},
          {"lrs", {{"levels", levels},
                   {"min_ohm", d.lrs.min_ohm()},
                   {"max_ohm", d.lrs.max_ohm()}}},
          {"capacitance_f", d.capacitance_f}};
}

DeviceConfig DeviceFromJson(const json& j, const std::string& path) {
  DeviceConfig d;
  ObjectReader r(j, path);
  if (const json* h = r.Get("hrs")) d.hrs = HrsFromJson(*h, r.Path("hrs"), d.hrs);
  if (const json* l = r.Get("lrs")) {
    ObjectReader lr(*l, r.Path("lrs"));
    double min_ohm = d.lrs.min_ohm();
    double max_ohm = d.lrs.max_ohm();
    lr.Read("min_ohm", min_ohm);
    lr.Read("max_ohm", max_ohm);
    std::vector<LrsLevel> levels;
    if (const json* arr = lr.Get("levels")) {
      if (!arr->is_array()) throw ConfigError(lr.Path("levels") + ": expected an array");
      for (std::size_t i = 0; i < arr->size(); ++i) {
        ObjectReader e((*arr)[i], lr.Path("levels") + "[" + std::to_string(i) + "]");
        LrsLevel level;
        e.Read("mu_ohm", level.mu_ohm);
        e.Read("sigma_ohm", level.sigma_ohm);
        e.Finish();
        levels.push_back(level);
      }
    }
    lr.Finish();
    try {
      if (levels.empty()) {
        d.lrs = LrsLevelTable::EqualConductance(kDefaultLrsLevels, min_ohm, max_ohm);
      } else {
        d.lrs = LrsLevelTable(std::move(levels), min_ohm, max_ohm);
      }
    } catch (const DomainError& e) {
      throw ConfigError(r.Path("lrs") + ": " + e.what());
    }
  }
  r.Read("capacitance_f", d.capacitance_f);
  r.Finish();
  if (!(d.capacitance_f > 0.0)) {
    throw ConfigError(r.Path("capacitance_f") + ": must be positive");
  }
  return d;
}

json SynthToJson(const SynthEcgParams& s) {
  return {{"n_beats", s.n_beats},
          {"class_mix", s.class_mix},
          {"period_s", s.period_s},
          {"sample_period_s", s.sample_period_s},
          {"spike_amplitude_mv", s.spike_amplitude_mv},
          {"spike_width_s", s.spike_width_s},
          {"wave_amplitude_mv", s.wave_amplitude_mv},
          {"wave_width_s", s.wave_width_s},
          {"spike_offset_s", s.spike_offset_s},
          {"wave_interval_s", s.wave_interval_s},
          {"displacement_s", s.displacement_s},
          {"amplitude_jitter", s.amplitude_jitter},
          {"timing_jitter_s", s.timing_jitter_s},
          {"noise_mv", s.noise_mv}};
}

SynthEcgParams SynthFromJson(const json& j, const std::string& path) {
  SynthEcgParams s;
  ObjectReader r(j, path);
  r.Read("n_beats", s.n_beats);
  r.Read("class_mix", s.class_mix);
  r.Read("period_s", s.period_s);
  r.Read("sample_period_s", s.sample_period_s);
  r.Read("spike_amplitude_mv", s.spike_amplitude_mv);
  r.Read("spike_width_s", s.spike_width_s);
  r.Read("wave_amplitude_mv", s.wave_amplitude_mv);
  r.Read("wave_width_s", s.wave_width_s);
  r.Read("spike_offset_s", s.spike_offset_s);
  r.Read("wave_interval_s", s.wave_interval_s);
  r.Read("displacement_s", s.displacement_s);
  r.Read("amplitude_jitter", s.amplitude_jitter);
  r.Read("timing_jitter_s", s.timing_jitter_s);
  r.Read("noise_mv", s.noise_mv);
  r.Finish();
  return s;
}

json ToJson(const ExperimentConfig& c) {
  const EncodingConfig& e = c.encoding;
  const NetworkSection& n = c.network;
  const TrainConfig& t = c.training;
  return {
      {"device", DeviceToJson(c.device)},
      {"encoding",
       {{"source", e.source},
        {"recording_csv", e.recording_csv},
        {"annotation_csv", e.annotation_csv},
        {"threshold_mv", e.threshold_mv},
        {"dt_s", e.dt_s},
        {"window_s", e.window_s},
        {"n_train", e.n_train},
        {"n_test", e.n_test},
        {"synth", SynthToJson(e.synth)}}},
      {"network",
       {{"n_branches", n.n_branches},
        {"synapses_per_branch", n.synapses_per_branch},
        {"channels", n.channels},
        {"branch_hrs_median_ohm", n.branch_hrs_median_ohm},
        {"tau_branch_s", n.tau_branch_s},
        {"soma",
         {{"tau_mem_s", n.soma.tau_mem_s},
          {"v_threshold", n.soma.v_threshold},
          {"v_reset", n.soma.v_reset}}}}},
      {"training",
       {{"n_pre", t.n_pre},
        {"n_training", t.n_training},
        {"learning_rate", t.learning_rate},
        {"surrogate_slope", t.surrogate_slope},
        {"batch_size", t.batch_size},
        {"decision_threshold", t.decision_threshold},
        {"decision_threshold_max", t.decision_threshold_max},
        {"init_weight_max", t.init_weight_max},
        {"w_max_pre", t.w_max_pre},
        {"hrs_off_level", t.hrs_off_level}}},
      {"sweep",
       {{"hrs_median_ohm", c.sweep.hrs_median_ohm},
        {"repetitions", c.sweep.repetitions},
        {"jobs", c.sweep.jobs}}},
      {"output_dir", c.output_dir},
      {"seed", c.seed},
  };
}

ExperimentConfig FromJson(const json& j) {
  ExperimentConfig c;
  ObjectReader r(j, "");
  if (const json* d = r.Get("device")) c.device = DeviceFromJson(*d, "device");
  if (const json* e = r.Get("encoding")) {
    ObjectReader er(*e, "encoding");
    EncodingConfig& enc = c.encoding;
    er.Read("source", enc.source);
    er.Read("recording_csv", enc.recording_csv);
    er.Read("annotation_csv", enc.annotation_csv);
    er.Read("threshold_mv", enc.threshold_mv);
    er.Read("dt_s", enc.dt_s);
    er.Read("window_s", enc.window_s);
    er.Read("n_train", enc.n_train);
    er.Read("n_test", enc.n_test);
    if (const json* s = er.Get("synth")) enc.synth = SynthFromJson(*s, "encoding.synth");
    er.Finish();
  }
  if (const json* n = r.Get("network")) {
    ObjectReader nr(*n, "network");
    NetworkSection& net = c.network;
    nr.Read("n_branches", net.n_branches);
    nr.Read("synapses_per_branch", net.synapses_per_branch);
    nr.Read("channels", net.channels);
    nr.Read("branch_hrs_median_ohm", net.branch_hrs_median_ohm);
    nr.Read("tau_branch_s", net.tau_branch_s);
    if (const json* s = nr.Get("soma")) {
      ObjectReader sr(*s, "network.soma");
      sr.Read("tau_mem_s", net.soma.tau_mem_s);
      sr.Read("v_threshold", net.soma.v_threshold);
      sr.Read("v_reset", net.soma.v_reset);
      sr.Finish();
    }
    nr.Finish();
  }
  if (const json* t = r.Get("training")) {
    ObjectReader tr(*t, "training");
    TrainConfig& tc = c.training;
    tr.Read("n_pre", tc.n_pre);
    tr.Read("n_training", tc.n_training);
    tr.Read("learning_rate", tc.learning_rate);
    tr.Read("surrogate_slope", tc.surrogate_slope);
    tr.Read("batch_size", tc.batch_size);
    tr.Read("decision_threshold", tc.decision_threshold);
    tr.Read("decision_threshold_max", tc.decision_threshold_max);
    tr.Read("init_weight_max", tc.init_weight_max);
    tr.Read("w_max_pre", tc.w_max_pre);
    tr.Read("hrs_off_level", tc.hrs_off_level);
    tr.Finish();
  }
  if (const json* s = r.Get("sweep")) {
    ObjectReader sr(*s, "sweep");
    sr.Read("hrs_median_ohm", c.sweep.hrs_median_ohm);
    sr.Read("repetitions", c.sweep.repetitions);
    sr.Read("jobs", c.sweep.jobs);
    sr.Finish();
  }
  r.Read("output_dir", c.output_dir);
  r.Read("seed", c.seed);
  r.Finish();
  c.training.seed = c.seed;
  c.Validate();
  return c;
}

json ParseJsonText(std::string_view text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::vector<double> SweepConfig::DefaultGrid() {
  std::vector<double> grid;
  for (int i = 0; i < 7; ++i) grid.push_back(1e10 * std::pow(10.0, i / 3.0));
  return grid;
}

void ExperimentConfig::Validate() const {
  const NetworkSection& n = network;
  if (n.n_branches < 1 || n.synapses_per_branch < 1 || n.channels < 1) {
    throw ConfigError("network: counts must be >= 1");
  }
  if (n.synapses_per_branch % n.channels != 0) {
    throw ConfigError("network: synapses_per_branch must be divisible by channels");
  }
  if (!n.branch_hrs_median_ohm.empty() &&
      n.branch_hrs_median_ohm.size() != static_cast<std::size_t>(n.n_branches)) {
    throw ConfigError("network.branch_hrs_median_ohm: need one entry per branch");
  }
  if (n.tau_branch_s.size() != 1 &&
      n.tau_branch_s.size() != static_cast<std::size_t>(n.n_branches)) {
    throw ConfigError("network.tau_branch_s: need one entry or one per branch");
  }
  for (double tau : n.tau_branch_s) {
    if (!(tau > 0.0)) throw ConfigError("network.tau_branch_s: must be positive");
  }
  if (!(n.soma.tau_mem_s > 0.0) || !(n.soma.v_threshold > n.soma.v_reset)) {
    throw ConfigError("network.soma: need tau_mem_s > 0 and v_threshold > v_reset");
  }
  const EncodingConfig& e = encoding;
  if (e.source != "synthetic" && e.source != "csv") {
    throw ConfigError("encoding.source: must be 'synthetic' or 'csv'");
  }
  if (e.source == "csv" && e.recording_csv.empty()) {
    throw ConfigError("encoding.recording_csv: required when source is 'csv'");
  }
  if (!(e.threshold_mv > 0.0) || !(e.dt_s > 0.0) || !(e.window_s > 0.0)) {
    throw ConfigError("encoding: threshold_mv, dt_s and window_s must be positive");
  }
  if (e.n_train < 1 || e.n_test < 0) {
    throw ConfigError("encoding: need n_train >= 1 and n_test >= 0");
  }
  if (e.source == "synthetic" && n.channels != 2) {
    throw ConfigError("network.channels: the synthetic recording has one electrode, "
                      "so the network needs 2 channels");
  }
  try {
    training.Validate();
  } catch (const ConfigError& err) {
    throw ConfigError(std::string("training: ") + err.what());
  }
  if (sweep.repetitions < 1 || sweep.jobs < 1) {
    throw ConfigError("sweep: repetitions and jobs must be >= 1");
  }
  for (double m : sweep.hrs_median_ohm) {
    if (!(m > 0.0)) throw ConfigError("sweep.hrs_median_ohm: must be positive");
  }
}

NetworkSpec ExperimentConfig::MakeNetworkSpec() const {
  NetworkSpec spec;
  spec.n_branches = network.n_branches;
  spec.synapses_per_branch = network.synapses_per_branch;
  spec.channels = network.channels;
  if (network.branch_hrs_median_ohm.empty()) {
    spec.hrs = {device.hrs};
  } else {
    for (double m : network.branch_hrs_median_ohm) {
      spec.hrs.emplace_back(m, device.hrs.sigma_log(), device.hrs.label());
    }
  }
  spec.tau_branch_s = network.tau_branch_s;
  spec.soma = network.soma;
  spec.capacitance_f = device.capacitance_f;
  spec.dt_s = encoding.dt_s;
  spec.init_weight_max = training.init_weight_max;
  return spec;
}

ExperimentConfig ParseExperimentConfig(std::string_view json_text) {
  return FromJson(ParseJsonText(json_text, "experiment config"));
}

ExperimentConfig LoadExperimentConfig(const std::filesystem::path& path) {
  try {
    return ParseExperimentConfig(ReadFile(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string SerializeExperimentConfig(const ExperimentConfig& config) {
  return ToJson(config).dump(2) + "\n";
}

DeviceConfig ParseDeviceConfig(std::string_view json_text) {
  return DeviceFromJson(ParseJsonText(json_text, "device config"), "device");
}

DeviceConfig LoadDeviceConfig(const std::filesystem::path& path) {
  try {
    return ParseDeviceConfig(ReadFile(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string SerializeDeviceConfig(const DeviceConfig& device) {
  return DeviceToJson(device).dump(2) + "\n";
}

std::string ContentHash(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace dendrram
