// Python bindings for the dendrram core.

#include <cstdint>
#include <string>
#include <vector>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "dendrram/config.h"
#include "dendrram/device.h"
#include "dendrram/encoding.h"
#include "dendrram/errors.h"
#include "dendrram/experiment.h"
#include "dendrram/network.h"
#include "dendrram/rng.h"
#include "dendrram/trainer.h"

namespace py = pybind11;
using namespace dendrram;

namespace {

py::array_t<std::uint8_t> RasterToArray(const SpikeRaster& r) {
  py::array_t<std::uint8_t> out({static_cast<py::ssize_t>(r.channels()),
                                 static_cast<py::ssize_t>(r.duration_steps())});
  auto view = out.mutable_unchecked<2>();
  for (int c = 0; c < r.channels(); ++c) {
    for (std::int64_t t = 0; t < r.duration_steps(); ++t) view(c, t) = r.at(c, t) ? 1 : 0;
  }
  return out;
}

SpikeRaster ArrayToRaster(py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast> a,
                          double dt_s) {
  if (a.ndim() != 2) throw DomainError("spike raster must be a 2-D array");
  SpikeRaster r(dt_s, static_cast<int>(a.shape(0)), a.shape(1));
  auto view = a.unchecked<2>();
  for (py::ssize_t c = 0; c < a.shape(0); ++c) {
    for (py::ssize_t t = 0; t < a.shape(1); ++t) {
      if (view(c, t)) r.set(static_cast<int>(c), t);
    }
  }
  return r;
}

py::dict EvalToDict(const EvalResult& e) {
  py::dict d;
  d["balanced_accuracy"] = e.balanced_accuracy;
  d["accuracy"] = e.accuracy;
  d["true_positive"] = e.true_positive;
  d["true_negative"] = e.true_negative;
  d["false_positive"] = e.false_positive;
  d["false_negative"] = e.false_negative;
  return d;
}

py::list MetricsToList(const std::vector<EpochMetrics>& metrics) {
  py::list out;
  for (const EpochMetrics& m : metrics) {
    py::dict d;
    d["phase"] = m.phase;
    d["epoch"] = m.epoch;
    d["loss"] = m.loss;
    d["accuracy"] = m.accuracy;
    d["reprogram_count"] = m.reprogram_count;
    out.append(d);
  }
  return out;
}

ExperimentConfig ConfigFrom(const std::string& json_text) {
  ExperimentConfig c = ParseExperimentConfig(json_text.empty() ? "{}" : json_text);
  c.Validate();
  return c;
}

}  // namespace

PYBIND11_MODULE(_dendrram, m) {
  m.doc() = "Dendritic network with RRAM delays and multi-level RRAM weights";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<IndexError>(m, "IndexError", PyExc_IndexError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<ScaleError>(m, "ScaleError", PyExc_ValueError);
  py::register_exception<EvaluationError>(m, "EvaluationError", PyExc_ValueError);

  py::class_<SeededRng>(m, "SeededRng")
      .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"), py::arg("stream") = 0)
      .def_static("named", &SeededRng::Named, py::arg("seed"), py::arg("name"),
                  py::arg("index") = 0)
      .def("uniform", py::overload_cast<>(&SeededRng::Uniform))
      .def("normal", py::overload_cast<>(&SeededRng::Normal))
      .def("uniform_index", &SeededRng::UniformIndex);

  // Device model.
  py::class_<HrsDistribution>(m, "HrsDistribution")
      .def(py::init<double, double, std::string>(), py::arg("median_ohm"),
           py::arg("sigma_log"), py::arg("label") = "")
      .def_property_readonly("median_ohm", &HrsDistribution::median_ohm)
      .def_property_readonly("sigma_log", &HrsDistribution::sigma_log)
      .def("mean_ohm", &HrsDistribution::mean_ohm);

  py::class_<LrsLevelTable>(m, "LrsLevelTable")
      .def_static("equal_conductance", &LrsLevelTable::EqualConductance,
                  py::arg("n_levels") = kDefaultLrsLevels,
                  py::arg("min_ohm") = kDefaultLrsMinOhm,
                  py::arg("max_ohm") = kDefaultLrsMaxOhm,
                  py::arg("relative_sigma") = kDefaultLrsRelativeSigma)
      .def("__len__", &LrsLevelTable::size)
      .def("mus", &LrsLevelTable::mus)
      .def_property_readonly("min_ohm", &LrsLevelTable::min_ohm)
      .def_property_readonly("max_ohm", &LrsLevelTable::max_ohm);

  m.def("sample_hrs", &SampleHrs, py::arg("dist"), py::arg("rng"));
  m.def("delay_from_rc", &DelayFromRc, py::arg("resistance_ohm"),
        py::arg("capacitance_f") = kDefaultCapacitanceF);
  m.def("program_lrs", &ProgramLrs, py::arg("table"), py::arg("level_index"), py::arg("rng"));
  m.def("nearest_level", &NearestLevel, py::arg("table"), py::arg("resistance_ohm"));
  m.def("footprint_bits", &FootprintBits, py::arg("n_synapses"), py::arg("n_levels"));

  // Encoding.
  m.def(
      "delta_modulate",
      [](const std::vector<std::vector<double>>& channels, double sample_period_s,
         double threshold_mv, double dt_s) {
        AnalogTrace trace;
        trace.sample_period_s = sample_period_s;
        trace.channels = channels;
        return RasterToArray(DeltaModulate(trace, threshold_mv, dt_s));
      },
      py::arg("channels"), py::arg("sample_period_s") = 1e-3,
      py::arg("threshold_mv") = kDefaultDeltaThresholdMv, py::arg("dt_s") = kDefaultDtS,
      "Level-crossing encoding; returns a (2 * channels, steps) uint8 array.");
  m.def(
      "synth_ecg",
      [](std::int64_t n_beats, double class_mix, std::uint64_t seed) {
        SynthEcgParams p;
        p.n_beats = n_beats;
        p.class_mix = class_mix;
        SeededRng rng = SeededRng::Named(seed, "data");
        const Recording rec = SynthEcg(p, rng);
        py::list ann;
        for (const Annotation& a : rec.annotations) {
          ann.append(py::make_tuple(a.time_s, std::string(LabelName(a.label))));
        }
        return py::make_tuple(rec.trace.channels, rec.trace.sample_period_s, ann);
      },
      py::arg("n_beats") = 500, py::arg("class_mix") = 0.5, py::arg("seed") = 1,
      "Returns (channels, sample_period_s, [(time_s, label), ...]).");

  // Network.
  m.def(
      "run_network",
      [](const std::string& model_path,
         py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast> raster) {
        const TrainedModel model = LoadModel(model_path);
        const RunResult r =
            Run(model.network, ArrayToRaster(raster, model.network.dt_s), true);
        py::dict d;
        d["spike_count"] = r.spike_count;
        d["membrane_v"] = r.trace->membrane_v;
        d["label"] = std::string(LabelName(Classify(r.spike_count, model.decision_threshold)));
        return d;
      },
      py::arg("model_path"), py::arg("raster"),
      "Runs a saved model on one (channels, steps) spike raster.");

  // Configuration and experiment commands. Configs are passed as JSON text.
  m.def(
      "default_config", [] { return SerializeExperimentConfig(ExperimentConfig{}); },
      "Default experiment configuration as JSON.");
  m.def(
      "normalize_config",
      [](const std::string& json_text) { return SerializeExperimentConfig(ConfigFrom(json_text)); },
      py::arg("config_json"), "Parse, validate and re-serialize a configuration.");
  m.def(
      "prepare",
      [](const std::string& config_json) {
        const PrepareResult r = CmdPrepare(ConfigFrom(config_json));
        py::dict d;
        d["content_hash"] = r.content_hash;
        d["n_windows"] = r.n_windows;
        d["n_normal"] = r.n_normal;
        d["n_anomalous"] = r.n_anomalous;
        return d;
      },
      py::arg("config_json") = "");
  m.def(
      "train",
      [](const std::string& config_json) {
        TrainOutcome out;
        {
          py::gil_scoped_release release;
          out = CmdTrain(ConfigFrom(config_json));
        }
        py::dict d;
        d["pretrain_test"] = EvalToDict(out.pretrain_eval);
        d["final_test"] = EvalToDict(out.final_eval);
        d["decision_threshold"] = out.model.decision_threshold;
        d["metrics"] = MetricsToList(out.metrics);
        return d;
      },
      py::arg("config_json") = "");
  m.def(
      "evaluate",
      [](const std::string& config_json, const std::string& model_path) {
        return EvalToDict(CmdEval(ConfigFrom(config_json), model_path));
      },
      py::arg("config_json"), py::arg("model_path"));
  m.def(
      "sweep",
      [](const std::string& config_json) {
        SweepResult r;
        {
          py::gil_scoped_release release;
          r = CmdSweep(ConfigFrom(config_json));
        }
        py::dict d;
        d["mean_accuracy_by_delay"] = r.MeanAccuracyByDelay();
        d["best_mean_delay_ms"] = r.best_mean_delay_ms;
        d["best_accuracy"] = r.best_accuracy;
        d["failures"] = r.failures;
        return d;
      },
      py::arg("config_json") = "");
  m.def(
      "report",
      [](const std::string& model_path) {
        const Report r = CmdReport(model_path);
        py::dict d;
        d["synapse_count"] = r.synapse_count;
        d["level_count"] = r.level_count;
        d["footprint_bits"] = r.footprint_bits;
        d["delay_min_ms"] = r.delay_min_ms;
        d["delay_mean_ms"] = r.delay_mean_ms;
        d["delay_max_ms"] = r.delay_max_ms;
        d["text"] = r.Text();
        return d;
      },
      py::arg("model_path"));
}
