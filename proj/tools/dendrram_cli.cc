// Command-line front end: prepare, train, eval, sweep, report.

#include <cstdint>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "dendrram/config.h"
#include "dendrram/errors.h"
#include "dendrram/experiment.h"

namespace {

using namespace dendrram;

struct Common {
  std::string config_path;
  std::string device_config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
};

ExperimentConfig ResolveConfig(const Common& common) {
  ExperimentConfig config = common.config_path.empty()
                                ? ParseExperimentConfig("{}")
                                : LoadExperimentConfig(common.config_path);
  if (!common.device_config_path.empty()) {
    config.device = LoadDeviceConfig(common.device_config_path);
  }
  if (common.seed) {
    config.seed = *common.seed;
    config.training.seed = *common.seed;
  }
  if (!common.out_dir.empty()) config.output_dir = common.out_dir;
  config.Validate();
  return config;
}

void AddCommon(CLI::App* cmd, Common& common) {
  cmd->add_option("--config", common.config_path, "Experiment config (JSON)");
  cmd->add_option("--device-config", common.device_config_path,
                  "Device config (JSON); replaces the config's device section");
  cmd->add_option("--seed", common.seed, "Global seed");
  cmd->add_option("--out", common.out_dir, "Output directory");
}

void PrintEval(const char* name, const EvalResult& e) {
  std::cout << name << ": balanced_accuracy=" << e.balanced_accuracy
            << " accuracy=" << e.accuracy << " tp=" << e.true_positive
            << " tn=" << e.true_negative << " fp=" << e.false_positive
            << " fn=" << e.false_negative << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dendritic RRAM delay/weight network toolkit"};
  app.require_subcommand(1);

  Common common;
  std::string model_path;

  CLI::App* prepare = app.add_subcommand("prepare", "Encode the dataset and write a manifest");
  AddCommon(prepare, common);
  CLI::App* train = app.add_subcommand("train", "Run the mixed-precision training procedure");
  AddCommon(train, common);
  CLI::App* eval = app.add_subcommand("eval", "Evaluate a model on the prepared test split");
  AddCommon(eval, common);
  eval->add_option("--model", model_path, "Model file (default <out>/model.json)");
  CLI::App* sweep = app.add_subcommand("sweep", "Accuracy versus HRS median sweep");
  AddCommon(sweep, common);
  CLI::App* report = app.add_subcommand("report", "Footprint and delay report for a model");
  report->add_option("--model", model_path, "Model file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    std::cout << std::setprecision(6);
    if (*prepare) {
      const ExperimentConfig config = ResolveConfig(common);
      const PrepareResult r = CmdPrepare(config);
      std::cout << "windows=" << r.n_windows << " normal=" << r.n_normal
                << " anomalous=" << r.n_anomalous << " content_hash=" << r.content_hash
                << '\n';
    } else if (*train) {
      const ExperimentConfig config = ResolveConfig(common);
      const TrainOutcome out = CmdTrain(config);
      for (const EpochMetrics& m : out.metrics) {
        std::clog << m.phase << " epoch " << m.epoch << " loss=" << m.loss
                  << " acc=" << m.accuracy << " reprogram=" << m.reprogram_count << '\n';
      }
      PrintEval("pretrain_test", out.pretrain_eval);
      PrintEval("final_test", out.final_eval);
    } else if (*eval) {
      const ExperimentConfig config = ResolveConfig(common);
      const std::string path =
          model_path.empty() ? OutputPaths{config.output_dir}.model().string() : model_path;
      PrintEval("test", CmdEval(config, path));
    } else if (*sweep) {
      const ExperimentConfig config = ResolveConfig(common);
      const SweepResult r = CmdSweep(config);
      for (const auto& [delay, acc] : r.MeanAccuracyByDelay()) {
        std::cout << "mean_delay_ms=" << delay << " mean_accuracy=" << acc << '\n';
      }
      std::cout << "best_mean_delay_ms=" << r.best_mean_delay_ms
                << " best_accuracy=" << r.best_accuracy
                << " failures=" << r.failures.size() << '\n';
      for (const std::string& f : r.failures) std::cerr << "failed: " << f << '\n';
    } else if (*report) {
      std::cout << CmdReport(model_path).Text();
    }
  } catch (const Error& e) {
    std::cerr << "error [" << CategoryName(e.category()) << "]: " << e.what() << '\n';
    return 1 + static_cast<int>(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
