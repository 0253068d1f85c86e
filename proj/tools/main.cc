//
// Copyright 2026 The privcusum Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Command-line entry point: privatize, detect, experiment,
// calibrate-constants and audit.

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "commands.h"

namespace {

int Finish(const absl::Status& status) {
  if (!status.ok()) std::cerr << "error: " << status.message() << '\n';
  return privcusum::cli::ExitCodeFor(status);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace privcusum::cli;  // NOLINT(build/namespaces)

  CLI::App app{"Locally private online change-point detection", "privcusum"};
  app.require_subcommand(1);

  PrivatizeOptions privatize;
  CLI::App* privatize_cmd =
      app.add_subcommand("privatize", "Privatize a raw CSV stream");
  privatize_cmd->add_option("-c,--config", privatize.config_path, "JSON config")
      ->required();
  privatize_cmd->add_option("-i,--input", privatize.input_path, "Raw CSV")->required();
  privatize_cmd->add_option("-o,--output", privatize.output_path, "Privatized CSV")
      ->required();
  privatize_cmd->add_option("-s,--seed", privatize.seed, "Noise seed");

  DetectOptions detect;
  CLI::App* detect_cmd =
      app.add_subcommand("detect", "Run the online detector over a CSV stream");
  detect_cmd->add_option("-c,--config", detect.config_path, "JSON config")->required();
  detect_cmd->add_option("-i,--input", detect.input_path, "Raw or privatized CSV")
      ->required();
  detect_cmd->add_option("-t,--trace", detect.trace_path, "Per-step trace CSV");
  detect_cmd->add_option("-s,--seed", detect.seed,
                         "Noise seed for raw univariate input");

  ExperimentOptions experiment;
  CLI::App* experiment_cmd =
      app.add_subcommand("experiment", "Monte Carlo experiment with optional sweep");
  experiment_cmd->add_option("-c,--config", experiment.config_path, "JSON config")
      ->required();
  experiment_cmd->add_option("--summary", experiment.summary_path,
                             "Summary CSV (overrides the config)");
  experiment_cmd->add_option("--plot-prefix", experiment.plot_prefix,
                             "Plot-data prefix (overrides the config)");

  CalibrateOptions calibrate;
  CLI::App* calibrate_cmd = app.add_subcommand(
      "calibrate-constants", "Empirical C_SNR / C_eps search over sweep points");
  calibrate_cmd->add_option("-c,--config", calibrate.config_path, "JSON config")
      ->required();
  calibrate_cmd->add_option("-o,--output", calibrate.output_path, "Table CSV");

  AuditOptions audit;
  CLI::App* audit_cmd = app.add_subcommand("audit", "Randomized privacy-loss audit");
  audit_cmd->add_option("--channel", audit.channel, "regression | univariate | both")
      ->check(CLI::IsMember({"regression", "univariate", "both"}));
  audit_cmd->add_option("--alpha", audit.alpha, "Privacy budget");
  audit_cmd->add_option("--trials", audit.trials, "Number of random triples");
  audit_cmd->add_option("--seed", audit.seed, "Audit seed");
  audit_cmd->add_option("--dim", audit.dim, "Covariate dimension");
  audit_cmd->add_option("--bin-width", audit.bin_width, "Bin width h");
  audit_cmd->add_option("--truncation", audit.truncation_m, "Response clamp M");
  audit_cmd->add_option("--interval-length", audit.interval_length,
                        "Univariate input range L");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (*privatize_cmd) return Finish(RunPrivatize(privatize, std::cerr));
  if (*detect_cmd) return Finish(RunDetect(detect, std::cout, std::cerr));
  if (*experiment_cmd) return Finish(RunExperiment(experiment, std::cout, std::cerr));
  if (*calibrate_cmd) return Finish(RunCalibrate(calibrate, std::cout, std::cerr));
  if (*audit_cmd) return Finish(RunAudit(audit, std::cout));
  return 1;
}
