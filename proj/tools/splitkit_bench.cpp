// Copyright 2026 The splitkit Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line runner for the SPCP benchmark.
//
//   splitkit_bench run --method ama --gamma 0.0005
//   splitkit_bench sweep --method rama --axis lambda --values 0.5,1,1.5
//   splitkit_bench validate --method riama_const --alpha 0.15 --lambda 1.25
//   splitkit_bench gen --m 200 --out instance.spcp

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "splitkit/admm.hpp"
#include "splitkit/experiment.hpp"

namespace {

constexpr int kExitInfeasible = 2;
constexpr int kExitNotConverged = 3;

// Flags mirroring ExperimentConfig; only flags given on the command line
// override the config file.
struct ConfigFlags {
  std::map<std::string, std::string> values;
  std::string config_file;

  void attach(CLI::App* app) {
    static const char* kFields[] = {"method", "m", "rank-frac", "sparsity-frac", "noise-std",
                                    "beta1", "gamma", "lambda", "alpha", "theta", "tau", "eps",
                                    "eps-bar", "feasibility-tol", "max-iter", "seed", "repeats"};
    for (const char* field : kFields) {
      app->add_option_function<std::string>(
          std::string("--") + field, [this, field](const std::string& v) { values[field] = v; },
          std::string("ExperimentConfig field ") + field);
    }
    app->add_option("--config", config_file, "key=value file; command-line flags take precedence")
        ->check(CLI::ExistingFile);
  }

  splitkit::ExperimentConfig build() const {
    splitkit::ExperimentConfig cfg;
    if (!config_file.empty()) splitkit::apply_config_file(cfg, config_file);
    for (const auto& [key, value] : values) splitkit::set_config_field(cfg, key, value);
    splitkit::check_config(cfg);
    return cfg;
  }
};

void emit(const std::vector<splitkit::ResultRow>& rows, const std::string& format) {
  if (format == "jsonl") {
    splitkit::write_jsonl(std::cout, rows);
  } else {
    splitkit::write_csv(std::cout, rows);
  }
}

int finish(const std::vector<splitkit::ResultRow>& rows, bool strict) {
  if (!strict) return 0;
  for (const auto& r : rows) {
    if (!r.converged) {
      std::cerr << "not converged: " << r.method << " seed " << r.seed << " after " << r.k
                << " iterations\n";
      return kExitNotConverged;
    }
  }
  return 0;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!item.empty()) out.push_back(std::stod(item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw splitkit::ConfigurationError("sweep: --values is empty");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SPCP benchmark for three-block splitting methods"};
  app.require_subcommand(1);

  ConfigFlags run_flags, sweep_flags, validate_flags, gen_flags;
  std::string format = "csv";
  bool strict = false;

  auto* run = app.add_subcommand("run", "Run one configuration over seed .. seed + repeats - 1");
  run_flags.attach(run);
  run->add_option("--format", format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
  run->add_flag("--strict", strict, "exit 3 when a run does not converge");

  std::string axis, values_text;
  auto* sw = app.add_subcommand("sweep", "Run one configuration per axis value");
  sweep_flags.attach(sw);
  sw->add_option("--axis", axis, "numeric config field to vary")->required();
  sw->add_option("--values", values_text, "comma-separated axis values")->required();
  sw->add_option("--format", format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
  sw->add_flag("--strict", strict, "exit 3 when a run does not converge");

  auto* validate = app.add_subcommand("validate", "Check step size, inertia and relaxation parameters");
  validate_flags.attach(validate);

  std::string out_path;
  auto* gen = app.add_subcommand("gen", "Write a synthetic instance to a binary file");
  gen_flags.attach(gen);
  gen->add_option("--out", out_path, "output path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const auto rows = splitkit::run_experiment(run_flags.build());
      emit(rows, format);
      return finish(rows, strict);
    }
    if (sw->parsed()) {
      const auto rows = splitkit::sweep(sweep_flags.build(), axis, parse_values(values_text));
      emit(rows, format);
      return finish(rows, strict);
    }
    if (validate->parsed()) {
      const auto cfg = validate_flags.build();
      if (!splitkit::is_ama_family(cfg.method)) {
        if (cfg.method == splitkit::Method::kAdmg) splitkit::AdmgConfig<double> check(cfg.theta);
        if (cfg.method == splitkit::Method::kSpadmm) splitkit::SpadmmConfig<double> check(cfg.tau);
        std::cout << "feasible\n";
        return 0;
      }
      const auto report = splitkit::validate_config(cfg);
      std::cout << splitkit::format_report(report) << '\n';
      return report.feasible ? 0 : kExitInfeasible;
    }
    if (gen->parsed()) {
      const auto cfg = gen_flags.build();
      const auto inst = splitkit::gen_spcp_instance(cfg.m, cfg.rank_frac, cfg.sparsity_frac,
                                                    cfg.noise_std, cfg.beta1, cfg.seed);
      splitkit::save_instance(inst, out_path);
      std::cout << "wrote " << out_path << " (m=" << inst.m << ", r=" << inst.r << ")\n";
      return 0;
    }
  } catch (const splitkit::InfeasibleParameters& e) {
    std::cerr << e.what() << '\n';
    return kExitInfeasible;
  } catch (const splitkit::ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
