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

#ifndef SPLITKIT_EXPERIMENT_HPP_
#define SPLITKIT_EXPERIMENT_HPP_

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "splitkit/ama.hpp"
#include "splitkit/spcp.hpp"
#include "splitkit/splitting.hpp"

namespace splitkit {

enum class Method { kAdmm3, kAdmg, kSpadmm, kAma, kRama, kRiamaConst, kRiamaAdaptive };

std::string method_name(Method method);
Method parse_method(const std::string& name);
bool is_ama_family(Method method);

struct ExperimentConfig {
  Method method{Method::kAma};
  Eigen::Index m{200};
  double rank_frac{0.05};
  double sparsity_frac{0.05};
  double noise_std{1e-5};
  double beta1{0.05};
  double gamma{0.0005};
  double lambda{1.0};
  // Constant inertia for riama_const; the cap for riama_adaptive.
  double alpha{0.0};
  double theta{0.99999};
  double tau{1.2};
  double eps{1e-5};
  // Unset means 0.52 gamma / beta, which keeps gamma strictly inside (0, 2 beta eps_bar).
  std::optional<double> eps_bar;
  double feasibility_tol{std::numeric_limits<double>::infinity()};
  std::size_t max_iter{10000};
  std::int64_t seed{1};
  std::size_t repeats{1};
};

/// Throws ConfigurationError on out-of-range fields.
void check_config(const ExperimentConfig& cfg);

/// Sets one field from its textual value; accepts snake_case and kebab-case
/// names. Throws ConfigurationError for unknown keys or malformed values.
void set_config_field(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Reads `key = value` lines; blank lines and lines starting with '#' are skipped.
void apply_config_file(ExperimentConfig& cfg, const std::string& path);

/// Solver parameters and the parameter-gate report for an AMA-family config.
SolverParams<double> solver_params(const ExperimentConfig& cfg);
ParamReport<double> validate_config(const ExperimentConfig& cfg);

/// Raised when an AMA-family config fails the parameter gate.
class InfeasibleParameters : public ParameterError {
 public:
  explicit InfeasibleParameters(ParamReport<double> report);
  const ParamReport<double>& report() const noexcept { return report_; }

 private:
  ParamReport<double> report_;
};

std::string format_report(const ParamReport<double>& report);

struct ResultRow {
  std::string method;
  double gamma{0};
  double lambda{0};
  double alpha{0};
  std::size_t k{0};
  Eigen::Index rank{0};
  double rel_L_star{0};
  double rel_S_star{0};
  double cpu_seconds{0};
  bool converged{false};
  std::int64_t seed{0};
};

/// Full outcome of one solve: the summary row, the trace and the terminal
/// low-rank and sparse estimates.
struct SolveOutcome {
  ResultRow row;
  RunRecord<double> record;
  IterationState<double> state;
  MatrixRd L, S;
  std::vector<double> alpha_history;
  std::vector<double> summability_sums;
};

/// Solves one instance with the configured method. AMA-family methods use
/// block order (Z, L, S); the ADMM family uses (Z, S, L).
SolveOutcome solve_instance(const ExperimentConfig& cfg, const SpcpInstance& inst,
                            bool record_diagnostics = false);

/// One row per seed in seed .. seed + repeats - 1, then a median row
/// (method suffixed ":median") when repeats > 1.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

/// Numeric fields accepted as sweep axes.
std::vector<std::string> sweep_axes();

/// One run_experiment per value, sorted by axis value. Runs in parallel on
/// up to SPLITKIT_THREADS worker threads (default: hardware concurrency).
std::vector<ResultRow> sweep(const ExperimentConfig& base, const std::string& axis,
                             const std::vector<double>& values);

void write_csv_header(std::ostream& out);
void write_csv(std::ostream& out, const std::vector<ResultRow>& rows, bool header = true);
void write_jsonl(std::ostream& out, const std::vector<ResultRow>& rows);

}  // namespace splitkit

#endif  // SPLITKIT_EXPERIMENT_HPP_
