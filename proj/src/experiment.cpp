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

#include "splitkit/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "splitkit/admm.hpp"

namespace splitkit {

namespace {

const std::map<std::string, Method>& method_table() {
  static const std::map<std::string, Method> table = {
      {"admm3", Method::kAdmm3},       {"admg", Method::kAdmg},
      {"spadmm", Method::kSpadmm},     {"ama", Method::kAma},
      {"rama", Method::kRama},         {"riama_const", Method::kRiamaConst},
      {"riama_adaptive", Method::kRiamaAdaptive},
  };
  return table;
}

std::string normalize_key(std::string key) {
  std::replace(key.begin(), key.end(), '-', '_');
  return key;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigurationError("config: '" + key + "' expects a number, got '" + text + "'");
  }
}

template <typename Int>
Int parse_int(const std::string& key, const std::string& text) {
  Int v{};
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ConfigurationError("config: '" + key + "' expects an integer, got '" + text + "'");
  }
  return v;
}

std::string format_number(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

ResultRow median_row(const std::vector<ResultRow>& rows) {
  ResultRow out = rows.front();
  out.method += ":median";
  auto column = [&rows](auto getter) {
    std::vector<double> v;
    for (const auto& r : rows) v.push_back(static_cast<double>(getter(r)));
    return median_of(std::move(v));
  };
  out.k = static_cast<std::size_t>(std::llround(column([](const ResultRow& r) { return r.k; })));
  out.rank = static_cast<Eigen::Index>(std::llround(column([](const ResultRow& r) { return r.rank; })));
  out.rel_L_star = column([](const ResultRow& r) { return r.rel_L_star; });
  out.rel_S_star = column([](const ResultRow& r) { return r.rel_S_star; });
  out.cpu_seconds = column([](const ResultRow& r) { return r.cpu_seconds; });
  out.converged = std::all_of(rows.begin(), rows.end(), [](const ResultRow& r) { return r.converged; });
  return out;
}

std::size_t worker_count(std::size_t jobs) {
  std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SPLITKIT_THREADS")) {
    const std::string text(env);
    std::size_t parsed = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), parsed);
    if (res.ec == std::errc() && parsed > 0) threads = parsed;
  }
  return std::max<std::size_t>(1, std::min(threads, jobs));
}

}  // namespace

std::string method_name(Method method) {
  for (const auto& [name, m] : method_table()) {
    if (m == method) return name;
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  const auto it = method_table().find(normalize_key(name));
  if (it == method_table().end()) throw ConfigurationError("unknown method '" + name + "'");
  return it->second;
}

bool is_ama_family(Method method) {
  return method == Method::kAma || method == Method::kRama || method == Method::kRiamaConst ||
         method == Method::kRiamaAdaptive;
}

void check_config(const ExperimentConfig& cfg) {
  if (!(cfg.eps > 0.0)) throw ConfigurationError("config: eps must be positive");
  if (cfg.repeats < 1) throw ConfigurationError("config: repeats must be at least 1");
  if (cfg.max_iter < 1) throw ConfigurationError("config: max_iter must be at least 1");
  if (!(cfg.gamma > 0.0)) throw ConfigurationError("config: gamma must be positive");
  if (!(cfg.lambda > 0.0)) throw ConfigurationError("config: lambda must be positive");
  if ((cfg.method == Method::kRiamaConst || cfg.method == Method::kRiamaAdaptive) &&
      !(cfg.alpha >= 0.0 && cfg.alpha < 1.0)) {
    throw ConfigurationError("config: alpha must lie in [0, 1)");
  }
}

void set_config_field(ExperimentConfig& cfg, const std::string& raw_key, const std::string& raw_value) {
  const std::string key = normalize_key(trim(raw_key));
  const std::string value = trim(raw_value);
  if (key == "method") {
    cfg.method = parse_method(value);
  } else if (key == "m") {
    cfg.m = parse_int<Eigen::Index>(key, value);
  } else if (key == "rank_frac") {
    cfg.rank_frac = parse_double(key, value);
  } else if (key == "sparsity_frac") {
    cfg.sparsity_frac = parse_double(key, value);
  } else if (key == "noise_std") {
    cfg.noise_std = parse_double(key, value);
  } else if (key == "beta1") {
    cfg.beta1 = parse_double(key, value);
  } else if (key == "gamma") {
    cfg.gamma = parse_double(key, value);
  } else if (key == "lambda") {
    cfg.lambda = parse_double(key, value);
  } else if (key == "alpha") {
    cfg.alpha = parse_double(key, value);
  } else if (key == "theta") {
    cfg.theta = parse_double(key, value);
  } else if (key == "tau") {
    cfg.tau = parse_double(key, value);
  } else if (key == "eps") {
    cfg.eps = parse_double(key, value);
  } else if (key == "eps_bar") {
    cfg.eps_bar = parse_double(key, value);
  } else if (key == "feasibility_tol") {
    cfg.feasibility_tol = parse_double(key, value);
  } else if (key == "max_iter") {
    cfg.max_iter = parse_int<std::size_t>(key, value);
  } else if (key == "seed") {
    cfg.seed = parse_int<std::int64_t>(key, value);
  } else if (key == "repeats") {
    cfg.repeats = parse_int<std::size_t>(key, value);
  } else {
    throw ConfigurationError("config: unknown key '" + raw_key + "'");
  }
}

void apply_config_file(ExperimentConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("config: cannot open " + path);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigurationError("config: " + path + ":" + std::to_string(number) + ": expected key=value");
    }
    set_config_field(cfg, text.substr(0, eq), text.substr(eq + 1));
  }
}

SolverParams<double> solver_params(const ExperimentConfig& cfg) {
  SolverParams<double> params;
  params.gamma = cfg.gamma;
  params.beta = 1.0;
  params.eps_bar = cfg.eps_bar.value_or(0.52 * cfg.gamma / params.beta);
  const double lambda = cfg.method == Method::kAma ? 1.0 : cfg.lambda;
  params.lambda_schedule = [lambda](std::size_t) { return lambda; };
  double alpha = 0.0;
  if (cfg.method == Method::kRiamaConst || cfg.method == Method::kRiamaAdaptive) alpha = cfg.alpha;
  params.alpha_schedule = [alpha](std::size_t) { return alpha; };
  params.alpha_cap = alpha;
  params.mode = cfg.method == Method::kRiamaAdaptive ? ConvergenceMode::kSummableInertia
                                                      : ConvergenceMode::kBoundedSchedule;
  return params;
}

ParamReport<double> validate_config(const ExperimentConfig& cfg) {
  return validate_params(solver_params(cfg), cfg.max_iter);
}

InfeasibleParameters::InfeasibleParameters(ParamReport<double> report)
    : ParameterError("infeasible parameters: " + format_report(report)), report_(std::move(report)) {}

std::string format_report(const ParamReport<double>& report) {
  std::ostringstream os;
  os << (report.feasible ? "feasible" : "infeasible") << "; gamma_max=" << format_number(report.gamma_max)
     << "; lambda_upper=" << format_number(report.lambda_upper);
  if (!report.violated.empty()) {
    os << "; violated=";
    for (std::size_t i = 0; i < report.violated.size(); ++i) os << (i ? "," : "") << report.violated[i];
  }
  if (report.witness_sigma && report.witness_delta) {
    os << "; witness sigma=" << format_number(*report.witness_sigma)
       << " delta=" << format_number(*report.witness_delta);
  }
  for (const auto& note : report.notes) os << "; " << note;
  return os.str();
}

SolveOutcome solve_instance(const ExperimentConfig& cfg, const SpcpInstance& inst, bool record_diagnostics) {
  check_config(cfg);
  StoppingRule stop;
  stop.eps = cfg.eps;
  stop.max_iter = cfg.max_iter;
  stop.feasibility_tol = cfg.feasibility_tol;
  stop.record_diagnostics = record_diagnostics;

  SolveOutcome out;
  out.row.method = method_name(cfg.method);
  out.row.gamma = cfg.gamma;
  out.row.seed = inst.seed;

  if (is_ama_family(cfg.method)) {
    const ParamReport<double> report = validate_config(cfg);
    if (!report.feasible) throw InfeasibleParameters(report);
    const SolverParams<double> params = solver_params(cfg);
    AmaVariant<double> variant = AmaVariant<double>::ama();
    if (cfg.method == Method::kRama) variant = AmaVariant<double>::rama();
    if (cfg.method == Method::kRiamaConst) {
      variant = AmaVariant<double>::riama(AlphaRule<double>::constant(cfg.alpha));
    }
    if (cfg.method == Method::kRiamaAdaptive) {
      variant = AmaVariant<double>::riama(AlphaRule<double>::adaptive(cfg.alpha));
    }
    const auto problem = assemble_spcp_problem(inst, SpcpOrder::kNoiseLowRankSparse);
    AmaRun<double> run = run_ama(problem, variant, params, stop);
    out.row.lambda = params.lambda_schedule(1);
    out.row.alpha = params.alpha_cap;
    out.record = std::move(run.record);
    out.state = std::move(run.state);
    out.alpha_history = std::move(run.alpha_history);
    out.summability_sums = std::move(run.summability_sums);
    out.L = out.state.x2;
    out.S = out.state.x3;
  } else {
    BaselineMethod<double> method;
    out.row.lambda = 1.0;
    if (cfg.method == Method::kAdmg) {
      method.kind = BaselineKind::kAdmg;
      method.admg = AdmgConfig<double>(cfg.theta);
    } else if (cfg.method == Method::kSpadmm) {
      method.kind = BaselineKind::kSpadmm;
      method.spadmm = SpadmmConfig<double>(cfg.tau);
    }
    const auto problem = assemble_spcp_problem(inst, SpcpOrder::kNoiseSparseLowRank);
    BaselineRun<double> run = run_baseline(problem, method, cfg.gamma, stop);
    out.record = std::move(run.record);
    out.state = std::move(run.state);
    out.L = out.state.x3;
    out.S = out.state.x2;
  }

  const RecoveryMetrics metrics = recovery_metrics(inst, out.L, out.S, out.L, out.S);
  out.row.k = out.record.iterations;
  out.row.rank = metrics.rank_Lk;
  out.row.rel_L_star = metrics.rel_L_star;
  out.row.rel_S_star = metrics.rel_S_star;
  out.row.cpu_seconds = out.record.wall_seconds;
  out.row.converged = out.record.converged;
  return out;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
  check_config(cfg);
  if (is_ama_family(cfg.method)) {
    const ParamReport<double> report = validate_config(cfg);
    if (!report.feasible) throw InfeasibleParameters(report);
  }
  std::vector<ResultRow> rows;
  for (std::size_t i = 0; i < cfg.repeats; ++i) {
    const std::int64_t seed = cfg.seed + static_cast<std::int64_t>(i);
    const SpcpInstance inst =
        gen_spcp_instance(cfg.m, cfg.rank_frac, cfg.sparsity_frac, cfg.noise_std, cfg.beta1, seed);
    rows.push_back(solve_instance(cfg, inst).row);
  }
  if (rows.size() > 1) rows.push_back(median_row(rows));
  return rows;
}

std::vector<std::string> sweep_axes() {
  return {"m",   "rank_frac", "sparsity_frac", "noise_std", "beta1",   "gamma",
          "lambda", "alpha", "theta", "tau", "eps", "eps_bar", "max_iter", "seed"};
}

std::vector<ResultRow> sweep(const ExperimentConfig& base, const std::string& raw_axis,
                             const std::vector<double>& values) {
  const std::string axis = normalize_key(raw_axis);
  const auto axes = sweep_axes();
  if (std::find(axes.begin(), axes.end(), axis) == axes.end()) {
    throw ConfigurationError("sweep: unknown axis '" + raw_axis + "'");
  }
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  std::vector<ExperimentConfig> configs;
  for (std::size_t idx : order) {
    ExperimentConfig cfg = base;
    const bool integral = axis == "m" || axis == "max_iter" || axis == "seed";
    std::ostringstream text;
    if (integral) {
      text << std::llround(values[idx]);
    } else {
      text << std::setprecision(17) << values[idx];
    }
    set_config_field(cfg, axis, text.str());
    check_config(cfg);
    configs.push_back(cfg);
  }

  std::vector<std::vector<ResultRow>> results(configs.size());
  std::vector<std::exception_ptr> errors(configs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      try {
        results[i] = run_experiment(configs[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = worker_count(configs.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<ResultRow> rows;
  for (auto& r : results) rows.insert(rows.end(), r.begin(), r.end());
  return rows;
}

void write_csv_header(std::ostream& out) {
  out << "method,gamma,lambda,alpha,k,rank,rel_L_star,rel_S_star,cpu_seconds,converged\n";
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows, bool header) {
  if (header) write_csv_header(out);
  for (const auto& r : rows) {
    out << r.method << ',' << format_number(r.gamma) << ',' << format_number(r.lambda) << ','
        << format_number(r.alpha) << ',' << r.k << ',' << r.rank << ',' << format_number(r.rel_L_star)
        << ',' << format_number(r.rel_S_star) << ',' << format_number(r.cpu_seconds) << ','
        << (r.converged ? "true" : "false") << '\n';
  }
}

void write_jsonl(std::ostream& out, const std::vector<ResultRow>& rows) {
  for (const auto& r : rows) {
    nlohmann::ordered_json j;
    j["method"] = r.method;
    j["gamma"] = r.gamma;
    j["lambda"] = r.lambda;
    j["alpha"] = r.alpha;
    j["k"] = r.k;
    j["rank"] = r.rank;
    j["rel_L_star"] = r.rel_L_star;
    j["rel_S_star"] = r.rel_S_star;
    j["cpu_seconds"] = r.cpu_seconds;
    j["converged"] = r.converged;
    j["seed"] = r.seed;
    out << j.dump() << '\n';
  }
}

}  // namespace splitkit
