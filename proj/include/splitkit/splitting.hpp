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

#ifndef SPLITKIT_SPLITTING_HPP_
#define SPLITKIT_SPLITTING_HPP_

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "splitkit/core.hpp"
#include "splitkit/prox.hpp"

namespace splitkit {

/// Operators of the inclusion 0 in A z + B z + C z, with C cocoercive.
template <typename Scalar>
struct MonotoneTriple {
  std::function<Matrix<Scalar>(const Matrix<Scalar>&, Scalar)> resolvent_A;
  std::function<Matrix<Scalar>(const Matrix<Scalar>&, Scalar)> resolvent_B;
  std::function<Matrix<Scalar>(const Matrix<Scalar>&)> forward_C;
  Scalar cocoercivity_beta{1};
};

template <typename Scalar>
struct ParamReport {
  bool feasible{false};
  Scalar gamma_max{0};
  Scalar lambda_upper{0};
  std::vector<std::string> violated;
  std::optional<Scalar> witness_sigma;
  std::optional<Scalar> witness_delta;
  std::vector<std::string> notes;

  bool violates(const std::string& label) const {
    return std::find(violated.begin(), violated.end(), label) != violated.end();
  }
};

/// Smallest admissible delta (exclusive) for inertia bound alpha.
template <typename Scalar>
Scalar delta_lower_bound(Scalar alpha, Scalar sigma) {
  return (alpha * alpha * (Scalar(1) + alpha) + alpha * sigma) / (Scalar(1) - alpha * alpha);
}

/// Upper limit on the relaxation parameters given the inertia bound alpha
/// and auxiliary constants sigma, delta:
///
///   (delta - a [a (1 + a) + a delta + sigma]) /
///   (abar delta [1 + a (1 + a) + a delta + sigma]),   abar = 1 / (2 - eps_bar).
template <typename Scalar>
Scalar lambda_upper_bound(Scalar alpha, Scalar delta, Scalar sigma, Scalar eps_bar) {
  if (!(alpha >= Scalar(0) && alpha < Scalar(1))) {
    throw ParameterError("lambda_upper_bound: alpha must lie in [0, 1)");
  }
  if (!(eps_bar > Scalar(0) && eps_bar < Scalar(1))) {
    throw ParameterError("lambda_upper_bound: eps_bar must lie in (0, 1)");
  }
  if (!(sigma > Scalar(0))) throw ParameterError("lambda_upper_bound: sigma must be positive");
  if (!(delta > delta_lower_bound(alpha, sigma))) {
    throw ParameterError("c3: delta must exceed (a^2 (1 + a) + a sigma) / (1 - a^2)");
  }
  const Scalar a = alpha;
  const Scalar alpha_bar = Scalar(1) / (Scalar(2) - eps_bar);
  const Scalar inner = a * (Scalar(1) + a) + a * delta + sigma;
  return (delta - a * inner) / (alpha_bar * delta * (Scalar(1) + inner));
}

/// Checks the step-size, inertia and relaxation conditions over the first
/// `horizon` iterations. Never mutates `params`.
///
/// Bounded-schedule mode: c1 is 0 < gamma < 2 beta eps_bar; c2 asks for a
/// nondecreasing alpha_k in [0, alpha_cap] with alpha_cap < 1, where alpha_1
/// counts as 0 because every run starts with z^0 = z^1; c3 asks for
/// 0 < lambda_k <= lambda_upper_bound(alpha_cap, delta, sigma, eps_bar). When
/// params carry no (sigma, delta) pair, or the given pair fails, a 100 x 100
/// logarithmic grid is searched for a witness.
///
/// Summable-inertia mode: c2 becomes 0 <= alpha_k <= alpha_cap < 1 and
/// 0 < lambda_k abar < 1. The summability condition cannot be checked ahead
/// of time; the report notes that the adaptive inertia rule enforces it.
template <typename Scalar>
ParamReport<Scalar> validate_params(const SolverParams<Scalar>& params, std::size_t horizon) {
  if (horizon < 1) throw ParameterError("validate_params: horizon must be at least 1");
  ParamReport<Scalar> report;
  report.gamma_max = Scalar(2) * params.beta * params.eps_bar;

  const bool eps_ok = params.eps_bar > Scalar(0) && params.eps_bar < Scalar(1);
  if (!eps_ok || !(params.beta > Scalar(0)) || !(params.gamma > Scalar(0)) ||
      !(params.gamma < report.gamma_max)) {
    report.violated.push_back("c1");
  }

  std::vector<Scalar> alphas(horizon), lambdas(horizon);
  for (std::size_t k = 1; k <= horizon; ++k) {
    alphas[k - 1] = params.alpha_schedule(k);
    lambdas[k - 1] = params.lambda_schedule(k);
  }
  const Scalar lambda_min = *std::min_element(lambdas.begin(), lambdas.end());
  const Scalar lambda_max = *std::max_element(lambdas.begin(), lambdas.end());
  const Scalar alpha_cap = params.alpha_cap;

  bool c2 = alpha_cap >= Scalar(0) && alpha_cap < Scalar(1);
  for (std::size_t i = 0; i < horizon && c2; ++i) {
    if (!(alphas[i] >= Scalar(0) && alphas[i] <= alpha_cap)) c2 = false;
  }

  if (params.mode == ConvergenceMode::kSummableInertia) {
    if (!c2) report.violated.push_back("c2");
    const Scalar alpha_bar = eps_ok ? params.alpha_bar() : Scalar(0);
    report.lambda_upper = eps_ok ? Scalar(2) - params.eps_bar : Scalar(0);
    if (!(lambda_min > Scalar(0)) || !(lambda_max * alpha_bar < Scalar(1))) {
      if (!report.violates("c2")) report.violated.push_back("c2");
    }
    report.notes.push_back(
        "c3 (summability of alpha_k ||z^k - z^{k-1}||^2) is enforced online by the "
        "adaptive inertia rule, not checked a priori");
    report.feasible = report.violated.empty();
    return report;
  }

  // alpha_1 is inert under z^0 = z^1, so the monotonicity check starts from 0.
  Scalar previous = Scalar(0);
  for (std::size_t i = 1; i < horizon && c2; ++i) {
    if (alphas[i] < previous) c2 = false;
    previous = alphas[i];
  }
  if (!c2) report.violated.push_back("c2");

  bool c3 = lambda_min > Scalar(0) && eps_ok;
  if (c3 && alpha_cap >= Scalar(0) && alpha_cap < Scalar(1)) {
    auto satisfied_by = [&](Scalar sigma, Scalar delta) -> std::optional<Scalar> {
      if (!(sigma > Scalar(0)) || !(delta > delta_lower_bound(alpha_cap, sigma))) return std::nullopt;
      const Scalar upper = lambda_upper_bound(alpha_cap, delta, sigma, params.eps_bar);
      if (lambda_max <= upper) return upper;
      return std::nullopt;
    };
    bool found = false;
    if (params.sigma && params.delta) {
      if (auto upper = satisfied_by(*params.sigma, *params.delta)) {
        report.lambda_upper = *upper;
        report.witness_sigma = params.sigma;
        report.witness_delta = params.delta;
        found = true;
      }
    }
    if (!found) {
      Scalar best = -kInfinity<Scalar>;
      constexpr int kGrid = 100;
      for (int i = 0; i < kGrid; ++i) {
        const Scalar sigma = std::pow(Scalar(10), Scalar(-6) + Scalar(6) * i / Scalar(kGrid - 1));
        const Scalar lo = delta_lower_bound(alpha_cap, sigma) + Scalar(1e-6);
        if (!(lo < Scalar(10))) continue;
        for (int j = 0; j < kGrid; ++j) {
          const Scalar delta =
              std::exp(std::log(lo) + (std::log(Scalar(10)) - std::log(lo)) * j / Scalar(kGrid - 1));
          if (!(delta > delta_lower_bound(alpha_cap, sigma))) continue;
          const Scalar upper = lambda_upper_bound(alpha_cap, delta, sigma, params.eps_bar);
          if (upper > best) {
            best = upper;
            report.lambda_upper = upper;
            if (lambda_max <= upper) {
              report.witness_sigma = sigma;
              report.witness_delta = delta;
            }
          }
        }
      }
      found = report.witness_sigma.has_value() && lambda_max <= report.lambda_upper;
      if (!found) {
        report.witness_sigma.reset();
        report.witness_delta.reset();
      }
    }
    c3 = found;
  } else {
    c3 = false;
  }
  if (!c3) report.violated.push_back("c3");
  report.feasible = report.violated.empty();
  return report;
}

/// The pair (z^{k-1}, z^k) carried between splitting iterations.
template <typename Scalar>
struct SplittingState {
  Matrix<Scalar> z_prev;
  Matrix<Scalar> z_curr;
};

template <typename Scalar>
struct SplittingStep {
  Matrix<Scalar> y, w, u, z_next;
};

/// One inertial, relaxed three-operator step:
///   y = z + alpha (z - z_prev);  w = J_{gamma B} y;
///   u = J_{gamma A}(2w - y - gamma C w);  z_next = y + lambda (u - w).
template <typename Scalar>
SplittingStep<Scalar> its_step(const SplittingState<Scalar>& state, const MonotoneTriple<Scalar>& ops,
                               Scalar gamma, Scalar alpha, Scalar lambda) {
  if (!(gamma > Scalar(0))) throw ParameterError("its_step: gamma must be positive");
  if (!(lambda > Scalar(0))) throw ParameterError("its_step: lambda must be positive");
  SplittingStep<Scalar> s;
  s.y = state.z_curr + alpha * (state.z_curr - state.z_prev);
  s.w = ops.resolvent_B(s.y, gamma);
  s.u = ops.resolvent_A(Scalar(2) * s.w - s.y - gamma * ops.forward_C(s.w), gamma);
  s.z_next = s.y + lambda * (s.u - s.w);
  return s;
}

struct SplittingStop {
  std::size_t max_iter{10000};
  double tol{1e-8};
};

template <typename Scalar>
struct SplittingRun {
  std::size_t iterations{0};
  bool converged{false};
  double wall_seconds{0};
  std::vector<Scalar> fixed_point_residual;  // ||u^k - w^k||
  std::vector<Scalar> z_increment;           // ||z^{k+1} - z^k||
  Matrix<Scalar> w;
  Matrix<Scalar> z;
};

/// Iterates its_step from z^0 = z^1 = z0 until ||u - w|| <= tol or the
/// budget runs out. Budget exhaustion yields converged = false.
template <typename Scalar>
SplittingRun<Scalar> run_splitting(const MonotoneTriple<Scalar>& ops, const SolverParams<Scalar>& params,
                                   const Matrix<Scalar>& z0, const SplittingStop& stop) {
  const auto start = std::chrono::steady_clock::now();
  SplittingRun<Scalar> run;
  SplittingState<Scalar> state{z0, z0};
  for (std::size_t k = 1; k <= stop.max_iter; ++k) {
    SplittingStep<Scalar> s =
        its_step(state, ops, params.gamma, params.alpha_schedule(k), params.lambda_schedule(k));
    const Scalar gap = (s.u - s.w).norm();
    run.fixed_point_residual.push_back(gap);
    run.z_increment.push_back((s.z_next - state.z_curr).norm());
    run.iterations = k;
    run.w = std::move(s.w);
    state.z_prev = std::move(state.z_curr);
    state.z_curr = std::move(s.z_next);
    if (gap <= static_cast<Scalar>(stop.tol)) {
      run.converged = true;
      break;
    }
  }
  run.z = state.z_curr;
  run.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

/// The dual of the three-block problem as a monotone inclusion:
///   A = d(f2* o L2*),  B = d(f3* o L3* - <b, .>),  C = grad(f1* o L1*),
/// with C cocoercive with constant mu / ||L1||^2.
///
/// Resolvents come from the primal prox handles through the Moreau identity
/// and need L_i* L_i = c_i I with c_i > 0, which makes
///   prox_{g f* o L*}(v) = v + L (prox_{g c f*}(L* v) - L* v) / c.
template <typename Scalar>
MonotoneTriple<Scalar> make_dual_triple(const SeparableProblem<Scalar>& problem) {
  problem.check_shapes();
  problem.require_strongly_convex_first_block();
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& scale = problem.blocks[i].map.gram_scale;
    if (!scale || !(*scale > Scalar(0))) {
      throw ConfigurationError("make_dual_triple: block " + std::to_string(i + 1) +
                               " map lacks L*L = cI with c > 0");
    }
  }
  auto composed_prox = [](const ProblemBlock<Scalar>& blk) {
    const Scalar c = *blk.map.gram_scale;
    return [blk, c](const Matrix<Scalar>& v, Scalar t) -> Matrix<Scalar> {
      const Matrix<Scalar> lv = blk.map.adjoint(v);
      const Matrix<Scalar> moved = prox_conjugate(blk.objective, lv, t * c) - lv;
      return v + blk.map.forward(moved) / c;
    };
  };
  MonotoneTriple<Scalar> ops;
  const auto prox_a = composed_prox(problem.blocks[1]);
  const auto prox_b = composed_prox(problem.blocks[2]);
  const Matrix<Scalar> b = problem.rhs;
  ops.resolvent_A = prox_a;
  ops.resolvent_B = [prox_b, b](const Matrix<Scalar>& y, Scalar gamma) {
    return prox_b(y + gamma * b, gamma);
  };
  const ProblemBlock<Scalar> first = problem.blocks[0];
  ops.forward_C = [first](const Matrix<Scalar>& w) -> Matrix<Scalar> {
    return first.map.forward(argmin_linear(first.objective, first.map.adjoint(w)));
  };
  const Scalar norm = first.map.norm_bound;
  ops.cocoercivity_beta = first.objective.strong_convexity / (norm * norm);
  return ops;
}

}  // namespace splitkit

#endif  // SPLITKIT_SPLITTING_HPP_
