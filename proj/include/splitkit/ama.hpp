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

#ifndef SPLITKIT_AMA_HPP_
#define SPLITKIT_AMA_HPP_

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "splitkit/core.hpp"
#include "splitkit/diagnostics.hpp"

namespace splitkit {

enum class AmaKind { kRiama, kRama, kAma };

/// How alpha_{k+1} is chosen inside iteration k.
template <typename Scalar>
struct AlphaRule {
  enum class Kind { kZero, kConstant, kAdaptive };
  Kind kind{Kind::kZero};
  Scalar value{0};  // the constant, or the cap of the adaptive rule

  static AlphaRule zero() { return {Kind::kZero, Scalar(0)}; }
  static AlphaRule constant(Scalar alpha) {
    if (!(alpha >= Scalar(0) && alpha < Scalar(1))) {
      throw ParameterError("AlphaRule::constant: alpha must lie in [0, 1)");
    }
    return {Kind::kConstant, alpha};
  }
  static AlphaRule adaptive(Scalar cap) {
    if (!(cap >= Scalar(0) && cap < Scalar(1))) {
      throw ParameterError("AlphaRule::adaptive: cap must lie in [0, 1)");
    }
    return {Kind::kAdaptive, cap};
  }
};

/// ama forces alpha = 0 and lambda = 1; rama forces alpha = 0.
template <typename Scalar>
struct AmaVariant {
  AmaKind kind{AmaKind::kRiama};
  AlphaRule<Scalar> alpha_rule;

  static AmaVariant ama() { return {AmaKind::kAma, AlphaRule<Scalar>::zero()}; }
  static AmaVariant rama() { return {AmaKind::kRama, AlphaRule<Scalar>::zero()}; }
  static AmaVariant riama(AlphaRule<Scalar> rule) { return {AmaKind::kRiama, rule}; }
};

struct StoppingRule {
  double eps{1e-5};
  std::size_t max_iter{10000};
  // Optional absolute bound on ||L1 x1 + L2 x2 + L3 x3 - b|| required on top
  // of the relative-step test.
  double feasibility_tol{std::numeric_limits<double>::infinity()};
  bool record_diagnostics{false};
};

/// argmin_x f(x) + (gamma / 2) ||L x - t||^2 for a block with L*L = cI, which
/// is prox_{f / (gamma c)}(L* t / c). A zero map (c = 0) leaves the block at
/// `current`.
template <typename Scalar>
Matrix<Scalar> exact_block_argmin(const ProblemBlock<Scalar>& blk, const Matrix<Scalar>& t,
                                  Scalar gamma, const Matrix<Scalar>& current) {
  if (!blk.map.gram_scale) {
    throw ConfigurationError("block '" + blk.objective.name +
                             "': exact subproblem needs L*L = cI");
  }
  const Scalar c = *blk.map.gram_scale;
  if (c == Scalar(0)) return current;
  return blk.objective.prox(blk.map.adjoint(t) / c, Scalar(1) / (gamma * c));
}

namespace detail {

template <typename Scalar>
void require_exact_blocks(const SeparableProblem<Scalar>& problem, std::size_t first) {
  for (std::size_t i = first; i < 3; ++i) {
    if (!problem.blocks[i].map.gram_scale) {
      throw ConfigurationError("block " + std::to_string(i + 1) +
                               " map lacks L*L = cI; exact subproblems unavailable");
    }
  }
}

template <typename Scalar>
Matrix<Scalar> first_block(const SeparableProblem<Scalar>& problem, const Matrix<Scalar>& w,
                           std::size_t k) {
  const auto& blk = problem.blocks[0];
  try {
    return argmin_linear(blk.objective, blk.map.adjoint(w));
  } catch (const StepError& e) {
    throw StepError(std::string("block 1 subproblem: ") + e.what(), k);
  }
}

template <typename Scalar>
void require_ama_problem(const SeparableProblem<Scalar>& problem, Scalar gamma) {
  problem.require_strongly_convex_first_block();
  require_exact_blocks(problem, 1);
  if (!(gamma > Scalar(0))) throw ParameterError("gamma must be positive");
}

/// Shadow dual bookkeeping: y^k and u^k from the pre-step multiplier, then
/// z^{k+1} = w^{k+1} + gamma L3 x3^{k+1} - gamma b - p^{k+1}.
template <typename Scalar>
void advance_shadow(const SeparableProblem<Scalar>& problem, IterationState<Scalar>& next,
                    const Matrix<Scalar>& w_old, const Matrix<Scalar>& a3_old,
                    const Matrix<Scalar>& r, Scalar gamma, const Matrix<Scalar>& z_old) {
  next.y = w_old + gamma * a3_old - gamma * problem.rhs;
  next.u = w_old - gamma * r;
  next.z_prev = z_old;
  next.z_curr = next.w + gamma * problem.blocks[2].map.forward(next.x3) - gamma * problem.rhs - next.p;
}

}  // namespace detail

/// Cold start: x = 0, w = 0, p = 0 and z^0 = z^1 = -gamma b.
template <typename Scalar>
IterationState<Scalar> initial_state(const SeparableProblem<Scalar>& problem, Scalar gamma) {
  problem.check_shapes();
  IterationState<Scalar> s;
  s.x1 = problem.zero_block(0);
  s.x2 = problem.zero_block(1);
  s.x3 = problem.zero_block(2);
  s.w = Matrix<Scalar>::Zero(problem.rhs.rows(), problem.rhs.cols());
  s.p = s.w;
  s.z_curr = -gamma * problem.rhs;
  s.z_prev = s.z_curr;
  s.y = s.z_curr;
  s.u = s.w;
  s.k = 1;
  return s;
}

/// min(1 / (k^2 ||p - gamma lambda r||^2), cap); cap when the norm is below 1e-300.
template <typename Scalar>
Scalar adaptive_alpha(std::size_t k, const Matrix<Scalar>& p, Scalar gamma, Scalar lambda,
                      const Matrix<Scalar>& residual, Scalar cap) {
  if (k < 1) throw ParameterError("adaptive_alpha: k must be at least 1");
  const Scalar sq = (p - gamma * lambda * residual).squaredNorm();
  if (std::sqrt(sq) < Scalar(1e-300)) return cap;
  const Scalar kk = static_cast<Scalar>(k);
  return std::min(Scalar(1) / (kk * kk * sq), cap);
}

/// One iteration of the relaxed inertial three-block AMA with alpha_{k+1}
/// supplied by `alpha_of(p^k, r^k)`, where r^k = L1 x1^{k+1} + L2 x2^{k+1} + L3 x3^k - b.
/// `alpha_used` receives alpha_{k+1}.
template <typename Scalar, typename AlphaFn>
IterationState<Scalar> riama_step_with(const SeparableProblem<Scalar>& problem,
                                       const IterationState<Scalar>& state, Scalar gamma,
                                       Scalar lambda, AlphaFn&& alpha_of, Scalar* alpha_used = nullptr) {
  detail::require_ama_problem(problem, gamma);
  if (!(lambda > Scalar(0))) throw ParameterError("lambda must be positive");
  const auto& b = problem.rhs;
  IterationState<Scalar> next;
  next.k = state.k + 1;

  next.x1 = detail::first_block(problem, state.w, state.k);
  const Matrix<Scalar> a1 = problem.blocks[0].map.forward(next.x1);
  const Matrix<Scalar> a3 = problem.blocks[2].map.forward(state.x3);

  const Matrix<Scalar> t2 = state.w / gamma - (a1 + a3 - b);
  next.x2 = exact_block_argmin(problem.blocks[1], t2, gamma, state.x2);
  const Matrix<Scalar> r = a1 + problem.blocks[1].map.forward(next.x2) + a3 - b;

  const Scalar alpha = alpha_of(state.p, r);
  if (alpha_used) *alpha_used = alpha;
  const Scalar scale = (Scalar(1) + alpha) * lambda;

  const Matrix<Scalar> t3 = (state.w + alpha * state.p) / gamma - (scale * r - a3);
  next.x3 = exact_block_argmin(problem.blocks[2], t3, gamma, state.x3);
  const Matrix<Scalar> d3 = problem.blocks[2].map.forward(next.x3) - a3;

  next.w = state.w + alpha * state.p - gamma * (d3 + scale * r);
  next.p = alpha * (state.p - gamma * lambda * r);
  detail::advance_shadow(problem, next, state.w, a3, r, gamma, state.z_curr);
  if (!next.w.allFinite()) throw StepError("riama_step: multiplier became non-finite", state.k);
  return next;
}

/// Relaxed inertial three-block AMA step with a fixed alpha_{k+1}.
template <typename Scalar>
IterationState<Scalar> riama_step(const SeparableProblem<Scalar>& problem,
                                  const IterationState<Scalar>& state, Scalar gamma,
                                  Scalar alpha_next, Scalar lambda) {
  if (!(alpha_next >= Scalar(0) && alpha_next < Scalar(1))) {
    throw ParameterError("riama_step: alpha must lie in [0, 1)");
  }
  return riama_step_with(problem, state, gamma, lambda,
                         [alpha_next](const Matrix<Scalar>&, const Matrix<Scalar>&) { return alpha_next; });
}

/// Relaxed three-block AMA (alpha = 0). Arithmetic matches riama_step at
/// alpha = 0 element for element.
template <typename Scalar>
IterationState<Scalar> rama3_step(const SeparableProblem<Scalar>& problem,
                                  const IterationState<Scalar>& state, Scalar gamma, Scalar lambda) {
  detail::require_ama_problem(problem, gamma);
  if (!(lambda > Scalar(0))) throw ParameterError("lambda must be positive");
  const auto& b = problem.rhs;
  IterationState<Scalar> next;
  next.k = state.k + 1;

  next.x1 = detail::first_block(problem, state.w, state.k);
  const Matrix<Scalar> a1 = problem.blocks[0].map.forward(next.x1);
  const Matrix<Scalar> a3 = problem.blocks[2].map.forward(state.x3);

  const Matrix<Scalar> t2 = state.w / gamma - (a1 + a3 - b);
  next.x2 = exact_block_argmin(problem.blocks[1], t2, gamma, state.x2);
  const Matrix<Scalar> r = a1 + problem.blocks[1].map.forward(next.x2) + a3 - b;

  const Matrix<Scalar> t3 = state.w / gamma - (lambda * r - a3);
  next.x3 = exact_block_argmin(problem.blocks[2], t3, gamma, state.x3);
  const Matrix<Scalar> d3 = problem.blocks[2].map.forward(next.x3) - a3;

  next.w = state.w - gamma * (d3 + lambda * r);
  next.p = Matrix<Scalar>::Zero(state.p.rows(), state.p.cols());
  detail::advance_shadow(problem, next, state.w, a3, r, gamma, state.z_curr);
  if (!next.w.allFinite()) throw StepError("rama3_step: multiplier became non-finite", state.k);
  return next;
}

/// Three-block AMA. The multiplier uses the full residual
/// L1 x1^{k+1} + L2 x2^{k+1} + L3 x3^{k+1} - b, grouped as
/// (L3 x3^{k+1} - L3 x3^k) + r^k to share rounding with the relaxed variants.
template <typename Scalar>
IterationState<Scalar> ama3_step(const SeparableProblem<Scalar>& problem,
                                 const IterationState<Scalar>& state, Scalar gamma) {
  detail::require_ama_problem(problem, gamma);
  const auto& b = problem.rhs;
  IterationState<Scalar> next;
  next.k = state.k + 1;

  next.x1 = detail::first_block(problem, state.w, state.k);
  const Matrix<Scalar> a1 = problem.blocks[0].map.forward(next.x1);
  const Matrix<Scalar> a3 = problem.blocks[2].map.forward(state.x3);

  const Matrix<Scalar> t2 = state.w / gamma - (a1 + a3 - b);
  next.x2 = exact_block_argmin(problem.blocks[1], t2, gamma, state.x2);
  const Matrix<Scalar> r = a1 + problem.blocks[1].map.forward(next.x2) + a3 - b;

  // L1 x1^{k+1} + L2 x2^{k+1} - b, written as r - L3 x3^k.
  const Matrix<Scalar> t3 = state.w / gamma - (r - a3);
  next.x3 = exact_block_argmin(problem.blocks[2], t3, gamma, state.x3);
  const Matrix<Scalar> d3 = problem.blocks[2].map.forward(next.x3) - a3;

  next.w = state.w - gamma * (d3 + r);
  next.p = Matrix<Scalar>::Zero(state.p.rows(), state.p.cols());
  detail::advance_shadow(problem, next, state.w, a3, r, gamma, state.z_curr);
  if (!next.w.allFinite()) throw StepError("ama3_step: multiplier became non-finite", state.k);
  return next;
}

template <typename Scalar>
struct AmaRun {
  RunRecord<Scalar> record;
  IterationState<Scalar> state;
  // alpha_{k+1} used in iteration k.
  std::vector<Scalar> alpha_history;
  // Partial sums of alpha_{k+1} ||p^k - gamma lambda_k r^k||^2.
  std::vector<Scalar> summability_sums;
};

/// Runs an AMA-family method from the cold start until
/// max(rel step x2, rel step x3) <= eps (and the optional feasibility bound
/// holds) or max_iter iterations elapse.
///
/// Trace entry k holds ||L1 x1^{k+1} + L2 x2^{k+1} + L3 x3^k - b||, the
/// relative steps, and with diagnostics on the primal value
/// f1(x1^{k+1}) + f2(x2^{k+1}) + f3(x3^k), the dual value at (w^k, u^k) and
/// the KKT residual at (x^{k+1}, w^{k+1}).
template <typename Scalar>
AmaRun<Scalar> run_ama(const SeparableProblem<Scalar>& problem, const AmaVariant<Scalar>& variant,
                       const SolverParams<Scalar>& params, const StoppingRule& stop) {
  if (!(stop.eps > 0)) throw ParameterError("run_ama: eps must be positive");
  const Scalar gamma = params.gamma;
  detail::require_ama_problem(problem, gamma);
  if (variant.kind != AmaKind::kRiama && variant.alpha_rule.kind != AlphaRule<Scalar>::Kind::kZero) {
    throw ParameterError("run_ama: ama and rama use alpha = 0");
  }

  const auto start = std::chrono::steady_clock::now();
  AmaRun<Scalar> run;
  IterationState<Scalar> state = initial_state(problem, gamma);
  Scalar partial = Scalar(0);

  for (std::size_t it = 1; it <= stop.max_iter; ++it) {
    const Scalar lambda = variant.kind == AmaKind::kAma ? Scalar(1) : params.lambda_schedule(state.k);
    Scalar alpha = Scalar(0);
    Scalar weight = Scalar(0);
    IterationState<Scalar> next;
    switch (variant.kind) {
      case AmaKind::kAma:
        next = ama3_step(problem, state, gamma);
        break;
      case AmaKind::kRama:
        next = rama3_step(problem, state, gamma, lambda);
        break;
      case AmaKind::kRiama: {
        const auto rule = variant.alpha_rule;
        const std::size_t k = state.k;
        next = riama_step_with(
            problem, state, gamma, lambda,
            [&](const Matrix<Scalar>& p, const Matrix<Scalar>& r) {
              weight = (p - gamma * lambda * r).squaredNorm();
              switch (rule.kind) {
                case AlphaRule<Scalar>::Kind::kConstant:
                  return rule.value;
                case AlphaRule<Scalar>::Kind::kAdaptive:
                  return adaptive_alpha(k, p, gamma, lambda, r, rule.value);
                default:
                  return Scalar(0);
              }
            },
            &alpha);
        break;
      }
    }
    partial += alpha * weight;
    run.alpha_history.push_back(alpha);
    run.summability_sums.push_back(partial);

    TraceEntry<Scalar> entry;
    entry.alpha = alpha;
    entry.constraint_residual = problem.constraint_residual(next.x1, next.x2, state.x3).norm();
    entry.rel_step_x2 = relative_step(next.x2, state.x2);
    entry.rel_step_x3 = relative_step(next.x3, state.x3);
    if (stop.record_diagnostics) {
      entry.primal_value = primal_objective(problem, next.x1, next.x2, state.x3);
      entry.dual_value = dual_objective(problem, state.w, next.u);
      entry.kkt_residual = kkt_residual(problem, next.x1, next.x2, next.x3, next.w);
    }
    run.record.trace.push_back(entry);
    run.record.iterations = it;
    state = std::move(next);

    const Scalar rel = std::max(entry.rel_step_x2, entry.rel_step_x3);
    if (rel <= static_cast<Scalar>(stop.eps) &&
        entry.constraint_residual <= static_cast<Scalar>(stop.feasibility_tol)) {
      run.record.converged = true;
      break;
    }
  }
  run.state = std::move(state);
  run.record.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

}  // namespace splitkit

#endif  // SPLITKIT_AMA_HPP_
