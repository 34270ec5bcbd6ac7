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

#ifndef SPLITKIT_ADMM_HPP_
#define SPLITKIT_ADMM_HPP_

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <string>

#include "splitkit/ama.hpp"
#include "splitkit/core.hpp"
#include "splitkit/diagnostics.hpp"

namespace splitkit {

/// Gaussian back substitution weight theta in (0, 1).
template <typename Scalar>
struct AdmgConfig {
  Scalar theta;

  explicit AdmgConfig(Scalar theta_in = Scalar(0.99999)) : theta(theta_in) {
    if (!(theta > Scalar(0) && theta < Scalar(1))) {
      throw ParameterError("AdmgConfig: theta must lie in (0, 1)");
    }
  }
};

/// Multiplier step factor tau in (0, (1 + sqrt 5) / 2) and proximal terms
/// T_i = eta_i I with eta_i >= 0.
template <typename Scalar>
struct SpadmmConfig {
  Scalar tau;
  std::array<Scalar, 3> eta;

  explicit SpadmmConfig(Scalar tau_in = Scalar(1), std::array<Scalar, 3> eta_in = {0, 0, 0})
      : tau(tau_in), eta(eta_in) {
    const Scalar golden = (Scalar(1) + std::sqrt(Scalar(5))) / Scalar(2);
    if (!(tau > Scalar(0) && tau < golden)) {
      throw ParameterError("SpadmmConfig: tau must lie in (0, (1 + sqrt 5) / 2)");
    }
    for (Scalar e : eta) {
      if (!(e >= Scalar(0))) throw ParameterError("SpadmmConfig: proximal weights must be nonnegative");
    }
  }
};

/// One Gauss-Seidel sweep over the three augmented-Lagrangian subproblems
/// followed by w - step * r, with r = L1 x1 + L2 x2 + L3 x3 - b at the new
/// point. `multiplier_cert` = w - gamma r certifies blocks 1 and 3;
/// `block2_cert` = w - gamma (L1 x1^+ + L2 x2^+ + L3 x3^k - b) certifies block 2.
template <typename Scalar>
struct AdmmPass {
  Matrix<Scalar> x1, x2, x3, w;
  Matrix<Scalar> residual;
  Matrix<Scalar> multiplier_cert;
  Matrix<Scalar> block2_cert;
};

namespace detail {

/// argmin f(x) + (gamma / 2) ||L x - t||^2 + (eta / 2) ||x - x_k||^2 for
/// L*L = cI: prox_{f / (gamma c + eta)}((gamma L* t + eta x_k) / (gamma c + eta)).
template <typename Scalar>
Matrix<Scalar> proximal_block_argmin(const ProblemBlock<Scalar>& blk, const Matrix<Scalar>& t,
                                     Scalar gamma, Scalar eta, const Matrix<Scalar>& current) {
  if (eta == Scalar(0)) return exact_block_argmin(blk, t, gamma, current);
  if (!blk.map.gram_scale) {
    throw ConfigurationError("block '" + blk.objective.name + "': exact subproblem needs L*L = cI");
  }
  const Scalar weight = gamma * *blk.map.gram_scale + eta;
  return blk.objective.prox((gamma * blk.map.adjoint(t) + eta * current) / weight, Scalar(1) / weight);
}

template <typename Scalar>
AdmmPass<Scalar> admm_pass(const SeparableProblem<Scalar>& problem, const IterationState<Scalar>& state,
                           Scalar gamma, const std::array<Scalar, 3>& eta, Scalar step) {
  if (!(gamma > Scalar(0))) throw ParameterError("gamma must be positive");
  detail::require_exact_blocks(problem, 0);
  const auto& b = problem.rhs;
  const auto& L1 = problem.blocks[0].map;
  const auto& L2 = problem.blocks[1].map;
  const auto& L3 = problem.blocks[2].map;
  AdmmPass<Scalar> out;
  const Matrix<Scalar> scaled_w = state.w / gamma;
  const Matrix<Scalar> a2_old = L2.forward(state.x2);
  const Matrix<Scalar> a3_old = L3.forward(state.x3);

  const Matrix<Scalar> t1 = scaled_w - (a2_old + a3_old - b);
  out.x1 = proximal_block_argmin(problem.blocks[0], t1, gamma, eta[0], state.x1);
  const Matrix<Scalar> a1 = L1.forward(out.x1);
  const Matrix<Scalar> t2 = scaled_w - (a1 + a3_old - b);
  out.x2 = proximal_block_argmin(problem.blocks[1], t2, gamma, eta[1], state.x2);
  const Matrix<Scalar> a2 = L2.forward(out.x2);
  const Matrix<Scalar> t3 = scaled_w - (a1 + a2 - b);
  out.x3 = proximal_block_argmin(problem.blocks[2], t3, gamma, eta[2], state.x3);
  const Matrix<Scalar> a3 = L3.forward(out.x3);

  out.residual = a1 + a2 + a3 - b;
  out.w = state.w - step * out.residual;
  out.multiplier_cert = state.w - gamma * out.residual;
  out.block2_cert = state.w - gamma * (a1 + a2 + a3_old - b);
  if (!out.w.allFinite()) throw StepError("admm pass: multiplier became non-finite", state.k);
  return out;
}

template <typename Scalar>
IterationState<Scalar> state_from_pass(const IterationState<Scalar>& state, AdmmPass<Scalar>&& pass) {
  IterationState<Scalar> next;
  next.k = state.k + 1;
  next.x1 = std::move(pass.x1);
  next.x2 = std::move(pass.x2);
  next.x3 = std::move(pass.x3);
  next.w = std::move(pass.w);
  next.p = state.p;
  return next;
}

}  // namespace detail

/// Directly extended three-block ADMM.
template <typename Scalar>
IterationState<Scalar> admm3_step(const SeparableProblem<Scalar>& problem,
                                  const IterationState<Scalar>& state, Scalar gamma) {
  return detail::state_from_pass(state, detail::admm_pass(problem, state, gamma, {0, 0, 0}, gamma));
}

/// Semi-proximal ADMM with T_i = eta_i I and multiplier step tau gamma.
template <typename Scalar>
IterationState<Scalar> spadmm_step(const SeparableProblem<Scalar>& problem,
                                   const IterationState<Scalar>& state, Scalar gamma,
                                   const SpadmmConfig<Scalar>& cfg) {
  return detail::state_from_pass(state,
                                 detail::admm_pass(problem, state, gamma, cfg.eta, cfg.tau * gamma));
}

/// Solves G d = e for G = [[I, M, 0], [0, I, 0], [0, 0, I]] with
/// M = (L2* L2)^{-1} L2* L3 = L2* L3 / c2, bottom-up.
template <typename Scalar>
std::array<Matrix<Scalar>, 3> gaussian_back_substitution(const SeparableProblem<Scalar>& problem,
                                                         const Matrix<Scalar>& e2,
                                                         const Matrix<Scalar>& e3,
                                                         const Matrix<Scalar>& ew) {
  const auto& L2 = problem.blocks[1].map;
  if (!L2.gram_scale || !(*L2.gram_scale > Scalar(0))) {
    throw ConfigurationError("ADM-G: L2* L2 must be c I with c > 0");
  }
  const Matrix<Scalar> d3 = e3;
  const Matrix<Scalar> d2 = e2 - L2.adjoint(problem.blocks[2].map.forward(d3)) / *L2.gram_scale;
  return {d2, d3, ew};
}

/// Applies v^+ = v - theta G^{-1} (v - v~) over v = (x2, x3, w).
template <typename Scalar>
IterationState<Scalar> admg_correct(const SeparableProblem<Scalar>& problem,
                                    const IterationState<Scalar>& state, const AdmmPass<Scalar>& pred,
                                    const AdmgConfig<Scalar>& cfg) {
  const auto d = gaussian_back_substitution(problem, Matrix<Scalar>(state.x2 - pred.x2),
                                            Matrix<Scalar>(state.x3 - pred.x3),
                                            Matrix<Scalar>(state.w - pred.w));
  IterationState<Scalar> next;
  next.k = state.k + 1;
  next.x1 = pred.x1;
  next.x2 = state.x2 - cfg.theta * d[0];
  next.x3 = state.x3 - cfg.theta * d[1];
  next.w = state.w - cfg.theta * d[2];
  next.p = state.p;
  return next;
}

/// ADMM prediction followed by the Gaussian back substitution correction.
template <typename Scalar>
IterationState<Scalar> admg_step(const SeparableProblem<Scalar>& problem,
                                 const IterationState<Scalar>& state, Scalar gamma,
                                 const AdmgConfig<Scalar>& cfg) {
  const auto& L2 = problem.blocks[1].map;
  if (!L2.gram_scale || !(*L2.gram_scale > Scalar(0))) {
    throw ConfigurationError("ADM-G: L2* L2 must be c I with c > 0");
  }
  const AdmmPass<Scalar> pred = detail::admm_pass(problem, state, gamma, {0, 0, 0}, gamma);
  return admg_correct(problem, state, pred, cfg);
}

enum class BaselineKind { kAdmm3, kAdmg, kSpadmm };

template <typename Scalar>
struct BaselineMethod {
  BaselineKind kind{BaselineKind::kAdmm3};
  AdmgConfig<Scalar> admg{};
  SpadmmConfig<Scalar> spadmm{};
};

template <typename Scalar>
struct BaselineRun {
  RunRecord<Scalar> record;
  IterationState<Scalar> state;
};

/// Runs a baseline from the zero start until max(rel step x2, rel step x3)
/// <= eps (plus the optional feasibility bound) or max_iter.
///
/// Trace residuals and diagnostics are taken at the sweep point: the new
/// iterate for ADMM and sPADMM, the prediction for ADM-G. The dual value
/// uses (multiplier_cert, block2_cert) and the KKT residual multiplier_cert.
template <typename Scalar>
BaselineRun<Scalar> run_baseline(const SeparableProblem<Scalar>& problem,
                                 const BaselineMethod<Scalar>& method, Scalar gamma,
                                 const StoppingRule& stop) {
  if (!(stop.eps > 0)) throw ParameterError("run_baseline: eps must be positive");
  if (!(gamma > Scalar(0))) throw ParameterError("run_baseline: gamma must be positive");
  problem.check_shapes();
  const auto start = std::chrono::steady_clock::now();
  BaselineRun<Scalar> run;
  IterationState<Scalar> state = initial_state(problem, gamma);
  const std::array<Scalar, 3> no_eta{0, 0, 0};

  for (std::size_t it = 1; it <= stop.max_iter; ++it) {
    AdmmPass<Scalar> pass;
    IterationState<Scalar> next;
    switch (method.kind) {
      case BaselineKind::kAdmm3:
        pass = detail::admm_pass(problem, state, gamma, no_eta, gamma);
        next = detail::state_from_pass(state, AdmmPass<Scalar>(pass));
        break;
      case BaselineKind::kSpadmm:
        pass = detail::admm_pass(problem, state, gamma, method.spadmm.eta, method.spadmm.tau * gamma);
        next = detail::state_from_pass(state, AdmmPass<Scalar>(pass));
        break;
      case BaselineKind::kAdmg:
        pass = detail::admm_pass(problem, state, gamma, no_eta, gamma);
        next = admg_correct(problem, state, pass, method.admg);
        break;
    }

    TraceEntry<Scalar> entry;
    entry.constraint_residual = pass.residual.norm();
    entry.rel_step_x2 = relative_step(next.x2, state.x2);
    entry.rel_step_x3 = relative_step(next.x3, state.x3);
    if (stop.record_diagnostics) {
      entry.primal_value = primal_objective(problem, pass.x1, pass.x2, pass.x3);
      entry.dual_value = dual_objective(problem, pass.multiplier_cert, pass.block2_cert);
      entry.kkt_residual = kkt_residual(problem, pass.x1, pass.x2, pass.x3, pass.multiplier_cert);
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

#endif  // SPLITKIT_ADMM_HPP_
