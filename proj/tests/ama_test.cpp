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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "splitkit/ama.hpp"
#include "splitkit/objectives.hpp"
#include "splitkit/spcp.hpp"
#include "splitkit/splitting.hpp"
#include "test_support.hpp"

namespace splitkit {
namespace {

using test::bitwise_equal;
using test::gaussian;

constexpr double kGamma = 0.0005;

SolverParams<double> params_for(double gamma, double alpha, double lambda) {
  SolverParams<double> p;
  p.gamma = gamma;
  p.eps_bar = 0.52 * gamma;
  p.alpha_schedule = [alpha](std::size_t) { return alpha; };
  p.lambda_schedule = [lambda](std::size_t) { return lambda; };
  p.alpha_cap = alpha;
  return p;
}

bool states_bitwise_equal(const IterationState<double>& a, const IterationState<double>& b) {
  return bitwise_equal(a.x1, b.x1) && bitwise_equal(a.x2, b.x2) && bitwise_equal(a.x3, b.x3) &&
         bitwise_equal(a.w, b.w);
}

TEST(ExactBlockArgmin, ScaledIdentityMatchesBruteForce) {
  // argmin_x |x| + (gamma / 2) (2 x - t)^2 for scalars, checked on a grid.
  ProblemBlock<double> blk{l1_norm<double>(1.0), scaled_identity_map<double>(1, 1, 2.0)};
  const double gamma = 0.7, t = 3.1;
  const MatrixRd x = exact_block_argmin<double>(blk, MatrixRd::Constant(1, 1, t), gamma, MatrixRd::Zero(1, 1));
  double best_x = 0.0, best = 1e300;
  for (long i = 0; i <= 200000; ++i) {
    const double c = -5.0 + 5e-5 * static_cast<double>(i);
    const double value = std::abs(c) + 0.5 * gamma * (2.0 * c - t) * (2.0 * c - t);
    if (value < best) {
      best = value;
      best_x = c;
    }
  }
  EXPECT_NEAR(x(0, 0), best_x, 1e-4);
}

TEST(ExactBlockArgmin, ZeroMapKeepsTheCurrentValue) {
  ProblemBlock<double> blk{zero_function<double>(), zero_map<double>(2, 2, 2, 2)};
  const MatrixRd current = gaussian(2, 2, 1);
  EXPECT_TRUE(bitwise_equal(exact_block_argmin<double>(blk, gaussian(2, 2, 2), 0.1, current), current));
}

TEST(ExactBlockArgmin, GeneralMapIsRefused) {
  ProblemBlock<double> blk{l1_norm<double>(1.0), left_multiply_map<double>(gaussian(3, 3, 3), 2)};
  EXPECT_THROW(exact_block_argmin<double>(blk, MatrixRd::Zero(3, 2), 0.1, MatrixRd::Zero(3, 2)),
               ConfigurationError);
}

TEST(AmaSteps, ZeroDataStaysAtZero) {
  SpcpInstance inst = test::small_instance(6, 4);
  inst.b.setZero();
  const auto problem = assemble_spcp_problem(inst);
  auto riama = initial_state(problem, kGamma);
  auto ama = riama;
  for (int k = 0; k < 20; ++k) {
    riama = riama_step(problem, riama, kGamma, 0.15, 1.25);
    ama = ama3_step(problem, ama, kGamma);
  }
  for (const auto* s : {&riama, &ama}) {
    EXPECT_EQ(s->x1.norm() + s->x2.norm() + s->x3.norm() + s->w.norm() + s->p.norm(), 0.0);
  }
}

TEST(AmaSteps, DegenerateToAmaBitwise) {
  const auto problem = assemble_spcp_problem(test::small_instance(20, 5));
  auto riama = initial_state(problem, kGamma);
  auto rama = riama;
  auto ama = riama;
  for (int k = 0; k < 100; ++k) {
    riama = riama_step(problem, riama, kGamma, 0.0, 1.0);
    rama = rama3_step(problem, rama, kGamma, 1.0);
    ama = ama3_step(problem, ama, kGamma);
    ASSERT_TRUE(states_bitwise_equal(riama, ama)) << "riama vs ama, iteration " << k + 1;
    ASSERT_TRUE(states_bitwise_equal(rama, ama)) << "rama vs ama, iteration " << k + 1;
  }
}

TEST(AmaSteps, ZeroInertiaDegeneratesToRelaxedAmaBitwise) {
  const auto problem = assemble_spcp_problem(test::small_instance(20, 6));
  auto riama = initial_state(problem, kGamma);
  auto rama = riama;
  for (int k = 0; k < 100; ++k) {
    riama = riama_step(problem, riama, kGamma, 0.0, 1.5);
    rama = rama3_step(problem, rama, kGamma, 1.5);
    ASSERT_TRUE(states_bitwise_equal(riama, rama)) << "iteration " << k + 1;
  }
}

TEST(AmaSteps, ShadowSequenceCarriesTheInertiaMemory) {
  const auto problem = assemble_spcp_problem(test::small_instance(20, 7));
  auto state = initial_state(problem, kGamma);
  for (int k = 0; k < 60; ++k) {
    state = riama_step(problem, state, kGamma, 0.15, 1.25);
    const MatrixRd expected = 0.15 * (state.z_curr - state.z_prev);
    ASSERT_LE((state.p - expected).norm(), 1e-10 * std::max(1.0, state.p.norm())) << "iteration " << k + 1;
  }
}

TEST(AmaSteps, MultiplierSequenceMatchesTheDualSplitting) {
  const auto problem = assemble_spcp_problem(test::small_instance(20, 8));
  const auto ops = make_dual_triple(problem);
  auto state = initial_state(problem, kGamma);
  SplittingState<double> dual{state.z_curr, state.z_curr};
  for (int k = 1; k <= 50; ++k) {
    const auto s = its_step(dual, ops, kGamma, 0.15, 1.25);
    const auto next = riama_step(problem, state, kGamma, 0.15, 1.25);
    const double floor = 1e-12 * std::max(1.0, s.w.cwiseAbs().maxCoeff());
    ASSERT_LE(test::componentwise_relative_error(state.w, s.w, floor), 1e-9) << "w, iteration " << k;
    ASSERT_LE(test::componentwise_relative_error(next.y, s.y, floor), 1e-9) << "y, iteration " << k;
    ASSERT_LE(test::componentwise_relative_error(next.u, s.u, floor), 1e-9) << "u, iteration " << k;
    ASSERT_LE(test::componentwise_relative_error(next.z_curr, s.z_next, floor), 1e-9) << "z, iteration " << k;
    dual = {dual.z_curr, s.z_next};
    state = next;
  }
}

// Block 2 switched off (zero objective, zero map) leaves the two-block
// relaxed AMA on (Z, S); the reference below is written out entrywise.
TEST(AmaSteps, ZeroMiddleBlockReducesToTwoBlockRelaxedAma) {
  const Eigen::Index n = 5;
  const MatrixRd b = 3.0 * gaussian(n, n, 9);
  const double beta = 0.4, gamma = 0.3, lambda = 1.4;
  SeparableProblem<double> problem;
  problem.blocks = {ProblemBlock<double>{half_squared_frobenius<double>(), identity_map<double>(n, n)},
                    ProblemBlock<double>{zero_function<double>(), zero_map<double>(n, n, n, n)},
                    ProblemBlock<double>{l1_norm<double>(beta), identity_map<double>(n, n)}};
  problem.rhs = b;

  auto state = initial_state(problem, gamma);
  MatrixRd x3 = MatrixRd::Zero(n, n), w = MatrixRd::Zero(n, n);
  for (int k = 1; k <= 40; ++k) {
    state = rama3_step(problem, state, gamma, lambda);
    MatrixRd x1(n, n), x3_next(n, n), w_next(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        x1(i, j) = w(i, j);
        const double r = x1(i, j) + x3(i, j) - b(i, j);
        const double v = x3(i, j) - lambda * r + w(i, j) / gamma;
        const double mag = std::abs(v) - beta / gamma;
        x3_next(i, j) = mag > 0 ? std::copysign(mag, v) : 0.0;
        w_next(i, j) = w(i, j) - gamma * ((x3_next(i, j) - x3(i, j)) + lambda * r);
      }
    }
    x3 = x3_next;
    w = w_next;
    EXPECT_EQ(state.x2.norm(), 0.0);
    ASSERT_LE((state.x1 - x1).norm(), 1e-12 * std::max(1.0, x1.norm())) << "iteration " << k;
    ASSERT_LE((state.x3 - x3).norm(), 1e-12 * std::max(1.0, x3.norm())) << "iteration " << k;
    ASSERT_LE((state.w - w).norm(), 1e-12 * std::max(1.0, w.norm())) << "iteration " << k;
  }
}

TEST(AmaSteps, RequireStronglyConvexFirstBlock) {
  auto problem = assemble_spcp_problem(test::small_instance(6, 10));
  const auto state = initial_state(problem, kGamma);
  problem.blocks[0].objective = l1_norm<double>(1.0);
  EXPECT_THROW(ama3_step(problem, state, kGamma), ConfigurationError);
}

TEST(AmaSteps, RejectInvalidParameters) {
  const auto problem = assemble_spcp_problem(test::small_instance(6, 11));
  const auto state = initial_state(problem, kGamma);
  EXPECT_THROW(riama_step(problem, state, kGamma, 1.0, 1.0), ParameterError);
  EXPECT_THROW(riama_step(problem, state, kGamma, 0.1, 0.0), ParameterError);
  EXPECT_THROW(ama3_step(problem, state, 0.0), ParameterError);
}

TEST(AdaptiveAlpha, ClampsAtTheCap) {
  MatrixRd p = MatrixRd::Zero(1, 1);
  p(0, 0) = 1.0;
  EXPECT_DOUBLE_EQ(adaptive_alpha<double>(1, p, 0.1, 1.0, MatrixRd::Zero(1, 1), 0.005), 0.005);
}

TEST(AdaptiveAlpha, FollowsTheFormula) {
  MatrixRd p = MatrixRd::Zero(1, 1);
  p(0, 0) = 1e3;
  EXPECT_NEAR(adaptive_alpha<double>(10, p, 0.1, 1.0, MatrixRd::Zero(1, 1), 0.005), 1e-8, 1e-22);
  const MatrixRd r = MatrixRd::Constant(1, 1, -1e3 / 0.2);
  EXPECT_NEAR(adaptive_alpha<double>(10, MatrixRd::Zero(1, 1), 0.1, 2.0, r, 0.005), 1e-8, 1e-22);
}

TEST(AdaptiveAlpha, VanishingNormReturnsCap) {
  EXPECT_EQ(adaptive_alpha<double>(3, MatrixRd::Zero(2, 2), 0.1, 1.0, MatrixRd::Zero(2, 2), 0.004), 0.004);
  EXPECT_THROW(adaptive_alpha<double>(0, MatrixRd::Zero(1, 1), 0.1, 1.0, MatrixRd::Zero(1, 1), 0.004),
               ParameterError);
}

TEST(RunAma, AdaptiveInertiaPartialSumsStayBounded) {
  const auto problem = assemble_spcp_problem(test::small_instance(20, 12));
  StoppingRule stop;
  stop.max_iter = 400;
  auto params = params_for(kGamma, 0.005, 1.5);
  params.mode = ConvergenceMode::kSummableInertia;
  const auto run = run_ama(problem, AmaVariant<double>::riama(AlphaRule<double>::adaptive(0.005)), params, stop);
  ASSERT_FALSE(run.summability_sums.empty());
  const double basel = std::numbers::pi * std::numbers::pi / 6.0;
  for (std::size_t k = 0; k < run.summability_sums.size(); ++k) {
    EXPECT_LE(run.alpha_history[k], 0.005);
    if (k > 0) {
      EXPECT_GE(run.summability_sums[k], run.summability_sums[k - 1]);
    }
    EXPECT_LT(run.summability_sums[k], basel);
  }
}

TEST(RunAma, BudgetExhaustionIsRecorded) {
  const auto problem = assemble_spcp_problem(test::small_instance(20, 13));
  StoppingRule stop;
  stop.eps = 1e-12;
  stop.max_iter = 5;
  const auto run = run_ama(problem, AmaVariant<double>::ama(), params_for(kGamma, 0.0, 1.0), stop);
  EXPECT_FALSE(run.record.converged);
  EXPECT_EQ(run.record.iterations, 5u);
  EXPECT_EQ(run.record.trace.size(), 5u);
}

TEST(RunAma, TraceLengthEqualsIterations) {
  const auto problem = assemble_spcp_problem(test::small_instance(20, 14));
  StoppingRule stop;
  stop.record_diagnostics = true;
  const auto run = run_ama(problem, AmaVariant<double>::rama(), params_for(kGamma, 0.0, 1.5), stop);
  ASSERT_TRUE(run.record.converged);
  EXPECT_EQ(run.record.trace.size(), run.record.iterations);
  EXPECT_TRUE(std::isfinite(run.record.trace.back().kkt_residual));
}

TEST(RunAma, AmaAndRamaRejectNonzeroInertia) {
  const auto problem = assemble_spcp_problem(test::small_instance(6, 15));
  AmaVariant<double> bad{AmaKind::kRama, AlphaRule<double>::constant(0.1)};
  EXPECT_THROW(run_ama(problem, bad, params_for(kGamma, 0.0, 1.0), StoppingRule{}), ParameterError);
}

TEST(RunAma, FeasibilityBoundCertifiesTheKktSystem) {
  const auto inst = test::small_instance(20, 16);
  const auto problem = assemble_spcp_problem(inst);
  StoppingRule stop;
  stop.eps = 1e-9;
  stop.feasibility_tol = 1e-8;
  stop.max_iter = 5000;
  stop.record_diagnostics = true;
  const double gamma = 0.05;
  const auto run = run_ama(problem, AmaVariant<double>::ama(), params_for(gamma, 0.0, 1.0), stop);
  ASSERT_TRUE(run.record.converged);
  const auto& last = run.record.trace.back();
  EXPECT_LE(last.kkt_residual, 1e-6);
  EXPECT_LE(std::abs(last.primal_value - last.dual_value), 1e-6 * (1.0 + std::abs(last.primal_value)));
}

TEST(RunAma, DeskScaleTableRun) {
  const auto inst = gen_spcp_instance(200, 0.05, 0.05, 1e-5, 0.05, 1);
  const auto problem = assemble_spcp_problem(inst);
  const auto params = params_for(kGamma, 0.0, 1.0);
  const auto ama = run_ama(problem, AmaVariant<double>::ama(), params, StoppingRule{});
  ASSERT_TRUE(ama.record.converged);
  EXPECT_GE(ama.record.iterations, 20u);
  EXPECT_LE(ama.record.iterations, 60u);
  const auto metrics = recovery_metrics(inst, ama.state.x2, ama.state.x3, ama.state.x2, ama.state.x3);
  EXPECT_EQ(metrics.rank_Lk, 10);
  EXPECT_LE(metrics.rel_L_star, 1e-3);
  EXPECT_LE(metrics.rel_S_star, 1e-4);

  const auto rama = run_ama(problem, AmaVariant<double>::rama(), params_for(kGamma, 0.0, 1.5), StoppingRule{});
  ASSERT_TRUE(rama.record.converged);
  EXPECT_LT(rama.record.iterations, ama.record.iterations);
}

}  // namespace
}  // namespace splitkit
