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

#ifndef SPLITKIT_DIAGNOSTICS_HPP_
#define SPLITKIT_DIAGNOSTICS_HPP_

#include <algorithm>
#include <string>

#include "splitkit/core.hpp"

namespace splitkit {

// Slack used when testing indicator-type conjugates against their ball.
inline constexpr double kConjugateTolerance = 1e-8;

namespace detail {

template <typename Scalar>
void require_shape(const Matrix<Scalar>& x, Eigen::Index rows, Eigen::Index cols,
                   const char* what) {
  if (x.rows() != rows || x.cols() != cols) {
    throw ShapeError(std::string(what) + ": expected " + std::to_string(rows) + "x" +
                     std::to_string(cols) + ", got " + std::to_string(x.rows()) + "x" +
                     std::to_string(x.cols()));
  }
}

template <typename Scalar>
void require_block_shapes(const SeparableProblem<Scalar>& problem, const Matrix<Scalar>& x1,
                          const Matrix<Scalar>& x2, const Matrix<Scalar>& x3) {
  const Matrix<Scalar>* xs[3] = {&x1, &x2, &x3};
  const char* names[3] = {"x1", "x2", "x3"};
  for (std::size_t i = 0; i < 3; ++i) {
    require_shape(*xs[i], problem.blocks[i].map.in_rows, problem.blocks[i].map.in_cols, names[i]);
  }
}

}  // namespace detail

/// f1(x1) + f2(x2) + f3(x3).
template <typename Scalar>
Scalar primal_objective(const SeparableProblem<Scalar>& problem, const Matrix<Scalar>& x1,
                        const Matrix<Scalar>& x2, const Matrix<Scalar>& x3) {
  detail::require_block_shapes(problem, x1, x2, x3);
  return problem.blocks[0].objective.value(x1) + problem.blocks[1].objective.value(x2) +
         problem.blocks[2].objective.value(x3);
}

/// -f1*(L1* w) - f2*(L2* u) - f3*(L3* w) + <w, b>.
///
/// Block 2 is evaluated at the auxiliary multiplier u, which carries the
/// block-2 optimality certificate along AMA iterates. Returns -inf when a
/// conjugate is infinite.
template <typename Scalar>
Scalar dual_objective(const SeparableProblem<Scalar>& problem, const Matrix<Scalar>& w,
                      const Matrix<Scalar>& u) {
  detail::require_shape(w, problem.rhs.rows(), problem.rhs.cols(), "w");
  detail::require_shape(u, problem.rhs.rows(), problem.rhs.cols(), "u");
  const Scalar tol = static_cast<Scalar>(kConjugateTolerance);
  const Scalar c1 = problem.blocks[0].objective.conjugate_value(problem.blocks[0].map.adjoint(w), tol);
  const Scalar c2 = problem.blocks[1].objective.conjugate_value(problem.blocks[1].map.adjoint(u), tol);
  const Scalar c3 = problem.blocks[2].objective.conjugate_value(problem.blocks[2].map.adjoint(w), tol);
  if (c1 == kInfinity<Scalar> || c2 == kInfinity<Scalar> || c3 == kInfinity<Scalar>) {
    return -kInfinity<Scalar>;
  }
  return -c1 - c2 - c3 + w.cwiseProduct(problem.rhs).sum();
}

/// Largest of the four KKT residuals at (x1, x2, x3, w).
///
/// Stationarity of block i is measured as ||x_i - prox_{f_i}(x_i + L_i* w)||,
/// which vanishes exactly when L_i* w is a subgradient of f_i at x_i.
/// Feasibility is ||L1 x1 + L2 x2 + L3 x3 - b||.
template <typename Scalar>
Scalar kkt_residual(const SeparableProblem<Scalar>& problem, const Matrix<Scalar>& x1,
                    const Matrix<Scalar>& x2, const Matrix<Scalar>& x3, const Matrix<Scalar>& w) {
  detail::require_block_shapes(problem, x1, x2, x3);
  detail::require_shape(w, problem.rhs.rows(), problem.rhs.cols(), "w");
  const Matrix<Scalar>* xs[3] = {&x1, &x2, &x3};
  Scalar worst = problem.constraint_residual(x1, x2, x3).norm();
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& blk = problem.blocks[i];
    const Matrix<Scalar> shifted = *xs[i] + blk.map.adjoint(w);
    worst = std::max(worst, (*xs[i] - blk.objective.prox(shifted, Scalar(1))).norm());
  }
  return worst;
}

}  // namespace splitkit

#endif  // SPLITKIT_DIAGNOSTICS_HPP_
