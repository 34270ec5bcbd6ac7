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

#ifndef SPLITKIT_CORE_HPP_
#define SPLITKIT_CORE_HPP_

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace splitkit {

// Dense, row-major storage; every inner product is the Frobenius one.
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using MatrixRd = Matrix<double>;

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when a problem cannot be handled by a solver as configured, e.g. a
/// block map without the L*L = cI property or a block 1 that is not strongly
/// convex.
class ConfigurationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class StepError : public std::runtime_error {
 public:
  StepError(const std::string& what, std::size_t iteration)
      : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}

  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

template <typename Scalar>
inline constexpr Scalar kInfinity = std::numeric_limits<Scalar>::infinity();

/// A closed proper convex function accessed through its proximal map.
///
/// `prox(v, t)` returns argmin_x f(x) + 1/(2t) ||x - v||^2.
/// `conjugate_value(v, tol)` evaluates f*(v); indicator-type conjugates are
/// tested against their constraint with absolute slack `tol`.
/// `conjugate_grad(v)` returns argmin_x f(x) - <v, x> when that is available
/// in closed form. When empty, strongly convex blocks fall back to a
/// proximal-point loop (see argmin_linear).
template <typename Scalar>
struct BlockObjective {
  using MatrixType = Matrix<Scalar>;

  std::string name;
  std::function<MatrixType(const MatrixType&, Scalar)> prox;
  std::function<Scalar(const MatrixType&)> value;
  std::function<Scalar(const MatrixType&, Scalar)> conjugate_value;
  std::function<MatrixType(const MatrixType&)> grad;
  std::function<MatrixType(const MatrixType&)> conjugate_grad;
  Scalar strong_convexity{0};

  bool smooth() const { return static_cast<bool>(grad); }
};

/// A bounded linear operator from a block space H_i into the constraint
/// space H, with its adjoint.
///
/// `gram_scale` holds c when L*L = cI is known; the exact-argmin solvers
/// require it.
template <typename Scalar>
struct LinearBlockMap {
  using MatrixType = Matrix<Scalar>;

  std::function<MatrixType(const MatrixType&)> forward;
  std::function<MatrixType(const MatrixType&)> adjoint;
  Scalar norm_bound{1};
  Scalar lower_bound{1};
  std::optional<Scalar> gram_scale;
  Eigen::Index in_rows{0}, in_cols{0};
  Eigen::Index out_rows{0}, out_cols{0};
};

template <typename Scalar>
LinearBlockMap<Scalar> identity_map(Eigen::Index rows, Eigen::Index cols) {
  LinearBlockMap<Scalar> map;
  map.forward = [](const Matrix<Scalar>& x) { return x; };
  map.adjoint = [](const Matrix<Scalar>& y) { return y; };
  map.norm_bound = Scalar(1);
  map.lower_bound = Scalar(1);
  map.gram_scale = Scalar(1);
  map.in_rows = map.out_rows = rows;
  map.in_cols = map.out_cols = cols;
  return map;
}

template <typename Scalar>
LinearBlockMap<Scalar> scaled_identity_map(Eigen::Index rows, Eigen::Index cols, Scalar c) {
  if (c == Scalar(0)) throw ParameterError("scaled_identity_map: scale must be nonzero");
  LinearBlockMap<Scalar> map;
  map.forward = [c](const Matrix<Scalar>& x) -> Matrix<Scalar> { return c * x; };
  map.adjoint = [c](const Matrix<Scalar>& y) -> Matrix<Scalar> { return c * y; };
  map.norm_bound = std::abs(c);
  map.lower_bound = std::abs(c);
  map.gram_scale = c * c;
  map.in_rows = map.out_rows = rows;
  map.in_cols = map.out_cols = cols;
  return map;
}

/// The zero operator. Its lower bound is 0, so it violates the injectivity
/// assumption; it exists to express degenerate (two-block) configurations.
template <typename Scalar>
LinearBlockMap<Scalar> zero_map(Eigen::Index in_rows, Eigen::Index in_cols,
                                Eigen::Index out_rows, Eigen::Index out_cols) {
  LinearBlockMap<Scalar> map;
  map.forward = [out_rows, out_cols](const Matrix<Scalar>&) -> Matrix<Scalar> {
    return Matrix<Scalar>::Zero(out_rows, out_cols);
  };
  map.adjoint = [in_rows, in_cols](const Matrix<Scalar>&) -> Matrix<Scalar> {
    return Matrix<Scalar>::Zero(in_rows, in_cols);
  };
  map.norm_bound = Scalar(0);
  map.lower_bound = Scalar(0);
  map.gram_scale = Scalar(0);
  map.in_rows = in_rows;
  map.in_cols = in_cols;
  map.out_rows = out_rows;
  map.out_cols = out_cols;
  return map;
}

/// X -> A X for X with `cols` columns. The operator norm and the injectivity
/// constant are the extreme singular values of A; gram_scale is set when
/// A^T A is a multiple of the identity to within `gram_tol`.
template <typename Scalar>
LinearBlockMap<Scalar> left_multiply_map(const Matrix<Scalar>& a, Eigen::Index cols,
                                         Scalar gram_tol = Scalar(1e-12)) {
  LinearBlockMap<Scalar> map;
  map.forward = [a](const Matrix<Scalar>& x) -> Matrix<Scalar> { return a * x; };
  map.adjoint = [a](const Matrix<Scalar>& y) -> Matrix<Scalar> { return a.transpose() * y; };
  Eigen::JacobiSVD<Matrix<Scalar>> svd(a);
  const auto& sv = svd.singularValues();
  map.norm_bound = sv.size() > 0 ? sv(0) : Scalar(0);
  map.lower_bound = (a.cols() <= a.rows() && sv.size() > 0) ? sv(sv.size() - 1) : Scalar(0);
  const Matrix<Scalar> gram = a.transpose() * a;
  const Scalar c = gram.trace() / static_cast<Scalar>(gram.rows());
  const Matrix<Scalar> off = gram - c * Matrix<Scalar>::Identity(gram.rows(), gram.cols());
  if (off.norm() <= gram_tol * std::max(Scalar(1), std::abs(c))) map.gram_scale = c;
  map.in_rows = a.cols();
  map.out_rows = a.rows();
  map.in_cols = map.out_cols = cols;
  return map;
}

template <typename Scalar>
struct ProblemBlock {
  BlockObjective<Scalar> objective;
  LinearBlockMap<Scalar> map;
};

/// min f1(x1) + f2(x2) + f3(x3)  s.t.  L1 x1 + L2 x2 + L3 x3 = b.
template <typename Scalar>
struct SeparableProblem {
  std::array<ProblemBlock<Scalar>, 3> blocks;
  Matrix<Scalar> rhs;

  const ProblemBlock<Scalar>& block(std::size_t i) const { return blocks.at(i); }

  /// Throws ShapeError unless every block map lands in the space of b.
  void check_shapes() const {
    for (std::size_t i = 0; i < 3; ++i) {
      const auto& m = blocks[i].map;
      if (m.out_rows != rhs.rows() || m.out_cols != rhs.cols()) {
        throw ShapeError("block " + std::to_string(i + 1) + " maps into " +
                         std::to_string(m.out_rows) + "x" + std::to_string(m.out_cols) +
                         ", rhs is " + std::to_string(rhs.rows()) + "x" +
                         std::to_string(rhs.cols()));
      }
    }
  }

  /// Block 1 must be strongly convex for the AMA family.
  void require_strongly_convex_first_block() const {
    if (!(blocks[0].objective.strong_convexity > Scalar(0))) {
      throw ConfigurationError("block 1 objective '" + blocks[0].objective.name +
                               "' is not strongly convex (mu = 0)");
    }
  }

  Matrix<Scalar> zero_block(std::size_t i) const {
    return Matrix<Scalar>::Zero(blocks.at(i).map.in_rows, blocks.at(i).map.in_cols);
  }

  /// L1 x1 + L2 x2 + L3 x3 - b.
  Matrix<Scalar> constraint_residual(const Matrix<Scalar>& x1, const Matrix<Scalar>& x2,
                                     const Matrix<Scalar>& x3) const {
    return blocks[0].map.forward(x1) + blocks[1].map.forward(x2) +
           blocks[2].map.forward(x3) - rhs;
  }
};

enum class ConvergenceMode {
  // alpha_k nondecreasing, lambda_k bounded by the (sigma, delta) formula.
  kBoundedSchedule,
  // lambda_k * alpha_bar < 1 with an online-enforced summability condition.
  kSummableInertia,
};

template <typename Scalar>
struct SolverParams {
  Scalar gamma{0};
  Scalar eps_bar{0.5};
  Scalar beta{1};
  std::function<Scalar(std::size_t)> alpha_schedule = [](std::size_t) { return Scalar(0); };
  std::function<Scalar(std::size_t)> lambda_schedule = [](std::size_t) { return Scalar(1); };
  std::optional<Scalar> sigma;
  std::optional<Scalar> delta;
  Scalar alpha_cap{0};
  ConvergenceMode mode{ConvergenceMode::kBoundedSchedule};

  Scalar alpha_bar() const { return Scalar(1) / (Scalar(2) - eps_bar); }
};

/// Primal blocks, multiplier, inertia memory and the shadow dual sequence.
///
/// After an AMA-family step from w^k: y and u hold y^k and u^k of the dual
/// splitting, z_curr holds z^{k+1} and z_prev holds z^k.
template <typename Scalar>
struct IterationState {
  Matrix<Scalar> x1, x2, x3;
  Matrix<Scalar> w;
  Matrix<Scalar> p;
  Matrix<Scalar> z_prev, z_curr, y, u;
  std::size_t k{1};
};

template <typename Scalar>
struct TraceEntry {
  Scalar constraint_residual{0};
  Scalar rel_step_x2{0};
  Scalar rel_step_x3{0};
  Scalar primal_value{std::numeric_limits<Scalar>::quiet_NaN()};
  Scalar dual_value{std::numeric_limits<Scalar>::quiet_NaN()};
  Scalar kkt_residual{std::numeric_limits<Scalar>::quiet_NaN()};
  Scalar alpha{0};
};

template <typename Scalar>
struct RunRecord {
  std::size_t iterations{0};
  std::vector<TraceEntry<Scalar>> trace;
  bool converged{false};
  double wall_seconds{0};
};

/// ||x_new - x_old|| / ||x_old||, or ||x_new|| when x_old vanishes.
template <typename Scalar>
Scalar relative_step(const Matrix<Scalar>& x_new, const Matrix<Scalar>& x_old) {
  const Scalar denom = x_old.norm();
  if (denom == Scalar(0)) return x_new.norm();
  return (x_new - x_old).norm() / denom;
}

/// argmin_x f(x) - <v, x>, i.e. the gradient of f* at v.
///
/// Uses f.conjugate_grad when present. Otherwise runs the proximal-point
/// iteration x <- prox_{tau f}(x + tau v) with tau = 1e3 / mu, which
/// contracts by 1 / (1 + tau mu) per pass, until the update falls below
/// 1e-12 relative.
template <typename Scalar>
Matrix<Scalar> argmin_linear(const BlockObjective<Scalar>& f, const Matrix<Scalar>& v,
                             std::size_t max_passes = 1000) {
  if (f.conjugate_grad) return f.conjugate_grad(v);
  if (!(f.strong_convexity > Scalar(0))) {
    throw ConfigurationError("argmin_linear: '" + f.name +
                             "' is neither strongly convex nor has a conjugate gradient");
  }
  const Scalar tau = Scalar(1e3) / f.strong_convexity;
  Matrix<Scalar> x = v;
  for (std::size_t pass = 0; pass < max_passes; ++pass) {
    Matrix<Scalar> next = f.prox(x + tau * v, tau);
    const Scalar change = (next - x).norm();
    x = std::move(next);
    if (change <= Scalar(1e-12) * std::max(Scalar(1), x.norm())) return x;
  }
  throw StepError("argmin_linear: proximal-point loop did not reach 1e-12", max_passes);
}

}  // namespace splitkit

#endif  // SPLITKIT_CORE_HPP_
