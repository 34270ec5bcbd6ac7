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

#ifndef SPLITKIT_OBJECTIVES_HPP_
#define SPLITKIT_OBJECTIVES_HPP_

#include <string>

#include "splitkit/core.hpp"
#include "splitkit/prox.hpp"

namespace splitkit {

/// f(x) = 1/2 ||x - center||_F^2. Strongly convex with mu = 1.
template <typename Scalar>
BlockObjective<Scalar> shifted_quadratic(const Matrix<Scalar>& center) {
  BlockObjective<Scalar> f;
  f.name = "shifted_quadratic";
  f.prox = [center](const Matrix<Scalar>& v, Scalar t) -> Matrix<Scalar> {
    return (v + t * center) / (Scalar(1) + t);
  };
  f.value = [center](const Matrix<Scalar>& x) { return Scalar(0.5) * (x - center).squaredNorm(); };
  f.conjugate_value = [center](const Matrix<Scalar>& v, Scalar) {
    return Scalar(0.5) * v.squaredNorm() + v.cwiseProduct(center).sum();
  };
  f.grad = [center](const Matrix<Scalar>& x) -> Matrix<Scalar> { return x - center; };
  f.conjugate_grad = [center](const Matrix<Scalar>& v) -> Matrix<Scalar> { return v + center; };
  f.strong_convexity = Scalar(1);
  return f;
}

/// f(x) = 1/2 ||x||_F^2; its own conjugate.
template <typename Scalar>
BlockObjective<Scalar> half_squared_frobenius() {
  BlockObjective<Scalar> f;
  f.name = "half_squared_frobenius";
  f.prox = [](const Matrix<Scalar>& v, Scalar t) -> Matrix<Scalar> { return v / (Scalar(1) + t); };
  f.value = [](const Matrix<Scalar>& x) { return Scalar(0.5) * x.squaredNorm(); };
  f.conjugate_value = [](const Matrix<Scalar>& v, Scalar) { return Scalar(0.5) * v.squaredNorm(); };
  f.grad = [](const Matrix<Scalar>& x) -> Matrix<Scalar> { return x; };
  f.conjugate_grad = [](const Matrix<Scalar>& v) -> Matrix<Scalar> { return v; };
  f.strong_convexity = Scalar(1);
  return f;
}

/// f(x) = weight * ||x||_1. The conjugate is the indicator of the l-inf ball
/// of radius `weight`.
template <typename Scalar>
BlockObjective<Scalar> l1_norm(Scalar weight) {
  if (!(weight >= Scalar(0))) throw ParameterError("l1_norm: weight must be nonnegative");
  BlockObjective<Scalar> f;
  f.name = "l1_norm";
  f.prox = [weight](const Matrix<Scalar>& v, Scalar t) { return prox_l1<Scalar>(v, t * weight); };
  f.value = [weight](const Matrix<Scalar>& x) { return weight * x.template lpNorm<1>(); };
  f.conjugate_value = [weight](const Matrix<Scalar>& v, Scalar tol) {
    if (v.size() == 0) return Scalar(0);
    return v.template lpNorm<Eigen::Infinity>() <= weight + tol ? Scalar(0) : kInfinity<Scalar>;
  };
  return f;
}

/// f(x) = weight * ||x||_* (sum of singular values). The conjugate is the
/// indicator of the spectral-norm ball of radius `weight`.
template <typename Scalar>
BlockObjective<Scalar> nuclear_norm(Scalar weight) {
  if (!(weight >= Scalar(0))) throw ParameterError("nuclear_norm: weight must be nonnegative");
  BlockObjective<Scalar> f;
  f.name = "nuclear_norm";
  f.prox = [weight](const Matrix<Scalar>& v, Scalar t) {
    return prox_nuclear<Scalar>(v, t * weight);
  };
  f.value = [weight](const Matrix<Scalar>& x) { return weight * nuclear_norm_value<Scalar>(x); };
  f.conjugate_value = [weight](const Matrix<Scalar>& v, Scalar tol) {
    return spectral_norm<Scalar>(v) <= weight + tol ? Scalar(0) : kInfinity<Scalar>;
  };
  return f;
}

/// f = 0. Its conjugate is the indicator of {0}.
template <typename Scalar>
BlockObjective<Scalar> zero_function() {
  BlockObjective<Scalar> f;
  f.name = "zero";
  f.prox = [](const Matrix<Scalar>& v, Scalar) { return v; };
  f.value = [](const Matrix<Scalar>&) { return Scalar(0); };
  f.conjugate_value = [](const Matrix<Scalar>& v, Scalar tol) {
    if (v.size() == 0) return Scalar(0);
    return v.template lpNorm<Eigen::Infinity>() <= tol ? Scalar(0) : kInfinity<Scalar>;
  };
  f.grad = [](const Matrix<Scalar>& x) -> Matrix<Scalar> {
    return Matrix<Scalar>::Zero(x.rows(), x.cols());
  };
  return f;
}

}  // namespace splitkit

#endif  // SPLITKIT_OBJECTIVES_HPP_
