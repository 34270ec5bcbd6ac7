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

#ifndef SPLITKIT_PROX_HPP_
#define SPLITKIT_PROX_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "splitkit/core.hpp"

namespace splitkit {

/// Thin SVD M = U diag(s) V^T with r = min(m, n) factors.
///
/// Singular values are nonincreasing. Each column of U has its
/// largest-magnitude entry nonnegative (V flipped to match), which fixes the
/// sign ambiguity deterministically.
template <typename Scalar>
struct SvdFactors {
  Matrix<Scalar> U;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> singular_values;
  Matrix<Scalar> V;

  Matrix<Scalar> reconstruct() const {
    return U * singular_values.asDiagonal() * V.transpose();
  }
};

template <typename Scalar>
SvdFactors<Scalar> svd(const Matrix<Scalar>& m) {
  if (!m.allFinite()) throw DomainError("svd: input has non-finite entries");
  SvdFactors<Scalar> out;
  if (m.size() == 0) {
    out.U = Matrix<Scalar>::Zero(m.rows(), 0);
    out.V = Matrix<Scalar>::Zero(m.cols(), 0);
    return out;
  }
  // Golub-Kahan bidiagonalization followed by divide and conquer.
  Eigen::BDCSVD<Matrix<Scalar>> dec(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  out.U = dec.matrixU();
  out.V = dec.matrixV();
  out.singular_values = dec.singularValues();
  for (Eigen::Index j = 0; j < out.U.cols(); ++j) {
    Eigen::Index arg = 0;
    out.U.col(j).cwiseAbs().maxCoeff(&arg);
    if (out.U(arg, j) < Scalar(0)) {
      out.U.col(j) = -out.U.col(j);
      out.V.col(j) = -out.V.col(j);
    }
  }
  return out;
}

template <typename Scalar>
Scalar spectral_norm(const Matrix<Scalar>& m) {
  if (m.size() == 0) return Scalar(0);
  Eigen::BDCSVD<Matrix<Scalar>> dec(m);
  return dec.singularValues()(0);
}

template <typename Scalar>
Scalar nuclear_norm_value(const Matrix<Scalar>& m) {
  if (m.size() == 0) return Scalar(0);
  Eigen::BDCSVD<Matrix<Scalar>> dec(m);
  return dec.singularValues().sum();
}

/// Elementwise soft threshold sign(m) .* max(|m| - c, 0); ties map to 0.
template <typename Scalar>
Matrix<Scalar> prox_l1(const Matrix<Scalar>& m, Scalar c) {
  if (!(c >= Scalar(0))) throw ParameterError("prox_l1: threshold must be nonnegative");
  return m.unaryExpr([c](Scalar x) {
    const Scalar shrunk = std::abs(x) - c;
    if (shrunk <= Scalar(0)) return Scalar(0);
    return x > Scalar(0) ? shrunk : -shrunk;
  });
}

namespace detail {

/// Eigenpairs of the symmetric matrix `gram` with eigenvalue above `floor`,
/// in ascending order.
template <typename Scalar>
void eigenpairs_above(const Matrix<Scalar>& gram, Scalar floor,
                      Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& values, Matrix<Scalar>& vectors) {
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> eig(gram);
  const auto& all = eig.eigenvalues();
  Eigen::Index first = all.size();
  while (first > 0 && all(first - 1) > floor) --first;
  values = all.tail(all.size() - first);
  vectors = eig.eigenvectors().rightCols(all.size() - first);
}

}  // namespace detail

/// Singular value soft threshold U diag(max(s - c, 0)) V^T.
///
/// Computed from the symmetric eigendecomposition of the smaller Gram
/// matrix: with M^T M = V diag(s^2) V^T, the result is
/// M V_k diag(1 - c / s_k) V_k^T over the singular values s_k > c.
template <typename Scalar>
Matrix<Scalar> prox_nuclear(const Matrix<Scalar>& m, Scalar c) {
  if (!(c >= Scalar(0))) throw ParameterError("prox_nuclear: threshold must be nonnegative");
  if (!m.allFinite()) throw DomainError("prox_nuclear: input has non-finite entries");
  if (m.size() == 0) return m;
  const bool tall = m.rows() >= m.cols();
  const Matrix<Scalar> gram = tall ? Matrix<Scalar>(m.transpose() * m) : Matrix<Scalar>(m * m.transpose());
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> values;
  Matrix<Scalar> basis;
  detail::eigenpairs_above(gram, c * c, values, basis);
  if (values.size() == 0) return Matrix<Scalar>::Zero(m.rows(), m.cols());
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> shrink = (Scalar(1) - c / values.array().sqrt()).matrix();
  if (tall) return (m * basis) * shrink.asDiagonal() * basis.transpose();
  return basis * shrink.asDiagonal() * (basis.transpose() * m);
}

/// prox of t f* at v through the Moreau identity: v - t prox_{f/t}(v / t).
template <typename Scalar>
Matrix<Scalar> prox_conjugate(const BlockObjective<Scalar>& f, const Matrix<Scalar>& v,
                              Scalar t) {
  if (!(t > Scalar(0))) throw ParameterError("prox_conjugate: step must be positive");
  return v - t * f.prox(v / t, Scalar(1) / t);
}

}  // namespace splitkit

#endif  // SPLITKIT_PROX_HPP_
