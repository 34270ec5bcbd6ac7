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

#ifndef SPLITKIT_SPCP_HPP_
#define SPLITKIT_SPCP_HPP_

#include <cstdint>
#include <random>
#include <string>

#include "splitkit/core.hpp"

namespace splitkit {

/// Seeded stream with a fully specified output sequence: mt19937_64 seeded
/// through SplitMix64, 53-bit uniforms, Marsaglia polar normals and
/// rejection-sampled integers. Identical across platforms and standard
/// libraries.
class PortableRng {
 public:
  PortableRng(std::uint64_t seed, std::uint64_t stream);

  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi);
  double normal();
  /// Uniform on {0, ..., n - 1}; n >= 1.
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
  bool has_spare_{false};
  double spare_{0};
};

/// Stream identifiers; one per synthesized quantity.
enum class SpcpStream : std::uint64_t { kLeftFactor = 1, kRightFactor, kSupport, kValues, kNoise };

/// b = L* + S* + Z* with rank(L*) = r, ||S*||_0 fixed and Gaussian Z*.
struct SpcpInstance {
  Eigen::Index m{0};
  Eigen::Index r{0};
  MatrixRd L_true, S_true, Z_true, b;
  double beta1{0.05};
  double beta2{0};
  std::int64_t seed{0};
};

/// L* = L1 L2^T with standard normal m x r factors, r = round(rank_frac m);
/// S* has round(sparsity_frac m^2) distinct nonzeros uniform on [-500, 500];
/// Z* is iid normal(0, noise_std). beta2 = beta1 / sqrt(m).
SpcpInstance gen_spcp_instance(Eigen::Index m, double rank_frac, double sparsity_frac,
                               double noise_std, double beta1, std::int64_t seed);

/// Which slots carry L and S; the quadratic noise block is always first.
enum class SpcpOrder {
  kNoiseLowRankSparse,  // (Z, L, S)
  kNoiseSparseLowRank,  // (Z, S, L)
};

/// Blocks 1/2*||.||_F^2, beta1 ||.||_*, beta2 ||.||_1 in the requested
/// order, all with identity maps, and rhs b.
SeparableProblem<double> assemble_spcp_problem(const SpcpInstance& inst,
                                               SpcpOrder order = SpcpOrder::kNoiseLowRankSparse);

struct RecoveryMetrics {
  double rel_L_star{0};
  double rel_S_star{0};
  Eigen::Index rank_Lk{0};
  double rel_L_step{0};
  double rel_S_step{0};
};

/// Number of singular values above 1e-6 times the largest.
Eigen::Index numerical_rank(const MatrixRd& m);

/// Errors against ground truth (absolute when the truth vanishes) and
/// successive-iterate steps.
RecoveryMetrics recovery_metrics(const SpcpInstance& inst, const MatrixRd& L_k, const MatrixRd& S_k,
                                 const MatrixRd& L_prev, const MatrixRd& S_prev);

/// Binary container: "SPCP", u32 version, u64 m, u64 r, i64 seed, f64 beta1,
/// then row-major f64 L*, S*, Z*, all little-endian.
void save_instance(const SpcpInstance& inst, const std::string& path);
SpcpInstance load_instance(const std::string& path);

}  // namespace splitkit

#endif  // SPLITKIT_SPCP_HPP_
