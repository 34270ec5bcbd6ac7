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

#include "splitkit/spcp.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <numeric>
#include <vector>

#include <Eigen/SVD>

#include "splitkit/objectives.hpp"

namespace splitkit {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint32_t kFormatVersion = 1;
constexpr std::array<char, 4> kMagic = {'S', 'P', 'C', 'P'};

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> bytes;
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(bytes.data(), 8);
}

void put_u32(std::ostream& out, std::uint32_t v) {
  std::array<char, 4> bytes;
  for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(bytes.data(), 4);
}

std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), 8);
  if (!in) throw std::runtime_error("load_instance: truncated file");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[i];
  return v;
}

std::uint32_t get_u32(std::istream& in) {
  std::array<unsigned char, 4> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), 4);
  if (!in) throw std::runtime_error("load_instance: truncated file");
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | bytes[i];
  return v;
}

void put_matrix(std::ostream& out, const MatrixRd& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) put_u64(out, std::bit_cast<std::uint64_t>(m.data()[i]));
}

MatrixRd get_matrix(std::istream& in, Eigen::Index rows, Eigen::Index cols) {
  MatrixRd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = std::bit_cast<double>(get_u64(in));
  return m;
}

double relative_error(const MatrixRd& x, const MatrixRd& truth) {
  const double denom = truth.norm();
  const double diff = (x - truth).norm();
  return denom == 0.0 ? diff : diff / denom;
}

}  // namespace

PortableRng::PortableRng(std::uint64_t seed, std::uint64_t stream)
    : engine_(splitmix64(seed ^ splitmix64(stream))) {}

double PortableRng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double PortableRng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double PortableRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * factor;
  has_spare_ = true;
  return u * factor;
}

std::uint64_t PortableRng::below(std::uint64_t n) {
  if (n == 0) throw ParameterError("PortableRng::below: n must be positive");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

SpcpInstance gen_spcp_instance(Eigen::Index m, double rank_frac, double sparsity_frac,
                               double noise_std, double beta1, std::int64_t seed) {
  if (m < 1) throw ParameterError("gen_spcp_instance: m must be positive");
  const auto r = static_cast<Eigen::Index>(std::llround(rank_frac * static_cast<double>(m)));
  if (!(r > 0 && r < m)) throw ParameterError("gen_spcp_instance: need 0 < round(rank_frac m) < m");
  if (!(sparsity_frac >= 0.0 && sparsity_frac <= 1.0)) {
    throw ParameterError("gen_spcp_instance: sparsity_frac must lie in [0, 1]");
  }
  if (!(noise_std >= 0.0)) throw ParameterError("gen_spcp_instance: noise_std must be nonnegative");
  if (!(beta1 > 0.0)) throw ParameterError("gen_spcp_instance: beta1 must be positive");

  const auto useed = static_cast<std::uint64_t>(seed);
  auto stream = [useed](SpcpStream s) { return PortableRng(useed, static_cast<std::uint64_t>(s)); };

  SpcpInstance inst;
  inst.m = m;
  inst.r = r;
  inst.seed = seed;
  inst.beta1 = beta1;
  inst.beta2 = beta1 / std::sqrt(static_cast<double>(m));

  PortableRng left = stream(SpcpStream::kLeftFactor);
  PortableRng right = stream(SpcpStream::kRightFactor);
  MatrixRd f1(m, r), f2(m, r);
  for (Eigen::Index i = 0; i < f1.size(); ++i) f1.data()[i] = left.normal();
  for (Eigen::Index i = 0; i < f2.size(); ++i) f2.data()[i] = right.normal();
  inst.L_true = f1 * f2.transpose();

  const std::uint64_t cells = static_cast<std::uint64_t>(m) * static_cast<std::uint64_t>(m);
  const auto nnz = static_cast<std::uint64_t>(std::llround(sparsity_frac * static_cast<double>(cells)));
  inst.S_true = MatrixRd::Zero(m, m);
  PortableRng support = stream(SpcpStream::kSupport);
  PortableRng values = stream(SpcpStream::kValues);
  std::vector<std::uint64_t> cell(cells);
  std::iota(cell.begin(), cell.end(), std::uint64_t{0});
  for (std::uint64_t i = 0; i < nnz; ++i) {
    std::swap(cell[i], cell[i + support.below(cells - i)]);
    inst.S_true.data()[cell[i]] = values.uniform(-500.0, 500.0);
  }

  PortableRng noise = stream(SpcpStream::kNoise);
  inst.Z_true.resize(m, m);
  for (Eigen::Index i = 0; i < inst.Z_true.size(); ++i) inst.Z_true.data()[i] = noise_std * noise.normal();

  inst.b = inst.L_true + inst.S_true + inst.Z_true;
  return inst;
}

SeparableProblem<double> assemble_spcp_problem(const SpcpInstance& inst, SpcpOrder order) {
  const Eigen::Index m = inst.b.rows();
  const Eigen::Index n = inst.b.cols();
  ProblemBlock<double> noise{half_squared_frobenius<double>(), identity_map<double>(m, n)};
  ProblemBlock<double> low_rank{nuclear_norm<double>(inst.beta1), identity_map<double>(m, n)};
  ProblemBlock<double> sparse{l1_norm<double>(inst.beta2), identity_map<double>(m, n)};
  SeparableProblem<double> problem;
  if (order == SpcpOrder::kNoiseLowRankSparse) {
    problem.blocks = {noise, low_rank, sparse};
  } else {
    problem.blocks = {noise, sparse, low_rank};
  }
  problem.rhs = inst.b;
  return problem;
}

Eigen::Index numerical_rank(const MatrixRd& m) {
  if (m.size() == 0) return 0;
  Eigen::BDCSVD<MatrixRd> dec(m);
  const auto& s = dec.singularValues();
  if (s(0) == 0.0) return 0;
  return static_cast<Eigen::Index>((s.array() > 1e-6 * s(0)).count());
}

RecoveryMetrics recovery_metrics(const SpcpInstance& inst, const MatrixRd& L_k, const MatrixRd& S_k,
                                 const MatrixRd& L_prev, const MatrixRd& S_prev) {
  RecoveryMetrics out;
  out.rel_L_star = relative_error(L_k, inst.L_true);
  out.rel_S_star = relative_error(S_k, inst.S_true);
  out.rank_Lk = numerical_rank(L_k);
  out.rel_L_step = relative_step(L_k, L_prev);
  out.rel_S_step = relative_step(S_k, S_prev);
  return out;
}

void save_instance(const SpcpInstance& inst, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_instance: cannot open " + path);
  out.write(kMagic.data(), 4);
  put_u32(out, kFormatVersion);
  put_u64(out, static_cast<std::uint64_t>(inst.m));
  put_u64(out, static_cast<std::uint64_t>(inst.r));
  put_u64(out, static_cast<std::uint64_t>(inst.seed));
  put_u64(out, std::bit_cast<std::uint64_t>(inst.beta1));
  put_matrix(out, inst.L_true);
  put_matrix(out, inst.S_true);
  put_matrix(out, inst.Z_true);
  if (!out) throw std::runtime_error("save_instance: write failed for " + path);
}

SpcpInstance load_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_instance: cannot open " + path);
  std::array<char, 4> magic{};
  in.read(magic.data(), 4);
  if (!in || magic != kMagic) throw std::runtime_error("load_instance: bad magic in " + path);
  const std::uint32_t version = get_u32(in);
  if (version != kFormatVersion) {
    throw std::runtime_error("load_instance: unsupported version " + std::to_string(version));
  }
  SpcpInstance inst;
  inst.m = static_cast<Eigen::Index>(get_u64(in));
  inst.r = static_cast<Eigen::Index>(get_u64(in));
  inst.seed = static_cast<std::int64_t>(get_u64(in));
  inst.beta1 = std::bit_cast<double>(get_u64(in));
  inst.beta2 = inst.beta1 / std::sqrt(static_cast<double>(inst.m));
  inst.L_true = get_matrix(in, inst.m, inst.m);
  inst.S_true = get_matrix(in, inst.m, inst.m);
  inst.Z_true = get_matrix(in, inst.m, inst.m);
  inst.b = inst.L_true + inst.S_true + inst.Z_true;
  return inst;
}

}  // namespace splitkit
