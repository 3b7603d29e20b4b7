// Copyright 2026 The qpca Authors
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

#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "qpca/error.hpp"

namespace qpca::fixtures {

/// Matrix of standard normal entries.
inline Eigen::MatrixXd gaussian_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = dist(rng);
  return m;
}

/// A * B with A rows x rank and B rank x cols, both Gaussian.
inline Eigen::MatrixXd rank_k(std::size_t rows, std::size_t cols, std::size_t rank, std::uint64_t seed) {
  if (rank < 1 || rank > std::min(rows, cols))
    throw Error(ErrorCode::InvalidInput, "rank must be between 1 and min(rows, cols)");
  const Eigen::MatrixXd a = gaussian_matrix(rows, rank, seed);
  const Eigen::MatrixXd b = gaussian_matrix(rank, cols, seed ^ 0x9E3779B97F4A7C15ULL);
  return a * b;
}

/// Rank-k matrix plus Gaussian noise scaled to `noise_fraction` of its Frobenius norm.
inline Eigen::MatrixXd rank_k_noisy(std::size_t rows, std::size_t cols, std::size_t rank,
                                    double noise_fraction, std::uint64_t seed) {
  const Eigen::MatrixXd base = rank_k(rows, cols, rank, seed);
  const Eigen::MatrixXd noise = gaussian_matrix(rows, cols, seed ^ 0xD1B54A32D192ED03ULL);
  return base + noise * (noise_fraction * base.norm() / noise.norm());
}

struct ClassPair {
  Eigen::MatrixXd points;
  Eigen::VectorXd labels;
};

/// Two 2-D Gaussian clouds of `per_class` points at (+offset, +offset) and (-offset, -offset).
inline ClassPair gaussian_classes(std::size_t per_class, std::uint64_t seed, double offset = 3.0,
                                  double spread = 0.5) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, spread);
  const auto n = static_cast<Eigen::Index>(2 * per_class);
  ClassPair c{Eigen::MatrixXd(n, 2), Eigen::VectorXd(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sign = i < static_cast<Eigen::Index>(per_class) ? 1.0 : -1.0;
    c.points(i, 0) = sign * offset + dist(rng);
    c.points(i, 1) = sign * offset + dist(rng);
    c.labels(i) = sign;
  }
  return c;
}

}  // namespace qpca::fixtures
