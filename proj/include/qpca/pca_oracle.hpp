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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "qpca/common.hpp"
#include "qpca/data_matrix.hpp"
#include "qpca/error.hpp"
#include "qpca/state_vector.hpp"

namespace qpca {

inline constexpr double kDefaultThreshold = 0.95;

/// Singular values whose gap to the start of their run is below this fraction of
/// sigma_1 are treated as one degenerate group.
inline constexpr double kDegeneracyTolerance = 1e-12;

/**
 * Full SVD of the data matrix, X = sum_j sigma_j u_j v_j^T, with the signs
 * (and, inside exactly degenerate groups, the basis) fixed against an anchor
 * row so that <v_j|x_anchor> >= 0 for every sigma_j > 0.
 */
struct SpectralModel {
  Eigen::VectorXd singular_values;       // D entries, descending
  Eigen::MatrixXd right_vectors;         // D x D, column j is v_j
  Eigen::MatrixXd left_vectors;          // N x D, column j is u_j (zero when sigma_j == 0)
  Eigen::VectorXd variance_proportions;  // lambda_j = sigma_j^2 / sum sigma^2
  double threshold = kDefaultThreshold;
  std::size_t selected_dim = 0;
  std::size_t anchor_index = 0;
  std::size_t rank = 0;

  std::size_t features() const { return static_cast<std::size_t>(right_vectors.rows()); }
  Eigen::MatrixXd top_components() const {
    return right_vectors.leftCols(static_cast<Eigen::Index>(selected_dim));
  }
  double variance_captured() const {
    return variance_proportions.head(static_cast<Eigen::Index>(selected_dim)).sum();
  }
};

/// Y = X V_d; row i is the compressed point y_i.
struct CompressedMatrix {
  Eigen::MatrixXd values;

  std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(values.cols()); }
  double frobenius_norm() const { return values.norm(); }
};

/// Minimal s with lambda_1 + ... + lambda_s >= threshold, compared without slack.
inline std::size_t select_dimension(std::span<const double> proportions, double threshold) {
  if (proportions.empty()) throw Error(ErrorCode::InvalidInput, "empty spectrum");
  double cumulative = 0.0;
  for (std::size_t s = 0; s < proportions.size(); ++s) {
    cumulative += proportions[s];
    if (cumulative >= threshold) return s + 1;
  }
  // Rounding left the full sum just under the threshold: every component with
  // nonzero variance is needed.
  std::size_t support = proportions.size();
  while (support > 1 && proportions[support - 1] == 0.0) --support;
  return support;
}

inline std::size_t select_dimension(const SpectralModel& model) {
  const auto& lam = model.variance_proportions;
  return select_dimension(std::span<const double>(lam.data(), static_cast<std::size_t>(lam.size())),
                          model.threshold);
}

namespace detail {

// Extends orthonormal columns to a basis of R^dim by Gram-Schmidt over e_1, e_2, ...
inline Eigen::MatrixXd complete_basis(const Eigen::MatrixXd& columns, Eigen::Index dim) {
  Eigen::MatrixXd basis(dim, dim);
  Eigen::Index filled = columns.cols();
  basis.leftCols(filled) = columns;
  for (Eigen::Index axis = 0; axis < dim && filled < dim; ++axis) {
    Eigen::VectorXd v = Eigen::VectorXd::Unit(dim, axis);
    for (int pass = 0; pass < 2; ++pass)
      v -= basis.leftCols(filled) * (basis.leftCols(filled).transpose() * v);
    const double n = v.norm();
    if (n > 1e-6) basis.col(filled++) = v / n;
  }
  return basis;
}

// Makes <v_j|anchor> >= 0. Inside a degenerate group the basis is rotated by a
// Householder reflection so the anchor has equal weight on every member.
inline void align_to_anchor(const Eigen::VectorXd& sigma, Eigen::MatrixXd& v, std::size_t rank,
                            const Eigen::VectorXd& anchor) {
  const Eigen::VectorXd unit = anchor / anchor.norm();
  const double scale = sigma.size() > 0 ? sigma(0) : 0.0;
  Eigen::Index start = 0;
  const auto r = static_cast<Eigen::Index>(rank);
  while (start < r) {
    Eigen::Index stop = start + 1;
    while (stop < r && sigma(start) - sigma(stop) <= kDegeneracyTolerance * scale) ++stop;
    const Eigen::Index m = stop - start;
    auto group = v.middleCols(start, m);
    Eigen::VectorXd coeff = group.transpose() * unit;
    if (m == 1) {
      if (coeff(0) < 0.0) group.col(0) *= -1.0;
    } else {
      const double weight = coeff.norm();
      if (weight > 1e-14) {
        const Eigen::VectorXd target =
            Eigen::VectorXd::Constant(m, weight / std::sqrt(static_cast<double>(m)));
        const Eigen::VectorXd w = coeff - target;
        if (w.norm() > 1e-15 * weight) {
          const Eigen::MatrixXd h =
              Eigen::MatrixXd::Identity(m, m) - 2.0 * (w * w.transpose()) / w.squaredNorm();
          group = (group * h).eval();
        }
      }
    }
    start = stop;
  }
}

}  // namespace detail

/**
 * SVD-based PCA of X. Singular values are sorted descending (stable in the
 * original column order for ties); those at or below sigma_1 * max(N, D) * eps
 * are set to zero and their vectors replaced by a deterministic Gram-Schmidt
 * completion. `anchor_index` is 0-based.
 */
inline SpectralModel svd_decompose(const DataMatrix& data, double threshold = kDefaultThreshold,
                                   std::size_t anchor_index = 0) {
  if (!(threshold > 0.0 && threshold <= 1.0))
    throw Error(ErrorCode::InvalidInput, "threshold must lie in (0, 1]");
  if (anchor_index >= data.rows())
    throw Error(ErrorCode::OutOfRange, "anchor index " + std::to_string(anchor_index) +
                                           " out of range for " + std::to_string(data.rows()) +
                                           " rows");
  const Eigen::MatrixXd& x = data.values();
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeFullV);
  if (svd.info() != Eigen::Success)
    throw Error(ErrorCode::NumericalFailure, "SVD did not converge");

  Eigen::VectorXd raw = Eigen::VectorXd::Zero(d);
  raw.head(svd.singularValues().size()) = svd.singularValues();
  const Eigen::MatrixXd& raw_v = svd.matrixV();

  std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return raw(a) > raw(b); });

  SpectralModel model;
  model.threshold = threshold;
  model.anchor_index = anchor_index;
  model.singular_values.resize(d);
  Eigen::MatrixXd v(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    model.singular_values(k) = raw(order[static_cast<std::size_t>(k)]);
    v.col(k) = raw_v.col(order[static_cast<std::size_t>(k)]);
  }

  const double cutoff = model.singular_values(0) * static_cast<double>(std::max(n, d)) *
                        std::numeric_limits<double>::epsilon();
  Eigen::Index rank = 0;
  while (rank < d && model.singular_values(rank) > cutoff) ++rank;
  if (rank == 0) throw Error(ErrorCode::InvalidInput, "data matrix is numerically zero");
  model.singular_values.tail(d - rank).setZero();
  model.rank = static_cast<std::size_t>(rank);

  model.right_vectors = detail::complete_basis(v.leftCols(rank), d);
  detail::align_to_anchor(model.singular_values, model.right_vectors, model.rank,
                          data.row(anchor_index));

  model.left_vectors = Eigen::MatrixXd::Zero(n, d);
  for (Eigen::Index j = 0; j < rank; ++j)
    model.left_vectors.col(j) = x * model.right_vectors.col(j) / model.singular_values(j);

  const double total = model.singular_values.squaredNorm();
  model.variance_proportions = model.singular_values.array().square() / total;
  model.selected_dim = select_dimension(model);
  return model;
}

/// Y = X V_d with d = model.selected_dim.
inline CompressedMatrix project(const DataMatrix& data, const SpectralModel& model) {
  if (data.cols() != model.features() ||
      data.rows() != static_cast<std::size_t>(model.left_vectors.rows()))
    throw Error(ErrorCode::DimensionMismatch, "spectral model was not derived from this data");
  if (model.selected_dim == 0 || model.selected_dim > model.features())
    throw Error(ErrorCode::InvalidInput, "invalid selected dimension");
  return CompressedMatrix{data.values() * model.top_components()};
}

/// Compressed image y = V_d^T x of a single point.
inline Eigen::VectorXd project_point(const Eigen::VectorXd& point, const SpectralModel& model) {
  if (static_cast<std::size_t>(point.size()) != model.features())
    throw Error(ErrorCode::DimensionMismatch, "point dimension does not match the model");
  return model.top_components().transpose() * point;
}

/**
 * sum_i sum_{j<=d} y_ij / ||Y||_F |i>|j> on a row register of ceil(log2 N)
 * qubits and an index register of ceil(log2(d+1)) qubits. Component j (1-based)
 * sits at index label j; label 0 is unused.
 */
inline StateVector expected_compressed_state(const CompressedMatrix& y,
                                             std::optional<std::size_t> row_qubits = {}) {
  const double norm = y.frobenius_norm();
  if (!(norm > 0.0)) throw Error(ErrorCode::InvalidInput, "compressed data has zero norm");
  const std::size_t qubits = row_qubits.value_or(ceil_log2(y.rows()));
  if (y.rows() > (std::size_t{1} << qubits))
    throw Error(ErrorCode::DimensionMismatch, "row register too small for the data");
  StateVector state({{std::string(reg::kRow), qubits},
                     {std::string(reg::kIndex), ceil_log2(y.cols() + 1)}});
  state.amplitudes()[0] = 0.0;
  for (std::size_t i = 0; i < y.rows(); ++i)
    for (std::size_t j = 0; j < y.cols(); ++j)
      state.set_amplitude({{std::string(reg::kRow), i}, {std::string(reg::kIndex), j + 1}},
                          y.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) /
                              norm);
  return state;
}

/// Oracle for subset compression: rows outside `subset` carry zero amplitude.
inline StateVector expected_subset_state(const CompressedMatrix& y,
                                         std::span<const std::size_t> subset,
                                         std::optional<std::size_t> row_qubits = {}) {
  CompressedMatrix restricted{Eigen::MatrixXd::Zero(y.values.rows(), y.values.cols())};
  for (std::size_t i : subset) {
    if (i >= y.rows()) throw Error(ErrorCode::OutOfRange, "subset index out of range");
    restricted.values.row(static_cast<Eigen::Index>(i)) = y.values.row(static_cast<Eigen::Index>(i));
  }
  return expected_compressed_state(restricted, row_qubits);
}

/// Oracle for single-point compression: |y_i> on the index register alone.
inline StateVector expected_single_state(const Eigen::VectorXd& compressed_point) {
  const double norm = compressed_point.norm();
  if (!(norm > 0.0)) throw Error(ErrorCode::InvalidInput, "compressed point has zero norm");
  const auto d = static_cast<std::size_t>(compressed_point.size());
  StateVector state({{std::string(reg::kIndex), ceil_log2(d + 1)}});
  state.amplitudes()[0] = 0.0;
  for (std::size_t j = 0; j < d; ++j)
    state.amplitudes()[j + 1] = compressed_point(static_cast<Eigen::Index>(j)) / norm;
  return state;
}

struct OverlapReport {
  std::size_t pairs = 0;
  /// |<y_a|y_b> - <x_a|x_b>| over unit-normalised rows, for a < b in lexicographic order.
  std::vector<double> deviations;
  double max_deviation = 0.0;
  double mean_deviation = 0.0;
  double median_deviation = 0.0;
  double p90_deviation = 0.0;
  double tolerance = 0.0;
  double fraction_within = 1.0;
  /// Pairs involving a compressed row of zero norm; excluded from the statistics.
  std::vector<std::pair<std::size_t, std::size_t>> flagged;
};

inline OverlapReport pairwise_overlap_report(const DataMatrix& data, const CompressedMatrix& y,
                                             double tolerance = 1e-2) {
  if (data.rows() != y.rows())
    throw Error(ErrorCode::DimensionMismatch, "compressed matrix row count differs from data");
  const std::size_t n = data.rows();
  Eigen::MatrixXd xn = data.values();
  Eigen::MatrixXd yn = y.values;
  std::vector<bool> zero(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    xn.row(r).normalize();
    const double ny = yn.row(r).norm();
    if (ny == 0.0)
      zero[i] = true;
    else
      yn.row(r) /= ny;
  }

  OverlapReport report;
  report.tolerance = tolerance;
  std::size_t within = 0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (zero[a] || zero[b]) {
        report.flagged.emplace_back(a, b);
        continue;
      }
      const auto ra = static_cast<Eigen::Index>(a);
      const auto rb = static_cast<Eigen::Index>(b);
      const double dev = std::abs(yn.row(ra).dot(yn.row(rb)) - xn.row(ra).dot(xn.row(rb)));
      report.deviations.push_back(dev);
      if (dev <= tolerance) ++within;
    }
  }
  report.pairs = report.deviations.size();
  if (report.pairs > 0) {
    std::vector<double> sorted = report.deviations;
    std::sort(sorted.begin(), sorted.end());
    report.max_deviation = sorted.back();
    report.mean_deviation =
        std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(sorted.size());
    const auto quantile = [&](double q) {
      return sorted[static_cast<std::size_t>(q * static_cast<double>(sorted.size() - 1))];
    };
    report.median_deviation = quantile(0.5);
    report.p90_deviation = quantile(0.9);
    report.fraction_within = static_cast<double>(within) / static_cast<double>(report.pairs);
  }
  return report;
}

}  // namespace qpca
