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
#include <span>
#include <string>
#include <vector>

#include "qpca/common.hpp"
#include "qpca/data_matrix.hpp"
#include "qpca/error.hpp"
#include "qpca/partial_sum_tree.hpp"
#include "qpca/state_vector.hpp"

namespace qpca {

/// Mass tolerated outside |0> before a strict-mode input is rejected.
inline constexpr double kStrictTolerance = 1e-12;

/**
 * Amplitude-encoding store for a data matrix: one partial-sum tree per row
 * over X_ij^2 (with signs at the leaves), and one tree over the row norms
 * ||x_i||^2. Rows and columns are zero-padded to powers of two.
 */
struct QramTree {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t padded_rows = 0;
  std::size_t padded_cols = 0;
  std::vector<PartialSumTree> row_trees;  // padded_rows entries; padding rows are all zero
  PartialSumTree norm_tree;

  std::size_t row_qubits() const { return ceil_log2(padded_rows); }
  std::size_t feature_qubits() const { return ceil_log2(padded_cols); }
};

/// Padding overrides; zero means the next power of two of the data dimension.
struct TreeLayout {
  std::size_t min_rows = 0;
  std::size_t min_cols = 0;
};

inline QramTree build_tree(const DataMatrix& data, TreeLayout layout = {}) {
  QramTree tree;
  tree.rows = data.rows();
  tree.cols = data.cols();
  tree.padded_rows = next_pow2(std::max(tree.rows, layout.min_rows));
  tree.padded_cols = next_pow2(std::max(tree.cols, layout.min_cols));

  const Eigen::MatrixXd& x = data.values();
  std::vector<double> row(tree.cols);
  std::vector<double> norms(tree.padded_rows, 0.0);
  tree.row_trees.reserve(tree.padded_rows);
  for (std::size_t i = 0; i < tree.padded_rows; ++i) {
    if (i < tree.rows) {
      for (std::size_t j = 0; j < tree.cols; ++j)
        row[j] = x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      tree.row_trees.emplace_back(row, tree.padded_cols);
      norms[i] = tree.row_trees.back().root();
      if (norms[i] == 0.0)
        throw Error(ErrorCode::InvalidInput, "row " + std::to_string(i) + " is all zero");
    } else {
      tree.row_trees.emplace_back(std::span<const double>{}, tree.padded_cols);
    }
  }
  tree.norm_tree = PartialSumTree::from_weights(norms, tree.padded_rows);
  return tree;
}

namespace detail {

inline void require_registers(const StateVector& state, const QramTree& tree, bool with_rows) {
  if (with_rows && state.dimension(reg::kRow) != tree.padded_rows)
    throw Error(ErrorCode::DimensionMismatch, "row register does not match the tree");
  if (state.dimension(reg::kFeature) != tree.padded_cols)
    throw Error(ErrorCode::DimensionMismatch, "feature register does not match the tree");
}

inline void require_zero(const StateVector& state, std::string_view name, bool strict) {
  if (strict && state.mass_outside_zero(name) > kStrictTolerance)
    throw Error(ErrorCode::ContractViolation,
                "register '" + std::string(name) + "' must be |0> on input");
}

inline void walk_register(const PartialSumTree& t, StateVector& state, std::string_view name,
                          bool inverse) {
  state.transform({name}, [&](std::span<const Complex> in, std::span<Complex> out) {
    std::copy(in.begin(), in.end(), out.begin());
    t.walk(out, inverse);
  });
}

inline void apply_rows(const QramTree& tree, StateVector& state, bool inverse) {
  const std::size_t cols = tree.padded_cols;
  state.transform({reg::kRow, reg::kFeature},
                  [&](std::span<const Complex> in, std::span<Complex> out) {
                    std::copy(in.begin(), in.end(), out.begin());
                    for (std::size_t i = 0; i < tree.padded_rows; ++i)
                      tree.row_trees[i].walk(out.subspan(i * cols, cols), inverse);
                  });
}

}  // namespace detail

/**
 * U_N: |0>|j> -> sum_i ||x_i|| / ||X||_F |i>|j> on the row register. Outside
 * the |0> row input the map is the tree walk's unitary completion; strict mode
 * rejects such inputs.
 */
inline void apply_un(const QramTree& tree, StateVector& state, bool strict = true) {
  detail::require_registers(state, tree, true);
  detail::require_zero(state, reg::kRow, strict);
  detail::walk_register(tree.norm_tree, state, reg::kRow, false);
}

inline void apply_un_inverse(const QramTree& tree, StateVector& state) {
  detail::require_registers(state, tree, true);
  detail::walk_register(tree.norm_tree, state, reg::kRow, true);
}

/// U_M: |i>|0> -> sum_j x_ij / ||x_i|| |i>|j>, controlled on the row register.
inline void apply_um(const QramTree& tree, StateVector& state, bool strict = true) {
  detail::require_registers(state, tree, true);
  detail::require_zero(state, reg::kFeature, strict);
  detail::apply_rows(tree, state, false);
}

inline void apply_um_inverse(const QramTree& tree, StateVector& state) {
  detail::require_registers(state, tree, true);
  detail::apply_rows(tree, state, true);
}

/// |psi_s> = U_M U_N |0>|0> = sum_ij X_ij / ||X||_F |i>|j>.
inline StateVector prepare_psi_s(const QramTree& tree) {
  StateVector state({{std::string(reg::kRow), tree.row_qubits()},
                     {std::string(reg::kFeature), tree.feature_qubits()}});
  apply_un(tree, state);
  apply_um(tree, state);
  return state;
}

/// sum_{i in S} |i> x_i / sqrt(sum_{i in S} ||x_i||^2), prepared from a norm tree
/// restricted to the subset.
inline StateVector prepare_psi_subset(const QramTree& tree, std::span<const std::size_t> subset) {
  if (subset.empty()) throw Error(ErrorCode::InvalidInput, "subset must be nonempty");
  std::vector<double> weights(tree.padded_rows, 0.0);
  for (std::size_t i : subset) {
    if (i >= tree.rows) throw Error(ErrorCode::OutOfRange, "subset index out of range");
    weights[i] = tree.row_trees[i].root();
  }
  const auto norms = PartialSumTree::from_weights(weights, tree.padded_rows);
  StateVector state({{std::string(reg::kRow), tree.row_qubits()},
                     {std::string(reg::kFeature), tree.feature_qubits()}});
  detail::walk_register(norms, state, reg::kRow, false);
  apply_um(tree, state);
  return state;
}

/// U_x on register `name`: |0> -> |x_a> = sum_j x_aj / ||x_a|| |j>.
inline void apply_anchor(const QramTree& tree, std::size_t anchor_index, StateVector& state,
                         std::string_view name = reg::kFeature) {
  if (anchor_index >= tree.rows) throw Error(ErrorCode::OutOfRange, "anchor index out of range");
  if (state.dimension(name) != tree.padded_cols)
    throw Error(ErrorCode::DimensionMismatch, "register does not match the tree's feature size");
  detail::walk_register(tree.row_trees[anchor_index], state, name, false);
}

/// U_x^{-1} on register `name`.
inline void apply_anchor_inverse(const QramTree& tree, std::size_t anchor_index,
                                 StateVector& state, std::string_view name = reg::kFeature) {
  if (anchor_index >= tree.rows) throw Error(ErrorCode::OutOfRange, "anchor index out of range");
  if (state.dimension(name) != tree.padded_cols)
    throw Error(ErrorCode::DimensionMismatch, "register does not match the tree's feature size");
  detail::walk_register(tree.row_trees[anchor_index], state, name, true);
}

/// Anchor state |x_a> on a lone feature register (also the single-point input |x_i>).
inline StateVector prepare_anchor(const QramTree& tree, std::size_t anchor_index) {
  StateVector state({{std::string(reg::kFeature), tree.feature_qubits()}});
  apply_anchor(tree, anchor_index, state);
  return state;
}

}  // namespace qpca
