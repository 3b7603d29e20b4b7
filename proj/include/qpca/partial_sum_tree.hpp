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

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qpca/common.hpp"
#include "qpca/data_matrix.hpp"
#include "qpca/error.hpp"
#include "qpca/state_vector.hpp"

namespace qpca {

/**
 * Binary tree of partial sums over squared entries, in heap layout. Leaves
 * hold value^2 and sign(value); each internal node holds the sum of its two
 * children as stored. The number of leaves is a power of two.
 */
class PartialSumTree {
 public:
  PartialSumTree() = default;

  PartialSumTree(std::span<const double> values, std::size_t leaves) : leaves_(leaves) {
    if (leaves == 0 || (leaves & (leaves - 1)) != 0)
      throw Error(ErrorCode::InvalidInput, "leaf count must be a power of two");
    if (values.size() > leaves) throw Error(ErrorCode::InvalidInput, "too many values for tree");
    nodes_.assign(2 * leaves - 1, 0.0);
    negative_.assign(leaves, false);
    for (std::size_t k = 0; k < values.size(); ++k) {
      nodes_[leaves - 1 + k] = values[k] * values[k];
      negative_[k] = values[k] < 0.0;
    }
    for (std::size_t k = leaves - 1; k-- > 0;) nodes_[k] = nodes_[2 * k + 1] + nodes_[2 * k + 2];
  }

  /// Tree over precomputed squared weights, all with positive sign.
  static PartialSumTree from_weights(std::span<const double> weights, std::size_t leaves) {
    std::vector<double> roots(weights.size());
    for (std::size_t k = 0; k < weights.size(); ++k) roots[k] = std::sqrt(weights[k]);
    PartialSumTree tree(roots, leaves);
    // Keep the leaves bit-identical to the given weights.
    for (std::size_t k = 0; k < weights.size(); ++k) tree.nodes_[leaves - 1 + k] = weights[k];
    for (std::size_t k = leaves - 1; k-- > 0;)
      tree.nodes_[k] = tree.nodes_[2 * k + 1] + tree.nodes_[2 * k + 2];
    return tree;
  }

  std::size_t leaves() const { return leaves_; }
  std::size_t depth() const { return ceil_log2(leaves_); }
  double root() const { return nodes_.front(); }
  std::span<const double> nodes() const { return nodes_; }

  /// Node `position` (0-based, left to right) on `level` (root is level 0).
  double node(std::size_t level, std::size_t position) const {
    return nodes_[(std::size_t{1} << level) - 1 + position];
  }
  double leaf(std::size_t k) const { return nodes_[leaves_ - 1 + k]; }
  bool leaf_negative(std::size_t k) const { return negative_[k]; }

  /**
   * Tree-walk preparation |0> -> sum_k sign_k sqrt(leaf_k / root) |k> on an
   * amplitude slice of length `leaves()`, as a sequence of rotations on qubit
   * `level` controlled by the bits above it. Zero nodes act as identity, so
   * the map is a unitary on the whole slice; `inverse` applies its transpose.
   */
  void walk(std::span<Complex> amps, bool inverse) const {
    const std::size_t q = depth();
    if (q == 0) {
      if (negative_[0]) amps[0] = -amps[0];
      return;
    }
    for (std::size_t step = 0; step < q; ++step) {
      const std::size_t level = inverse ? q - 1 - step : step;
      const std::size_t low = q - level - 1;  // bit position of this level's qubit
      const std::size_t rest = std::size_t{1} << low;
      for (std::size_t prefix = 0; prefix < (std::size_t{1} << level); ++prefix) {
        const std::size_t node_index = (std::size_t{1} << level) - 1 + prefix;
        const double total = nodes_[node_index];
        if (total == 0.0) continue;
        double c = std::sqrt(nodes_[2 * node_index + 1] / total);
        double s = std::sqrt(nodes_[2 * node_index + 2] / total);
        if (level + 1 == q) {
          if (negative_[2 * prefix]) c = -c;
          if (negative_[2 * prefix + 1]) s = -s;
        }
        // [[c, -s], [s, c]]; c^2 + s^2 = 1 so this is orthogonal for either sign pattern.
        const std::size_t base = prefix << (low + 1);
        for (std::size_t r = 0; r < rest; ++r) {
          Complex& a0 = amps[base + r];
          Complex& a1 = amps[base + rest + r];
          const Complex t0 = a0;
          const Complex t1 = a1;
          if (inverse) {
            a0 = c * t0 + s * t1;
            a1 = -s * t0 + c * t1;
          } else {
            a0 = c * t0 - s * t1;
            a1 = s * t0 + c * t1;
          }
        }
      }
    }
  }

 private:
  std::size_t leaves_ = 0;
  std::vector<double> nodes_;
  std::vector<bool> negative_;
};

}  // namespace qpca
