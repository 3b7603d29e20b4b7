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

// Independent reference computations used by the tests. Nothing here calls
// into the library's numerical routines.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

/// Cyclic Jacobi rotations on a symmetric matrix; eigenvalues sorted descending.
inline std::vector<double> jacobi_eigenvalues(Matrix a, int sweeps = 100) {
  const std::size_t n = a.size();
  for (int s = 0; s < sweeps; ++s) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - sn * akq;
          a[k][q] = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - sn * aqk;
          a[q][k] = sn * apk + c * aqk;
        }
      }
  }
  std::vector<double> ev(n);
  for (std::size_t k = 0; k < n; ++k) ev[k] = a[k][k];
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

/// X^T X for a row-major X.
inline Matrix gram(const Matrix& x) {
  const std::size_t d = x.empty() ? 0 : x[0].size();
  Matrix g(d, std::vector<double>(d, 0.0));
  for (const auto& row : x)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) g[i][j] += row[i] * row[j];
  return g;
}

/// Gaussian elimination with partial pivoting.
inline std::vector<double> gauss_solve(Matrix a, std::vector<double> b) {
  const std::size_t n = a.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    std::swap(a[col], a[piv]);
    std::swap(b[col], b[piv]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t k = col; k < n; ++k) a[r][k] -= f * a[col][k];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

/**
 * Classical simulation of the index-writing circuit on a computational basis
 * state: for each (label, j), X on the zero bits of the label register, a
 * fully controlled NOT onto every set bit of j, then the X gates again.
 */
struct GateCircuit {
  enum class Kind { x, mcx };
  struct Gate {
    Kind kind;
    int target;  // bit in the combined word
  };
  std::vector<Gate> gates;
  int label_bits = 0;
  int index_bits = 0;

  // Combined word: label bits occupy [index_bits, index_bits + label_bits).
  static GateCircuit build(int label_bits, int index_bits,
                           const std::vector<std::pair<std::uint64_t, std::uint64_t>>& assignments) {
    GateCircuit c;
    c.label_bits = label_bits;
    c.index_bits = index_bits;
    for (const auto& [label, j] : assignments) {
      std::vector<Gate> flips;
      for (int b = 0; b < label_bits; ++b)
        if (((label >> b) & 1u) == 0) flips.push_back({Kind::x, index_bits + b});
      c.gates.insert(c.gates.end(), flips.begin(), flips.end());
      for (int b = 0; b < index_bits; ++b)
        if ((j >> b) & 1u) c.gates.push_back({Kind::mcx, b});
      c.gates.insert(c.gates.end(), flips.begin(), flips.end());
    }
    return c;
  }

  std::uint64_t apply(std::uint64_t word) const {
    const std::uint64_t controls = ((std::uint64_t{1} << label_bits) - 1) << index_bits;
    for (const auto& g : gates) {
      if (g.kind == Kind::x) word ^= std::uint64_t{1} << g.target;
      else if ((word & controls) == controls) word ^= std::uint64_t{1} << g.target;
    }
    return word;
  }

  std::size_t size() const { return gates.size(); }
};

}  // namespace oracle
