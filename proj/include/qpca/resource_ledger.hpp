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
#include <cstddef>
#include <numbers>

#include "qpca/error.hpp"

namespace qpca {

/// Multiplicative constants for each row of the cost table.
struct ResourceConstants {
  double step1 = 1.0;
  double step2 = 1.0;
  double step31 = 1.0;
  double step32 = 1.0;
  double step33 = 1.0;
  double step34 = 1.0;
  double step35 = 1.0;
};

/**
 * Per-step cost counts. The step (3.x) entries are single-pass costs; the
 * `*_total` fields multiply them by the amplification repetitions.
 */
struct ResourceLedger {
  double step1_copies = 0.0;
  double step2_swap_tests = 0.0;
  double step31_cost = 0.0;
  double step32_gates = 0.0;
  double step33_cost = 0.0;
  double step34_gates = 0.0;
  double step35_cost = 0.0;
  std::size_t amplification_reps = 0;
  double sqrt_d = 0.0;
  double step3_total = 0.0;
  double overall = 0.0;
};

/// max(1, log2 x)^2, the stand-in for polylog(x).
inline double polylog(double x) {
  const double l = std::max(1.0, std::log2(std::max(x, 1.0)));
  return l * l;
}

/// Expected repetitions with amplitude amplification, ceil(pi / (4 asin sqrt(p))).
inline std::size_t amplification_repetitions(double p) {
  if (!(p > 0.0)) throw Error(ErrorCode::InvalidInput, "success probability must be positive");
  const double theta = std::asin(std::sqrt(std::min(1.0, p)));
  return static_cast<std::size_t>(std::ceil(std::numbers::pi / (4.0 * theta)));
}

inline ResourceLedger ledger_predict(std::size_t n, std::size_t dims, std::size_t d, double eps_lambda,
                                     double eps_beta, double p, const ResourceConstants& k = {}) {
  if (n == 0 || dims == 0 || d == 0 || !(eps_lambda > 0.0) || !(eps_beta > 0.0) || !(p > 0.0))
    throw Error(ErrorCode::InvalidInput, "ledger parameters must be positive");
  const double dd = static_cast<double>(d);
  const double nd = static_cast<double>(n) * static_cast<double>(dims);
  const double pl_nd = polylog(nd);
  const double pl_d = polylog(static_cast<double>(dims));
  const double inv_l3 = 1.0 / (eps_lambda * eps_lambda * eps_lambda);
  const double log_inv_l = std::max(1.0, std::log2(1.0 / eps_lambda));
  const double log_d1 = std::log2(dd + 1.0);

  ResourceLedger r;
  r.step1_copies = k.step1 * dd * pl_nd * inv_l3 / (eps_beta * eps_beta);
  r.step2_swap_tests = k.step2 * dd * pl_d / (eps_beta * eps_beta);
  r.step31_cost = k.step31 * pl_nd * inv_l3;
  r.step32_gates = k.step32 * dd * log_inv_l * log_d1;
  r.step33_cost = k.step33 * pl_nd * inv_l3;
  r.step34_gates = k.step34 * dd * log_d1;
  r.step35_cost = k.step35 * pl_d;
  r.amplification_reps = amplification_repetitions(p);
  r.sqrt_d = std::sqrt(dd);
  r.step3_total = static_cast<double>(r.amplification_reps) *
                  (r.step31_cost + r.step32_gates + r.step33_cost + r.step34_gates + r.step35_cost);
  r.overall = r.step1_copies + r.step2_swap_tests + r.step3_total;
  return r;
}

}  // namespace qpca
