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
#include <bit>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qpca/common.hpp"
#include "qpca/error.hpp"
#include "qpca/pca_oracle.hpp"
#include "qpca/resource_ledger.hpp"
#include "qpca/state_vector.hpp"

namespace qpca {

/**
 * Spectrum of rho = X^T X / Tr(X^T X) on the padded feature space. Padding
 * directions are canonical axes with eigenvalue 0. Phase estimation writes
 * phase_scale * lambda, so lambda = 1 maps to phase 1/2 and never wraps.
 */
struct RhoSpec {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;  // column k is the eigenvector of eigenvalues(k)
  std::size_t selected_dim = 0;
  double phase_scale = 0.5;

  std::size_t dimension() const { return static_cast<std::size_t>(eigenvalues.size()); }

  Eigen::MatrixXd density() const {
    return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.transpose();
  }
};

inline RhoSpec make_rho(const SpectralModel& model, std::size_t padded_dim = 0) {
  const auto d = static_cast<Eigen::Index>(model.features());
  const auto p = static_cast<Eigen::Index>(padded_dim == 0 ? next_pow2(model.features()) : padded_dim);
  if (p < d) throw Error(ErrorCode::InvalidInput, "padded dimension smaller than feature count");
  RhoSpec rho;
  rho.eigenvalues = Eigen::VectorXd::Zero(p);
  rho.eigenvalues.head(d) = model.variance_proportions;
  rho.eigenvectors = Eigen::MatrixXd::Identity(p, p);
  rho.eigenvectors.topLeftCorner(d, d) = model.right_vectors;
  rho.selected_dim = model.selected_dim;
  return rho;
}

enum class PhaseMode { ideal, quantized };

/// Eigenvalue register configuration. In ideal mode each eigencomponent gets its own
/// exact token (its component index); in quantized mode the label is the L-bit
/// rounding of phase_scale * lambda.
struct PhaseConfig {
  std::size_t bits = 6;
  PhaseMode mode = PhaseMode::ideal;

  std::size_t register_qubits(const RhoSpec& rho) const {
    return mode == PhaseMode::ideal ? ceil_log2(rho.dimension()) : bits;
  }
  /// Label resolution in eigenvalue units, 2^(1-L).
  double eigenvalue_accuracy() const { return std::ldexp(1.0, 1 - static_cast<int>(bits)); }
};

inline std::vector<std::size_t> component_labels(const RhoSpec& rho, const PhaseConfig& cfg) {
  if (cfg.bits < 1) throw Error(ErrorCode::InvalidInput, "eigenvalue register needs at least one bit");
  std::vector<std::size_t> labels(rho.dimension());
  const double levels = std::ldexp(1.0, static_cast<int>(cfg.bits));
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (cfg.mode == PhaseMode::ideal) {
      labels[k] = k;
    } else {
      const double phase = rho.phase_scale * rho.eigenvalues(static_cast<Eigen::Index>(k));
      const auto rounded = static_cast<std::uint64_t>(std::floor(phase * levels + 0.5));
      labels[k] = static_cast<std::size_t>(rounded % static_cast<std::uint64_t>(levels));
    }
  }
  return labels;
}

/// Eigenvalue read back from a label.
inline double decode_label(std::size_t label, const RhoSpec& rho, const PhaseConfig& cfg) {
  if (cfg.mode == PhaseMode::ideal) return rho.eigenvalues(static_cast<Eigen::Index>(label));
  return static_cast<double>(label) / (std::ldexp(1.0, static_cast<int>(cfg.bits)) * rho.phase_scale);
}

/// Most significant bit first.
inline std::string label_bits(std::size_t label, std::size_t bits) {
  std::string s(bits, '0');
  for (std::size_t b = 0; b < bits; ++b)
    if ((label >> (bits - 1 - b)) & 1U) s[b] = '1';
  return s;
}

/// The first `selected_dim` components must carry pairwise distinct labels.
inline void require_distinct_top_labels(const RhoSpec& rho, std::span<const std::size_t> labels) {
  std::set<std::size_t> seen;
  for (std::size_t k = 0; k < rho.selected_dim; ++k)
    if (!seen.insert(labels[k]).second)
      throw Error(ErrorCode::DegenerateSpectrum,
                  "components " + std::to_string(k + 1) +
                      " and an earlier one share eigenvalue label " + std::to_string(labels[k]) +
                      "; increase the eigenvalue register width");
}

namespace detail {

// |v_k>|e> -> |v_k>|e + direction * label_k mod E> on the (feature, eigenvalue) registers.
inline void shift_in_eigenbasis(const RhoSpec& rho, std::span<const std::size_t> labels,
                                StateVector& state, long direction) {
  const auto dim = static_cast<Eigen::Index>(rho.dimension());
  const auto levels = static_cast<Eigen::Index>(state.dimension(reg::kEigen));
  const Eigen::MatrixXcd v = rho.eigenvectors.cast<Complex>();
  const Eigen::MatrixXcd vt = v.transpose();
  using RowMajor = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::MatrixXcd shifted(dim, levels);
  state.transform({reg::kFeature, reg::kEigen},
                  [&](std::span<const Complex> in, std::span<Complex> out) {
                    Eigen::Map<const RowMajor> f(in.data(), dim, levels);
                    const Eigen::MatrixXcd coeff = vt * f;
                    for (Eigen::Index k = 0; k < dim; ++k) {
                      const auto shift = static_cast<long>(labels[static_cast<std::size_t>(k)]);
                      for (Eigen::Index e = 0; e < levels; ++e) {
                        long target = (static_cast<long>(e) + direction * shift) % levels;
                        if (target < 0) target += levels;
                        shifted(k, target) = coeff(k, e);
                      }
                    }
                    Eigen::Map<RowMajor> o(out.data(), dim, levels);
                    o = v * shifted;
                  });
}

inline void require_phase_registers(const RhoSpec& rho, const PhaseConfig& cfg,
                                    const StateVector& state) {
  if (state.dimension(reg::kFeature) != rho.dimension())
    throw Error(ErrorCode::DimensionMismatch, "feature register does not match rho");
  if (state.qubits(reg::kEigen) != cfg.register_qubits(rho))
    throw Error(ErrorCode::DimensionMismatch, "eigenvalue register has the wrong width");
}

}  // namespace detail

/**
 * Ideal action of phase estimation for e^{-i rho t} on the feature register:
 * sum_k c_k |v_k>|0> -> sum_k c_k |v_k>|label_k>. Simulated exactly by moving
 * to rho's eigenbasis and adding each component's label into the eigenvalue
 * register (mod its size), which is unitary on the full space.
 */
inline void phase_estimate(const RhoSpec& rho, const PhaseConfig& cfg, StateVector& state,
                           bool strict = true) {
  detail::require_phase_registers(rho, cfg, state);
  if (strict && state.mass_outside_zero(reg::kEigen) > 1e-12)
    throw Error(ErrorCode::ContractViolation, "eigenvalue register must be |0> on input");
  const auto labels = component_labels(rho, cfg);
  if (cfg.mode == PhaseMode::quantized) require_distinct_top_labels(rho, labels);
  detail::shift_in_eigenbasis(rho, labels, state, +1);
}

inline void inverse_phase_estimate(const RhoSpec& rho, const PhaseConfig& cfg, StateVector& state) {
  detail::require_phase_registers(rho, cfg, state);
  detail::shift_in_eigenbasis(rho, component_labels(rho, cfg), state, -1);
}

struct LabelAssignment {
  std::size_t label = 0;
  std::size_t index = 0;  // 1-based component index j written into the index register
};

/**
 * CU(lambda_j): |label_j>|0> -> |label_j>|j> for each assignment; unlisted labels
 * leave the index register alone. On a nonzero index input the map XORs j in,
 * which is exactly what the X-conjugated multi-controlled NOT ladder does.
 */
inline void apply_cu_lambda(StateVector& state, std::span<const LabelAssignment> assignments,
                            bool strict = true) {
  const std::size_t levels = state.dimension(reg::kEigen);
  const std::size_t slots = state.dimension(reg::kIndex);
  std::vector<std::size_t> mask(levels, 0);
  std::vector<bool> used(levels, false);
  for (const auto& a : assignments) {
    if (a.label >= levels) throw Error(ErrorCode::OutOfRange, "label exceeds eigenvalue register");
    if (a.index == 0 || a.index >= slots)
      throw Error(ErrorCode::OutOfRange, "component index does not fit the index register");
    if (used[a.label])
      throw Error(ErrorCode::DegenerateSpectrum,
                  "duplicate eigenvalue label " + std::to_string(a.label));
    used[a.label] = true;
    mask[a.label] = a.index;
  }
  if (strict && state.mass_outside_zero(reg::kIndex) > 1e-12)
    throw Error(ErrorCode::ContractViolation, "index register must be |0> on input");
  state.transform({reg::kEigen, reg::kIndex}, [&](std::span<const Complex> in, std::span<Complex> out) {
    for (std::size_t e = 0; e < levels; ++e)
      for (std::size_t v = 0; v < slots; ++v) out[e * slots + (v ^ mask[e])] = in[e * slots + v];
  });
}

/// Elementary gates in the X-conjugated multi-controlled NOT construction of the CU ladder.
inline std::size_t cu_lambda_gate_count(std::size_t label_bits,
                                        std::span<const LabelAssignment> assignments) {
  std::size_t gates = 0;
  const std::size_t all = (std::size_t{1} << label_bits) - 1;
  for (const auto& a : assignments)
    gates += 2 * static_cast<std::size_t>(std::popcount(~a.label & all)) +
             static_cast<std::size_t>(std::popcount(a.index));
  return gates;
}

/**
 * CR(beta_j): |j>|0> -> |j>(C/b_j |1> + sqrt(1 - C^2/b_j^2) |0>) for j = 1..d,
 * as a real rotation of the ancilla; index 0 (and any j > d) is left alone.
 */
inline void apply_cr_beta(StateVector& state, std::span<const double> beta_hat, double c,
                          bool strict = true) {
  if (beta_hat.empty()) throw Error(ErrorCode::InvalidInput, "no rotation coefficients");
  for (double b : beta_hat)
    if (!(b > 0.0)) throw Error(ErrorCode::InvalidInput, "rotation coefficient must be positive");
  if (!(c > 0.0)) throw Error(ErrorCode::InvalidInput, "rotation constant must be positive");
  const double smallest = *std::min_element(beta_hat.begin(), beta_hat.end());
  if (c > smallest)
    throw Error(ErrorCode::InvalidRotation, "rotation constant exceeds the smallest coefficient");
  const std::size_t slots = state.dimension(reg::kIndex);
  if (beta_hat.size() >= slots)
    throw Error(ErrorCode::DimensionMismatch, "index register too small for the coefficients");
  if (state.qubits(reg::kAncilla) != 1)
    throw Error(ErrorCode::DimensionMismatch, "rotation ancilla must be a single qubit");
  if (strict && state.mass_outside_zero(reg::kAncilla) > 1e-12)
    throw Error(ErrorCode::ContractViolation, "rotation ancilla must be |0> on input");

  std::vector<double> sines(slots, 0.0), cosines(slots, 1.0);
  for (std::size_t j = 1; j <= beta_hat.size(); ++j) {
    const double r = std::min(1.0, c / beta_hat[j - 1]);
    sines[j] = r;
    cosines[j] = std::sqrt(std::max(0.0, 1.0 - r * r));
  }
  state.transform({reg::kIndex, reg::kAncilla},
                  [&](std::span<const Complex> in, std::span<Complex> out) {
                    for (std::size_t v = 0; v < slots; ++v) {
                      const Complex a0 = in[2 * v];
                      const Complex a1 = in[2 * v + 1];
                      out[2 * v] = cosines[v] * a0 - sines[v] * a1;
                      out[2 * v + 1] = sines[v] * a0 + cosines[v] * a1;
                    }
                  });
}

inline constexpr double kDefaultSuccessFloor = 1e-12;

struct Postselection {
  StateVector state;
  double probability = 0.0;
  std::size_t amplification_repetitions = 0;
};

/**
 * Projects the named registers onto the given values, drops them, and
 * renormalises. `probability` is the squared norm of the projected component.
 */
inline Postselection postselect(const StateVector& state, const BasisState& conditions,
                                double success_floor = kDefaultSuccessFloor) {
  std::vector<std::string_view> names;
  for (const auto& [name, value] : conditions) names.push_back(name);
  const std::size_t base = state.index_of(conditions);
  const auto offsets = state.context_offsets(names);

  std::vector<Register> layout;
  for (const auto& r : state.layout())
    if (std::find(names.begin(), names.end(), std::string_view(r.name)) == names.end())
      layout.push_back(r);
  std::vector<Complex> amps(offsets.size());
  double p = 0.0;
  for (std::size_t k = 0; k < offsets.size(); ++k) {
    amps[k] = state.amplitudes()[base + offsets[k]];
    p += std::norm(amps[k]);
  }
  if (p < success_floor)
    throw Error(ErrorCode::VanishingSuccess,
                "post-selection success probability " + std::to_string(p) + " is below the floor");
  const double scale = 1.0 / std::sqrt(p);
  for (auto& a : amps) a *= scale;
  return {StateVector(std::move(layout), std::move(amps)), p, amplification_repetitions(p)};
}

/// Number of successes in `shots` Bernoulli(p) trials.
inline std::uint64_t sample_successes(double p, std::uint64_t shots, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::binomial_distribution<std::uint64_t> dist(shots, std::clamp(p, 0.0, 1.0));
  return dist(rng);
}

struct SwapTestResult {
  std::uint64_t shots = 0;
  std::uint64_t zeros = 0;
  double p0_exact = 0.0;
  double p0_hat = 0.0;
  double overlap_sq_raw = 0.0;  // 2 p0_hat - 1, unbiased
  double overlap_sq = 0.0;      // clamped to [0, 1]
  double std_error = 0.0;       // 2 sqrt(p0 (1 - p0) / shots)
};

/// Swap-test ancilla statistics: P(0) = (1 + |<a|b>|^2) / 2, sampled over `shots`.
inline SwapTestResult swap_test(const StateVector& a, const StateVector& b, std::uint64_t shots,
                                std::uint64_t seed) {
  if (shots < 1) throw Error(ErrorCode::InvalidInput, "swap test needs at least one shot");
  SwapTestResult r;
  r.shots = shots;
  r.p0_exact = std::clamp(0.5 * (1.0 + std::norm(inner_product(a, b))), 0.5, 1.0);
  r.zeros = sample_successes(r.p0_exact, shots, seed);
  r.p0_hat = static_cast<double>(r.zeros) / static_cast<double>(shots);
  r.overlap_sq_raw = 2.0 * r.p0_hat - 1.0;
  r.overlap_sq = std::clamp(r.overlap_sq_raw, 0.0, 1.0);
  r.std_error = 2.0 * std::sqrt(r.p0_exact * (1.0 - r.p0_exact) / static_cast<double>(shots));
  return r;
}

struct OverlapEstimate {
  double estimate = 0.0;   // of Re<a|b>
  double std_error = 0.0;  // zero when evaluated without shots
  double exact = 0.0;
  bool sampled = false;
};

/**
 * Signed overlap via the interference variant of the swap test: an ancilla in
 * |+> selects a or b, and P(ancilla = +) = (1 + Re<a|b>) / 2. Without `shots`
 * the exact value is returned.
 */
inline OverlapEstimate interference_test(const StateVector& a, const StateVector& b,
                                         std::optional<std::uint64_t> shots, std::uint64_t seed) {
  OverlapEstimate r;
  r.exact = inner_product(a, b).real();
  if (!shots) {
    r.estimate = r.exact;
    return r;
  }
  if (*shots < 1) throw Error(ErrorCode::InvalidInput, "overlap test needs at least one shot");
  const double p = std::clamp(0.5 * (1.0 + r.exact), 0.0, 1.0);
  const auto hits = sample_successes(p, *shots, seed);
  r.estimate = 2.0 * static_cast<double>(hits) / static_cast<double>(*shots) - 1.0;
  r.std_error = 2.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(*shots));
  r.sampled = true;
  return r;
}

/// Multinomial counts for `shots` draws from `probabilities`, by sequential binomials.
inline std::vector<std::uint64_t> sample_counts(std::span<const double> probabilities,
                                                std::uint64_t shots, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint64_t> counts(probabilities.size(), 0);
  double remaining_mass = 0.0;
  for (double p : probabilities) remaining_mass += p;
  std::size_t last = probabilities.size();
  while (last > 1 && !(probabilities[last - 1] > 0.0)) --last;
  std::uint64_t remaining = shots;
  for (std::size_t k = 0; k < last && remaining > 0; ++k) {
    if (k + 1 == last || remaining_mass <= 0.0) {
      counts[k] = remaining;
      break;
    }
    const double q = std::clamp(probabilities[k] / remaining_mass, 0.0, 1.0);
    std::binomial_distribution<std::uint64_t> dist(remaining, q);
    counts[k] = dist(rng);
    remaining -= counts[k];
    remaining_mass -= probabilities[k];
  }
  return counts;
}

struct Measurement {
  std::vector<double> marginal;
  std::vector<std::uint64_t> counts;
  std::uint64_t shots = 0;
};

/// Samples the joint outcome of the named registers (first name most significant).
inline Measurement measure_registers(const StateVector& state,
                                     const std::vector<std::string_view>& names,
                                     std::uint64_t shots, std::uint64_t seed) {
  Measurement m;
  m.marginal = state.marginal(names);
  m.counts = sample_counts(m.marginal, shots, seed);
  m.shots = shots;
  return m;
}

inline Measurement measure_register(const StateVector& state, std::string_view name,
                                    std::uint64_t shots, std::uint64_t seed) {
  return measure_registers(state, {name}, shots, seed);
}

}  // namespace qpca
