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
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qpca/common.hpp"
#include "qpca/data_matrix.hpp"
#include "qpca/error.hpp"
#include "qpca/pca_oracle.hpp"
#include "qpca/qram_store.hpp"
#include "qpca/resource_ledger.hpp"
#include "qpca/state_vector.hpp"
#include "qpca/sv_engine.hpp"

namespace qpca {

/// Where the stochastic points of the pipeline are simulated exactly or by shots.
enum class ExecutionMode { ideal, quantized, sampled };

/// Everything derived from one dataset and one anchor choice.
struct PipelineContext {
  DataMatrix data;
  SpectralModel model;
  QramTree tree;
  RhoSpec rho;
  CompressedMatrix compressed;
};

inline PipelineContext make_context(const DataMatrix& data, double threshold,
                                    std::size_t anchor_index, TreeLayout layout = {}) {
  PipelineContext ctx{data, svd_decompose(data, threshold, anchor_index), build_tree(data, layout),
                      {}, {}};
  ctx.rho = make_rho(ctx.model, ctx.tree.padded_cols);
  ctx.compressed = project(data, ctx.model);
  return ctx;
}

// ---------------------------------------------------------------------------
// Spectrum extraction

struct SpectrumEntry {
  std::size_t label = 0;
  std::size_t component = 0;  // position in rho's eigenbasis
  std::uint64_t count = 0;
  double frequency = 0.0;
  double eigenvalue = 0.0;  // decoded from the label
  Eigen::VectorXd eigenvector;
};

/// Components used downstream, ordered j = 1..d, plus every label that was observed.
struct SampledSpectrum {
  std::vector<SpectrumEntry> components;
  std::vector<SpectrumEntry> observed;
  std::uint64_t shots = 0;
  double cumulative_frequency = 0.0;
  bool under_sampled = false;

  std::size_t dim() const { return components.size(); }

  std::vector<LabelAssignment> assignments() const {
    std::vector<LabelAssignment> out;
    for (std::size_t j = 0; j < components.size(); ++j) out.push_back({components[j].label, j + 1});
    return out;
  }
};

class UnderSampledError : public Error {
 public:
  UnderSampledError(const std::string& message, SampledSpectrum partial)
      : Error(ErrorCode::UnderSampled, message), partial_(std::move(partial)) {}
  const SampledSpectrum& partial() const { return partial_; }

 private:
  SampledSpectrum partial_;
};

/// Spectrum taken directly from rho: the first d components with their labels.
inline SampledSpectrum exact_spectrum(const RhoSpec& rho, const PhaseConfig& cfg) {
  const auto labels = component_labels(rho, cfg);
  if (cfg.mode == PhaseMode::quantized) require_distinct_top_labels(rho, labels);
  SampledSpectrum s;
  for (std::size_t k = 0; k < rho.selected_dim; ++k) {
    const auto col = static_cast<Eigen::Index>(k);
    s.components.push_back({labels[k], k, 0, rho.eigenvalues(col), decode_label(labels[k], rho, cfg),
                            rho.eigenvectors.col(col)});
    s.cumulative_frequency += rho.eigenvalues(col);
  }
  s.observed = s.components;
  return s;
}

/**
 * Prepares sum_j sqrt(lambda_j)|u_j>|v_j>|label_j> and samples the eigenvalue
 * register `budget` times. The d most frequent labels become the components,
 * ordered by decoded eigenvalue. Throws UnderSampledError (carrying the partial
 * result) when fewer than d labels were seen or they cover less than `threshold`.
 */
inline SampledSpectrum extract_spectrum(const QramTree& tree, const RhoSpec& rho,
                                        const PhaseConfig& cfg, std::uint64_t budget,
                                        std::uint64_t seed, double threshold) {
  if (budget < 1) throw Error(ErrorCode::InvalidInput, "sampling budget must be at least 1");
  StateVector state = prepare_psi_s(tree).append_register(
      {std::string(reg::kEigen), cfg.register_qubits(rho)});
  phase_estimate(rho, cfg, state);
  const Measurement m = measure_register(state, reg::kEigen, budget, seed);

  const auto labels = component_labels(rho, cfg);
  SampledSpectrum s;
  s.shots = budget;
  for (std::size_t label = 0; label < m.counts.size(); ++label) {
    if (m.counts[label] == 0) continue;
    // Payload: the strongest component carrying this label.
    const auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) continue;
    const auto k = static_cast<std::size_t>(it - labels.begin());
    s.observed.push_back({label, k, m.counts[label],
                          static_cast<double>(m.counts[label]) / static_cast<double>(budget),
                          decode_label(label, rho, cfg),
                          rho.eigenvectors.col(static_cast<Eigen::Index>(k))});
  }
  std::stable_sort(s.observed.begin(), s.observed.end(),
                   [](const SpectrumEntry& a, const SpectrumEntry& b) { return a.count > b.count; });

  const std::size_t d = rho.selected_dim;
  for (std::size_t j = 0; j < std::min(d, s.observed.size()); ++j) {
    s.components.push_back(s.observed[j]);
    s.cumulative_frequency += s.observed[j].frequency;
  }
  std::stable_sort(s.components.begin(), s.components.end(),
                   [](const SpectrumEntry& a, const SpectrumEntry& b) {
                     if (a.eigenvalue != b.eigenvalue) return a.eigenvalue > b.eigenvalue;
                     return a.component < b.component;
                   });
  s.under_sampled = s.components.size() < d || s.cumulative_frequency < threshold;
  if (s.under_sampled)
    throw UnderSampledError("found " + std::to_string(s.components.size()) + " of " +
                                std::to_string(d) + " labels covering " +
                                std::to_string(s.cumulative_frequency) + " of the samples",
                            s);
  return s;
}

// ---------------------------------------------------------------------------
// Anchor coefficients

inline constexpr double kDefaultBetaFloor = 1e-3;

struct AnchorOptions {
  double shot_constant = 1.0;  // shots per coefficient = ceil(c / eps_beta^2)
  double beta_floor = kDefaultBetaFloor;
  // An estimate of beta_j^2 within this many standard errors of zero counts as weak.
  double resolution_sigmas = 3.0;
};

struct AnchorProfile {
  std::size_t anchor_index = 0;
  std::vector<double> beta;       // <v_j|x>, j = 1..d
  std::vector<double> beta_hat;   // estimates used by the rotations
  std::uint64_t shots_per_coefficient = 0;  // 0 when beta_hat is exact
  double eps_beta = 0.0;
  double shot_constant = 0.0;
  double rotation_constant = 0.0;  // C
  double residual = 0.0;           // 1 - sum_j beta_j^2
};

class WeakAnchorError : public Error {
 public:
  WeakAnchorError(const std::string& message, AnchorProfile profile)
      : Error(ErrorCode::WeakAnchor, message), profile_(std::move(profile)) {}
  const AnchorProfile& profile() const { return profile_; }

 private:
  AnchorProfile profile_;
};

inline std::uint64_t shots_for_accuracy(double eps_beta, double shot_constant) {
  if (!(eps_beta > 0.0)) throw Error(ErrorCode::InvalidInput, "eps_beta must be positive");
  return static_cast<std::uint64_t>(std::ceil(shot_constant / (eps_beta * eps_beta)));
}

namespace detail {

inline StateVector component_state(const SpectrumEntry& entry) {
  StateVector s({{std::string(reg::kFeature), ceil_log2(static_cast<std::size_t>(entry.eigenvector.size()))}});
  for (Eigen::Index k = 0; k < entry.eigenvector.size(); ++k)
    s.amplitudes()[static_cast<std::size_t>(k)] = entry.eigenvector(k);
  return s;
}

inline AnchorProfile true_coefficients(const QramTree& tree, const SampledSpectrum& spectrum,
                                       std::size_t anchor_index) {
  const StateVector anchor = prepare_anchor(tree, anchor_index);
  AnchorProfile p;
  p.anchor_index = anchor_index;
  double sum = 0.0;
  for (const auto& c : spectrum.components) {
    const double b = inner_product(detail::component_state(c), anchor).real();
    p.beta.push_back(b);
    sum += b * b;
  }
  p.residual = 1.0 - sum;
  return p;
}

inline void finish_profile(AnchorProfile& p, double floor) {
  if (p.beta_hat.empty()) throw Error(ErrorCode::InvalidInput, "spectrum has no components");
  p.rotation_constant = *std::min_element(p.beta_hat.begin(), p.beta_hat.end());
  if (p.rotation_constant < floor)
    throw WeakAnchorError("anchor row " + std::to_string(p.anchor_index) +
                              " has a coefficient below the floor",
                          p);
}

}  // namespace detail

/// Profile with beta_hat = beta, C = min_j beta_j.
inline AnchorProfile exact_anchor_profile(const QramTree& tree, const SampledSpectrum& spectrum,
                                          std::size_t anchor_index,
                                          double beta_floor = kDefaultBetaFloor) {
  AnchorProfile p = detail::true_coefficients(tree, spectrum, anchor_index);
  p.beta_hat = p.beta;
  detail::finish_profile(p, beta_floor);
  return p;
}

/**
 * Swap tests between |x> and each |v_j> with ceil(c / eps_beta^2) shots;
 * beta_hat_j = sqrt(clamp(2 p0 - 1, 0, 1)) and C = min_j beta_hat_j. A coefficient
 * below the floor, or one whose estimate is not resolved above shot noise, is weak.
 */
inline AnchorProfile estimate_anchor(const QramTree& tree, const SampledSpectrum& spectrum,
                                     std::size_t anchor_index, double eps_beta,
                                     std::uint64_t seed, AnchorOptions options = {}) {
  AnchorProfile p = detail::true_coefficients(tree, spectrum, anchor_index);
  p.eps_beta = eps_beta;
  p.shot_constant = options.shot_constant;
  p.shots_per_coefficient = shots_for_accuracy(eps_beta, options.shot_constant);
  const StateVector anchor = prepare_anchor(tree, anchor_index);
  for (std::size_t j = 0; j < spectrum.components.size(); ++j) {
    const auto r = swap_test(anchor, detail::component_state(spectrum.components[j]),
                             p.shots_per_coefficient, derive_seed(seed, 100 + j));
    p.beta_hat.push_back(std::sqrt(r.overlap_sq));
    const double se = 2.0 * std::sqrt(r.p0_hat * (1.0 - r.p0_hat) / static_cast<double>(r.shots));
    if (r.overlap_sq_raw <= options.resolution_sigmas * se) {
      p.rotation_constant = *std::min_element(p.beta_hat.begin(), p.beta_hat.end());
      throw WeakAnchorError("anchor row " + std::to_string(anchor_index) + ": coefficient " +
                                std::to_string(j + 1) + " is not resolved above shot noise",
                            p);
    }
  }
  detail::finish_profile(p, options.beta_floor);
  return p;
}

/// Seeded uniform anchor draw; `attempt` selects the retry stream.
inline std::size_t draw_anchor(std::size_t rows, std::uint64_t seed, std::size_t attempt) {
  std::mt19937_64 rng(derive_seed(seed, 0xA1C0 + attempt));
  std::uniform_int_distribution<std::size_t> dist(0, rows - 1);
  return dist(rng);
}

// ---------------------------------------------------------------------------
// Projection

struct CompressionMode {
  enum class Kind { full, subset, single };
  Kind kind = Kind::full;
  std::vector<std::size_t> subset;
  std::size_t point = 0;

  static CompressionMode full() { return {}; }
  static CompressionMode rows(std::vector<std::size_t> s) { return {Kind::subset, std::move(s), 0}; }
  static CompressionMode single(std::size_t i) { return {Kind::single, {}, i}; }
};

inline std::string to_string(CompressionMode::Kind k) {
  switch (k) {
    case CompressionMode::Kind::full: return "full";
    case CompressionMode::Kind::subset: return "subset";
    case CompressionMode::Kind::single: return "single";
  }
  return "unknown";
}

struct CompressOptions {
  double success_floor = kDefaultSuccessFloor;
  std::optional<std::uint64_t> postselect_shots;  // sample the post-selection outcome
  std::uint64_t seed = 0;
  double overlap_tolerance = 1e-2;
  ResourceConstants constants;
};

struct CompressionReport {
  std::string mode;
  double fidelity = 0.0;
  double success_probability = 0.0;          // squared norm of the accepted branch
  double success_probability_formula = 0.0;  // C^2 sum_ij (y_ij beta_j / beta_hat_j)^2 / sum ||x_i||^2
  std::optional<double> sampled_success_probability;
  std::uint64_t postselect_shots = 0;
  std::size_t amplification_repetitions = 0;
  double variance_captured = 0.0;
  std::size_t dim = 0;
  double eps = 0.0;  // eps_beta / sqrt(d)
  double eps_beta = 0.0;
  double eps_lambda = 0.0;
  std::size_t cu_gate_count = 0;
  OverlapReport overlaps;
  ResourceLedger ledger;
};

struct CompressionResult {
  StateVector state;
  StateVector expected;
  CompressionReport report;
};

namespace detail {

inline double success_formula(const PipelineContext& ctx, const SampledSpectrum& spectrum,
                              const AnchorProfile& profile, std::span<const std::size_t> rows) {
  const double c = profile.rotation_constant;
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i : rows) {
    const Eigen::VectorXd x = ctx.data.row(i);
    den += x.squaredNorm();
    for (std::size_t j = 0; j < spectrum.components.size(); ++j) {
      const double y = spectrum.components[j].eigenvector.head(x.size()).dot(x);
      const double t = y * profile.beta[j] / profile.beta_hat[j];
      num += t * t;
    }
  }
  return c * c * num / den;
}

}  // namespace detail

/**
 * Projection step: phase estimation, CU(lambda) index writing, inverse phase
 * estimation, CR(beta) rotation, then U_x^{-1} and post-selection on
 * feature = |0>, ancilla = |1>. Returns the accepted state, the oracle state
 * it should match, and the report.
 */
inline CompressionResult compress(const PipelineContext& ctx, const SampledSpectrum& spectrum,
                                  const AnchorProfile& profile, const PhaseConfig& cfg,
                                  const CompressionMode& mode, const CompressOptions& options = {}) {
  const std::size_t d = spectrum.dim();
  if (d == 0) throw Error(ErrorCode::InvalidInput, "spectrum has no components");
  if (profile.beta_hat.size() != d || profile.beta.size() != d)
    throw Error(ErrorCode::DimensionMismatch, "anchor profile does not match the spectrum");

  std::vector<std::size_t> rows;
  StateVector state;
  switch (mode.kind) {
    case CompressionMode::Kind::full:
      rows.resize(ctx.data.rows());
      std::iota(rows.begin(), rows.end(), std::size_t{0});
      state = prepare_psi_s(ctx.tree);
      break;
    case CompressionMode::Kind::subset:
      if (mode.subset.empty()) throw Error(ErrorCode::InvalidInput, "subset must be nonempty");
      rows = mode.subset;
      state = prepare_psi_subset(ctx.tree, rows);
      break;
    case CompressionMode::Kind::single:
      rows = {mode.point};
      state = prepare_anchor(ctx.tree, mode.point);
      break;
  }

  const auto assignments = spectrum.assignments();
  state = state.append_register({std::string(reg::kEigen), cfg.register_qubits(ctx.rho)});
  phase_estimate(ctx.rho, cfg, state);
  state = state.append_register({std::string(reg::kIndex), ceil_log2(d + 1)});
  apply_cu_lambda(state, assignments);
  inverse_phase_estimate(ctx.rho, cfg, state);
  state = state.drop_register(reg::kEigen);
  state = state.append_register({std::string(reg::kAncilla), 1});
  apply_cr_beta(state, profile.beta_hat, profile.rotation_constant);
  apply_anchor_inverse(ctx.tree, profile.anchor_index, state);
  Postselection post = postselect(
      state, {{std::string(reg::kFeature), 0}, {std::string(reg::kAncilla), 1}}, options.success_floor);

  StateVector expected;
  switch (mode.kind) {
    case CompressionMode::Kind::full:
      expected = expected_compressed_state(ctx.compressed, ctx.tree.row_qubits());
      break;
    case CompressionMode::Kind::subset:
      expected = expected_subset_state(ctx.compressed, rows, ctx.tree.row_qubits());
      break;
    case CompressionMode::Kind::single:
      expected = expected_single_state(project_point(ctx.data.row(mode.point), ctx.model));
      break;
  }

  CompressionReport report;
  report.mode = to_string(mode.kind);
  report.fidelity = fidelity(post.state, expected);
  report.success_probability = post.probability;
  report.success_probability_formula = detail::success_formula(ctx, spectrum, profile, rows);
  report.amplification_repetitions = post.amplification_repetitions;
  if (options.postselect_shots) {
    const auto hits = sample_successes(post.probability, *options.postselect_shots,
                                       derive_seed(options.seed, 7));
    report.postselect_shots = *options.postselect_shots;
    report.sampled_success_probability =
        static_cast<double>(hits) / static_cast<double>(*options.postselect_shots);
  }
  report.variance_captured = ctx.model.variance_captured();
  report.dim = d;
  report.eps_beta = profile.eps_beta;
  report.eps = profile.eps_beta / std::sqrt(static_cast<double>(d));
  report.eps_lambda = cfg.eigenvalue_accuracy();
  report.cu_gate_count = cu_lambda_gate_count(cfg.register_qubits(ctx.rho), assignments);
  report.overlaps = pairwise_overlap_report(ctx.data, ctx.compressed, options.overlap_tolerance);
  report.ledger = ledger_predict(ctx.data.rows(), ctx.data.cols(), d, report.eps_lambda,
                                 profile.eps_beta > 0.0 ? profile.eps_beta : 1.0,
                                 post.probability, options.constants);
  return {std::move(post.state), std::move(expected), std::move(report)};
}

// ---------------------------------------------------------------------------
// End-to-end run with anchor re-draw

struct PipelineOptions {
  double threshold = kDefaultThreshold;
  ExecutionMode mode = ExecutionMode::ideal;
  std::size_t bits = 6;
  double eps_beta = 0.01;
  std::uint64_t shots = 100000;
  std::uint64_t spectrum_budget = 0;  // 0: use `shots`
  std::uint64_t seed = 0;
  std::optional<std::size_t> anchor;
  std::size_t anchor_attempts = 8;
  AnchorOptions anchor_options;
  CompressionMode target;
  double success_floor = kDefaultSuccessFloor;
  double overlap_tolerance = 1e-2;
  ResourceConstants constants;
};

struct PipelineRun {
  PipelineContext context;
  PhaseConfig phase;
  SampledSpectrum spectrum;
  AnchorProfile profile;
  CompressionResult result;
  std::vector<std::size_t> rejected_anchors;
};

inline PhaseConfig phase_config_for(ExecutionMode mode, std::size_t bits) {
  return {bits, mode == ExecutionMode::ideal ? PhaseMode::ideal : PhaseMode::quantized};
}

/**
 * Full pipeline on one dataset. A weak anchor is re-drawn from the seeded
 * stream up to `anchor_attempts` times unless the anchor was given explicitly.
 */
inline PipelineRun run_pipeline(const DataMatrix& data, const PipelineOptions& opt) {
  const PhaseConfig phase = phase_config_for(opt.mode, opt.bits);
  const bool fixed = opt.anchor.has_value();
  const std::size_t attempts = fixed ? 1 : std::max<std::size_t>(1, opt.anchor_attempts);
  std::vector<std::size_t> rejected;
  for (std::size_t attempt = 0;; ++attempt) {
    const std::size_t anchor = fixed ? *opt.anchor : draw_anchor(data.rows(), opt.seed, attempt);
    PipelineContext ctx = make_context(data, opt.threshold, anchor);
    try {
      SampledSpectrum spectrum;
      AnchorProfile profile;
      CompressOptions copt;
      copt.success_floor = opt.success_floor;
      copt.seed = opt.seed;
      copt.overlap_tolerance = opt.overlap_tolerance;
      copt.constants = opt.constants;
      if (opt.mode == ExecutionMode::sampled) {
        const std::uint64_t budget = opt.spectrum_budget > 0 ? opt.spectrum_budget : opt.shots;
        spectrum = extract_spectrum(ctx.tree, ctx.rho, phase, budget, derive_seed(opt.seed, 1),
                                    opt.threshold);
        profile = estimate_anchor(ctx.tree, spectrum, anchor, opt.eps_beta,
                                  derive_seed(opt.seed, 2 + attempt), opt.anchor_options);
        copt.postselect_shots = opt.shots;
      } else {
        spectrum = exact_spectrum(ctx.rho, phase);
        profile = exact_anchor_profile(ctx.tree, spectrum, anchor, opt.anchor_options.beta_floor);
        profile.eps_beta = opt.eps_beta;
      }
      CompressionResult result = compress(ctx, spectrum, profile, phase, opt.target, copt);
      return {std::move(ctx), phase, std::move(spectrum), std::move(profile), std::move(result),
              std::move(rejected)};
    } catch (const WeakAnchorError&) {
      rejected.push_back(anchor);
      if (attempt + 1 >= attempts) throw;
    }
  }
}

/// Success probability with exact coefficients for each candidate d:
/// (min_{j<=s} beta_j)^2 * sum_{j<=s} lambda_j.
inline std::vector<double> success_probability_by_dim(const PipelineContext& ctx) {
  const Eigen::VectorXd anchor = ctx.data.row(ctx.model.anchor_index).normalized();
  const Eigen::VectorXd beta = ctx.model.right_vectors.transpose() * anchor;
  std::vector<double> out;
  double smallest = 1.0;
  double captured = 0.0;
  for (std::size_t s = 0; s < ctx.model.rank; ++s) {
    smallest = std::min(smallest, beta(static_cast<Eigen::Index>(s)));
    captured += ctx.model.variance_proportions(static_cast<Eigen::Index>(s));
    out.push_back(smallest * smallest * captured);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Coefficient-error scaling

enum class Perturbation { alternating, uniform_relative };

struct ScalingConfig {
  std::vector<double> grid{0.0, 0.02, 0.04, 0.08};
  std::size_t seeds = 50;
  std::uint64_t base_seed = 0;
  double threshold = 1.0;
  Perturbation kind = Perturbation::alternating;
  /// Smallest allowed perturbed coefficient; seeds whose anchor cannot keep
  /// every beta_hat above it are skipped.
  double min_beta_hat = 0.02;
};

struct ScalingRow {
  double eps_beta = 0.0;
  double mean_infidelity = 0.0;
  double mean_deviation = 0.0;  // sqrt(2 (1 - F)), the phase-aligned distance
  double max_deviation = 0.0;
  std::size_t samples = 0;
};

struct ScalingTable {
  std::vector<ScalingRow> rows;
  std::size_t dim = 0;
  std::vector<double> segment_slopes;   // deviation slope on each grid segment, from eps = 0
  double max_slope_ratio = 0.0;         // max over adjacent segments of slope_{k+1} / slope_k
  double fitted_slope = 0.0;            // least squares deviation ~ slope * eps_beta
  double infidelity_slope = 0.0;        // least squares infidelity ~ slope * eps_beta / sqrt(d)
  std::vector<std::uint64_t> skipped_seeds;
};

/// beta_hat for one perturbation magnitude.
inline std::vector<double> perturb_coefficients(std::span<const double> beta, double magnitude,
                                                Perturbation kind) {
  std::vector<double> out(beta.begin(), beta.end());
  for (std::size_t j = 0; j < out.size(); ++j) {
    if (kind == Perturbation::alternating)
      out[j] += (j % 2 == 0 ? magnitude : -magnitude);
    else
      out[j] *= 1.0 + magnitude;
  }
  return out;
}

/// Row whose smallest top-d coefficient is largest.
inline std::size_t best_anchor(const DataMatrix& data, double threshold) {
  const SpectralModel model = svd_decompose(data, threshold, 0);
  const Eigen::MatrixXd vd = model.top_components();
  std::size_t best = 0;
  double best_min = -1.0;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const Eigen::VectorXd beta = (vd.transpose() * data.row(i).normalized()).cwiseAbs();
    if (beta.minCoeff() > best_min) {
      best_min = beta.minCoeff();
      best = i;
    }
  }
  return best;
}

/**
 * Runs the ideal-mode pipeline with perturbed coefficients beta_hat for each
 * grid value and seed, recording the final-state infidelity against the oracle.
 */
inline ScalingTable error_scaling_experiment(
    const std::function<DataMatrix(std::uint64_t)>& generator, const ScalingConfig& cfg) {
  const PhaseConfig phase{6, PhaseMode::ideal};
  ScalingTable table;
  for (double eps : cfg.grid) table.rows.push_back({eps, 0.0, 0.0, 0.0, 0});

  for (std::size_t s = 0; s < cfg.seeds; ++s) {
    const std::uint64_t seed = cfg.base_seed + s;
    const DataMatrix data = generator(seed);
    const PipelineContext ctx = make_context(data, cfg.threshold, best_anchor(data, cfg.threshold));
    const SampledSpectrum spectrum = exact_spectrum(ctx.rho, phase);
    AnchorProfile base;
    try {
      base = exact_anchor_profile(ctx.tree, spectrum, ctx.model.anchor_index);
    } catch (const WeakAnchorError&) {
      table.skipped_seeds.push_back(seed);
      continue;
    }
    const double largest = *std::max_element(cfg.grid.begin(), cfg.grid.end());
    const auto worst = perturb_coefficients(base.beta, largest, cfg.kind);
    if (*std::min_element(worst.begin(), worst.end()) < cfg.min_beta_hat) {
      table.skipped_seeds.push_back(seed);
      continue;
    }
    table.dim = spectrum.dim();
    for (auto& row : table.rows) {
      AnchorProfile p = base;
      p.beta_hat = perturb_coefficients(base.beta, row.eps_beta, cfg.kind);
      p.rotation_constant = *std::min_element(p.beta_hat.begin(), p.beta_hat.end());
      p.eps_beta = row.eps_beta;
      const auto r = compress(ctx, spectrum, p, phase, CompressionMode::full());
      const double infidelity = std::max(0.0, 1.0 - r.report.fidelity);
      const double deviation = std::sqrt(2.0 * infidelity);
      row.mean_infidelity += infidelity;
      row.mean_deviation += deviation;
      row.max_deviation = std::max(row.max_deviation, deviation);
      ++row.samples;
    }
  }

  for (auto& row : table.rows) {
    if (row.samples == 0) continue;
    row.mean_infidelity /= static_cast<double>(row.samples);
    row.mean_deviation /= static_cast<double>(row.samples);
  }

  // Slopes over the nonzero grid points, each segment starting where the last ended.
  double prev_eps = 0.0, prev_dev = 0.0, sxx = 0.0, sxy = 0.0, ixx = 0.0, ixy = 0.0;
  const double root_d = std::sqrt(static_cast<double>(std::max<std::size_t>(1, table.dim)));
  for (const auto& row : table.rows) {
    sxx += row.eps_beta * row.eps_beta;
    sxy += row.eps_beta * row.mean_deviation;
    const double scaled = row.eps_beta / root_d;
    ixx += scaled * scaled;
    ixy += scaled * row.mean_infidelity;
    if (row.eps_beta <= prev_eps) continue;
    table.segment_slopes.push_back((row.mean_deviation - prev_dev) / (row.eps_beta - prev_eps));
    prev_eps = row.eps_beta;
    prev_dev = row.mean_deviation;
  }
  for (std::size_t k = 1; k < table.segment_slopes.size(); ++k)
    if (table.segment_slopes[k - 1] > 0.0)
      table.max_slope_ratio =
          std::max(table.max_slope_ratio, table.segment_slopes[k] / table.segment_slopes[k - 1]);
  table.fitted_slope = sxx > 0.0 ? sxy / sxx : 0.0;
  table.infidelity_slope = ixx > 0.0 ? ixy / ixx : 0.0;
  return table;
}

}  // namespace qpca
