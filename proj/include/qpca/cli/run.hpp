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

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qpca/cli/config.hpp"
#include "qpca/cli/csv.hpp"
#include "qpca/fixtures.hpp"
#include "qpca/qml_apps.hpp"
#include "qpca/qpca_pipeline.hpp"
#include "qpca/resource_ledger.hpp"

namespace qpca::cli {

using json = nlohmann::json;

inline constexpr int kReportVersion = 1;

/// Wall-clock seconds per phase; kept out of the report so reports stay reproducible.
using Timings = std::map<std::string, double>;

class Stopwatch {
 public:
  Stopwatch(Timings& sink, std::string name)
      : sink_(sink), name_(std::move(name)), start_(std::chrono::steady_clock::now()) {}
  ~Stopwatch() {
    sink_[name_] += std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  Timings& sink_;
  std::string name_;
  std::chrono::steady_clock::time_point start_;
};

// ---------------------------------------------------------------------------
// Serialization

inline json to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(v(k));
  return a;
}

inline json to_json(const RunConfig& c) {
  json j{{"task", c.task},       {"threshold", c.threshold}, {"bits", c.bits},
         {"mode", c.mode},       {"eps_beta", c.eps_beta},   {"shots", c.shots},
         {"seed", c.seed},       {"gamma", c.gamma},         {"rows", c.rows},
         {"cols", c.cols},       {"dim", c.dim},             {"budget", c.budget},
         {"seeds", c.seeds},     {"subset", c.subset},       {"query", c.query}};
  j["input"] = c.input_path.empty() ? json(nullptr) : json(std::filesystem::path(c.input_path).filename().string());
  j["labels"] = c.labels_path.empty() ? json(nullptr) : json(std::filesystem::path(c.labels_path).filename().string());
  j["anchor"] = c.anchor ? json(*c.anchor) : json(nullptr);
  j["point"] = c.point ? json(*c.point) : json(nullptr);
  j["eps_lambda"] = c.eps_lambda ? json(*c.eps_lambda) : json(nullptr);
  j["success_prob"] = c.success_prob ? json(*c.success_prob) : json(nullptr);
  return j;
}

inline json to_json(const SpectralModel& m) {
  return {{"singular_values", to_json(m.singular_values)},
          {"variance_proportions", to_json(m.variance_proportions)},
          {"selected_dim", m.selected_dim},
          {"rank", m.rank},
          {"threshold", m.threshold},
          {"variance_captured", m.variance_captured()},
          {"anchor_index", m.anchor_index}};
}

inline json to_json(const SampledSpectrum& s) {
  json comps = json::array();
  for (const auto& c : s.components)
    comps.push_back({{"label", c.label}, {"component", c.component}, {"count", c.count},
                     {"frequency", c.frequency}, {"eigenvalue", c.eigenvalue}});
  return {{"components", comps},
          {"observed_labels", s.observed.size()},
          {"shots", s.shots},
          {"cumulative_frequency", s.cumulative_frequency},
          {"under_sampled", s.under_sampled}};
}

inline json to_json(const AnchorProfile& p) {
  return {{"anchor_index", p.anchor_index},
          {"beta", p.beta},
          {"beta_hat", p.beta_hat},
          {"shots_per_coefficient", p.shots_per_coefficient},
          {"eps_beta", p.eps_beta},
          {"shot_constant", p.shot_constant},
          {"rotation_constant", p.rotation_constant},
          {"residual", p.residual}};
}

inline json to_json(const ResourceLedger& l) {
  return {{"step1_copies", l.step1_copies},       {"step2_swap_tests", l.step2_swap_tests},
          {"step31_cost", l.step31_cost},         {"step32_gates", l.step32_gates},
          {"step33_cost", l.step33_cost},         {"step34_gates", l.step34_gates},
          {"step35_cost", l.step35_cost},         {"amplification_reps", l.amplification_reps},
          {"sqrt_d", l.sqrt_d},                   {"step3_total", l.step3_total},
          {"overall", l.overall}};
}

inline json to_json(const OverlapReport& o) {
  json flagged = json::array();
  for (const auto& [a, b] : o.flagged) flagged.push_back({a, b});
  return {{"pairs", o.pairs},
          {"max_deviation", o.max_deviation},
          {"mean_deviation", o.mean_deviation},
          {"median_deviation", o.median_deviation},
          {"p90_deviation", o.p90_deviation},
          {"tolerance", o.tolerance},
          {"fraction_within", o.fraction_within},
          {"flagged", flagged}};
}

inline json to_json(const CompressionReport& r) {
  json j{{"mode", r.mode},
         {"fidelity", r.fidelity},
         {"success_probability", r.success_probability},
         {"success_probability_formula", r.success_probability_formula},
         {"amplification_repetitions", r.amplification_repetitions},
         {"variance_captured", r.variance_captured},
         {"dim", r.dim},
         {"eps", r.eps},
         {"eps_beta", r.eps_beta},
         {"eps_lambda", r.eps_lambda},
         {"cu_gate_count", r.cu_gate_count},
         {"postselect_shots", r.postselect_shots}};
  j["sampled_success_probability"] =
      r.sampled_success_probability ? json(*r.sampled_success_probability) : json(nullptr);
  return j;
}

inline json to_json(const ScalingTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows)
    rows.push_back({{"eps_beta", r.eps_beta}, {"mean_infidelity", r.mean_infidelity},
                    {"mean_deviation", r.mean_deviation}, {"max_deviation", r.max_deviation},
                    {"samples", r.samples}});
  return {{"rows", rows},
          {"dim", t.dim},
          {"segment_slopes", t.segment_slopes},
          {"max_slope_ratio", t.max_slope_ratio},
          {"fitted_slope", t.fitted_slope},
          {"infidelity_slope", t.infidelity_slope},
          {"skipped_seeds", t.skipped_seeds}};
}

inline json to_json(const OverlapEstimate& o) {
  return {{"estimate", o.estimate}, {"std_error", o.std_error}, {"exact", o.exact}, {"sampled", o.sampled}};
}

// ---------------------------------------------------------------------------
// Plot tables

inline json scree_table(const SpectralModel& m) {
  json t = json::array();
  for (Eigen::Index k = 0; k < m.variance_proportions.size(); ++k)
    t.push_back({k + 1, m.variance_proportions(k)});
  return t;
}

/// Infidelity of the ideal pipeline when beta_hat is perturbed by +-eps alternately.
inline json infidelity_table(const PipelineContext& ctx, const SampledSpectrum& spectrum,
                             const AnchorProfile& exact, const std::vector<double>& grid) {
  const PhaseConfig phase{6, PhaseMode::ideal};
  json t = json::array();
  for (double eps : grid) {
    AnchorProfile p = exact;
    p.beta_hat = perturb_coefficients(exact.beta, eps, Perturbation::alternating);
    p.rotation_constant = *std::min_element(p.beta_hat.begin(), p.beta_hat.end());
    if (!(p.rotation_constant >= kDefaultBetaFloor)) continue;
    const auto r = compress(ctx, spectrum, p, phase, CompressionMode::full());
    t.push_back({eps, std::max(0.0, 1.0 - r.report.fidelity)});
  }
  return t;
}

inline json success_table(const PipelineContext& ctx) {
  json t = json::array();
  const auto p = success_probability_by_dim(ctx);
  for (std::size_t s = 0; s < p.size(); ++s) t.push_back({s + 1, p[s]});
  return t;
}

// ---------------------------------------------------------------------------
// Tasks

namespace detail {

inline ExecutionMode parse_mode(const std::string& m) {
  if (m == "quantized") return ExecutionMode::quantized;
  if (m == "sampled") return ExecutionMode::sampled;
  return ExecutionMode::ideal;
}

inline json compress_task(const RunConfig& c, Timings& timings) {
  DataMatrix data = [&] {
    Stopwatch w(timings, "ingest");
    return ingest_csv(c.input_path);
  }();
  PipelineOptions opt;
  opt.threshold = c.threshold;
  opt.mode = parse_mode(c.mode);
  opt.bits = c.bits;
  opt.eps_beta = c.eps_beta;
  opt.shots = c.shots;
  opt.spectrum_budget = c.budget;
  opt.seed = c.seed;
  opt.anchor = c.anchor;
  if (!c.subset.empty()) opt.target = CompressionMode::rows(c.subset);
  if (c.point) opt.target = CompressionMode::single(*c.point);
  for (std::size_t i : c.subset)
    if (i >= data.rows()) throw Error(ErrorCode::OutOfRange, "subset row " + std::to_string(i) + " out of range");
  if (c.point && *c.point >= data.rows())
    throw Error(ErrorCode::OutOfRange, "point " + std::to_string(*c.point) + " out of range");

  const PipelineRun run = [&] {
    Stopwatch w(timings, "pipeline");
    return run_pipeline(data, opt);
  }();
  const auto& report = run.result.report;

  json j;
  j["spectral"] = to_json(run.context.model);
  j["spectrum"] = to_json(run.spectrum);
  j["anchor"] = to_json(run.profile);
  j["anchor"]["rejected"] = run.rejected_anchors;
  j["compression"] = to_json(report);
  j["overlaps"] = to_json(report.overlaps);
  j["ledger"] = to_json(report.ledger);

  Stopwatch w(timings, "plots");
  const SampledSpectrum exact = exact_spectrum(run.context.rho, PhaseConfig{6, PhaseMode::ideal});
  json curve = json::array();
  try {
    const AnchorProfile base = exact_anchor_profile(run.context.tree, exact, run.profile.anchor_index);
    curve = infidelity_table(run.context, exact, base, {0.0, 0.005, 0.01, 0.02, 0.04, 0.08});
  } catch (const WeakAnchorError&) {
  }
  j["plots"] = {{"scree", scree_table(run.context.model)},
                {"infidelity_vs_eps_beta", curve},
                {"success_vs_dim", success_table(run.context)}};
  return j;
}

inline json qsvm_task(const RunConfig& c, Timings& timings) {
  const DataMatrix data = ingest_csv(c.input_path);
  const Eigen::VectorXd labels = ingest_labels(c.labels_path, data.rows());
  Stopwatch w(timings, "qsvm");
  const SpectralModel model = svd_decompose(data, c.threshold, c.anchor.value_or(0));
  const Eigen::MatrixXd y = project(data, model).values;
  const LssvmModel full = lssvm_train(data.values(), labels, c.gamma);
  const LssvmModel reduced = lssvm_train(y, labels, c.gamma);

  std::size_t agree_exact = 0, agree_sampled = 0, inconclusive = 0, agree_models = 0;
  json decisions = json::array();
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const Eigen::VectorXd q = y.row(static_cast<Eigen::Index>(i)).transpose();
    const auto exact = qsvm_state_demo(reduced, q, std::nullopt, 0);
    const auto sampled = qsvm_state_demo(reduced, q, c.shots, derive_seed(c.seed, i));
    agree_exact += exact.agrees;
    agree_sampled += sampled.agrees;
    inconclusive += sampled.inconclusive;
    agree_models += lssvm_classify(full, data.row(i)) == exact.classical;
    decisions.push_back(exact.decision_value);
  }
  const double n = static_cast<double>(data.rows());
  json j;
  j["spectral"] = to_json(model);
  j["applications"]["qsvm"] = {
      {"full", {{"bias", full.bias}, {"residual", full.residual},
                {"accuracy", lssvm_accuracy(full, data.values(), labels)}}},
      {"compressed", {{"bias", reduced.bias}, {"residual", reduced.residual},
                      {"accuracy", lssvm_accuracy(reduced, y, labels)}}},
      {"kernel_max_difference", ((y * y.transpose()) - data.values() * data.values().transpose()).cwiseAbs().maxCoeff()},
      {"model_agreement", static_cast<double>(agree_models) / n},
      {"demo_exact_agreement", static_cast<double>(agree_exact) / n},
      {"demo_sampled_agreement", static_cast<double>(agree_sampled) / n},
      {"demo_inconclusive", inconclusive},
      {"decision_values", decisions}};
  j["plots"] = {{"scree", scree_table(model)}};
  return j;
}

inline json qlr_task(const RunConfig& c, Timings& timings) {
  const DataMatrix data = ingest_csv(c.input_path);
  const Eigen::VectorXd targets = ingest_labels(c.labels_path, data.rows());
  Stopwatch w(timings, "qlr");
  Eigen::VectorXd query = data.row(0);
  if (!c.query.empty()) {
    if (c.query.size() != data.cols())
      throw Error(ErrorCode::DimensionMismatch, "--query needs " + std::to_string(data.cols()) + " values");
    query = Eigen::Map<const Eigen::VectorXd>(c.query.data(), static_cast<Eigen::Index>(c.query.size()));
  }
  const SpectralModel model = svd_decompose(data, c.threshold, c.anchor.value_or(0));
  const CompressedProblem reduced = compress_problem(data, model, query);
  const auto original = qlr_predict(data.values(), targets, query);
  const auto compressed = qlr_predict(reduced.points, targets, reduced.query);
  const auto demo_exact = qlr_state_demo(reduced.points, targets, reduced.query, std::nullopt, 0);
  const auto demo_sampled = qlr_state_demo(reduced.points, targets, reduced.query, c.shots, derive_seed(c.seed, 3));
  json j;
  j["spectral"] = to_json(model);
  j["applications"]["qlr"] = {
      {"original", {{"svd_form", original.svd_form}, {"normal_form", original.normal_form},
                    {"rank", original.rank}, {"consistent", original.consistent}}},
      {"compressed", {{"svd_form", compressed.svd_form}, {"normal_form", compressed.normal_form},
                      {"rank", compressed.rank}, {"consistent", compressed.consistent}}},
      {"demo_exact", {{"overlap", to_json(demo_exact.overlap)}, {"factor", demo_exact.factor},
                      {"estimate", demo_exact.estimate}}},
      {"demo_sampled", {{"overlap", to_json(demo_sampled.overlap)}, {"factor", demo_sampled.factor},
                        {"estimate", demo_sampled.estimate}, {"inconclusive", demo_sampled.inconclusive}}}};
  j["plots"] = {{"scree", scree_table(model)}};
  return j;
}

inline json scaling_task(const RunConfig& c, Timings& timings) {
  Stopwatch w(timings, "scaling");
  ScalingConfig cfg;
  cfg.seeds = c.seeds;
  cfg.base_seed = c.seed;
  const auto rows = c.rows, cols = c.cols, dim = c.dim;
  const ScalingTable table = error_scaling_experiment(
      [=](std::uint64_t s) { return DataMatrix(fixtures::rank_k(rows, cols, dim, s)); }, cfg);
  json curve = json::array();
  for (const auto& r : table.rows) curve.push_back({r.eps_beta, r.mean_infidelity});
  json j;
  j["scaling"] = to_json(table);
  j["plots"] = {{"infidelity_vs_eps_beta", curve}};
  return j;
}

inline json ledger_task(const RunConfig& c) {
  const double eps_lambda = c.eps_lambda.value_or(PhaseConfig{c.bits, PhaseMode::quantized}.eigenvalue_accuracy());
  const double p = c.success_prob.value_or(1.0 / static_cast<double>(c.dim));
  json j;
  j["ledger"] = to_json(ledger_predict(c.rows, c.cols, c.dim, eps_lambda, c.eps_beta, p));
  j["ledger"]["inputs"] = {{"rows", c.rows}, {"cols", c.cols}, {"dim", c.dim},
                           {"eps_lambda", eps_lambda}, {"eps_beta", c.eps_beta}, {"success_prob", p}};
  return j;
}

}  // namespace detail

/// Executes the configured task and returns the report document.
inline json run(const RunConfig& config, Timings& timings) {
  validate(config);
  json report;
  if (config.task == "compress") report = detail::compress_task(config, timings);
  else if (config.task == "qsvm") report = detail::qsvm_task(config, timings);
  else if (config.task == "qlr") report = detail::qlr_task(config, timings);
  else if (config.task == "scaling") report = detail::scaling_task(config, timings);
  else report = detail::ledger_task(config);
  report["config"] = to_json(config);
  report["seed"] = config.seed;
  report["task"] = config.task;
  report["version"] = kReportVersion;
  return report;
}

inline json run(const RunConfig& config) {
  Timings t;
  return run(config, t);
}

inline std::string serialize(const json& report) { return report.dump(2) + "\n"; }

/// Writes to a sibling temporary file, then renames over `path`.
inline void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp);
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error(ErrorCode::IoError, "failed writing " + tmp);
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::IoError, "cannot move report into place at " + path);
  }
}

inline std::string timings_path(const std::string& report_path) { return report_path + ".timings.json"; }

/// Scree, infidelity and success-probability tables as whitespace-separated columns.
inline std::vector<std::string> emit_plot_data(const json& report, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw Error(ErrorCode::IoError, "cannot create " + dir);
  struct Spec {
    const char* key;
    const char* file;
    const char* header;
  };
  static constexpr Spec specs[] = {{"scree", "scree.dat", "# j lambda"},
                                   {"infidelity_vs_eps_beta", "infidelity_vs_eps_beta.dat", "# eps_beta infidelity"},
                                   {"success_vs_dim", "success_vs_dim.dat", "# d success_probability"}};
  std::vector<std::string> written;
  if (!report.contains("plots")) return written;
  const json& plots = report["plots"];
  for (const auto& s : specs) {
    if (!plots.contains(s.key)) continue;
    std::string body = std::string(s.header) + "\n";
    char buf[40];
    for (const auto& row : plots[s.key]) {
      for (std::size_t k = 0; k < row.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", row[k].get<double>());
        body += (k ? " " : "") + std::string(buf);
      }
      body += "\n";
    }
    const std::string path = (std::filesystem::path(dir) / s.file).string();
    write_atomic(path, body);
    written.push_back(path);
  }
  return written;
}

inline json error_object(ErrorCode code, const std::string& message) {
  return {{"error", {{"code", to_string(code)}, {"message", message}, {"exit_status", exit_status(code)}}}};
}

/// Runs, writes the report (and plot data when requested); returns the process exit status.
inline int execute(const RunConfig& config, std::ostream& err) {
  try {
    Timings timings;
    const auto start = std::chrono::steady_clock::now();
    const json report = run(config, timings);
    write_atomic(config.output_path, serialize(report));
    if (!config.plot_dir.empty()) emit_plot_data(report, config.plot_dir);
    timings["total"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_atomic(timings_path(config.output_path), json(timings).dump(2) + "\n");
    return 0;
  } catch (const Error& e) {
    err << error_object(e.code(), e.what()).dump() << '\n';
    return exit_status(e.code());
  } catch (const std::exception& e) {
    err << error_object(ErrorCode::NumericalFailure, e.what()).dump() << '\n';
    return exit_status(ErrorCode::NumericalFailure);
  }
}

}  // namespace qpca::cli
