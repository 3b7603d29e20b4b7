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

// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "qpca/cli/csv.hpp"
#include "qpca/cli/run.hpp"
#include "qpca/fixtures.hpp"
#include "qpca/qml_apps.hpp"
#include "qpca/qpca_pipeline.hpp"
#include "support/oracles.hpp"

namespace {

using namespace qpca;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

const PhaseConfig kIdeal{6, PhaseMode::ideal};

Outcome end_to_end_exactness() {
  const auto start = std::chrono::steady_clock::now();
  double worst = 1.0;
  std::size_t done = 0, skipped = 0;
  for (std::uint64_t seed = 0; done < 20 && seed < 200; ++seed) {
    const std::size_t n = 8 + 8 * (seed % 8);
    const std::size_t dims = 4 + 4 * (seed % 7);
    const std::size_t d = 1 + seed % 4;
    const DataMatrix x(fixtures::rank_k(n, dims, d, 1000 + seed));
    const auto ctx = make_context(x, 1.0, best_anchor(x, 1.0));
    const auto spectrum = exact_spectrum(ctx.rho, kIdeal);
    AnchorProfile p;
    try {
      p = exact_anchor_profile(ctx.tree, spectrum, ctx.model.anchor_index);
    } catch (const WeakAnchorError&) {
      ++skipped;
      continue;
    }
    const auto r = compress(ctx, spectrum, p, kIdeal, CompressionMode::full());
    worst = std::min(worst, r.report.fidelity);
    ++done;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  Outcome o;
  o.pass = done == 20 && worst >= 1.0 - 1e-9 && secs <= 10.0;
  o.detail = fmt("datasets=%.0f min_fidelity=1-%.3g seconds=%.2f", static_cast<double>(done), 1.0 - worst, secs) +
             (skipped ? " weak_anchor_skips=" + std::to_string(skipped) : "");
  return o;
}

Outcome success_probability() {
  double formula_gap = 0.0, exact_gap = 0.0, worst_sigma = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const DataMatrix noisy(fixtures::rank_k_noisy(16, 8, 2 + seed % 2, 0.05, 40 + seed));
    const auto ctx = make_context(noisy, 0.95, best_anchor(noisy, 0.95));
    const auto s = exact_spectrum(ctx.rho, kIdeal);
    const auto p = exact_anchor_profile(ctx.tree, s, ctx.model.anchor_index);
    const double fro_y = project(noisy, ctx.model).values.squaredNorm();
    const double formula = p.rotation_constant * p.rotation_constant * fro_y / noisy.values().squaredNorm();
    CompressOptions opt;
    opt.postselect_shots = 100000;
    opt.seed = 500 + seed;
    const auto r = compress(ctx, s, p, kIdeal, CompressionMode::full(), opt);
    formula_gap = std::max(formula_gap, std::abs(r.report.success_probability - formula));
    const double q = r.report.success_probability;
    worst_sigma = std::max(worst_sigma, std::abs(*r.report.sampled_success_probability - q) /
                                            std::sqrt(q * (1 - q) / 1e5));

    const DataMatrix exact(fixtures::rank_k(16, 8, 2 + seed % 3, 60 + seed));
    const auto ce = make_context(exact, 1.0, best_anchor(exact, 1.0));
    const auto se = exact_spectrum(ce.rho, kIdeal);
    const auto pe = exact_anchor_profile(ce.tree, se, ce.model.anchor_index);
    const auto re = compress(ce, se, pe, kIdeal, CompressionMode::full());
    exact_gap = std::max(exact_gap, std::abs(re.report.success_probability - pe.rotation_constant * pe.rotation_constant));
  }
  Outcome o;
  o.pass = formula_gap <= 1e-12 && exact_gap <= 1e-12 && worst_sigma <= 3.0;
  o.detail = fmt("formula_gap=%.3g exact_rank_gap=%.3g sampled_max_sigma=%.2f", formula_gap, exact_gap, worst_sigma);
  return o;
}

Outcome dimension_selection() {
  const std::vector<double> example{0.90, 0.08, 0.02};
  bool ok = select_dimension(example, 0.95) == 2;
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t violations = 0;
  for (int t = 0; t < 100; ++t) {
    std::vector<double> lam(1 + t % 12);
    double total = 0.0;
    for (auto& l : lam) total += (l = u(rng) * u(rng));
    for (auto& l : lam) l /= total;
    std::sort(lam.begin(), lam.end(), std::greater<>());
    const double theta = 0.05 + 0.95 * u(rng);
    const std::size_t d = select_dimension(lam, theta);
    const double head = std::accumulate(lam.begin(), lam.begin() + static_cast<std::ptrdiff_t>(d), 0.0);
    const double shorter = std::accumulate(lam.begin(), lam.begin() + static_cast<std::ptrdiff_t>(d) - 1, 0.0);
    if (!(head >= theta || d == lam.size())) ++violations;
    if (d > 1 && shorter >= theta) ++violations;
  }
  ok = ok && violations == 0;
  return {ok, "example_d=" + std::to_string(select_dimension(example, 0.95)) +
                  " random_spectra=100 violations=" + std::to_string(violations)};
}

Outcome circuit_equivalence() {
  std::size_t mismatches = 0, cases = 0, count_mismatches = 0;
  std::mt19937_64 rng(4);
  for (std::size_t bits = 1; bits <= 4; ++bits) {
    const std::size_t levels = std::size_t{1} << bits;
    for (std::size_t d = 1; d <= std::min<std::size_t>(4, levels); ++d) {
      const std::size_t index_bits = ceil_log2(d + 1);
      for (int trial = 0; trial < 16; ++trial) {
        std::vector<std::size_t> pool(levels);
        std::iota(pool.begin(), pool.end(), 0);
        if (trial > 0) std::shuffle(pool.begin(), pool.end(), rng);
        std::vector<LabelAssignment> assignments;
        std::vector<std::pair<std::uint64_t, std::uint64_t>> gates_in;
        for (std::size_t j = 1; j <= d; ++j) {
          assignments.push_back({pool[j - 1], j});
          gates_in.emplace_back(pool[j - 1], j);
        }
        const auto circuit =
            oracle::GateCircuit::build(static_cast<int>(bits), static_cast<int>(index_bits), gates_in);
        count_mismatches += circuit.size() != cu_lambda_gate_count(bits, assignments);
        for (std::size_t w = 0; w < (std::size_t{1} << (bits + index_bits)); ++w) {
          StateVector s({{"eigenvalue", bits}, {"index", index_bits}});
          s.amplitudes()[0] = 0.0;
          s.amplitudes()[w] = 1.0;
          apply_cu_lambda(s, assignments, false);
          ++cases;
          if (s.amplitudes()[circuit.apply(w)] != Complex(1.0, 0.0)) ++mismatches;
        }
      }
    }
  }
  return {mismatches == 0 && count_mismatches == 0,
          "basis_cases=" + std::to_string(cases) + " mismatches=" + std::to_string(mismatches) +
              " gate_count_mismatches=" + std::to_string(count_mismatches)};
}

StateVector qubit_state(double overlap_sq, bool rotated) {
  StateVector s({{"feature", 1}});
  if (!rotated) return s;
  s.set_amplitude({{"feature", 0}}, std::sqrt(overlap_sq));
  s.set_amplitude({{"feature", 1}}, std::sqrt(1.0 - overlap_sq));
  return s;
}

Outcome swap_calibration() {
  const std::uint64_t shots = 1000000;
  const int runs = 200;
  bool ok = true;
  std::string detail;
  std::uint64_t stream = 0;
  for (double q : {0.0, 0.25, 1.0}) {
    const auto a = qubit_state(q, false), b = qubit_state(q, true);
    std::vector<double> est;
    ++stream;
    for (int s = 0; s < runs; ++s)
      est.push_back(swap_test(a, b, shots, derive_seed(stream, static_cast<std::uint64_t>(s))).overlap_sq_raw);
    const double mean = std::accumulate(est.begin(), est.end(), 0.0) / runs;
    double var = 0.0;
    for (double e : est) var += (e - mean) * (e - mean);
    const double sd = std::sqrt(var / (runs - 1));
    const double p0 = 0.5 * (1.0 + q);
    const double predicted = 2.0 * std::sqrt(p0 * (1.0 - p0) / static_cast<double>(shots));
    const double se = predicted / std::sqrt(static_cast<double>(runs));
    const bool unbiased = predicted > 0.0 ? std::abs(mean - q) <= 3.0 * se : mean == q;
    const bool spread = predicted > 0.0 ? std::abs(sd / predicted - 1.0) <= 0.1 : sd == 0.0;
    ok = ok && unbiased && spread;
    detail += fmt("q=%.2f bias/se=%.2f ", q, predicted > 0 ? std::abs(mean - q) / se : 0.0) +
              fmt("sd_ratio=%.3f; ", predicted > 0 ? sd / predicted : 1.0);
  }
  return {ok, detail};
}

Outcome beta_scaling() {
  ScalingConfig cfg;
  cfg.seeds = 50;
  const auto gen = [](std::uint64_t s) { return DataMatrix(fixtures::rank_k(16, 8, 4, s)); };
  cfg.kind = Perturbation::uniform_relative;
  const auto uniform = error_scaling_experiment(gen, cfg);
  double uniform_worst = 0.0;
  for (const auto& r : uniform.rows) uniform_worst = std::max(uniform_worst, r.mean_infidelity);
  cfg.kind = Perturbation::alternating;
  const auto alt = error_scaling_experiment(gen, cfg);
  const std::size_t used = alt.rows.front().samples;
  Outcome o;
  o.pass = uniform_worst <= 1e-9 && alt.max_slope_ratio <= 1.5 && alt.max_slope_ratio > 0.0 && used >= 25 &&
           alt.rows.front().mean_infidelity <= 1e-9;
  o.detail = fmt("uniform_max_infidelity=%.3g slope_ratio=%.3f", uniform_worst, alt.max_slope_ratio) +
             fmt(" fitted_slope=%.4f seeds_used=%.0f", alt.fitted_slope, static_cast<double>(used));
  for (const auto& r : alt.rows) o.detail += fmt(" [eps=%.2f dev=%.3g]", r.eps_beta, r.mean_deviation);
  return o;
}

Outcome ledger_scalings() {
  std::size_t bad = 0, checks = 0;
  auto near = [&](double a, double b) {
    ++checks;
    if (std::abs(a - b) > 1e-9 * std::abs(b)) ++bad;
  };
  const std::size_t ds[] = {2, 4, 8};
  const double lams[] = {0.1, 0.05, 0.02};
  const double betas[] = {0.05, 0.01, 0.002};
  for (std::size_t d : ds)
    for (int k = 0; k < 3; ++k) {
      const double el = lams[k], eb = betas[k];
      const auto base = ledger_predict(64, 32, d, el, eb, 0.25);
      const auto half_l = ledger_predict(64, 32, d, el / 2, eb, 0.25);
      const auto half_b = ledger_predict(64, 32, d, el, eb / 2, 0.25);
      near(half_l.step31_cost, 8 * base.step31_cost);
      near(half_l.step33_cost, 8 * base.step33_cost);
      near(half_b.step2_swap_tests, 4 * base.step2_swap_tests);
      const auto dbl = ledger_predict(64, 32, 2 * d, el, eb, 0.25);
      const double dd = static_cast<double>(d);
      near(dbl.step32_gates / (2 * dd * std::log2(2 * dd + 1)), base.step32_gates / (dd * std::log2(dd + 1)));
      near(dbl.step34_gates / (2 * dd * std::log2(2 * dd + 1)), base.step34_gates / (dd * std::log2(dd + 1)));
      near(dbl.step2_swap_tests, 2 * base.step2_swap_tests);
    }
  return {bad == 0, "grid=3x3 checks=" + std::to_string(checks) + " failures=" + std::to_string(bad)};
}

Outcome overlap_preservation() {
  double exact_worst = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const DataMatrix x(fixtures::rank_k(16, 8, 2 + seed % 3, 70 + seed));
    const auto m = svd_decompose(x, 1.0);
    exact_worst = std::max(exact_worst, pairwise_overlap_report(x, project(x, m)).max_deviation);
  }
  const DataMatrix noisy(fixtures::rank_k_noisy(16, 8, 2, 0.01, 3));
  const auto m = svd_decompose(noisy, 0.95);
  const auto r = pairwise_overlap_report(noisy, project(noisy, m));
  const double residual = 1.0 - m.variance_captured();
  Outcome o;
  o.pass = exact_worst <= 1e-9 && r.max_deviation <= 10.0 * residual;
  o.detail = fmt("exact_max=%.3g noisy_max=%.3g residual_variance=%.3g", exact_worst, r.max_deviation, residual) +
             fmt(" noisy_mean=%.3g noisy_median=%.3g noisy_p90=%.3g", r.mean_deviation, r.median_deviation,
                 r.p90_deviation);
  return o;
}

Outcome qsvm() {
  const auto cls = fixtures::gaussian_classes(20, 29);
  const DataMatrix x(cls.points);
  const auto model = svd_decompose(x, 0.95);
  const Eigen::MatrixXd y = project(x, model).values;
  const auto full = lssvm_train(cls.points, cls.labels);
  const auto small = lssvm_train(y, cls.labels);
  const double acc_full = lssvm_accuracy(full, cls.points, cls.labels);
  const double acc_small = lssvm_accuracy(small, y, cls.labels);
  std::size_t queries = 0, disagreements = 0;
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g(0.0, 3.0);
  auto check = [&](const LssvmModel& m, const Eigen::VectorXd& q) {
    const auto r = qsvm_state_demo(m, q, std::nullopt, 0);
    if (std::abs(r.decision_value) <= 1e-9) return;
    ++queries;
    disagreements += !r.agrees;
  };
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    check(small, y.row(i).transpose());
    check(full, cls.points.row(i).transpose());
  }
  for (int t = 0; t < 60; ++t) {
    Eigen::VectorXd q(cls.points.cols());
    for (Eigen::Index k = 0; k < q.size(); ++k) q(k) = g(rng);
    check(full, q);
    check(small, project_point(q, model));
  }
  Outcome o;
  o.pass = acc_full == acc_small && full.residual <= 1e-8 && small.residual <= 1e-8 && disagreements == 0;
  o.detail = fmt("d=%.0f accuracy_full=%.3f accuracy_compressed=%.3f", static_cast<double>(model.selected_dim),
                 acc_full, acc_small) +
             fmt(" residuals=%.2g/%.2g", full.residual, small.residual) + " demo_queries=" +
             std::to_string(queries) + " disagreements=" + std::to_string(disagreements);
  return o;
}

Outcome qlr() {
  const DataMatrix x(fixtures::rank_k(12, 6, 3, 17));
  Eigen::VectorXd w(6);
  w << 1, -2, 0.5, 3, 0, -1;
  const Eigen::VectorXd z = x.values() * w;
  const auto model = svd_decompose(x, 1.0);
  double pred_err = 0.0, demo_err_orig = 0.0, demo_err_comp = 0.0;
  for (int t = 0; t < 5; ++t) {
    const Eigen::VectorXd q = x.row(static_cast<std::size_t>(t)) - 0.5 * x.row(static_cast<std::size_t>(t + 5));
    const double truth = q.dot(w);
    const auto cp = compress_problem(x, model, q);
    pred_err = std::max({pred_err, std::abs(qlr_predict(x.values(), z, q).svd_form - truth),
                         std::abs(qlr_predict(cp.points, z, cp.query).svd_form - truth)});
    demo_err_orig = std::max(demo_err_orig, std::abs(qlr_state_demo(x.values(), z, q, std::nullopt, 0).estimate - truth));
    demo_err_comp = std::max(demo_err_comp, std::abs(qlr_state_demo(cp.points, z, cp.query, std::nullopt, 0).estimate - truth));
  }
  const Eigen::MatrixXd g = fixtures::gaussian_matrix(20, 5, 8);
  pred_err = std::max(pred_err, std::abs(qlr_predict(g, g * w.head(5), w.tail(5)).svd_form - w.head(5).dot(w.tail(5))));

  double form_gap = 0.0;
  std::size_t instances = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Eigen::MatrixXd p = fixtures::gaussian_matrix(10 + seed % 5, 2 + seed % 5, 300 + seed);
    if (seed % 3 == 0) p.col(0) *= 1e-3;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(p);
    const auto& s = svd.singularValues();
    if (s(s.size() - 1) / s(0) < 1e-6) continue;
    const Eigen::VectorXd zz = fixtures::gaussian_matrix(p.rows(), 1, 400 + seed).col(0);
    const Eigen::VectorXd q = fixtures::gaussian_matrix(p.cols(), 1, 500 + seed).col(0);
    const auto r = qlr_predict(p, zz, q);
    form_gap = std::max(form_gap, std::abs(r.svd_form - r.normal_form) / std::max(1.0, std::abs(r.svd_form)));
    ++instances;
  }
  Outcome o;
  o.pass = pred_err <= 1e-8 && form_gap <= 1e-8 && demo_err_orig <= 1e-8 && demo_err_comp <= 1e-6;
  o.detail = fmt("prediction_err=%.3g form_gap=%.3g", pred_err, form_gap) +
             " instances=" + std::to_string(instances) +
             fmt(" demo_err_original=%.3g demo_err_compressed=%.3g", demo_err_orig, demo_err_comp);
  return o;
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "qpca_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string data = (dir / "x.csv").string();
  const std::string points = (dir / "p.csv").string();
  const std::string labels = (dir / "z.csv").string();
  cli::write_csv(data, fixtures::rank_k_noisy(16, 8, 3, 0.02, 5));
  const auto cls = fixtures::gaussian_classes(20, 29);
  cli::write_csv(points, cls.points);
  cli::write_csv(labels, cls.labels);

  std::vector<cli::RunConfig> configs;
  for (const char* mode : {"ideal", "quantized", "sampled"}) {
    cli::RunConfig c;
    c.input_path = data;
    c.mode = mode;
    c.seed = 123;
    c.bits = 8;
    configs.push_back(c);
  }
  {
    cli::RunConfig c;
    c.task = "qsvm";
    c.input_path = points;
    c.labels_path = labels;
    c.seed = 7;
    configs.push_back(c);
  }
  {
    cli::RunConfig c;
    c.task = "scaling";
    c.seeds = 5;
    configs.push_back(c);
  }
  std::size_t identical = 0, failed = 0;
  std::string errors;
  for (auto& c : configs) {
    c.output_path = (dir / "a.json").string();
    try {
      const std::string first = cli::serialize(cli::run(c));
      c.output_path = (dir / "b.json").string();
      const std::string second = cli::serialize(cli::run(c));
      identical += first == second;
    } catch (const Error& e) {
      ++failed;
      errors += std::string(" ") + c.task + "/" + c.mode + ":" + std::string(to_string(e.code()));
    }
  }
  std::string tool_detail;
  bool tool_ok = true;
#ifdef QPCA_TOOL_PATH
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  };
  const std::string base = std::string(QPCA_TOOL_PATH) + " --input " + data + " --mode sampled --seed 99 --out ";
  const int r1 = std::system((base + (dir / "t1.json").string()).c_str());
  const int r2 = std::system((base + (dir / "t2.json").string()).c_str());
  tool_ok = r1 == 0 && r2 == 0 && slurp(dir / "t1.json") == slurp(dir / "t2.json");
  tool_detail = tool_ok ? " tool_reports=identical" : " tool_reports=differ";
#endif
  fs::remove_all(dir);
  return {identical == configs.size() && failed == 0 && tool_ok,
          "configs=" + std::to_string(configs.size()) + " identical=" + std::to_string(identical) + tool_detail + errors};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"end_to_end_exactness", end_to_end_exactness},
      {"success_probability", success_probability},
      {"dimension_selection", dimension_selection},
      {"cu_lambda_circuit_equivalence", circuit_equivalence},
      {"swap_test_calibration", swap_calibration},
      {"beta_error_scaling", beta_scaling},
      {"resource_ledger_scalings", ledger_scalings},
      {"pairwise_overlap_preservation", overlap_preservation},
      {"qsvm_compressed_kernel", qsvm},
      {"qlr_prediction", qlr},
      {"report_determinism", determinism},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
