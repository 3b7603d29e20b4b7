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
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qpca/error.hpp"
#include "qpca/pca_oracle.hpp"
#include "qpca/qml_apps.hpp"

namespace qpca::cli {

struct RunConfig {
  std::string input_path;
  std::string labels_path;
  double threshold = kDefaultThreshold;
  std::size_t bits = 6;
  std::string mode = "ideal";
  double eps_beta = 0.01;
  std::uint64_t shots = 100000;
  std::uint64_t seed = 0;
  std::string task = "compress";
  std::vector<std::size_t> subset;
  std::optional<std::size_t> anchor;
  std::optional<std::size_t> point;
  double gamma = kDefaultGamma;
  std::string output_path;
  std::string plot_dir;
  std::vector<double> query;
  // Synthetic and ledger parameters.
  std::size_t rows = 16;
  std::size_t cols = 8;
  std::size_t dim = 4;
  std::optional<double> eps_lambda;
  std::optional<double> success_prob;
  std::uint64_t budget = 0;
  std::size_t seeds = 50;
};

inline const std::vector<std::string>& task_names() {
  static const std::vector<std::string> names{"compress", "qsvm", "qlr", "scaling", "ledger"};
  return names;
}

inline void validate(const RunConfig& c) {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::InvalidInput, m); };
  if (!(c.threshold > 0.0 && c.threshold <= 1.0)) fail("--theta must be in (0, 1]");
  if (c.bits < 1) fail("--bits must be at least 1");
  if (c.bits > 20) fail("--bits above 20 is not supported");
  if (c.mode != "ideal" && c.mode != "quantized" && c.mode != "sampled")
    fail("--mode must be ideal, quantized or sampled");
  if (!(c.eps_beta > 0.0)) fail("--eps-beta must be positive");
  if (c.shots < 1) fail("--shots must be at least 1");
  if (!(c.gamma > 0.0)) fail("--gamma must be positive");
  const auto& names = task_names();
  if (std::find(names.begin(), names.end(), c.task) == names.end())
    fail("--task must be compress, qsvm, qlr, scaling or ledger");
  const bool needs_input = c.task == "compress" || c.task == "qsvm" || c.task == "qlr";
  if (needs_input && c.input_path.empty()) fail("--input is required for task " + c.task);
  if ((c.task == "qsvm" || c.task == "qlr") && c.labels_path.empty())
    fail("--labels is required for task " + c.task);
  if (c.output_path.empty()) fail("--out is required");
  if (!c.subset.empty() && c.point) fail("--subset and --point are mutually exclusive");
  if (c.eps_lambda && !(*c.eps_lambda > 0.0)) fail("--eps-lambda must be positive");
  if (c.success_prob && !(*c.success_prob > 0.0 && *c.success_prob <= 1.0))
    fail("--success-prob must be in (0, 1]");
  if (c.rows < 1 || c.cols < 1 || c.dim < 1) fail("--rows, --cols and --dim must be positive");
  if (c.task == "scaling" && c.dim > std::min(c.rows, c.cols)) fail("--dim exceeds min(--rows, --cols)");
  if (c.seeds < 1) fail("--seeds must be at least 1");
}

inline void add_options(CLI::App& app, RunConfig& c) {
  app.add_option("--input", c.input_path, "data matrix CSV");
  app.add_option("--labels", c.labels_path, "labels or targets, one per line");
  app.add_option("--theta", c.threshold, "variance threshold")->capture_default_str();
  app.add_option("--bits", c.bits, "eigenvalue register width")->capture_default_str();
  app.add_option("--mode", c.mode, "ideal | quantized | sampled")->capture_default_str();
  app.add_option("--eps-beta", c.eps_beta, "anchor coefficient accuracy")->capture_default_str();
  app.add_option("--shots", c.shots, "shots per estimate")->capture_default_str();
  app.add_option("--seed", c.seed, "random seed")->capture_default_str();
  app.add_option("--task", c.task, "compress | qsvm | qlr | scaling | ledger")->capture_default_str();
  app.add_option("--subset", c.subset, "0-based rows to compress")->delimiter(',');
  app.add_option("--anchor", c.anchor, "0-based anchor row");
  app.add_option("--point", c.point, "compress a single 0-based row");
  app.add_option("--gamma", c.gamma, "LS-SVM regularization")->capture_default_str();
  app.add_option("--out", c.output_path, "report path (JSON)");
  app.add_option("--plot-dir", c.plot_dir, "directory for tabular plot data");
  app.add_option("--query", c.query, "regression query point")->delimiter(',');
  app.add_option("--rows", c.rows, "rows for synthetic data and the ledger")->capture_default_str();
  app.add_option("--cols", c.cols, "columns for synthetic data and the ledger")->capture_default_str();
  app.add_option("--dim", c.dim, "rank of synthetic data, d for the ledger")->capture_default_str();
  app.add_option("--eps-lambda", c.eps_lambda, "eigenvalue accuracy for the ledger");
  app.add_option("--success-prob", c.success_prob, "success probability for the ledger");
  app.add_option("--budget", c.budget, "spectrum sampling budget (default: --shots)");
  app.add_option("--seeds", c.seeds, "seeds for the scaling experiment")->capture_default_str();
}

}  // namespace qpca::cli
