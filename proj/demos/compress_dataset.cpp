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

// Compresses a seeded rank-3 dataset through the simulated pipeline and
// prints the spectrum, anchor coefficients and output fidelity.

#include <cstdio>

#include "qpca/fixtures.hpp"
#include "qpca/qpca_pipeline.hpp"

int main() {
  const qpca::DataMatrix x(qpca::fixtures::rank_k_noisy(32, 16, 3, 0.01, 7));
  qpca::PipelineOptions opt;
  opt.mode = qpca::ExecutionMode::sampled;
  opt.seed = 7;
  opt.anchor = qpca::best_anchor(x, opt.threshold);
  try {
    const auto run = qpca::run_pipeline(x, opt);
    const auto& r = run.result.report;
    std::printf("N=%zu D=%zu d=%zu variance=%.6f\n", x.rows(), x.cols(), r.dim, r.variance_captured);
    for (const auto& c : run.spectrum.components)
      std::printf("  label %zu  lambda %.6f  freq %.4f\n", c.label, c.eigenvalue, c.frequency);
    for (std::size_t j = 0; j < run.profile.beta.size(); ++j)
      std::printf("  beta_%zu %.6f  est %.6f\n", j + 1, run.profile.beta[j], run.profile.beta_hat[j]);
    std::printf("fidelity %.9f  success %.6f  repetitions %zu\n", r.fidelity, r.success_probability,
                static_cast<std::size_t>(r.amplification_repetitions));
  } catch (const qpca::Error& e) {
    std::fprintf(stderr, "%s: %s\n", std::string(qpca::to_string(e.code())).c_str(), e.what());
    return qpca::exit_status(e.code());
  }
  return 0;
}
