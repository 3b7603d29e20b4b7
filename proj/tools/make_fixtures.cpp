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

// Writes the bundled CSV datasets into the given directory.

#include <filesystem>
#include <iostream>
#include <string>

#include "qpca/cli/csv.hpp"
#include "qpca/fixtures.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: " << argv[0] << " <output-dir>\n";
    return 2;
  }
  const std::filesystem::path dir = argv[1];
  std::filesystem::create_directories(dir);
  using qpca::cli::write_csv;
  namespace fx = qpca::fixtures;
  try {
    write_csv((dir / "identity2.csv").string(), Eigen::MatrixXd::Identity(2, 2), "2x2 identity");
    write_csv((dir / "rank2_16x8.csv").string(), fx::rank_k(16, 8, 2, 3), "rank 2, 16x8, seed 3");
    write_csv((dir / "rank2_noisy_16x8.csv").string(), fx::rank_k_noisy(16, 8, 2, 0.01, 3),
              "rank 2 plus 1% noise, 16x8, seed 3");
    const auto classes = fx::gaussian_classes(20, 29);
    write_csv((dir / "gaussian_classes.csv").string(), classes.points, "two Gaussian classes, seed 29");
    write_csv((dir / "gaussian_labels.csv").string(), classes.labels);
    const Eigen::MatrixXd design = fx::rank_k(12, 6, 3, 17);
    Eigen::VectorXd w(6);
    w << 1.0, -2.0, 0.5, 3.0, 0.0, -1.0;
    write_csv((dir / "linear_12x6.csv").string(), design, "rank 3, 12x6, seed 17");
    write_csv((dir / "linear_targets.csv").string(), design * w);
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
  return 0;
}
