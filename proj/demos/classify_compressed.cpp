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

// Trains LS-SVM classifiers on a Gaussian class pair in the original and the
// compressed feature space and compares them, including the overlap demo.

#include <cstdio>

#include "qpca/fixtures.hpp"
#include "qpca/qml_apps.hpp"

int main() {
  const auto cls = qpca::fixtures::gaussian_classes(20, 29);
  const qpca::DataMatrix x(cls.points);
  const auto model = qpca::svd_decompose(x, 0.95);
  const Eigen::MatrixXd y = qpca::project(x, model).values;

  const auto full = qpca::lssvm_train(cls.points, cls.labels);
  const auto small = qpca::lssvm_train(y, cls.labels);
  std::printf("d=%zu of %zu\n", model.selected_dim, x.cols());
  std::printf("accuracy full %.3f  compressed %.3f\n", qpca::lssvm_accuracy(full, cls.points, cls.labels),
              qpca::lssvm_accuracy(small, y, cls.labels));

  std::size_t agree = 0, inconclusive = 0;
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    const auto r = qpca::qsvm_state_demo(small, y.row(i).transpose(), 100000, static_cast<std::uint64_t>(i));
    agree += r.agrees;
    inconclusive += r.inconclusive;
  }
  std::printf("overlap demo agrees on %zu/%ld points (%zu inconclusive)\n", agree, static_cast<long>(y.rows()),
              inconclusive);
  return 0;
}
