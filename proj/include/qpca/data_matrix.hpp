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

#include <cmath>
#include <string>

#include "qpca/common.hpp"
#include "qpca/error.hpp"

namespace qpca {

/// N x D real dataset; row i is data point x_i. Rows are nonzero and finite.
class DataMatrix {
 public:
  DataMatrix() = default;

  explicit DataMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
    if (values_.rows() < 1 || values_.cols() < 1)
      throw Error(ErrorCode::InvalidInput, "data matrix must have at least one row and one column");
    if (!values_.allFinite())
      throw Error(ErrorCode::InvalidInput, "data matrix has non-finite entries");
    for (Eigen::Index i = 0; i < values_.rows(); ++i)
      if (values_.row(i).squaredNorm() == 0.0)
        throw Error(ErrorCode::InvalidInput, "row " + std::to_string(i) + " is all zero");
  }

  std::size_t rows() const { return static_cast<std::size_t>(values_.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(values_.cols()); }
  const Eigen::MatrixXd& values() const { return values_; }
  double operator()(std::size_t i, std::size_t j) const {
    return values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  Eigen::VectorXd row(std::size_t i) const {
    return values_.row(static_cast<Eigen::Index>(i)).transpose();
  }
  double row_norm(std::size_t i) const { return values_.row(static_cast<Eigen::Index>(i)).norm(); }
  double frobenius_norm() const { return values_.norm(); }

 private:
  Eigen::MatrixXd values_;
};

}  // namespace qpca
