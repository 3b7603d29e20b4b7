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
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qpca/common.hpp"
#include "qpca/data_matrix.hpp"
#include "qpca/error.hpp"
#include "qpca/pca_oracle.hpp"
#include "qpca/state_vector.hpp"
#include "qpca/sv_engine.hpp"

namespace qpca {

inline constexpr double kDefaultGamma = 1.0;
inline constexpr double kRankCutoff = 1e-10;

struct LabeledDataset {
  Eigen::MatrixXd points;
  Eigen::VectorXd labels;
  double gamma = kDefaultGamma;

  std::size_t rows() const { return static_cast<std::size_t>(points.rows()); }

  void validate(bool classification) const {
    if (points.rows() < 1 || points.cols() < 1)
      throw Error(ErrorCode::InvalidInput, "dataset must have at least one point");
    if (labels.size() != points.rows())
      throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(points.rows()) +
                                                    " labels, got " + std::to_string(labels.size()));
    if (!points.allFinite() || !labels.allFinite())
      throw Error(ErrorCode::InvalidInput, "dataset has non-finite entries");
    if (classification)
      for (Eigen::Index i = 0; i < labels.size(); ++i)
        if (labels(i) != 1.0 && labels(i) != -1.0)
          throw Error(ErrorCode::InvalidInput, "class labels must be +1 or -1");
  }
};

// ---------------------------------------------------------------------------
// Least-squares SVM

struct LssvmModel {
  double bias = 0.0;            // a
  Eigen::VectorXd coefficients; // b
  Eigen::MatrixXd train_points; // rows the kernel was built from (X or Y)
  double residual = 0.0;        // relative residual of the linear system
};

/// [[0, 1^T], [1, K + gamma I]] with K = P P^T.
inline Eigen::MatrixXd lssvm_system(const Eigen::MatrixXd& points, double gamma) {
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(n + 1, n + 1);
  f.block(0, 1, 1, n).setOnes();
  f.block(1, 0, n, 1).setOnes();
  f.bottomRightCorner(n, n) = points * points.transpose();
  f.bottomRightCorner(n, n).diagonal().array() += gamma;
  return f;
}

/// Dense solve of the LS-SVM system on the given rows (original or compressed).
inline LssvmModel lssvm_train(const Eigen::MatrixXd& points, const Eigen::VectorXd& labels,
                              double gamma = kDefaultGamma) {
  LabeledDataset{points, labels, gamma}.validate(true);
  const Eigen::MatrixXd f = lssvm_system(points, gamma);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(f.rows());
  rhs.tail(labels.size()) = labels;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(f);
  if (!lu.isInvertible())
    throw Error(ErrorCode::SingularSystem,
                "LS-SVM system is singular for gamma = " + std::to_string(gamma) + "; try a larger gamma");
  const Eigen::VectorXd sol = lu.solve(rhs);
  LssvmModel m;
  m.bias = sol(0);
  m.coefficients = sol.tail(labels.size());
  m.train_points = points;
  m.residual = (f * sol - rhs).norm() / rhs.norm();
  return m;
}

inline LssvmModel lssvm_train(const LabeledDataset& data) {
  return lssvm_train(data.points, data.labels, data.gamma);
}

inline double lssvm_decision(const LssvmModel& model, const Eigen::VectorXd& query) {
  if (query.size() != model.train_points.cols())
    throw Error(ErrorCode::DimensionMismatch, "query has " + std::to_string(query.size()) +
                                                  " features, model expects " +
                                                  std::to_string(model.train_points.cols()));
  return model.coefficients.dot(model.train_points * query) + model.bias;
}

/// sgn of the decision value, with sgn(0) = +1.
inline int lssvm_classify(const LssvmModel& model, const Eigen::VectorXd& query) {
  return lssvm_decision(model, query) >= 0.0 ? 1 : -1;
}

inline double lssvm_accuracy(const LssvmModel& model, const Eigen::MatrixXd& points,
                             const Eigen::VectorXd& labels) {
  std::size_t hits = 0;
  for (Eigen::Index i = 0; i < points.rows(); ++i)
    if (lssvm_classify(model, points.row(i).transpose()) == static_cast<int>(labels(i))) ++hits;
  return static_cast<double>(hits) / static_cast<double>(points.rows());
}

struct QuantumDecision {
  OverlapEstimate overlap;
  double decision_value = 0.0;  // classical value the overlap is proportional to
  double scale = 0.0;           // decision_value = scale * overlap
  int predicted = 1;
  int classical = 1;
  bool inconclusive = false;
  bool agrees = true;
};

/**
 * |psi1> ~ a|0>|0> + sum_j b_j |j> x_j and |psi2> ~ |0>|0> + sum_j |j> x0; the
 * sign of Re<psi1|psi2> is the predicted class. With `shots` the overlap is
 * sampled and flagged inconclusive when |estimate| <= 3 standard errors.
 */
inline QuantumDecision qsvm_state_demo(const LssvmModel& model, const Eigen::VectorXd& query,
                                       std::optional<std::uint64_t> shots, std::uint64_t seed) {
  const Eigen::MatrixXd& p = model.train_points;
  if (query.size() != p.cols())
    throw Error(ErrorCode::DimensionMismatch, "query does not match the training features");
  const std::size_t n = static_cast<std::size_t>(p.rows());
  const std::size_t dim = static_cast<std::size_t>(p.cols());
  const std::vector<Register> layout{{std::string(reg::kIndex), ceil_log2(n + 1)},
                                     {std::string(reg::kFeature), ceil_log2(dim)}};
  StateVector psi1(layout), psi2(layout);
  psi1.set_amplitude({{std::string(reg::kIndex), 0}, {std::string(reg::kFeature), 0}}, model.bias);
  psi2.set_amplitude({{std::string(reg::kIndex), 0}, {std::string(reg::kFeature), 0}}, 1.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < dim; ++k) {
      const BasisState at{{std::string(reg::kIndex), j + 1}, {std::string(reg::kFeature), k}};
      psi1.set_amplitude(at, model.coefficients(static_cast<Eigen::Index>(j)) *
                                 p(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)));
      psi2.set_amplitude(at, query(static_cast<Eigen::Index>(k)));
    }
  const double n1 = std::sqrt(psi1.norm_squared());
  const double n2 = std::sqrt(psi2.norm_squared());
  if (!(n1 > 0.0)) throw Error(ErrorCode::InvalidInput, "model state has zero norm");
  psi1.normalize();
  psi2.normalize();

  QuantumDecision r;
  r.overlap = interference_test(psi1, psi2, shots, seed);
  r.scale = n1 * n2;
  r.decision_value = lssvm_decision(model, query);
  r.classical = r.decision_value >= 0.0 ? 1 : -1;
  r.predicted = r.overlap.estimate >= 0.0 ? 1 : -1;
  r.inconclusive = r.overlap.sampled && std::abs(r.overlap.estimate) <= 3.0 * r.overlap.std_error;
  r.agrees = r.predicted == r.classical;
  return r;
}

// ---------------------------------------------------------------------------
// Linear regression

struct RegressionPrediction {
  double svd_form = 0.0;     // sum_j sigma_j^-1 x0^T v_j u_j^T z
  double normal_form = 0.0;  // x0^T (P^T P)^+ P^T z
  std::size_t rank = 0;
  bool consistent = true;    // the two forms agree to 1e-8 (relative to max(1, |value|))
};

namespace detail {

inline std::size_t numerical_rank(const Eigen::VectorXd& sigma) {
  if (sigma.size() == 0 || !(sigma(0) > 0.0)) return 0;
  std::size_t r = 0;
  for (Eigen::Index k = 0; k < sigma.size(); ++k)
    if (sigma(k) > kRankCutoff * sigma(0)) ++r;
  return r;
}

}  // namespace detail

/// Least-squares prediction on the given rows; pseudoinverse on the rank support.
inline RegressionPrediction qlr_predict(const Eigen::MatrixXd& points, const Eigen::VectorXd& targets,
                                        const Eigen::VectorXd& query) {
  LabeledDataset{points, targets}.validate(false);
  if (query.size() != points.cols())
    throw Error(ErrorCode::DimensionMismatch, "query does not match the training features");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(points, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  const std::size_t rank = detail::numerical_rank(sigma);
  if (rank == 0) throw Error(ErrorCode::DegenerateRegression, "design matrix has no nonzero singular value");

  RegressionPrediction r;
  r.rank = rank;
  for (std::size_t j = 0; j < rank; ++j) {
    const auto k = static_cast<Eigen::Index>(j);
    r.svd_form += query.dot(svd.matrixV().col(k)) * svd.matrixU().col(k).dot(targets) / sigma(k);
  }

  // Normal equations on the same support: top-rank eigenpairs of P^T P.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(points.transpose() * points);
  if (eig.info() != Eigen::Success)
    throw Error(ErrorCode::NumericalFailure, "eigendecomposition of the normal matrix failed");
  const Eigen::VectorXd pz = points.transpose() * targets;
  const Eigen::Index cols = points.cols();
  for (std::size_t j = 0; j < rank; ++j) {
    const Eigen::Index k = cols - 1 - static_cast<Eigen::Index>(j);
    const Eigen::VectorXd v = eig.eigenvectors().col(k);
    r.normal_form += query.dot(v) * v.dot(pz) / eig.eigenvalues()(k);
  }
  r.consistent = std::abs(r.svd_form - r.normal_form) <= 1e-8 * std::max(1.0, std::abs(r.svd_form));
  return r;
}

struct RegressionDemo {
  OverlapEstimate overlap;
  double factor = 0.0;       // z0 = factor * <phi1|phi2>
  double estimate = 0.0;     // factor * overlap estimate
  double prediction = 0.0;   // qlr_predict SVD form
  bool inconclusive = false;
};

/**
 * |phi1> ~ sum_j sigma_j^-1 |v_j>|u_j> and |phi2> = |x0>|z>, built after
 * scaling X, z and x0 to unit norm. The overlap times
 * sqrt(sum_j sigma_j^-2) ||x0|| ||z|| / ||X||_F recovers z0.
 */
inline RegressionDemo qlr_state_demo(const Eigen::MatrixXd& points, const Eigen::VectorXd& targets,
                                     const Eigen::VectorXd& query, std::optional<std::uint64_t> shots,
                                     std::uint64_t seed) {
  const RegressionPrediction pred = qlr_predict(points, targets, query);
  const double xf = points.norm();
  const double zn = targets.norm();
  const double qn = query.norm();
  if (!(zn > 0.0) || !(qn > 0.0))
    throw Error(ErrorCode::InvalidInput, "targets and query must be nonzero");
  const Eigen::MatrixXd scaled = points / xf;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(scaled, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sigma = svd.singularValues();

  const auto n = static_cast<std::size_t>(points.rows());
  const auto dim = static_cast<std::size_t>(points.cols());
  const std::vector<Register> layout{{std::string(reg::kFeature), ceil_log2(dim)},
                                     {std::string(reg::kRow), ceil_log2(n)}};
  Eigen::MatrixXd phi1 = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < pred.rank; ++j) {
    const auto k = static_cast<Eigen::Index>(j);
    phi1 += svd.matrixV().col(k) * svd.matrixU().col(k).transpose() / sigma(k);
  }
  const double n1 = phi1.norm();
  const Eigen::MatrixXd phi2 = (query / qn) * (targets / zn).transpose();

  StateVector a(layout), b(layout);
  for (std::size_t k = 0; k < dim; ++k)
    for (std::size_t i = 0; i < n; ++i) {
      const BasisState at{{std::string(reg::kFeature), k}, {std::string(reg::kRow), i}};
      const auto kk = static_cast<Eigen::Index>(k), ii = static_cast<Eigen::Index>(i);
      a.set_amplitude(at, phi1(kk, ii) / n1);
      b.set_amplitude(at, phi2(kk, ii));
    }

  RegressionDemo r;
  r.overlap = interference_test(a, b, shots, seed);
  r.factor = n1 * qn * zn / xf;
  r.estimate = r.factor * r.overlap.estimate;
  r.prediction = pred.svd_form;
  r.inconclusive = r.overlap.sampled && std::abs(r.overlap.estimate) <= 3.0 * r.overlap.std_error;
  return r;
}

/// Rows of X expressed in the top-d principal basis, plus the query mapped the same way.
struct CompressedProblem {
  Eigen::MatrixXd points;
  Eigen::VectorXd query;
};

inline CompressedProblem compress_problem(const DataMatrix& data, const SpectralModel& model,
                                          const Eigen::VectorXd& query) {
  return {project(data, model).values, project_point(query, model)};
}

}  // namespace qpca
