// Copyright 2026 The gausstomo Authors
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

#include "gausstomo/mse_theory.hpp"

#include <cmath>

#include "gausstomo/tp_rows.hpp"

namespace gausstomo {

Eigen::VectorXd survival_factors(const Eigen::VectorXd& p_tilde, long long n) {
  Eigen::VectorXd s(p_tilde.size());
  for (Eigen::Index k = 0; k < p_tilde.size(); ++k) {
    const double pt = p_tilde[k];
    if (pt <= 0.0) {
      s[k] = 0.0;
    } else if (pt >= 1.0) {
      s[k] = 1.0;
    } else {
      s[k] = -std::expm1(static_cast<double>(n) * std::log1p(-pt));
    }
  }
  return s;
}

Eigen::MatrixXd y_block(const Eigen::VectorXd& p_tilde, long long n) {
  const Eigen::VectorXd s = survival_factors(p_tilde, n);
  const Eigen::Index k = p_tilde.size();
  Eigen::MatrixXd y = -(s * s.transpose());
  for (Eigen::Index i = 0; i < k; ++i) {
    y(i, i) = p_tilde[i] > 0.0 ? s[i] * s[i] * (1.0 / p_tilde[i] - 1.0) : 0.0;
  }
  return y;
}

MseReport mse_trace(const Eigen::MatrixXd& t,
                    const std::vector<Eigen::VectorXd>& p_tilde_blocks,
                    long long n) {
  const Eigen::Index q = t.rows();
  MseReport rep;
  rep.per_parameter = Eigen::VectorXd::Zero(q);

  Eigen::Index col = 0;
  for (const Eigen::VectorXd& pt : p_tilde_blocks) {
    const Eigen::Index k = pt.size();
    const auto tj = t.middleCols(col, k);
    const Eigen::VectorXd s = survival_factors(pt, n);

    // Y_j = diag(s^2 / p~) - s s^T
    Eigen::VectorXd diag_w(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      diag_w[i] = pt[i] > 0.0 ? s[i] * s[i] / pt[i] : 0.0;
    }
    rep.per_parameter +=
        (tj.array().square().matrix() * diag_w) - (tj * s).array().square().matrix();
    col += k;
  }
  rep.per_parameter /= static_cast<double>(n);
  rep.total = rep.per_parameter.sum();
  return rep;
}

MseReport mse_trace_general(const Eigen::MatrixXd& t,
                            const std::vector<Eigen::MatrixXd>& y_blocks,
                            long long n) {
  MseReport rep;
  rep.per_parameter = Eigen::VectorXd::Zero(t.rows());
  Eigen::Index col = 0;
  for (const Eigen::MatrixXd& y : y_blocks) {
    const auto tj = t.middleCols(col, y.rows());
    rep.per_parameter += (tj * y).cwiseProduct(tj).rowwise().sum();
    col += y.rows();
  }
  rep.per_parameter /= static_cast<double>(n);
  rep.total = rep.per_parameter.sum();
  return rep;
}

namespace {

// Left-pseudoinverse through the Gram matrix, with an IC gate on its
// condition number.
Eigen::MatrixXd pseudoinverse_checked(const Eigen::MatrixXd& v,
                                      double cond_limit) {
  const Eigen::MatrixXd gram = v.transpose() * v;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  const double lmax = es.eigenvalues().maxCoeff();
  const double lmin = es.eigenvalues().minCoeff();
  if (!(lmin > 0.0) || lmax / lmin >= cond_limit) {
    throw NotICError("design matrix is not informationally complete");
  }
  const Eigen::MatrixXd ginv =
      es.eigenvectors() *
      es.eigenvalues().cwiseInverse().asDiagonal() *
      es.eigenvectors().transpose();
  return ginv * v.transpose();
}

}  // namespace

MseReport mse_formula_nontp(const QFunctionParams& truth,
                            const std::vector<Complex>& inputs,
                            const PhaseSpaceGrid& grid, long long n) {
  const int j_count = static_cast<int>(inputs.size());
  const int k_count = grid.bin_count();
  Eigen::MatrixXd v(static_cast<Eigen::Index>(j_count) * k_count, 15);
  std::vector<Eigen::VectorXd> blocks;
  blocks.reserve(inputs.size());
  for (int j = 0; j < j_count; ++j) {
    for (int k = 0; k < k_count; ++k) {
      v.row(static_cast<Eigen::Index>(j) * k_count + k) =
          build_row_v(inputs[j], grid.bin_center(k)).transpose();
    }
    blocks.push_back(bin_probabilities(truth, inputs[j], grid).p_tilde);
  }
  const Eigen::MatrixXd pinv = pseudoinverse_checked(v, 1e10);
  return mse_trace(pinv.topRows(14), blocks, n);
}

Eigen::MatrixXd vtp_rows(const TpParamVector& t,
                         const std::vector<Complex>& inputs,
                         const PhaseSpaceGrid& grid) {
  const TpRowWorkspace ws(t);
  const int j_count = static_cast<int>(inputs.size());
  const int k_count = grid.bin_count();
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(j_count) * k_count, 9);
  for (int j = 0; j < j_count; ++j) {
    const TpRowInputTerms in = ws.input_terms(inputs[j]);
    for (int k = 0; k < k_count; ++k) {
      rows.row(static_cast<Eigen::Index>(j) * k_count + k) =
          ws.row(in, grid.bin_center(k)).transpose();
    }
  }
  return rows;
}

MseReport mse_formula_tp(const TpParamVector& t,
                         const std::vector<Complex>& inputs,
                         const PhaseSpaceGrid& grid, long long n) {
  if (inputs.size() < 3) {
    throw NotICError("trace-preserving model needs at least 3 input states");
  }
  const Eigen::MatrixXd rows = vtp_rows(t, inputs, grid);
  const QFunctionParams truth = tp_complete(t);
  std::vector<Eigen::VectorXd> blocks;
  blocks.reserve(inputs.size());
  for (const Complex& alpha : inputs) {
    blocks.push_back(bin_probabilities(truth, alpha, grid).p_tilde);
  }
  const Eigen::MatrixXd pinv = pseudoinverse_checked(rows, 1e10);
  return mse_trace(pinv, blocks, n);
}

}  // namespace gausstomo
