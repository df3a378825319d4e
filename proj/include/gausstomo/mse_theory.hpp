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

#pragma once

#include <vector>

#include "gausstomo/common.hpp"
#include "gausstomo/core_model.hpp"
#include "gausstomo/phase_space.hpp"

namespace gausstomo {

// Asymptotic covariance block of the negative-log frequencies of one input
// state under multinomial sampling with zero-count rows discarded:
//   Y_kk' = s_k s_k' (delta_kk' / p~_k - 1),  s_k = 1 - (1 - p~_k)^N.
// Rows and columns of vanishing p~ go to zero (the N^2 p~ limit).
Eigen::MatrixXd y_block(const Eigen::VectorXd& p_tilde, long long n);

// Survival factors s_k, computed as -expm1(N log1p(-p~)) for stability.
Eigen::VectorXd survival_factors(const Eigen::VectorXd& p_tilde, long long n);

struct MseReport {
  double total = 0.0;
  Eigen::VectorXd per_parameter;
};

// (1/N) Tr{T^T T Y} for a pseudoinverse-like T (q x JK) against the
// block-diagonal Y of the given per-input normalized probabilities,
// exploiting Y = diag(s^2/p~) - s s^T per block. Returns per-parameter
// contributions on the diagonal.
MseReport mse_trace(const Eigen::MatrixXd& t,
                    const std::vector<Eigen::VectorXd>& p_tilde_blocks,
                    long long n);

// Same contraction against explicitly supplied Y blocks (test hook).
MseReport mse_trace_general(const Eigen::MatrixXd& t,
                            const std::vector<Eigen::MatrixXd>& y_blocks,
                            long long n);

// Asymptotic mean squared error of logarithmic inversion over the 14
// recoverable parameters: (1/N) Tr{V~^-dag V~^- Y} with V~^- the first 14
// rows of the left-pseudoinverse of the JK x 15 design matrix.
MseReport mse_formula_nontp(const QFunctionParams& truth,
                            const std::vector<Complex>& inputs,
                            const PhaseSpaceGrid& grid, long long n);

// Rows of the linearized trace-preserving design: row (j,k) is the gradient
// of log p_jk with respect to the 9 parameters (a2, b2r, b2i, c2r, c2i,
// g1r, g1i, g2r, g2i). The rows are contractions of the per-point gradient
// matrices against the block parametrizations of A3, A2 and b2; each row is
// validated against finite differences in the tests.
Eigen::MatrixXd vtp_rows(const TpParamVector& t,
                         const std::vector<Complex>& inputs,
                         const PhaseSpaceGrid& grid);

// Asymptotic mean squared error of the trace-preserving ML estimator over
// the 9 parameters: (1/N) Tr{Vtp^-dag Vtp^- Y}. Requires at least three
// input states; fewer leave the model unidentifiable.
MseReport mse_formula_tp(const TpParamVector& t,
                         const std::vector<Complex>& inputs,
                         const PhaseSpaceGrid& grid, long long n);

}  // namespace gausstomo
