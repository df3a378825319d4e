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

#include "gausstomo/common.hpp"
#include "gausstomo/core_model.hpp"

namespace gausstomo {

// Column-stacked parametrization maps of the trace-preserving blocks:
//   vec(dA3) = E1 (da2, dc2r, dc2i)^T
//   vec(dA2) = E2 (dg1r, dg1i, dg2r, dg2i)^T
//   db2      = E3 (db2r, db2i)^T
// with vec stacking (m00, m10, m01, m11).
const Eigen::Matrix<Complex, 4, 3>& e1_matrix();
const Eigen::Matrix<Complex, 4, 4>& e2_matrix();
const Eigen::Matrix<Complex, 2, 2>& e3_matrix();

// Per-input-state pieces of the log p gradient that do not depend on the
// output bin.
struct TpRowInputTerms {
  Vec2c abar;   // (alpha, alpha*)
  Mat2c cterm;  // bin-independent part of the A3 gradient matrix
  Vec2c d;      // hb - 2 w, multiplies abar^dag in the A2 gradient
  Vec2c m;      // w - hb/2, bin-independent part of the b2 gradient
};

// Gradient of log p_jk with respect to the 9 trace-preserving parameters,
// evaluated from the variational matrices
//   dlog p = Tr{M1^dag dA3} + Tr{W dA2} + M3^dag db2,
//   M1^dag = -zb zb^dag + w w^dag - w hb^dag + (1/4) hb hb^dag + A3^-1/2,
//   W      = (hb - 2w) ab^dag - 2 zb ab^dag,
//   M3     = zb + w - hb/2,
// with w = A3^-1 A2^dag ab, hb = A3^-1 b2, ab = (alpha, alpha*)^T and
// zb = (z, z*)^T. Rows come out in the order
// (a2, b2r, b2i, c2r, c2i, g1r, g1i, g2r, g2i).
class TpRowWorkspace {
 public:
  explicit TpRowWorkspace(const TpParamVector& t);

  TpRowInputTerms input_terms(Complex alpha) const;
  Vec9 row(const TpRowInputTerms& in, Complex z) const;

  const QFunctionParams& params() const { return params_; }

 private:
  QFunctionParams params_;
  Mat2c a3inv_;
  Mat2c a2blk_;
  Vec2c hb_;  // A3^-1 b2
  Mat2c p_a3_[3];
  Mat2c p_a2_[4];
};

}  // namespace gausstomo
