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

#include "gausstomo/tp_rows.hpp"

namespace gausstomo {

namespace {

constexpr Complex kI{0.0, 1.0};

Mat2c unvec(const Eigen::Matrix<Complex, 4, 1>& col) {
  Mat2c m;
  m(0, 0) = col(0);
  m(1, 0) = col(1);
  m(0, 1) = col(2);
  m(1, 1) = col(3);
  return m;
}

double real_trace_product(const Mat2c& m, const Mat2c& p) {
  // Re Tr{M P}
  return (m(0, 0) * p(0, 0) + m(0, 1) * p(1, 0) + m(1, 0) * p(0, 1) +
          m(1, 1) * p(1, 1))
      .real();
}

}  // namespace

const Eigen::Matrix<Complex, 4, 3>& e1_matrix() {
  static const Eigen::Matrix<Complex, 4, 3> e1 = [] {
    Eigen::Matrix<Complex, 4, 3> m;
    m << Complex(0.5), Complex(0.0), Complex(0.0),
        Complex(0.0), Complex(-1.0), -kI,
        Complex(0.0), Complex(-1.0), kI,
        Complex(0.5), Complex(0.0), Complex(0.0);
    return m;
  }();
  return e1;
}

const Eigen::Matrix<Complex, 4, 4>& e2_matrix() {
  static const Eigen::Matrix<Complex, 4, 4> e2 = [] {
    Eigen::Matrix<Complex, 4, 4> m;
    m << Complex(0.0), Complex(0.0), Complex(1.0), kI,
        Complex(1.0), kI, Complex(0.0), Complex(0.0),
        Complex(1.0), -kI, Complex(0.0), Complex(0.0),
        Complex(0.0), Complex(0.0), Complex(1.0), -kI;
    return Eigen::Matrix<Complex, 4, 4>(0.5 * m);
  }();
  return e2;
}

const Eigen::Matrix<Complex, 2, 2>& e3_matrix() {
  static const Eigen::Matrix<Complex, 2, 2> e3 = [] {
    Eigen::Matrix<Complex, 2, 2> m;
    m << Complex(1.0), kI, Complex(1.0), -kI;
    return m;
  }();
  return e3;
}

TpRowWorkspace::TpRowWorkspace(const TpParamVector& t)
    : params_(tp_complete(t)) {
  const double det = params_.a2 * params_.a2 / 4.0 - std::norm(params_.c2);
  Mat2c adj;
  adj << Complex(params_.a2 / 2.0), std::conj(params_.c2), params_.c2,
      Complex(params_.a2 / 2.0);
  a3inv_ = adj / det;
  a2blk_ = params_.block_a2();
  hb_ = a3inv_ * params_.bvec2();
  for (int i = 0; i < 3; ++i) {
    p_a3_[i] = unvec(e1_matrix().col(i));
  }
  for (int i = 0; i < 4; ++i) {
    p_a2_[i] = unvec(e2_matrix().col(i));
  }
}

TpRowInputTerms TpRowWorkspace::input_terms(Complex alpha) const {
  TpRowInputTerms in;
  in.abar = Vec2c(alpha, std::conj(alpha));
  const Vec2c w = a3inv_ * (a2blk_.adjoint() * in.abar);
  in.cterm = w * w.adjoint() - w * hb_.adjoint() +
             0.25 * (hb_ * hb_.adjoint()) + 0.5 * a3inv_;
  in.d = hb_ - 2.0 * w;
  in.m = w - 0.5 * hb_;
  return in;
}

Vec9 TpRowWorkspace::row(const TpRowInputTerms& in, Complex z) const {
  const Vec2c zbar(z, std::conj(z));

  const Mat2c m1dag = in.cterm - zbar * zbar.adjoint();
  const Mat2c w = (in.d - 2.0 * zbar) * in.abar.adjoint();
  const Vec2c m3 = zbar + in.m;

  Vec9 r;
  r[0] = real_trace_product(m1dag, p_a3_[0]);  // a2
  r[3] = real_trace_product(m1dag, p_a3_[1]);  // c2r
  r[4] = real_trace_product(m1dag, p_a3_[2]);  // c2i
  r[5] = real_trace_product(w, p_a2_[0]);      // g1r
  r[6] = real_trace_product(w, p_a2_[1]);      // g1i
  r[7] = real_trace_product(w, p_a2_[2]);      // g2r
  r[8] = real_trace_product(w, p_a2_[3]);      // g2i
  const Vec2c e3c0 = e3_matrix().col(0);
  const Vec2c e3c1 = e3_matrix().col(1);
  r[1] = (m3.dot(e3c0)).real();  // b2r
  r[2] = (m3.dot(e3c1)).real();  // b2i
  return r;
}

}  // namespace gausstomo
