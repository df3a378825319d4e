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

#include "gausstomo/core_model.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

namespace gausstomo {

namespace {

constexpr Complex kI{0.0, 1.0};

// a2 and c2 determine A3; its inverse exists iff a2^2 - 4|c2|^2 != 0.
double a3_discriminant(double a2, Complex c2) {
  return a2 * a2 - 4.0 * std::norm(c2);
}

Mat2c a3_inverse(double a2, Complex c2) {
  const double disc = a3_discriminant(a2, c2);
  if (a2 <= 0.0 || disc <= 1e-12) {
    throw SingularA3Error("A3 is singular or not positive definite");
  }
  const double det = disc / 4.0;
  Mat2c inv;
  inv << Complex(a2 / 2.0), std::conj(c2), c2, Complex(a2 / 2.0);
  return inv / det;
}

}  // namespace

Mat2c QFunctionParams::block_a1() const {
  Mat2c m;
  m << Complex(a1 / 2.0), -std::conj(c1), -c1, Complex(a1 / 2.0);
  return m;
}

Mat2c QFunctionParams::block_a2() const {
  Mat2c m;
  m << g2, std::conj(g1), g1, std::conj(g2);
  return 0.5 * m;
}

Mat2c QFunctionParams::block_a3() const {
  Mat2c m;
  m << Complex(a2 / 2.0), -std::conj(c2), -c2, Complex(a2 / 2.0);
  return m;
}

Vec2c QFunctionParams::bvec1() const { return Vec2c(b1, std::conj(b1)); }

Vec2c QFunctionParams::bvec2() const { return Vec2c(b2, std::conj(b2)); }

const Mat2c& u0_matrix() {
  static const Mat2c u0 = [] {
    Mat2c m;
    m << Complex(1.0), kI, Complex(1.0), -kI;
    return Mat2c(m / std::sqrt(2.0));
  }();
  return u0;
}

const Mat4c& u_matrix() {
  static const Mat4c u = [] {
    Mat4c m = Mat4c::Zero();
    m.topLeftCorner<2, 2>() = u0_matrix();
    m.bottomRightCorner<2, 2>() = u0_matrix();
    return m;
  }();
  return u;
}

const Mat2c& sigma_x_2c() {
  static const Mat2c sx = [] {
    Mat2c m;
    m << Complex(0.0), Complex(1.0), Complex(1.0), Complex(0.0);
    return m;
  }();
  return sx;
}

std::pair<Mat4c, Vec4c> assemble_matrices(const QFunctionParams& p) {
  Mat4c a = Mat4c::Zero();
  a.topLeftCorner<2, 2>() = p.block_a1();
  a.topRightCorner<2, 2>() = p.block_a2();
  a.bottomLeftCorner<2, 2>() = p.block_a2().adjoint();
  a.bottomRightCorner<2, 2>() = p.block_a3();
  Vec4c b;
  b << p.b1, std::conj(p.b1), p.b2, std::conj(p.b2);
  return {a, b};
}

double log_q_value(const QFunctionParams& p, Complex alpha, Complex z) {
  const auto [a, b] = assemble_matrices(p);
  Vec4c zvec;
  zvec << alpha, std::conj(alpha), z, std::conj(z);
  const Complex quad = zvec.dot(a * zvec);  // Z^dag A Z
  const Complex lin = b.dot(zvec);          // B^dag Z
  return -quad.real() + lin.real() + p.c0;
}

Vec14 vector_from_params(const QFunctionParams& p) {
  Vec14 x;
  x << p.a1, p.a2, p.b1.real(), p.b1.imag(), p.b2.real(), p.b2.imag(),
      p.c1.real(), p.c1.imag(), p.c2.real(), p.c2.imag(), p.g1.real(),
      p.g1.imag(), p.g2.real(), p.g2.imag();
  return x;
}

Vec15 extended_vector_from_params(const QFunctionParams& p) {
  Vec15 x;
  x.head<14>() = vector_from_params(p);
  x[14] = -p.c0;
  return x;
}

QFunctionParams params_from_vector(const Vec14& x, double c0) {
  QFunctionParams p;
  p.a1 = x[0];
  p.a2 = x[1];
  p.b1 = Complex(x[2], x[3]);
  p.b2 = Complex(x[4], x[5]);
  p.c1 = Complex(x[6], x[7]);
  p.c2 = Complex(x[8], x[9]);
  p.g1 = Complex(x[10], x[11]);
  p.g2 = Complex(x[12], x[13]);
  p.c0 = c0;
  return p;
}

QFunctionParams params_from_extended_vector(const Vec15& x) {
  return params_from_vector(x.head<14>(), -x[14]);
}

Vec15 build_row_v(Complex alpha, Complex z) {
  const Complex a2m = alpha * alpha;
  const Complex z2m = z * z;
  const Complex azc = alpha * std::conj(z);          // pairs with g2
  const Complex aczc = std::conj(alpha * z);         // pairs with g1
  Vec15 v;
  v << std::norm(alpha), std::norm(z),               // a1, a2
      -2.0 * alpha.real(), -2.0 * alpha.imag(),      // b1
      -2.0 * z.real(), -2.0 * z.imag(),              // b2
      -2.0 * a2m.real(), 2.0 * a2m.imag(),           // c1
      -2.0 * z2m.real(), 2.0 * z2m.imag(),           // c2
      2.0 * aczc.real(), 2.0 * aczc.imag(),          // g1
      2.0 * azc.real(), 2.0 * azc.imag(),            // g2
      1.0;                                           // constant slot (-c0)
  return v;
}

TpParamVector tp_vector_from_params(const QFunctionParams& p) {
  TpParamVector t;
  t << p.a2, p.b2.real(), p.b2.imag(), p.c2.real(), p.c2.imag(), p.g1.real(),
      p.g1.imag(), p.g2.real(), p.g2.imag();
  return t;
}

QFunctionParams tp_complete(const TpParamVector& t) {
  QFunctionParams p;
  p.a2 = t[0];
  p.b2 = Complex(t[1], t[2]);
  p.c2 = Complex(t[3], t[4]);
  p.g1 = Complex(t[5], t[6]);
  p.g2 = Complex(t[7], t[8]);

  const Mat2c a3inv = a3_inverse(p.a2, p.c2);
  const Mat2c a2blk = p.block_a2();
  const Vec2c b2v = p.bvec2();

  const Mat2c a1blk = a2blk * a3inv * a2blk.adjoint();
  p.a1 = 2.0 * a1blk(0, 0).real();
  p.c1 = -a1blk(1, 0);

  const Vec2c b1v = a2blk * (a3inv * b2v);
  p.b1 = b1v(0);

  const double det_a3 = a3_discriminant(p.a2, p.c2) / 4.0;
  const Complex quad = b2v.dot(a3inv * b2v);
  p.c0 = std::log(2.0 * std::sqrt(det_a3)) - 0.25 * quad.real();
  return p;
}

TpResidual check_tp(const QFunctionParams& p) {
  const Mat2c a3inv = a3_inverse(p.a2, p.c2);
  const Mat2c a2blk = p.block_a2();
  const Vec2c b2v = p.bvec2();

  TpResidual r;
  r.w_norm = (p.block_a1() - a2blk * a3inv * a2blk.adjoint()).norm();
  r.y_norm = (p.bvec1() - a2blk * (a3inv * b2v)).norm();
  const double det_a3 = a3_discriminant(p.a2, p.c2) / 4.0;
  const Complex quad = b2v.dot(a3inv * b2v);
  r.w0 = p.c0 - std::log(2.0 * std::sqrt(det_a3)) + 0.25 * quad.real();
  return r;
}

PositivityReport positivity_status(const QFunctionParams& p,
                                   PositivityMode mode) {
  PositivityReport rep;
  rep.mode = mode;
  if (mode == PositivityMode::Cp) {
    const auto [a, b] = assemble_matrices(p);
    Eigen::SelfAdjointEigenSolver<Mat4c> es(a, Eigen::EigenvaluesOnly);
    rep.value = es.eigenvalues().minCoeff();
  } else {
    rep.value = a3_discriminant(p.a2, p.c2);
  }
  rep.pass = rep.value >= -1e-10;
  return rep;
}

QFunctionParams project_physical(const QFunctionParams& p) {
  const auto [a, b] = assemble_matrices(p);
  const Mat4c& u = u_matrix();
  const Mat4c aprime_c = u.adjoint() * a * u;
  // Imaginary residue of the real representation is rounding noise for any
  // structurally assembled A; symmetrize and drop it.
  Eigen::Matrix4d aprime =
      0.5 * (aprime_c.real() + aprime_c.real().transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(aprime);
  const Eigen::Vector4d d = es.eigenvalues();
  Eigen::Vector4d dplus = d.cwiseMax(0.0);
  const double tr = d.sum();
  const double trplus = dplus.sum();
  if (trplus <= 0.0) {
    throw AllNegativeSpectrumError("projection undefined: no positive part");
  }

  if ((d.array() >= 0.0).all()) {
    return p;  // already positive
  }

  const Eigen::Matrix4d aphys_real = (tr / trplus) *
                                     (es.eigenvectors() * dplus.asDiagonal() *
                                      es.eigenvectors().transpose());
  const Mat4c aphys = u * aphys_real * u.adjoint();

  QFunctionParams out = p;
  out.a1 = 2.0 * aphys(0, 0).real();
  out.c1 = -aphys(1, 0);
  out.a2 = 2.0 * aphys(2, 2).real();
  out.c2 = -aphys(3, 2);
  out.g2 = 2.0 * aphys(0, 2);
  out.g1 = 2.0 * aphys(1, 2);
  return out;
}

QFunctionParams beam_splitter_process(double theta) {
  QFunctionParams p;
  const double c = std::cos(theta);
  p.a1 = c * c;
  p.a2 = 1.0;
  p.g1 = Complex(-c, 0.0);
  return p;
}

namespace {

nlohmann::json complex_to_json(Complex v) {
  return nlohmann::json::array({v.real(), v.imag()});
}

Complex complex_from_json(const nlohmann::json& j) {
  if (j.is_number()) {
    return Complex(j.get<double>(), 0.0);
  }
  return Complex(j.at(0).get<double>(), j.at(1).get<double>());
}

}  // namespace

nlohmann::json params_to_json(const QFunctionParams& p) {
  return nlohmann::json{
      {"a1", p.a1},          {"a2", p.a2},
      {"c1", complex_to_json(p.c1)}, {"c2", complex_to_json(p.c2)},
      {"g1", complex_to_json(p.g1)}, {"g2", complex_to_json(p.g2)},
      {"b1", complex_to_json(p.b1)}, {"b2", complex_to_json(p.b2)},
      {"c0", p.c0}};
}

QFunctionParams params_from_json(const nlohmann::json& j) {
  QFunctionParams p;
  p.a1 = j.at("a1").get<double>();
  p.a2 = j.at("a2").get<double>();
  p.c1 = complex_from_json(j.at("c1"));
  p.c2 = complex_from_json(j.at("c2"));
  p.g1 = complex_from_json(j.at("g1"));
  p.g2 = complex_from_json(j.at("g2"));
  p.b1 = complex_from_json(j.at("b1"));
  p.b2 = complex_from_json(j.at("b2"));
  p.c0 = j.at("c0").get<double>();
  return p;
}

}  // namespace gausstomo
