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

#include "gausstomo/phase_space.hpp"

#include <cmath>
#include <ostream>

#include <nlohmann/json.hpp>

namespace gausstomo {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Output-plane exponent at fixed input amplitude, reduced to real form:
//   log Q_out(z) = c - rho^T lambda rho + l^T rho,  rho = (z_r, z_i).
struct OutputExponent {
  double c = 0.0;
  Eigen::Matrix2d lambda;
  Eigen::Vector2d l;

  double value(Complex z) const {
    const Eigen::Vector2d rho(z.real(), z.imag());
    return c - rho.dot(lambda * rho) + l.dot(rho);
  }
};

OutputExponent output_exponent(const QFunctionParams& p, Complex alpha) {
  Vec2c abar(alpha, std::conj(alpha));

  Mat2c t;  // z_bar = T rho
  t << Complex(1.0), Complex(0.0, 1.0), Complex(1.0), Complex(0.0, -1.0);

  OutputExponent e;
  e.lambda = (t.adjoint() * p.block_a3() * t).real();
  e.lambda = 0.5 * (e.lambda + e.lambda.transpose()).eval();

  const Vec2c eta = 0.5 * p.bvec2() - p.block_a2().adjoint() * abar;
  e.l = 4.0 * Eigen::Vector2d(eta(0).real(), eta(0).imag());

  const Complex quad = abar.dot(p.block_a1() * abar);
  const Complex lin = p.bvec1().dot(abar);
  e.c = -quad.real() + lin.real() + p.c0;
  return e;
}

void require_normalizable(const OutputExponent& e) {
  if (e.lambda(0, 0) <= 0.0 || e.lambda.determinant() <= 0.0) {
    throw NonNormalizableError("output Q precision matrix is not positive");
  }
}

}  // namespace

PhaseSpaceGrid::PhaseSpaceGrid(int bins_per_axis, double extent,
                               Complex center)
    : m_(bins_per_axis), extent_(extent), center_(center) {
  if (m_ < 2) {
    throw std::invalid_argument("grid needs at least 2 bins per axis");
  }
  if (!(extent_ > 0.0)) {
    throw std::invalid_argument("grid extent must be positive");
  }
  centers_.reserve(static_cast<size_t>(m_) * m_);
  const double w = bin_width();
  for (int mx = 0; mx < m_; ++mx) {
    const double zr = -extent_ + (mx + 0.5) * w;
    for (int my = 0; my < m_; ++my) {
      const double zi = -extent_ + (my + 0.5) * w;
      centers_.emplace_back(center_.real() + zr, center_.imag() + zi);
    }
  }
}

bool PhaseSpaceGrid::contains(Complex z) const {
  const double zr = z.real() - center_.real();
  const double zi = z.imag() - center_.imag();
  return zr >= -extent_ && zr <= extent_ && zi >= -extent_ && zi <= extent_;
}

int PhaseSpaceGrid::bin_index(Complex z) const {
  const double w = bin_width();
  auto axis = [&](double u) {
    int i = static_cast<int>(std::floor((u + extent_) / w));
    return std::clamp(i, 0, m_ - 1);
  };
  const int mx = axis(z.real() - center_.real());
  const int my = axis(z.imag() - center_.imag());
  return mx * m_ + my;
}

PhaseSpaceGrid make_grid(int bins_per_axis, double extent) {
  return PhaseSpaceGrid(bins_per_axis, extent);
}

PhaseSpaceGrid make_adaptive_grid(int bins_per_axis, const QFunctionParams& p,
                                  Complex alpha, double n_sigma) {
  const GaussianMoments mom = output_gaussian_moments(p, alpha);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(mom.cov);
  const double extent = n_sigma * std::sqrt(es.eigenvalues().maxCoeff());
  return PhaseSpaceGrid(bins_per_axis, extent,
                        Complex(mom.mean[0], mom.mean[1]));
}

nlohmann::json grid_to_json(const PhaseSpaceGrid& g) {
  nlohmann::json j{{"M", g.bins_per_axis()}, {"extent", g.extent()}};
  if (g.center() != Complex{}) {
    j["center"] = {g.center().real(), g.center().imag()};
  }
  return j;
}

PhaseSpaceGrid grid_from_json(const nlohmann::json& j) {
  Complex center{};
  if (j.contains("center")) {
    center = Complex(j["center"].at(0).get<double>(),
                     j["center"].at(1).get<double>());
  }
  return PhaseSpaceGrid(j.at("M").get<int>(), j.at("extent").get<double>(),
                        center);
}

GaussianMoments output_gaussian_moments(const QFunctionParams& p,
                                        Complex alpha) {
  const OutputExponent e = output_exponent(p, alpha);
  require_normalizable(e);

  GaussianMoments mom;
  const Eigen::Matrix2d precision = 2.0 * e.lambda;
  mom.cov = precision.inverse();
  mom.mean = mom.cov * e.l;

  // Full-plane mass via the closed-form complex Gaussian integral.
  const Vec2c abar(alpha, std::conj(alpha));
  const Vec2c eta = 0.5 * p.bvec2() - p.block_a2().adjoint() * abar;
  const Vec2c v(2.0 * std::conj(eta(0)), 2.0 * eta(0));
  mom.amplitude =
      std::exp(e.c) * gaussian_integral(p.block_a3(), v).real();
  return mom;
}

BinProbabilities bin_probabilities(const QFunctionParams& p, Complex alpha,
                                   const PhaseSpaceGrid& grid) {
  const OutputExponent e = output_exponent(p, alpha);
  require_normalizable(e);

  const int k = grid.bin_count();
  const double log_measure = std::log(grid.bin_area() / kPi);

  BinProbabilities bp;
  bp.p.resize(k);
  for (int i = 0; i < k; ++i) {
    bp.p[i] = std::exp(e.value(grid.bin_center(i)) + log_measure);
  }
  bp.gamma = bp.p.sum();
  if (!(bp.gamma >= 1e-300)) {
    throw EmptyGridError("grid captures no output mass");
  }
  bp.p_tilde = bp.p / bp.gamma;
  return bp;
}

Eigen::VectorXd log_bin_masses(const QFunctionParams& p, Complex alpha,
                               const PhaseSpaceGrid& grid) {
  const OutputExponent e = output_exponent(p, alpha);
  require_normalizable(e);
  const double log_measure = std::log(grid.bin_area() / kPi);
  Eigen::VectorXd out(grid.bin_count());
  for (int i = 0; i < grid.bin_count(); ++i) {
    out[i] = e.value(grid.bin_center(i)) + log_measure;
  }
  return out;
}

void bin_probabilities_csv(const BinProbabilities& bp,
                           const PhaseSpaceGrid& grid, std::ostream& os) {
  os << "k,z_r,z_i,p,p_tilde\n";
  for (int k = 0; k < grid.bin_count(); ++k) {
    const Complex z = grid.bin_center(k);
    os << k << ',' << z.real() << ',' << z.imag() << ',' << bp.p[k] << ','
       << bp.p_tilde[k] << '\n';
  }
}

Complex gaussian_integral(const Mat2c& m, const Vec2c& v) {
  // Scalar-form convergence condition on the quadratic part.
  const Complex a = m(0, 0) + m(1, 1);
  const Complex c1 = -m(1, 0);
  const Complex c2 = -m(0, 1);
  if (a.real() < std::abs(c1 + std::conj(c2))) {
    throw DivergentIntegralError("Gaussian integral does not converge");
  }
  const Complex det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  if (!(std::abs(det) > 0.0) || (det.imag() == 0.0 && det.real() <= 0.0)) {
    throw DivergentIntegralError("Gaussian integral quadratic form singular");
  }

  Mat2c minv;
  minv << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
  minv /= det;
  const Vec2c sv(v(1), v(0));  // sigma_x v
  const Complex expo = (v.transpose() * (minv * sv)).value() / 4.0;
  return std::exp(expo) / (2.0 * std::sqrt(det));
}

}  // namespace gausstomo
