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

#include <iosfwd>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "gausstomo/common.hpp"
#include "gausstomo/core_model.hpp"

namespace gausstomo {

// Uniform M x M binning of the square [-E, E]^2 in the output plane
// (z_r, z_i), optionally recentered. Bin (mx, my) has its center at
// center + (-E + (mx + 1/2) w, -E + (my + 1/2) w) with w = 2E/M, and bins
// are enumerated k = mx * M + my.
class PhaseSpaceGrid {
 public:
  PhaseSpaceGrid(int bins_per_axis, double extent, Complex center = {});

  int bins_per_axis() const { return m_; }
  int bin_count() const { return m_ * m_; }
  double extent() const { return extent_; }
  Complex center() const { return center_; }
  double bin_width() const { return 2.0 * extent_ / m_; }
  double bin_area() const { return bin_width() * bin_width(); }

  const std::vector<Complex>& centers() const { return centers_; }
  Complex bin_center(int k) const { return centers_[static_cast<size_t>(k)]; }

  bool contains(Complex z) const;
  // Bin index of an in-grid point; points exactly on the upper edge are
  // clamped into the last bin.
  int bin_index(Complex z) const;

 private:
  int m_;
  double extent_;
  Complex center_;
  std::vector<Complex> centers_;
};

PhaseSpaceGrid make_grid(int bins_per_axis, double extent);

// Recenters on the output mean of the given process/input and takes the
// extent as n_sigma standard deviations of the wider principal axis.
PhaseSpaceGrid make_adaptive_grid(int bins_per_axis, const QFunctionParams& p,
                                  Complex alpha, double n_sigma = 6.0);

nlohmann::json grid_to_json(const PhaseSpaceGrid& g);
PhaseSpaceGrid grid_from_json(const nlohmann::json& j);

// Mean and covariance of the bivariate Gaussian proportional to
// Q_out(z_r, z_i) at fixed input amplitude, in (z_r, z_i) coordinates, plus
// the full-plane integral of Q_out / pi. In these coordinates a coherent
// output has covariance I/2. The input mode couples to the output plane
// through its conjugate: a lossless coupling of strength c maps input alpha
// to an output Gaussian centered at conj(alpha) * c.
struct GaussianMoments {
  Eigen::Vector2d mean;
  Eigen::Matrix2d cov;
  double amplitude = 0.0;
};

GaussianMoments output_gaussian_moments(const QFunctionParams& p,
                                        Complex alpha);

// Binned output masses p_k = Q_out(z_k) * bin_area / pi (midpoint rule),
// their normalization gamma = sum_k p_k and the normalized p~ = p / gamma.
struct BinProbabilities {
  Eigen::VectorXd p;
  Eigen::VectorXd p_tilde;
  double gamma = 0.0;
};

BinProbabilities bin_probabilities(const QFunctionParams& p, Complex alpha,
                                   const PhaseSpaceGrid& grid);

// log p_k without leaving the log domain; same masses as bin_probabilities.
Eigen::VectorXd log_bin_masses(const QFunctionParams& p, Complex alpha,
                               const PhaseSpaceGrid& grid);

void bin_probabilities_csv(const BinProbabilities& bp,
                           const PhaseSpaceGrid& grid, std::ostream& os);

// Closed form of the plane integral
//   int (d^2 beta / pi) exp(-b^dag M b + v^T b),   b = (beta, beta*)^T
// = (2 sqrt(det M))^-1 exp(v^T M^-1 sigma_x v / 4).
// Throws DivergentIntegralError when the convergence condition
// Re(M11 + M22) >= |M21 + conj(M12)| fails or det M is not positive.
Complex gaussian_integral(const Mat2c& m, const Vec2c& v);

}  // namespace gausstomo
