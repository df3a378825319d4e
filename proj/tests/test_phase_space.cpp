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

#include <doctest.h>

#include <algorithm>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gausstomo/phase_space.hpp"
#include "gausstomo/process_gen.hpp"
#include "test_util.hpp"

using namespace gausstomo;
using gausstomo::testing::Rng;

TEST_SUITE_BEGIN("phase_space");

namespace {

// Midpoint quadrature of exp(log_q_value) over a wide box; spectrally
// accurate for Gaussians.
double plane_quadrature(const QFunctionParams& p, Complex alpha, double half,
                        double h, double* mx = nullptr, double* my = nullptr) {
  double mass = 0.0, ix = 0.0, iy = 0.0;
  for (double x = -half; x < half; x += h) {
    for (double y = -half; y < half; y += h) {
      const double q =
          std::exp(log_q_value(p, alpha, Complex(x + h / 2, y + h / 2)));
      mass += q;
      ix += (x + h / 2) * q;
      iy += (y + h / 2) * q;
    }
  }
  if (mx != nullptr) *mx = ix / mass;
  if (my != nullptr) *my = iy / mass;
  return mass * h * h / M_PI;
}

}  // namespace

TEST_CASE("make_grid") {
  SUBCASE("two bins per axis") {
    const PhaseSpaceGrid g = make_grid(2, 1.0);
    std::vector<Complex> expected{{-0.5, -0.5}, {-0.5, 0.5}, {0.5, -0.5},
                                  {0.5, 0.5}};
    REQUIRE(g.bin_count() == 4);
    for (int k = 0; k < 4; ++k) {
      CHECK(std::abs(g.bin_center(k) - expected[static_cast<size_t>(k)]) <
            1e-15);
    }
  }
  SUBCASE("default working grid") {
    const PhaseSpaceGrid g = make_grid(20, 5.0);
    CHECK(g.bin_count() == 400);
    CHECK(g.bin_area() == doctest::Approx(0.25));
  }
  SUBCASE("odd axis count has a center bin") {
    const PhaseSpaceGrid g = make_grid(3, 3.0);
    const auto& c = g.centers();
    CHECK(std::any_of(c.begin(), c.end(),
                      [](Complex z) { return std::abs(z) < 1e-15; }));
  }
  SUBCASE("centers stay strictly inside the square") {
    const PhaseSpaceGrid g = make_grid(7, 2.5);
    for (const Complex& z : g.centers()) {
      CHECK(std::abs(z.real()) < g.extent());
      CHECK(std::abs(z.imag()) < g.extent());
    }
  }
  SUBCASE("validation") {
    CHECK_THROWS_AS(make_grid(1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(4, 0.0), std::invalid_argument);
  }
  SUBCASE("bin_index inverts bin_center") {
    const PhaseSpaceGrid g = make_grid(9, 1.7);
    for (int k = 0; k < g.bin_count(); ++k) {
      CHECK(g.bin_index(g.bin_center(k)) == k);
    }
  }
}

TEST_CASE("output_gaussian_moments") {
  SUBCASE("beam splitter output is a coherent state") {
    const double theta = 0.6;
    const Complex alpha{1.0, 0.4};
    const GaussianMoments mom =
        output_gaussian_moments(beam_splitter_process(theta), alpha);
    const Complex mean = std::conj(alpha) * std::cos(theta);
    CHECK(mom.mean[0] == doctest::Approx(mean.real()).epsilon(1e-12));
    CHECK(mom.mean[1] == doctest::Approx(mean.imag()).epsilon(1e-12));
    CHECK((mom.cov - 0.5 * Eigen::Matrix2d::Identity()).norm() < 1e-12);
    CHECK(mom.amplitude == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("full loss sends everything to vacuum") {
    QFunctionParams p;
    p.a2 = 1.0;
    const GaussianMoments mom = output_gaussian_moments(p, {1.3, -0.8});
    CHECK(mom.mean.norm() < 1e-14);
    CHECK((mom.cov - 0.5 * Eigen::Matrix2d::Identity()).norm() < 1e-14);
  }
  SUBCASE("integral matches quadrature for random CP processes") {
    Rng rng(31);
    for (int i = 0; i < 10; ++i) {
      const QFunctionParams p = testing::random_interior_cp(rng);
      const Complex alpha = rng.csym(0.8);
      double mx = 0.0, my = 0.0;
      const double quad = plane_quadrature(p, alpha, 9.0, 0.05, &mx, &my);
      const GaussianMoments mom = output_gaussian_moments(p, alpha);
      CHECK(mom.amplitude == doctest::Approx(quad).epsilon(1e-6));
      CHECK(mom.mean[0] == doctest::Approx(mx).epsilon(1e-6));
      CHECK(mom.mean[1] == doctest::Approx(my).epsilon(1e-6));
    }
  }
  SUBCASE("non-normalizable output rejected") {
    QFunctionParams p;
    p.a2 = -0.5;
    CHECK_THROWS_AS(output_gaussian_moments(p, {}), NonNormalizableError);
  }
  SUBCASE("trace-preserving processes integrate to one") {
    Rng rng(32);
    for (int i = 0; i < 50; ++i) {
      const QFunctionParams p =
          tp_complete(testing::random_admissible_tp(rng));
      const Complex alpha = rng.csym(1.0);
      CHECK(output_gaussian_moments(p, alpha).amplitude ==
            doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("bin_probabilities") {
  SUBCASE("vacuum mass on the default grid") {
    QFunctionParams p;
    p.a2 = 1.0;
    const BinProbabilities bp =
        bin_probabilities(p, {}, make_grid(20, 5.0));
    CHECK(bp.gamma == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(bp.p_tilde.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(bp.p_tilde.minCoeff() >= 0.0);
  }
  SUBCASE("four-fold symmetry of a centered output") {
    QFunctionParams p;
    p.a2 = 1.0;
    for (int m : {6, 7}) {
      const PhaseSpaceGrid g = make_grid(m, 2.0);
      const BinProbabilities bp = bin_probabilities(p, {}, g);
      for (int k = 0; k < g.bin_count(); ++k) {
        const Complex z = g.bin_center(k);
        const int k_mirror = g.bin_index(Complex(-z.real(), z.imag()));
        const int k_flip = g.bin_index(std::conj(z));
        CHECK(bp.p_tilde[k] ==
              doctest::Approx(bp.p_tilde[k_mirror]).epsilon(1e-12));
        CHECK(bp.p_tilde[k] ==
              doctest::Approx(bp.p_tilde[k_flip]).epsilon(1e-12));
      }
    }
  }
  SUBCASE("pass-through coupling peaks at the expected bin") {
    const PhaseSpaceGrid g = make_grid(20, 5.0);
    const BinProbabilities bp =
        bin_probabilities(beam_splitter_process(0.0), {2.0, 0.0}, g);
    int argmax = 0;
    bp.p.maxCoeff(&argmax);
    CHECK(std::abs(g.bin_center(argmax) - Complex(2.0, 0.0)) <
          g.bin_width());
  }
  SUBCASE("far-displaced output empties the grid") {
    QFunctionParams p;
    p.a2 = 1.0;
    p.b2 = Complex(60.0, 0.0);  // mean far outside the window
    p.c0 = -3600.0;
    CHECK_THROWS_AS(bin_probabilities(p, {}, make_grid(8, 2.0)),
                    EmptyGridError);
  }
  SUBCASE("log masses agree with the probabilities") {
    Rng rng(33);
    const QFunctionParams p = testing::random_interior_cp(rng);
    const PhaseSpaceGrid g = make_grid(10, 3.0);
    const BinProbabilities bp = bin_probabilities(p, {0.3, -0.2}, g);
    const Eigen::VectorXd lm = log_bin_masses(p, {0.3, -0.2}, g);
    for (int k = 0; k < g.bin_count(); ++k) {
      CHECK(std::exp(lm[k]) == doctest::Approx(bp.p[k]).epsilon(1e-12));
    }
  }
  SUBCASE("grid mass converges to the plane integral") {
    Rng rng(34);
    const QFunctionParams p = testing::random_interior_cp(rng);
    const Complex alpha = rng.csym(0.7);
    const GaussianMoments mom = output_gaussian_moments(p, alpha);
    const PhaseSpaceGrid g = make_adaptive_grid(40, p, alpha, 6.0);
    const BinProbabilities bp = bin_probabilities(p, alpha, g);
    CHECK(bp.gamma / mom.amplitude == doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("gaussian_integral") {
  SUBCASE("vacuum normalization") {
    CHECK(gaussian_integral(0.5 * Mat2c::Identity(), Vec2c::Zero()).real() ==
          doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("scalar displaced form") {
    // a = 1, b1 = b2 = s, c1 = c2 = 0 integrates to exp(s^2).
    const double s = 0.37;
    Mat2c m;
    m << Complex(0.5), Complex(0.0), Complex(0.0), Complex(0.5);
    const Complex val = gaussian_integral(m, Vec2c(Complex(s), Complex(s)));
    CHECK(val.real() == doctest::Approx(std::exp(s * s)).epsilon(1e-13));
    CHECK(std::abs(val.imag()) < 1e-15);
  }
  SUBCASE("random convergent forms match quadrature") {
    Rng rng(35);
    for (int i = 0; i < 8; ++i) {
      // Hermitian positive dominant quadratic part plus a small
      // symmetric-off-diagonal deformation keeps the integral convergent.
      const double a = rng.pos(0.6, 1.6);
      const Complex c = rng.csym(0.2 * a);
      Mat2c m;
      m << Complex(a / 2), -std::conj(c), -c, Complex(a / 2);
      const Complex v1 = rng.csym(0.5);
      const Vec2c v(v1, std::conj(v1));
      const Complex closed = gaussian_integral(m, v);

      double mass = 0.0;
      const double h = 0.04, half = 9.0;
      for (double x = -half; x < half; x += h) {
        for (double y = -half; y < half; y += h) {
          const Complex beta(x + h / 2, y + h / 2);
          const Vec2c bb(beta, std::conj(beta));
          const Complex expo =
              -(bb.dot(m * bb)) + (v.transpose() * bb).value();
          mass += std::exp(expo.real());
        }
      }
      mass *= h * h / M_PI;
      CHECK(closed.real() == doctest::Approx(mass).epsilon(1e-8));
    }
  }
  SUBCASE("divergent forms rejected") {
    Mat2c m;
    m << Complex(0.1), Complex(-0.9), Complex(-0.9), Complex(0.1);
    CHECK_THROWS_AS(gaussian_integral(m, Vec2c::Zero()),
                    DivergentIntegralError);
  }
}

TEST_CASE("grid serialization and CSV") {
  const PhaseSpaceGrid g = make_grid(6, 2.5);
  const PhaseSpaceGrid back = grid_from_json(grid_to_json(g));
  CHECK(back.bins_per_axis() == g.bins_per_axis());
  CHECK(back.extent() == g.extent());

  QFunctionParams p;
  p.a2 = 1.0;
  const BinProbabilities bp = bin_probabilities(p, {}, g);
  std::ostringstream os;
  bin_probabilities_csv(bp, g, os);
  const std::string csv = os.str();
  CHECK(static_cast<int>(std::count(csv.begin(), csv.end(), '\n')) ==
        g.bin_count() + 1);
  CHECK(csv.rfind("k,z_r,z_i,p,p_tilde\n", 0) == 0);
}

TEST_SUITE_END();
