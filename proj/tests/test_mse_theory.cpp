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

#include "gausstomo/design_opt.hpp"
#include "gausstomo/mse_theory.hpp"
#include "gausstomo/tp_rows.hpp"
#include "test_util.hpp"

using namespace gausstomo;
using gausstomo::testing::Rng;

TEST_SUITE_BEGIN("mse_theory");

TEST_CASE("y_block entries") {
  SUBCASE("scalar diagonal value") {
    Eigen::VectorXd pt(2);
    pt << 0.01, 0.99;
    const Eigen::MatrixXd y = y_block(pt, 100);
    const double s = 1.0 - std::pow(0.99, 100);
    CHECK(y(0, 0) == doctest::Approx(s * s * 99.0).epsilon(1e-12));
    CHECK(y(0, 0) == doctest::Approx(39.79).epsilon(2e-3));
  }
  SUBCASE("saturated survival at huge N") {
    Eigen::VectorXd pt(3);
    pt << 0.5, 0.3, 0.2;
    const Eigen::MatrixXd y = y_block(pt, 1000000000LL);
    for (int k = 0; k < 3; ++k) {
      CHECK(y(k, k) == doctest::Approx(1.0 / pt[k] - 1.0).epsilon(1e-9));
      for (int k2 = 0; k2 < 3; ++k2) {
        if (k2 != k) CHECK(y(k, k2) == doctest::Approx(-1.0).epsilon(1e-9));
      }
    }
  }
  SUBCASE("vanishing cells are regular") {
    Eigen::VectorXd pt(3);
    pt << 1e-30, 0.0, 1.0 - 1e-30;
    const Eigen::MatrixXd y = y_block(pt, 10000);
    CHECK(std::abs(y(0, 0)) < 1e-20);  // N^2 p limit
    CHECK(y.row(1).cwiseAbs().maxCoeff() == 0.0);
    CHECK(y.col(1).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("near positive semidefinite") {
    Rng rng(61);
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::VectorXd pt(8);
      for (int k = 0; k < 8; ++k) pt[k] = rng.pos(0.001, 1.0);
      pt /= pt.sum();
      const Eigen::MatrixXd y = y_block(pt, 500);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(y,
                                                        Eigen::EigenvaluesOnly);
      CHECK(es.eigenvalues().minCoeff() >=
            -1e-8 * es.eigenvalues().maxCoeff());
    }
  }
}

TEST_CASE("mse_trace against explicit blocks") {
  SUBCASE("identity stub with diagonal blocks") {
    const int jk = 6;
    const Eigen::MatrixXd t = Eigen::MatrixXd::Identity(jk, jk);
    Eigen::VectorXd y1(3), y2(3);
    y1 << 1.0, 2.0, 3.0;
    y2 << 0.5, 0.25, 0.25;
    const std::vector<Eigen::MatrixXd> blocks{y1.asDiagonal(),
                                              y2.asDiagonal()};
    const MseReport rep = mse_trace_general(t, blocks, 100);
    CHECK(rep.total == doctest::Approx((y1.sum() + y2.sum()) / 100.0));
  }
  SUBCASE("structured fast path equals the dense contraction") {
    Rng rng(62);
    const int k = 7, q = 5;
    Eigen::MatrixXd t(q, 2 * k);
    for (int i = 0; i < q; ++i) {
      for (int j = 0; j < 2 * k; ++j) t(i, j) = rng.sym();
    }
    std::vector<Eigen::VectorXd> pts;
    std::vector<Eigen::MatrixXd> blocks;
    for (int b = 0; b < 2; ++b) {
      Eigen::VectorXd pt(k);
      for (int i = 0; i < k; ++i) pt[i] = rng.pos(0.01, 1.0);
      pt /= pt.sum();
      pts.push_back(pt);
      blocks.push_back(y_block(pt, 300));
    }
    const MseReport fast = mse_trace(t, pts, 300);
    const MseReport dense = mse_trace_general(t, blocks, 300);
    CHECK(fast.total == doctest::Approx(dense.total).epsilon(1e-12));
    CHECK((fast.per_parameter - dense.per_parameter).norm() < 1e-12);
  }
}

TEST_CASE("mse_formula_nontp") {
  Rng rng(63);
  // Coarse grid keeps every bin populated, the formula's working regime.
  const PhaseSpaceGrid grid = make_grid(5, 1.8);
  const QFunctionParams truth = testing::random_interior_cp(rng);
  std::vector<Complex> inputs;
  for (int j = 0; j < 7; ++j) inputs.push_back(rng.csym(1.2));

  SUBCASE("doubling N halves the error in the saturated regime") {
    const long long n = 20000;  // all survival factors ~ 1
    const double m1 = mse_formula_nontp(truth, inputs, grid, n).total;
    const double m2 = mse_formula_nontp(truth, inputs, grid, 2 * n).total;
    CHECK(m2 / m1 == doctest::Approx(0.5).epsilon(0.02));
  }
  SUBCASE("row order invariance") {
    std::vector<Complex> shuffled = inputs;
    std::swap(shuffled[0], shuffled[4]);
    std::swap(shuffled[2], shuffled[6]);
    CHECK(mse_formula_nontp(truth, inputs, grid, 5000).total ==
          doctest::Approx(mse_formula_nontp(truth, shuffled, grid, 5000).total)
              .epsilon(1e-10));
  }
  SUBCASE("positive and finite, with per-parameter breakdown") {
    const MseReport rep = mse_formula_nontp(truth, inputs, grid, 5000);
    CHECK(rep.total > 0.0);
    CHECK(std::isfinite(rep.total));
    CHECK(rep.per_parameter.size() == 14);
    CHECK(rep.per_parameter.minCoeff() > 0.0);
    CHECK(rep.per_parameter.sum() == doctest::Approx(rep.total));
  }
  SUBCASE("non-IC design rejected") {
    std::vector<Complex> ring;
    for (int j = 0; j < 8; ++j) ring.push_back(std::polar(1.0, 0.7 * j));
    CHECK_THROWS_AS(mse_formula_nontp(truth, ring, grid, 1000), NotICError);
  }
}

TEST_CASE("pseudoinverse trace identity") {
  // Tr{V~^-dag V~^-} equals the leading 14x14 block trace of G^-1, the fast
  // path used by the design objective.
  Rng rng(64);
  const PhaseSpaceGrid grid = make_grid(20, 5.0);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<Complex> inputs;
    for (int j = 0; j < 6; ++j) inputs.push_back(rng.csym(1.5));
    Eigen::MatrixXd v(6 * grid.bin_count(), 15);
    for (int j = 0; j < 6; ++j) {
      for (int k = 0; k < grid.bin_count(); ++k) {
        v.row(j * grid.bin_count() + k) =
            build_row_v(inputs[static_cast<size_t>(j)], grid.bin_center(k))
                .transpose();
      }
    }
    const Eigen::MatrixXd gram = v.transpose() * v;
    const Eigen::MatrixXd pinv = gram.inverse() * v.transpose();
    const double explicit_trace =
        (pinv.topRows(14) * pinv.topRows(14).transpose()).trace();
    CHECK(geometric_objective(inputs, grid) ==
          doctest::Approx(explicit_trace).epsilon(1e-10));
  }
}

TEST_CASE("linearized trace-preserving rows") {
  SUBCASE("parametrization constants exactly as fixed") {
    const auto& e1 = e1_matrix();
    CHECK(e1(0, 0) == Complex(0.5));
    CHECK(e1(3, 0) == Complex(0.5));
    CHECK(e1(1, 1) == Complex(-1.0));
    CHECK(e1(2, 1) == Complex(-1.0));
    CHECK(e1(1, 2) == Complex(0.0, -1.0));
    CHECK(e1(2, 2) == Complex(0.0, 1.0));
    CHECK(e1.col(0).cwiseAbs().sum() == 1.0);

    const auto& e2 = e2_matrix();
    CHECK(e2(1, 0) == Complex(0.5));
    CHECK(e2(2, 0) == Complex(0.5));
    CHECK(e2(1, 1) == Complex(0.0, 0.5));
    CHECK(e2(2, 1) == Complex(0.0, -0.5));
    CHECK(e2(0, 2) == Complex(0.5));
    CHECK(e2(3, 2) == Complex(0.5));
    CHECK(e2(0, 3) == Complex(0.0, 0.5));
    CHECK(e2(3, 3) == Complex(0.0, -0.5));

    const auto& e3 = e3_matrix();
    CHECK(e3(0, 0) == Complex(1.0));
    CHECK(e3(1, 0) == Complex(1.0));
    CHECK(e3(0, 1) == Complex(0.0, 1.0));
    CHECK(e3(1, 1) == Complex(0.0, -1.0));
  }

  SUBCASE("rows are the finite-difference gradient of log p") {
    Rng rng(65);
    const PhaseSpaceGrid grid = make_grid(4, 2.2);
    const std::vector<Complex> inputs{{0.6, 0.2}, {-0.4, 0.9}, {0.1, -0.7}};
    for (int trial = 0; trial < 10; ++trial) {
      const TpParamVector t = testing::random_admissible_tp(rng, 0.7);
      const Eigen::MatrixXd rows = vtp_rows(t, inputs, grid);
      const double h = 1e-6;
      for (int comp = 0; comp < 9; ++comp) {
        TpParamVector tp = t, tm = t;
        tp[comp] += h;
        tm[comp] -= h;
        const QFunctionParams pp = tp_complete(tp);
        const QFunctionParams pm = tp_complete(tm);
        for (size_t j = 0; j < inputs.size(); ++j) {
          const Eigen::VectorXd lp = log_bin_masses(pp, inputs[j], grid);
          const Eigen::VectorXd lm = log_bin_masses(pm, inputs[j], grid);
          for (int k = 0; k < grid.bin_count(); ++k) {
            const double fd = (lp[k] - lm[k]) / (2.0 * h);
            const double an = rows(
                static_cast<Eigen::Index>(j) * grid.bin_count() + k, comp);
            const double scale =
                std::max({std::abs(fd), std::abs(an), 1e-3});
            CHECK(std::abs(fd - an) / scale < 1e-6);
          }
        }
      }
    }
  }

  SUBCASE("pure grid dependence of the displacement slots") {
    TpParamVector t = TpParamVector::Zero();
    t[0] = 1.3;
    t[5] = -0.3;  // g1; b2 = 0 and the probe amplitude is zero
    const PhaseSpaceGrid grid = make_grid(3, 1.5);
    const Eigen::MatrixXd rows = vtp_rows(t, {Complex{}}, grid);
    for (int k = 0; k < grid.bin_count(); ++k) {
      const Complex z = grid.bin_center(k);
      CHECK(rows(k, 1) == doctest::Approx(2.0 * z.real()).epsilon(1e-12));
      CHECK(rows(k, 2) == doctest::Approx(2.0 * z.imag()).epsilon(1e-12));
    }
  }
}

TEST_CASE("mse_formula_tp") {
  Rng rng(66);
  const PhaseSpaceGrid grid = make_grid(5, 1.8);
  const TpParamVector t = testing::random_admissible_tp(rng, 0.6);
  const std::vector<Complex> inputs{{0.8, 0.1}, {-0.3, 0.6}, {0.2, -0.9},
                                    {-0.7, -0.4}};
  SUBCASE("too few input states") {
    CHECK_THROWS_AS(
        mse_formula_tp(t, {inputs[0], inputs[1]}, grid, 1000), NotICError);
  }
  SUBCASE("halving with doubled N") {
    const double m1 = mse_formula_tp(t, inputs, grid, 20000).total;
    const double m2 = mse_formula_tp(t, inputs, grid, 40000).total;
    CHECK(m2 / m1 == doctest::Approx(0.5).epsilon(0.02));
  }
  SUBCASE("positive, finite, nine components") {
    const MseReport rep = mse_formula_tp(t, inputs, grid, 5000);
    CHECK(rep.total > 0.0);
    CHECK(rep.per_parameter.size() == 9);
    CHECK(rep.per_parameter.minCoeff() > 0.0);
  }
}

TEST_SUITE_END();
