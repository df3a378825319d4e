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

#include <nlohmann/json.hpp>

#include "gausstomo/core_model.hpp"
#include "gausstomo/process_gen.hpp"
#include "test_util.hpp"

using namespace gausstomo;
using gausstomo::testing::Rng;

TEST_SUITE_BEGIN("core_model");

namespace {

// Exponent evaluated with bare loops over the assembled blocks; the oracle
// against which log_q_value is checked.
double quadratic_form_oracle(const QFunctionParams& p, Complex alpha,
                             Complex z) {
  const auto [a, b] = assemble_matrices(p);
  const Complex zv[4] = {alpha, std::conj(alpha), z, std::conj(z)};
  Complex quad{};
  Complex lin{};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      quad += std::conj(zv[i]) * a(i, j) * zv[j];
    }
    lin += std::conj(b(i)) * zv[i];
  }
  return -quad.real() + lin.real() + p.c0;
}

}  // namespace

TEST_CASE("basis maps are unitary") {
  CHECK((u0_matrix() * u0_matrix().adjoint() - Mat2c::Identity()).norm() <
        1e-15);
  CHECK((u_matrix().adjoint() * u_matrix() - Mat4c::Identity()).norm() <
        1e-15);
  CHECK((sigma_x_2c() * sigma_x_2c() - Mat2c::Identity()).norm() == 0.0);
}

TEST_CASE("assemble_matrices block layout") {
  SUBCASE("all fields zero") {
    const auto [a, b] = assemble_matrices(QFunctionParams{});
    CHECK(a.norm() == 0.0);
    CHECK(b.norm() == 0.0);
  }
  SUBCASE("beam splitter coupling block") {
    const double theta = 0.7;
    const auto [a, b] = assemble_matrices(beam_splitter_process(theta));
    const Mat2c expected = -0.5 * std::cos(theta) * sigma_x_2c();
    CHECK((a.topRightCorner<2, 2>() - expected).norm() < 1e-15);
  }
  SUBCASE("assembled A is Hermitian") {
    Rng rng(11);
    for (int i = 0; i < 100; ++i) {
      const auto [a, b] = assemble_matrices(testing::random_params(rng));
      CHECK((a - a.adjoint()).norm() < 1e-15);
    }
  }
}

TEST_CASE("log_q_value") {
  SUBCASE("deformed idle at the origin") {
    CHECK(log_q_value(idle_deformed(1.0), {}, {}) == doctest::Approx(0.0));
  }
  SUBCASE("beam splitter closed form") {
    CHECK(log_q_value(beam_splitter_process(M_PI / 3), 1.0, 1.0) ==
          doctest::Approx(-0.25).epsilon(1e-14));
  }
  SUBCASE("matches the explicit quadratic form") {
    Rng rng(12);
    for (int i = 0; i < 300; ++i) {
      const QFunctionParams p = testing::random_params(rng);
      const Complex alpha = rng.csym(1.5);
      const Complex z = rng.csym(1.5);
      CHECK(log_q_value(p, alpha, z) ==
            doctest::Approx(quadratic_form_oracle(p, alpha, z)).epsilon(1e-13));
    }
  }
}

TEST_CASE("build_row_v layout and identity") {
  SUBCASE("origin keeps only the constant slot") {
    const Vec15 v = build_row_v({}, {});
    CHECK(v.head<14>().norm() == 0.0);
    CHECK(v[14] == 1.0);
  }
  SUBCASE("reconciliation against the printed reference layout") {
    // Reference row at alpha = 1, z = i in the commonly printed layout:
    // 2 * (1/2, 1/2, 1, 0, 0, -1, 1, 0, -1, 0, 0, -1, 0, -1, 1/2).
    Vec15 printed;
    printed << 1, 1, 2, 0, 0, -2, 2, 0, -2, 0, 0, -2, 0, -2, 1;
    // Documented fixed reconciliation: the b/c slots flip so the row
    // subtracts what the exponent adds, the Im slots of the printed row
    // already carry a minus (so they pass through), and the two
    // cross-monomial pairs swap places. Constant slot unchanged.
    Vec15 expected;
    expected << printed[0], printed[1],  // |alpha|^2, |z|^2
        -printed[2], -printed[3],        // b1 slots flip
        -printed[4], printed[5],         // b2: z_r flips, -z_i passes
        -printed[6], printed[7],         // c1: Re flips, Im passes
        -printed[8], printed[9],         // c2: Re flips, Im passes
        printed[12], printed[13],        // g1 slots <- printed (a* z*) pair
        printed[10], printed[11],        // g2 slots <- printed (a z*) pair
        printed[14];
    CHECK((build_row_v(1.0, {0.0, 1.0}) - expected).norm() < 1e-15);
  }
  SUBCASE("identity against the matrix form") {
    Rng rng(13);
    for (int i = 0; i < 500; ++i) {
      const QFunctionParams p = testing::random_params(rng);
      const Complex alpha = rng.csym(1.5);
      const Complex z = rng.csym(1.5);
      const double via_row =
          -build_row_v(alpha, z).dot(extended_vector_from_params(p));
      CHECK(via_row ==
            doctest::Approx(log_q_value(p, alpha, z)).epsilon(1e-13));
    }
  }
}

TEST_CASE("parameter vector round trips") {
  Rng rng(14);
  for (int i = 0; i < 50; ++i) {
    const QFunctionParams p = testing::random_params(rng);
    CHECK(params_from_vector(vector_from_params(p), p.c0) == p);
    CHECK(params_from_extended_vector(extended_vector_from_params(p)) == p);
  }
}

TEST_CASE("tp_complete") {
  SUBCASE("beam splitter at pi/3") {
    TpParamVector t = TpParamVector::Zero();
    t[0] = 1.0;   // a2
    t[5] = -0.5;  // g1 = -cos(pi/3)
    const QFunctionParams p = tp_complete(t);
    CHECK(p.a1 == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(std::abs(p.c1) < 1e-15);
    CHECK(std::abs(p.b1) == 0.0);
    CHECK(p.c0 == doctest::Approx(0.0));
  }
  SUBCASE("full loss to vacuum") {
    TpParamVector t = TpParamVector::Zero();
    t[0] = 1.0;
    const QFunctionParams p = tp_complete(t);
    CHECK(p.a1 == 0.0);
    CHECK(std::abs(p.b1) == 0.0);
    CHECK(p.c0 == doctest::Approx(0.0));
  }
  SUBCASE("random admissible passes check_tp") {
    Rng rng(15);
    for (int i = 0; i < 200; ++i) {
      const QFunctionParams p =
          tp_complete(testing::random_admissible_tp(rng));
      const TpResidual r = check_tp(p);
      CHECK(r.w_norm < 1e-12);
      CHECK(r.y_norm < 1e-12);
      CHECK(std::abs(r.w0) < 1e-12);
    }
  }
  SUBCASE("singular A3 rejected") {
    TpParamVector t = TpParamVector::Zero();
    t[0] = 1.0;
    t[3] = 0.5;  // a2^2 - 4|c2|^2 = 0
    CHECK_THROWS_AS(tp_complete(t), SingularA3Error);
  }
  SUBCASE("completion is idempotent on TP processes") {
    Rng rng(16);
    for (int i = 0; i < 50; ++i) {
      const QFunctionParams p =
          tp_complete(testing::random_admissible_tp(rng));
      const QFunctionParams again = tp_complete(tp_vector_from_params(p));
      CHECK((vector_from_params(again) - vector_from_params(p)).norm() <
            1e-14);
      CHECK(again.c0 == doctest::Approx(p.c0).epsilon(1e-14));
    }
  }
}

TEST_CASE("check_tp") {
  SUBCASE("deformed idle is not trace preserving") {
    const TpResidual r = check_tp(idle_deformed(1.0));
    const double expected =
        (1.0 - std::pow(std::tanh(1.0), 2)) / std::sqrt(2.0);
    CHECK(r.w_norm == doctest::Approx(expected).epsilon(1e-12));
    CHECK(r.w0 == doctest::Approx(0.0));
    CHECK_FALSE(r.is_tp());
  }
  SUBCASE("beam splitter is trace preserving for any angle") {
    for (double theta : {0.0, 0.3, M_PI / 4, 1.2, M_PI / 2}) {
      CHECK(check_tp(beam_splitter_process(theta)).is_tp(1e-12));
    }
  }
}

TEST_CASE("positivity_status") {
  SUBCASE("beam splitter is completely positive") {
    const auto rep =
        positivity_status(beam_splitter_process(0.9), PositivityMode::Cp);
    CHECK(rep.pass);
    CHECK(rep.value >= -1e-14);
  }
  SUBCASE("trace-preserving margin fails when c2 is too large") {
    QFunctionParams p;
    p.a2 = 1.0;
    p.c2 = 0.6;
    const auto rep = positivity_status(p, PositivityMode::Tp);
    CHECK(rep.value == doctest::Approx(1.0 - 1.44));
    CHECK_FALSE(rep.pass);
  }
  SUBCASE("random trace-preserving completions are CP") {
    Rng rng(17);
    for (int i = 0; i < 100; ++i) {
      const QFunctionParams p =
          tp_complete(testing::random_admissible_tp(rng));
      CHECK(positivity_status(p, PositivityMode::Cp).pass);
    }
  }
  SUBCASE("TP margin sign agrees with the A3 spectrum") {
    Rng rng(18);
    for (int i = 0; i < 1000; ++i) {
      QFunctionParams p;
      p.a2 = rng.pos(0.01, 2.0);
      p.c2 = rng.csym(0.8);
      const double margin = positivity_status(p, PositivityMode::Tp).value;
      Eigen::SelfAdjointEigenSolver<Mat2c> es(p.block_a3(),
                                              Eigen::EigenvaluesOnly);
      const double min_eig = es.eigenvalues().minCoeff();
      if (std::abs(margin) > 1e-12) {
        CHECK((margin > 0.0) == (min_eig > 0.0));
      }
    }
  }
}

namespace {

QFunctionParams params_from_a_matrix(const Mat4c& a) {
  QFunctionParams p;
  p.a1 = 2.0 * a(0, 0).real();
  p.c1 = -a(1, 0);
  p.a2 = 2.0 * a(2, 2).real();
  p.c2 = -a(3, 2);
  p.g2 = 2.0 * a(0, 2);
  p.g1 = 2.0 * a(1, 2);
  return p;
}

}  // namespace

TEST_CASE("project_physical") {
  SUBCASE("positive input is unchanged") {
    Rng rng(19);
    const QFunctionParams p = tp_complete(testing::random_admissible_tp(rng));
    CHECK(project_physical(p) == p);
  }
  SUBCASE("spectral formula on a fixed real spectrum") {
    Eigen::Vector4d d;
    d << 2.0, 1.0, 1.0, -1.0;
    const Mat4c a = u_matrix() *
                    d.asDiagonal().toDenseMatrix().cast<Complex>() *
                    u_matrix().adjoint();
    const QFunctionParams proj = project_physical(params_from_a_matrix(a));
    const auto [ap, bp] = assemble_matrices(proj);
    Eigen::SelfAdjointEigenSolver<Mat4c> es(ap, Eigen::EigenvaluesOnly);
    Eigen::Vector4d expected;
    expected << 0.0, 0.75, 0.75, 1.5;  // Tr{D} / Tr{D+} = 3/4 rescaling
    CHECK((es.eigenvalues() - expected).norm() < 1e-12);
    CHECK(es.eigenvalues().sum() == doctest::Approx(d.sum()).epsilon(1e-12));
  }
  SUBCASE("small negative perturbation stays close") {
    const QFunctionParams bs = beam_splitter_process(0.8);
    const auto [a, b] = assemble_matrices(bs);
    Eigen::SelfAdjointEigenSolver<Mat4c> es(a);
    Eigen::Vector4d d = es.eigenvalues();
    d[0] -= 1e-3;
    const Mat4c perturbed = es.eigenvectors() *
                            d.asDiagonal().toDenseMatrix().cast<Complex>() *
                            es.eigenvectors().adjoint();
    const QFunctionParams proj =
        project_physical(params_from_a_matrix(perturbed));
    CHECK(positivity_status(proj, PositivityMode::Cp).value >= -1e-12);
    CHECK((vector_from_params(proj) - vector_from_params(bs)).norm() < 2e-3);
  }
  SUBCASE("all-negative spectrum is rejected") {
    QFunctionParams p;
    p.a1 = -1.0;
    p.a2 = -1.0;
    CHECK_THROWS_AS(project_physical(p), AllNegativeSpectrumError);
  }
  SUBCASE("projection preserves the trace") {
    Rng rng(20);
    for (int i = 0; i < 50; ++i) {
      QFunctionParams p = testing::random_params(rng);
      p.a1 += 1.2;  // keep some positive weight
      p.a2 += 1.2;
      const auto [a, b] = assemble_matrices(p);
      QFunctionParams proj;
      try {
        proj = project_physical(p);
      } catch (const AllNegativeSpectrumError&) {
        continue;
      }
      const auto [ap, bp] = assemble_matrices(proj);
      CHECK(ap.trace().real() ==
            doctest::Approx(a.trace().real()).epsilon(1e-12));
      Eigen::SelfAdjointEigenSolver<Mat4c> es2(ap, Eigen::EigenvaluesOnly);
      CHECK(es2.eigenvalues().minCoeff() >= -1e-12);
    }
  }
}

TEST_CASE("beam_splitter_process") {
  SUBCASE("vacuum output at theta = pi/2") {
    const QFunctionParams p = beam_splitter_process(M_PI / 2);
    CHECK(std::abs(p.a1) < 1e-30);
    CHECK(std::abs(p.g1) < 1e-16);
    CHECK(p.a2 == 1.0);
  }
  SUBCASE("theta = 0 matches the saturated deformed idle") {
    const QFunctionParams bs = beam_splitter_process(0.0);
    const QFunctionParams idle = idle_deformed(20.0);  // tanh ~ 1
    CHECK((vector_from_params(bs) - vector_from_params(idle)).norm() < 1e-8);
  }
}

TEST_CASE("JSON round trip with fixed keys") {
  Rng rng(21);
  const QFunctionParams p = testing::random_params(rng);
  const nlohmann::json j = params_to_json(p);
  for (const char* key :
       {"a1", "a2", "c1", "c2", "g1", "g2", "b1", "b2", "c0"}) {
    CHECK(j.contains(key));
  }
  CHECK(params_from_json(j) == p);
}

TEST_SUITE_END();
