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

#include "gausstomo/process_gen.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "gausstomo/optimize.hpp"
#include "gausstomo/simulator.hpp"

namespace gausstomo {

namespace {

constexpr double kPi = 3.14159265358979323846;

const Eigen::Matrix2d& omega_matrix() {
  static const Eigen::Matrix2d omega = [] {
    Eigen::Matrix2d m;
    m << 0.0, 1.0, -1.0, 0.0;
    return m;
  }();
  return omega;
}

double min_eig_hermitian(const Mat2c& h) {
  Eigen::SelfAdjointEigenSolver<Mat2c> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

QFunctionParams params_from_bracket_inverse(const Eigen::Matrix4d& minv,
                                            double x0, double p0) {
  const Eigen::Matrix4d a_real = 0.5 * minv;
  const Mat4c a = u_matrix() * a_real.cast<Complex>() * u_matrix().adjoint();

  QFunctionParams p;
  p.a1 = 2.0 * a(0, 0).real();
  p.c1 = -a(1, 0);
  p.a2 = 2.0 * a(2, 2).real();
  p.c2 = -a(3, 2);
  p.g2 = 2.0 * a(0, 2);
  p.g1 = 2.0 * a(1, 2);

  Vec4c mu0 = Vec4c::Zero();
  mu0(2) = Complex(x0);
  mu0(3) = Complex(p0);
  const Vec4c b = 2.0 * (a * (u_matrix() * mu0));
  p.b1 = b(0);
  p.b2 = b(2);

  // c0 from the trace-preservation completion.
  const Mat2c a3 = p.block_a3();
  const double det_a3 = (a3(0, 0) * a3(1, 1) - a3(0, 1) * a3(1, 0)).real();
  const Vec2c b2v = p.bvec2();
  const Mat2c a3inv = a3.inverse();
  p.c0 = std::log(2.0 * std::sqrt(det_a3)) - 0.25 * b2v.dot(a3inv * b2v).real();
  return p;
}

}  // namespace

nlohmann::json spec_to_json(const PhysicalChannelSpec& s) {
  return nlohmann::json{{"phi", s.phi},       {"r", s.r},
                        {"theta", s.theta},   {"x0", s.x0},
                        {"p0", s.p0},         {"chi", s.chi},
                        {"n_t", s.n_t},       {"a_t", s.a_t},
                        {"theta_t", s.theta_t}};
}

PhysicalChannelSpec spec_from_json(const nlohmann::json& j) {
  PhysicalChannelSpec s;
  s.phi = j.value("phi", 0.0);
  s.r = j.value("r", 0.0);
  s.theta = j.value("theta", 0.0);
  s.x0 = j.value("x0", 0.0);
  s.p0 = j.value("p0", 0.0);
  s.chi = j.value("chi", 1.0);
  s.n_t = j.value("n_t", 0.0);
  s.a_t = j.value("a_t", 0.0);
  s.theta_t = j.value("theta_t", 0.0);
  return s;
}

Eigen::Matrix2d rotation2(double phi) {
  Eigen::Matrix2d r;
  r << std::cos(phi), std::sin(phi), -std::sin(phi), std::cos(phi);
  return r;
}

ChannelMaps xy_matrices(const PhysicalChannelSpec& spec) {
  const Eigen::Matrix2d rot_sq = rotation2(spec.theta);
  Eigen::Matrix2d squeeze_core;
  squeeze_core << std::exp(spec.r), 0.0, 0.0, std::exp(-spec.r);
  const Eigen::Matrix2d s = rot_sq.transpose() * squeeze_core * rot_sq;

  ChannelMaps maps;
  maps.x = spec.chi * s * rotation2(spec.phi);

  // Gain/loss vacuum noise goes as |1 - chi^2|/2, the amount that keeps the
  // uncertainty inequality intact for every chi.
  const Eigen::Matrix2d rot_t = rotation2(spec.theta_t);
  Eigen::Matrix2d reservoir;
  reservoir << 1.0 + spec.a_t, 0.0, 0.0, 1.0 - spec.a_t;
  maps.y = 0.5 * std::abs(1.0 - spec.chi * spec.chi) *
               Eigen::Matrix2d::Identity() +
           0.5 * spec.n_t * rot_t.transpose() * reservoir * rot_t;
  return maps;
}

double symplectic_check(const ChannelMaps& maps,
                        const Eigen::Matrix2d& sigma_in) {
  const Eigen::Matrix2d sigma_out =
      maps.x.transpose() * sigma_in * maps.x + maps.y;
  const Mat2c h = sigma_out.cast<Complex>() +
                  Complex(0.0, 0.5) * omega_matrix().cast<Complex>();
  return min_eig_hermitian(h);
}

double channel_uncertainty_check(const ChannelMaps& maps) {
  const Eigen::Matrix2d residual =
      omega_matrix() - maps.x.transpose() * omega_matrix() * maps.x;
  const Mat2c h = maps.y.cast<Complex>() +
                  Complex(0.0, 0.5) * residual.cast<Complex>();
  return min_eig_hermitian(h);
}

Eigen::Matrix4d sigma_t(double t) {
  if (t < 0.0) {
    throw std::invalid_argument("sigma_t needs t >= 0");
  }
  const double c = std::cosh(t);
  const double s = std::sinh(t);
  Eigen::Matrix4d m;
  m << c, 0.0, s, 0.0,
       0.0, c, 0.0, -s,
       s, 0.0, c, 0.0,
       0.0, -s, 0.0, c;
  return 0.5 * m;
}

QFunctionParams process_at_fixed_t(const PhysicalChannelSpec& spec, double t) {
  const ChannelMaps maps = xy_matrices(spec);
  const double tau = std::tanh(0.5 * t);

  const Eigen::Matrix2d sigma_schur = 0.5 * maps.x.transpose() * maps.x +
                                      maps.y +
                                      0.5 * Eigen::Matrix2d::Identity();
  const Eigen::Matrix2d si = sigma_schur.inverse();
  const Eigen::Matrix2d sz = Eigen::Vector2d(1.0, -1.0).asDiagonal();

  const Eigen::Matrix2d xsi = maps.x * si;
  Eigen::Matrix4d minv;
  minv.topLeftCorner<2, 2>() =
      (1.0 - tau * tau) * Eigen::Matrix2d::Identity() +
      tau * tau * sz * xsi * maps.x.transpose() * sz;
  minv.topRightCorner<2, 2>() = -tau * sz * xsi;
  minv.bottomLeftCorner<2, 2>() = minv.topRightCorner<2, 2>().transpose();
  minv.bottomRightCorner<2, 2>() = si;

  return params_from_bracket_inverse(minv, spec.x0, spec.p0);
}

QFunctionParams process_from_physical(const PhysicalChannelSpec& spec,
                                      double t_start) {
  constexpr double kDeltaTol = 1e-8;
  constexpr double kTMax = 44.0;

  QFunctionParams current = process_at_fixed_t(spec, t_start);
  for (double t = t_start; t <= kTMax; t += 2.0) {
    const QFunctionParams next = process_at_fixed_t(spec, t + 2.0);
    const auto [a_cur, b_cur] = assemble_matrices(current);
    const auto [a_next, b_next] = assemble_matrices(next);
    const double delta =
        std::max((a_cur - a_next).cwiseAbs().maxCoeff(),
                 (b_cur - b_next).cwiseAbs().maxCoeff());
    if (delta < kDeltaTol) {
      if (!positivity_status(next, PositivityMode::Cp).pass) {
        throw NotCpError("generated process failed the positivity check");
      }
      return next;
    }
    current = next;
  }
  throw NoConvergenceError("regularization ladder exhausted");
}

QFunctionParams idle_deformed(double omega) {
  if (!(omega > 0.0)) {
    throw std::invalid_argument("idle deformation needs omega > 0");
  }
  QFunctionParams p;
  p.a1 = 1.0;
  p.a2 = 1.0;
  p.g1 = Complex(-std::tanh(omega), 0.0);
  return p;
}

GroupSample sample_group(int group, int index, std::uint64_t seed,
                         std::optional<std::pair<double, double>> x0p0_range) {
  const double dlo = x0p0_range ? x0p0_range->first : -2.0;
  const double dhi = x0p0_range ? x0p0_range->second : 2.0;
  SplitMix64 rng(derive_seed(seed, static_cast<std::uint64_t>(group),
                             static_cast<std::uint64_t>(index)));

  PhysicalChannelSpec s = PhysicalChannelSpec::idle();
  auto rand_phi = [&] { return rng.uniform(0.0, 2.0 * kPi); };
  auto rand_r = [&] { return rng.uniform(0.0, 1.0 / 3.0); };
  auto rand_th = [&] { return rng.uniform(0.0, kPi / 2.0); };
  auto rand_disp = [&] { return rng.uniform(dlo, dhi); };
  auto rand_chi = [&] { return rng.uniform(0.1, 1.5); };
  auto rand_nt = [&] { return rng.uniform(0.0, 1.0); };
  auto rand_at = [&] { return rng.uniform(-1.0, 1.0); };

  switch (group) {
    case 1:
      if (index != 1) {
        throw std::invalid_argument("group 1 has a single idle row");
      }
      break;
    case 2:
      switch (index) {
        case 1: s.phi = rand_phi(); break;                        // phase shifter
        case 2: s.r = rand_r(); s.theta = rand_th(); break;       // squeezer
        case 3: s.x0 = rand_disp(); s.p0 = rand_disp(); break;    // displacer
        case 4: s.chi = rand_chi(); break;                        // gain
        case 5: s.n_t = rand_nt(); break;                         // symmetric noise
        case 6:                                                   // asymmetric noise
          s.n_t = rand_nt();
          s.a_t = rand_at();
          s.theta_t = rand_th();
          break;
        default:
          throw std::invalid_argument("group 2 rows are indexed 1-6");
      }
      break;
    case 3:
      if (index < 1) {
        throw std::invalid_argument("process index must be positive");
      }
      s.phi = rand_phi();
      s.r = rand_r();
      s.theta = rand_th();
      s.x0 = rand_disp();
      s.p0 = rand_disp();
      s.chi = rand_chi();
      s.n_t = rand_nt();
      s.a_t = rand_at();
      s.theta_t = rand_th();
      break;
    default:
      throw std::invalid_argument("process groups are 1, 2 or 3");
  }

  return GroupSample{s, process_from_physical(s)};
}

}  // namespace gausstomo
