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

#include <cstdint>
#include <optional>
#include <utility>

#include <nlohmann/json_fwd.hpp>

#include "gausstomo/common.hpp"
#include "gausstomo/core_model.hpp"

namespace gausstomo {

// Experimental knobs of a CPTP Gaussian channel: phase shift, squeezing,
// displacement, gain/loss, and coupling to a Gaussian reservoir. The
// symplectic pieces live in quadrature units where the vacuum Wigner
// covariance is I/2.
struct PhysicalChannelSpec {
  double phi = 0.0;      // phase, [0, 2pi)
  double r = 0.0;        // squeeze strength, [0, 1/3]
  double theta = 0.0;    // squeeze phase, [0, pi/2]
  double x0 = 0.0;       // displacement, [-2, 2] by default
  double p0 = 0.0;
  double chi = 1.0;      // gain, (0.1, 1.5)
  double n_t = 0.0;      // reservoir coupling, [0, 1]
  double a_t = 0.0;      // reservoir asymmetry, [-1, 1]
  double theta_t = 0.0;  // reservoir phase, [0, pi/2]

  static PhysicalChannelSpec idle() { return {}; }
};

nlohmann::json spec_to_json(const PhysicalChannelSpec& s);
PhysicalChannelSpec spec_from_json(const nlohmann::json& j);

// First/second-moment maps mu -> X mu + mu0, Sigma -> X^T Sigma X + Y.
struct ChannelMaps {
  Eigen::Matrix2d x;
  Eigen::Matrix2d y;
};

Eigen::Matrix2d rotation2(double phi);

// X = chi S(r, theta) R(phi) is proportionally symplectic
// (X^T Omega X = chi^2 Omega); Y carries |1 - chi^2|/2 of gain/loss vacuum
// noise plus the reservoir term (n_t/2) R^T diag(1+a_t, 1-a_t) R.
ChannelMaps xy_matrices(const PhysicalChannelSpec& spec);

// Minimum eigenvalue of X^T Sigma_in X + Y + i Omega / 2; a valid output
// state covariance keeps it above -1e-10.
double symplectic_check(const ChannelMaps& maps,
                        const Eigen::Matrix2d& sigma_in);

// Channel-level uncertainty preservation, min eigenvalue of
// Y + i (Omega - X^T Omega X) / 2; catches noiseless amplification that the
// single-state check cannot.
double channel_uncertainty_check(const ChannelMaps& maps);

// Regularized two-mode squeezed covariance, the printed cosh/sinh matrix
// over 2.
Eigen::Matrix4d sigma_t(double t);

// Exponent matrices at one regularization point:
//   A = (1/2) U [ (1 (+) X^T) Sigma_t (1 (+) X) + 0 (+) Y + 1/2 ]^-1 U^dag,
//   B = 2 A U (0, 0, x0, p0)^T,
// with c0 completed from the trace-preservation constraint. The bracket
// inverse is evaluated through its exact Schur form
//   [[ (1-tau^2) I + tau^2 Sz X Si^-1 X^T Sz , -tau Sz X Si^-1 ],
//    [ -tau Si^-1 X^T Sz                     ,  Si^-1          ]],
// tau = tanh(t/2), Si = X^T X / 2 + Y + I/2, which stays conditioned at
// arbitrarily large t.
QFunctionParams process_at_fixed_t(const PhysicalChannelSpec& spec, double t);

// Limit surrogate with a convergence ladder: t grows in steps of 2 until
// successive evaluations agree to 1e-8 max-abs entrywise. Throws
// NoConvergenceError if the ladder is exhausted and NotCpError if the
// result fails the positivity check.
QFunctionParams process_from_physical(const PhysicalChannelSpec& spec,
                                      double t_start = 14.0);

// Regularized identity channel: a1 = a2 = 1, g1 = -tanh(omega).
QFunctionParams idle_deformed(double omega);

struct GroupSample {
  PhysicalChannelSpec spec;
  QFunctionParams params;
};

// Benchmark process groups: group 1 is the idle channel, group 2 holds six
// single-operation rows (phase shifter, squeezer, displacer, gain,
// symmetric noise, asymmetric noise; index 1-6), group 3 is fully random.
// Wildcards are drawn uniformly from the documented ranges; the optional
// override replaces the displacement range.
GroupSample sample_group(int group, int index, std::uint64_t seed,
                         std::optional<std::pair<double, double>> x0p0_range =
                             std::nullopt);

}  // namespace gausstomo
