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
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "gausstomo/common.hpp"
#include "gausstomo/core_model.hpp"
#include "gausstomo/phase_space.hpp"

namespace gausstomo {

// Stable seed derivation for per-task generators; the same (master, a, b)
// always yields the same stream regardless of execution order.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                          std::uint64_t b = 0);

// Binned heterodyne data for a set of input amplitudes: counts n_jk with
// sum_k n_jk = N for every j, plus the analytic calibration masses
// gamma_j = sum_k p_jk of the true process on the same grid.
struct MeasurementRecord {
  std::vector<Complex> inputs;
  long long shots = 0;  // N per input state
  Eigen::VectorXd gamma;
  Eigen::MatrixXi counts;  // J x K

  int input_count() const { return static_cast<int>(inputs.size()); }
  int bin_count() const { return static_cast<int>(counts.cols()); }
  Eigen::VectorXd nu_tilde(int j) const;  // relative frequencies of input j
};

// Draws N heterodyne samples from the output Gaussian of (p, alpha),
// conditioned on the grid: draws landing outside are rejected and redrawn,
// so the bin frequencies are exactly multinomial in the normalized p~.
// Throws RejectionOverflowError when the acceptance rate falls below 1e-3.
Eigen::VectorXi sample_output_counts(const QFunctionParams& p, Complex alpha,
                                     long long n, const PhaseSpaceGrid& grid,
                                     std::uint64_t seed);

MeasurementRecord run_experiment(const QFunctionParams& p,
                                 const std::vector<Complex>& inputs,
                                 long long n, const PhaseSpaceGrid& grid,
                                 std::uint64_t seed);

nlohmann::json record_to_json(const MeasurementRecord& rec);
MeasurementRecord record_from_json(const nlohmann::json& j);

}  // namespace gausstomo
