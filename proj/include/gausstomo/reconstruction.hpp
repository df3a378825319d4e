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

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "gausstomo/common.hpp"
#include "gausstomo/core_model.hpp"
#include "gausstomo/phase_space.hpp"
#include "gausstomo/simulator.hpp"

namespace gausstomo {

// JK x 15 design matrix, rows ordered input-major then bin, with its Gram
// matrix. The design is informationally complete iff the Gram matrix is
// well conditioned.
struct DesignMatrix {
  Eigen::MatrixXd v;
  Eigen::MatrixXd gram;  // V^T V, 15 x 15
  double cond = 0.0;
  int input_count = 0;
  int bin_count = 0;
};

DesignMatrix build_design_matrix(const std::vector<Complex>& inputs,
                                 const PhaseSpaceGrid& grid);

inline constexpr double kIcConditionLimit = 1e10;

struct IcDiagnostics {
  bool is_ic = false;
  double cond = 0.0;
  std::optional<Vec15> null_vector;  // unit eigenvector of the smallest mode
};

IcDiagnostics ic_diagnostics(const DesignMatrix& d);

struct EstimateReport {
  Eigen::VectorXd x;        // 14 recoverable or 9 trace-preserving parameters
  double c0_hat = 0.0;      // constant slot (absorbs the bin measure)
  std::string method;
  int iterations = 0;
  double grad_norm = 0.0;
  bool converged = true;
  bool at_boundary = false;  // stopped against the positivity constraint
  bool projected = false;
  double cp_min_eig = 0.0;   // min eigenvalue of the assembled A
  double tp_margin = 0.0;    // a2^2 - 4|c2|^2 (trace-preserving fits)

  QFunctionParams to_params() const;
};

nlohmann::json report_to_json(const EstimateReport& rep);

// Relative-frequency view of a measurement record; also representable
// exactly for noiseless data (nu~ = p~), which the count-based record
// cannot express.
struct FrequencyData {
  std::vector<Complex> inputs;
  Eigen::VectorXd gamma;
  Eigen::MatrixXd nu_tilde;  // J x K, rows sum to 1

  int input_count() const { return static_cast<int>(inputs.size()); }
  int bin_count() const { return static_cast<int>(nu_tilde.cols()); }
};

FrequencyData frequencies_from_record(const MeasurementRecord& rec);
FrequencyData noiseless_frequencies(const QFunctionParams& p,
                                    const std::vector<Complex>& inputs,
                                    const PhaseSpaceGrid& grid);

// Logarithmic inversion: least squares of the surviving negative
// log-frequencies -log(gamma_j nu~_jk) (zero-count rows dropped) against the
// design rows; the estimate is the first-14 slice. Optionally followed by
// the physicality projection.
EstimateReport li_estimate(const MeasurementRecord& rec,
                           const DesignMatrix& d, bool project = false);
EstimateReport li_estimate(const FrequencyData& data, const DesignMatrix& d,
                           bool project = false);

struct MlOptions {
  int max_iterations = 10000;
  double grad_tol_scale = 1e-7;  // tolerance = scale * sum_j gamma_j
  int multi_starts = 4;          // trace-preserving fit only
  std::uint64_t seed = 0;
  bool enforce_cp = true;        // step rejection on the CP cone (non-TP fit)
  double cp_tol = 1e-8;
  double tp_margin = 1e-10;      // keep a2^2 - 4|c2|^2 above this
  std::optional<Eigen::VectorXd> init;  // 15-vector (non-TP) or 9-vector (TP)
};

// Maximum-likelihood fit of the 15-dimensional exponent vector under the
// pooled multinomial likelihood
//   log L = -sum_{nu>0} nu_jk v_jk^T x' - (sum_j gamma_j) log sum_jk
//           exp(-v_jk^T x').
// Initialized from the (projected) logarithmic inversion when no explicit
// init is given.
EstimateReport ml_estimate_nontp(const MeasurementRecord& rec,
                                 const PhaseSpaceGrid& grid,
                                 const MlOptions& opts = {});
EstimateReport ml_estimate_nontp(const FrequencyData& data,
                                 const PhaseSpaceGrid& grid,
                                 const MlOptions& opts = {});

// Constrained ML over the 9 trace-preserving parameters, with analytic
// gradient assembled from the linearized design rows. Needs at least three
// input states. Multi-start around a moment-matched initializer.
EstimateReport ml_estimate_tp(const MeasurementRecord& rec,
                              const PhaseSpaceGrid& grid,
                              const MlOptions& opts = {});
EstimateReport ml_estimate_tp(const FrequencyData& data,
                              const PhaseSpaceGrid& grid,
                              const MlOptions& opts = {});

// Log-likelihood values and analytic gradients backing the two fits;
// exposed for direct validation against finite differences.
std::pair<double, Vec15> nontp_loglike_and_gradient(const FrequencyData& data,
                                                    const PhaseSpaceGrid& grid,
                                                    const Vec15& x);
std::pair<double, Vec9> tp_loglike_and_gradient(const FrequencyData& data,
                                                const PhaseSpaceGrid& grid,
                                                const TpParamVector& t);

// Moment-matched initializer for the trace-preserving fit: the shared
// output covariance fixes A3 and the per-input means fix (A2, b2) through a
// linear solve.
TpParamVector tp_init_from_moments(const FrequencyData& data,
                                   const PhaseSpaceGrid& grid);

}  // namespace gausstomo
