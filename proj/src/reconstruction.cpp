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

#include "gausstomo/reconstruction.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "gausstomo/optimize.hpp"
#include "gausstomo/tp_rows.hpp"

namespace gausstomo {

DesignMatrix build_design_matrix(const std::vector<Complex>& inputs,
                                 const PhaseSpaceGrid& grid) {
  if (inputs.empty()) {
    throw std::invalid_argument("design needs at least one input state");
  }
  DesignMatrix d;
  d.input_count = static_cast<int>(inputs.size());
  d.bin_count = grid.bin_count();
  d.v.resize(static_cast<Eigen::Index>(d.input_count) * d.bin_count, 15);
  for (int j = 0; j < d.input_count; ++j) {
    for (int k = 0; k < d.bin_count; ++k) {
      d.v.row(static_cast<Eigen::Index>(j) * d.bin_count + k) =
          build_row_v(inputs[j], grid.bin_center(k)).transpose();
    }
  }
  d.gram = d.v.transpose() * d.v;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d.gram,
                                                    Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  const double lmax = es.eigenvalues().maxCoeff();
  d.cond = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
  return d;
}

IcDiagnostics ic_diagnostics(const DesignMatrix& d) {
  IcDiagnostics diag;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d.gram);
  const double lmax = es.eigenvalues().maxCoeff();
  const double lmin = es.eigenvalues()[0];
  diag.cond =
      lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
  diag.is_ic = diag.cond < kIcConditionLimit;
  if (!diag.is_ic) {
    diag.null_vector = Vec15(es.eigenvectors().col(0));
  }
  return diag;
}

QFunctionParams EstimateReport::to_params() const {
  if (x.size() == kTpParams) {
    return tp_complete(Vec9(x));
  }
  return params_from_vector(Vec14(x), c0_hat);
}

nlohmann::json report_to_json(const EstimateReport& rep) {
  nlohmann::json x = nlohmann::json::array();
  for (Eigen::Index i = 0; i < rep.x.size(); ++i) {
    x.push_back(rep.x[i]);
  }
  return nlohmann::json{{"x", std::move(x)},
                        {"c0_hat", rep.c0_hat},
                        {"method", rep.method},
                        {"iterations", rep.iterations},
                        {"grad_norm", rep.grad_norm},
                        {"converged", rep.converged},
                        {"at_boundary", rep.at_boundary},
                        {"projected", rep.projected},
                        {"cp_min_eig", rep.cp_min_eig},
                        {"tp_margin", rep.tp_margin}};
}

FrequencyData frequencies_from_record(const MeasurementRecord& rec) {
  FrequencyData data;
  data.inputs = rec.inputs;
  data.gamma = rec.gamma;
  data.nu_tilde =
      rec.counts.cast<double>() / static_cast<double>(rec.shots);
  return data;
}

FrequencyData noiseless_frequencies(const QFunctionParams& p,
                                    const std::vector<Complex>& inputs,
                                    const PhaseSpaceGrid& grid) {
  FrequencyData data;
  data.inputs = inputs;
  data.gamma.resize(static_cast<Eigen::Index>(inputs.size()));
  data.nu_tilde.resize(static_cast<Eigen::Index>(inputs.size()),
                       grid.bin_count());
  for (size_t j = 0; j < inputs.size(); ++j) {
    const BinProbabilities bp = bin_probabilities(p, inputs[j], grid);
    data.gamma[static_cast<Eigen::Index>(j)] = bp.gamma;
    data.nu_tilde.row(static_cast<Eigen::Index>(j)) = bp.p_tilde.transpose();
  }
  return data;
}

EstimateReport li_estimate(const MeasurementRecord& rec,
                           const DesignMatrix& d, bool project) {
  return li_estimate(frequencies_from_record(rec), d, project);
}

EstimateReport li_estimate(const FrequencyData& data, const DesignMatrix& d,
                           bool project) {
  const int j_count = data.input_count();
  const int k_count = data.bin_count();
  if (j_count != d.input_count || k_count != d.bin_count) {
    throw std::invalid_argument("record and design matrix shapes differ");
  }

  Eigen::Index survivors = 0;
  for (int j = 0; j < j_count; ++j) {
    const auto row = data.nu_tilde.row(j);
    if (!(row.sum() > 0.0)) {
      throw AllZeroRowError("input state with no recorded counts");
    }
    survivors += (row.array() > 0.0).count();
  }

  Eigen::MatrixXd vs(survivors, 15);
  Eigen::VectorXd u(survivors);
  Eigen::Index r = 0;
  for (int j = 0; j < j_count; ++j) {
    for (int k = 0; k < k_count; ++k) {
      const double nu = data.nu_tilde(j, k);
      if (!(nu > 0.0)) continue;
      vs.row(r) = d.v.row(static_cast<Eigen::Index>(j) * k_count + k);
      u[r] = -std::log(data.gamma[j] * nu);
      ++r;
    }
  }

  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(vs.transpose() * vs,
                                                      Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    const double lmax = es.eigenvalues().maxCoeff();
    if (!(lmin > 0.0) || lmax / lmin >= kIcConditionLimit) {
      throw NotICError("surviving rows are not informationally complete");
    }
  }

  const Vec15 xext = vs.householderQr().solve(u);

  EstimateReport rep;
  rep.method = project ? "li-proj" : "li";
  rep.x = xext.head<14>();
  rep.c0_hat = -xext[14];
  QFunctionParams params = params_from_extended_vector(xext);
  if (project) {
    params = project_physical(params);
    rep.x = vector_from_params(params);
    rep.projected = true;
  }
  rep.cp_min_eig = positivity_status(params, PositivityMode::Cp).value;
  rep.tp_margin = params.a2 * params.a2 - 4.0 * std::norm(params.c2);
  return rep;
}

namespace {

// Pooled multinomial weights nu_jk = gamma_j * nu~_jk, flattened input-major.
Eigen::VectorXd pooled_weights(const FrequencyData& data) {
  const int j_count = data.input_count();
  const int k_count = data.bin_count();
  Eigen::VectorXd nu(static_cast<Eigen::Index>(j_count) * k_count);
  for (int j = 0; j < j_count; ++j) {
    nu.segment(static_cast<Eigen::Index>(j) * k_count, k_count) =
        data.gamma[j] * data.nu_tilde.row(j).transpose();
  }
  return nu;
}

double log_sum_exp(const Eigen::VectorXd& e) {
  const double m = e.maxCoeff();
  return m + std::log((e.array() - m).exp().sum());
}

Eigen::VectorXd tp_log_masses(const TpParamVector& t, const FrequencyData& data,
                              const PhaseSpaceGrid& grid) {
  const QFunctionParams p = tp_complete(t);
  const int k_count = grid.bin_count();
  Eigen::VectorXd e(static_cast<Eigen::Index>(data.input_count()) * k_count);
  for (int j = 0; j < data.input_count(); ++j) {
    e.segment(static_cast<Eigen::Index>(j) * k_count, k_count) =
        log_bin_masses(p, data.inputs[static_cast<size_t>(j)], grid);
  }
  return e;
}

}  // namespace

std::pair<double, Vec15> nontp_loglike_and_gradient(const FrequencyData& data,
                                                    const PhaseSpaceGrid& grid,
                                                    const Vec15& x) {
  const DesignMatrix d = build_design_matrix(data.inputs, grid);
  const Eigen::VectorXd nu = pooled_weights(data);
  const double mu = data.gamma.sum();
  const Eigen::VectorXd e = -(d.v * x);
  const double value = nu.dot(e) - mu * log_sum_exp(e);
  const double m = e.maxCoeff();
  Eigen::VectorXd q = (e.array() - m).exp();
  q /= q.sum();
  const Vec15 grad = d.v.transpose() * (mu * q - nu);
  return {value, grad};
}

std::pair<double, Vec9> tp_loglike_and_gradient(const FrequencyData& data,
                                                const PhaseSpaceGrid& grid,
                                                const TpParamVector& t) {
  const Eigen::VectorXd nu = pooled_weights(data);
  const double mu = data.gamma.sum();
  const Eigen::VectorXd e = tp_log_masses(t, data, grid);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    if (nu[i] > 0.0) acc += nu[i] * e[i];
  }
  const double value = acc - mu * log_sum_exp(e);

  const double m = e.maxCoeff();
  Eigen::VectorXd q = (e.array() - m).exp();
  q /= q.sum();
  const TpRowWorkspace ws(t);
  const int k_count = grid.bin_count();
  Vec9 grad = Vec9::Zero();
  for (int j = 0; j < data.input_count(); ++j) {
    const TpRowInputTerms in =
        ws.input_terms(data.inputs[static_cast<size_t>(j)]);
    for (int k = 0; k < k_count; ++k) {
      const Eigen::Index i = static_cast<Eigen::Index>(j) * k_count + k;
      const double wgt = nu[i] - mu * q[i];
      if (wgt != 0.0) {
        grad += wgt * ws.row(in, grid.bin_center(k));
      }
    }
  }
  return {value, grad};
}

EstimateReport ml_estimate_nontp(const MeasurementRecord& rec,
                                 const PhaseSpaceGrid& grid,
                                 const MlOptions& opts) {
  return ml_estimate_nontp(frequencies_from_record(rec), grid, opts);
}

EstimateReport ml_estimate_nontp(const FrequencyData& data,
                                 const PhaseSpaceGrid& grid,
                                 const MlOptions& opts) {
  const DesignMatrix d = build_design_matrix(data.inputs, grid);
  const Eigen::VectorXd nu = pooled_weights(data);
  const double mu = data.gamma.sum();

  const auto value = [&](const Eigen::VectorXd& x) {
    const Eigen::VectorXd e = -(d.v * x);
    return nu.dot(e) - mu * log_sum_exp(e);
  };
  const auto gradient = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd e = -(d.v * x);
    const double m = e.maxCoeff();
    Eigen::VectorXd q = (e.array() - m).exp();
    q /= q.sum();
    return Eigen::VectorXd(d.v.transpose() * (mu * q - nu));
  };
  const auto feasible = [&](const Eigen::VectorXd& x) {
    if (!opts.enforce_cp) return true;
    const QFunctionParams p = params_from_extended_vector(Vec15(x));
    return positivity_status(p, PositivityMode::Cp).value >= -opts.cp_tol;
  };

  Vec15 init;
  if (opts.init) {
    init = Vec15(*opts.init);
  } else {
    EstimateReport li = li_estimate(data, d, opts.enforce_cp);
    init = extended_vector_from_params(li.to_params());
  }

  BfgsOptions bopts;
  bopts.max_iterations = opts.max_iterations;
  bopts.grad_tol = opts.grad_tol_scale * mu;
  const BfgsResult res = bfgs_maximize(value, gradient, init, feasible, bopts);

  EstimateReport rep;
  rep.method = "ml";
  rep.iterations = res.iterations;
  rep.grad_norm = res.grad.lpNorm<Eigen::Infinity>();
  rep.converged = res.converged;
  rep.at_boundary = res.stalled && opts.enforce_cp;

  QFunctionParams params = params_from_extended_vector(Vec15(res.x));
  if (opts.enforce_cp) {
    const QFunctionParams projected = project_physical(params);
    rep.projected = !(projected == params);
    params = projected;
  }
  rep.x = vector_from_params(params);
  rep.c0_hat = params.c0;
  rep.cp_min_eig = positivity_status(params, PositivityMode::Cp).value;
  rep.tp_margin = params.a2 * params.a2 - 4.0 * std::norm(params.c2);
  return rep;
}

TpParamVector tp_init_from_moments(const FrequencyData& data,
                                   const PhaseSpaceGrid& grid) {
  const int j_count = data.input_count();
  const int k_count = data.bin_count();

  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  std::vector<Eigen::Vector2d> means(static_cast<size_t>(j_count));
  for (int j = 0; j < j_count; ++j) {
    Eigen::Vector2d m = Eigen::Vector2d::Zero();
    for (int k = 0; k < k_count; ++k) {
      const Complex z = grid.bin_center(k);
      m += data.nu_tilde(j, k) * Eigen::Vector2d(z.real(), z.imag());
    }
    means[static_cast<size_t>(j)] = m;
    for (int k = 0; k < k_count; ++k) {
      const Complex z = grid.bin_center(k);
      const Eigen::Vector2d dz(z.real() - m[0], z.imag() - m[1]);
      cov += data.nu_tilde(j, k) * dz * dz.transpose();
    }
  }
  cov /= static_cast<double>(j_count);
  // Undo the midpoint binning smear, keeping the estimate safely positive.
  cov -= (grid.bin_width() * grid.bin_width() / 12.0) *
         Eigen::Matrix2d::Identity();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
  const Eigen::Vector2d ev = es.eigenvalues().cwiseMax(0.05);
  cov = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();

  const Eigen::Matrix2d lambda = 0.5 * cov.inverse();
  Mat2c t;
  t << Complex(1.0), Complex(0.0, 1.0), Complex(1.0), Complex(0.0, -1.0);
  const Mat2c tinv = t.inverse();
  const Mat2c a3 = tinv.adjoint() * lambda.cast<Complex>() * tinv;

  TpParamVector out = TpParamVector::Zero();
  out[0] = 2.0 * a3(0, 0).real();  // a2
  const Complex c2 = -a3(1, 0);
  out[3] = c2.real();
  out[4] = c2.imag();

  // eta1_j = b2/2 - (g2* alpha_j + g1* alpha_j*)/2 from the output means.
  Eigen::MatrixXcd sys(j_count, 3);
  Eigen::VectorXcd rhs(j_count);
  for (int j = 0; j < j_count; ++j) {
    const Eigen::Vector2d eta = 0.5 * lambda * means[static_cast<size_t>(j)];
    rhs[j] = Complex(eta[0], eta[1]);
    const Complex a = data.inputs[static_cast<size_t>(j)];
    sys(j, 0) = Complex(0.5);
    sys(j, 1) = -0.5 * std::conj(a);  // multiplies conj(g1)
    sys(j, 2) = -0.5 * a;             // multiplies conj(g2)
  }
  const Eigen::VectorXcd sol =
      sys.completeOrthogonalDecomposition().solve(rhs);
  if (sol.allFinite()) {
    out[1] = sol[0].real();
    out[2] = sol[0].imag();
    const Complex g1 = std::conj(sol[1]);
    const Complex g2 = std::conj(sol[2]);
    out[5] = g1.real();
    out[6] = g1.imag();
    out[7] = g2.real();
    out[8] = g2.imag();
  }

  // Keep the initializer inside the admissible cone.
  const double margin =
      out[0] * out[0] - 4.0 * (out[3] * out[3] + out[4] * out[4]);
  if (out[0] <= 0.0 || margin <= 1e-6) {
    out[0] = std::max(out[0], 0.5);
    out[3] *= 0.25;
    out[4] *= 0.25;
  }
  return out;
}

EstimateReport ml_estimate_tp(const MeasurementRecord& rec,
                              const PhaseSpaceGrid& grid,
                              const MlOptions& opts) {
  return ml_estimate_tp(frequencies_from_record(rec), grid, opts);
}

EstimateReport ml_estimate_tp(const FrequencyData& data,
                              const PhaseSpaceGrid& grid,
                              const MlOptions& opts) {
  if (data.input_count() < 3) {
    throw NotICError("trace-preserving fit needs at least 3 input states");
  }

  const double mu = data.gamma.sum();
  const auto pair_at = [&](const Eigen::VectorXd& x) {
    return tp_loglike_and_gradient(data, grid, Vec9(x));
  };
  const auto value = [&](const Eigen::VectorXd& x) {
    try {
      return pair_at(x).first;
    } catch (const SingularA3Error&) {
      return -std::numeric_limits<double>::infinity();
    }
  };
  const auto gradient = [&](const Eigen::VectorXd& x) {
    return Eigen::VectorXd(pair_at(x).second);
  };
  const auto feasible = [&](const Eigen::VectorXd& x) {
    const double a2 = x[0];
    const double c2sq = x[3] * x[3] + x[4] * x[4];
    return a2 > 0.0 && a2 * a2 - 4.0 * c2sq > opts.tp_margin;
  };

  TpParamVector base_init;
  if (opts.init) {
    base_init = Vec9(*opts.init);
  } else {
    base_init = tp_init_from_moments(data, grid);
  }
  if (!feasible(base_init)) {
    base_init = TpParamVector::Zero();
    base_init[0] = 1.0;
  }

  BfgsOptions bopts;
  bopts.max_iterations = opts.max_iterations;
  bopts.grad_tol = opts.grad_tol_scale * mu;

  SplitMix64 rng(derive_seed(opts.seed, 0x7063ull));
  BfgsResult best;
  bool have_best = false;
  const int starts = std::max(1, opts.multi_starts);
  for (int s = 0; s < starts; ++s) {
    Eigen::VectorXd x0 = base_init;
    if (s > 0) {  // jitter retries around the initializer
      for (Eigen::Index i = 0; i < x0.size(); ++i) {
        x0[i] += 0.1 * (std::abs(x0[i]) + 0.2) * (2.0 * rng.uniform() - 1.0);
      }
      if (!feasible(x0)) continue;
    }
    const BfgsResult res = bfgs_maximize(value, gradient, x0, feasible, bopts);
    if (!have_best || res.f > best.f) {
      best = res;
      have_best = true;
    }
  }

  EstimateReport rep;
  rep.method = "ml-tp";
  rep.x = best.x;
  rep.iterations = best.iterations;
  rep.grad_norm = best.grad.lpNorm<Eigen::Infinity>();
  rep.converged = best.converged;
  const double margin = best.x[0] * best.x[0] -
                        4.0 * (best.x[3] * best.x[3] + best.x[4] * best.x[4]);
  rep.tp_margin = margin;
  rep.at_boundary = best.stalled || margin < 1e-6;
  const QFunctionParams params = tp_complete(Vec9(best.x));
  rep.c0_hat = params.c0;
  rep.cp_min_eig = positivity_status(params, PositivityMode::Cp).value;
  return rep;
}

}  // namespace gausstomo
