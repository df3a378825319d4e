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

#include "gausstomo/simulator.hpp"

#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

namespace gausstomo {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Explicit Box-Muller on engine-produced uniforms; keeps the sample stream
// independent of the standard library's distribution internals.
struct GaussianPairSource {
  std::mt19937_64 engine;

  explicit GaussianPairSource(std::uint64_t seed) : engine(seed) {}

  double uniform01() {  // in (0, 1]
    return (static_cast<double>(engine() >> 11) + 1.0) * 0x1.0p-53;
  }

  Eigen::Vector2d next() {
    const double r = std::sqrt(-2.0 * std::log(uniform01()));
    const double phi = kTwoPi * uniform01();
    return {r * std::cos(phi), r * std::sin(phi)};
  }
};

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                          std::uint64_t b) {
  return splitmix(master ^ splitmix(a ^ splitmix(b)));
}

Eigen::VectorXd MeasurementRecord::nu_tilde(int j) const {
  return counts.row(j).cast<double>() / static_cast<double>(shots);
}

Eigen::VectorXi sample_output_counts(const QFunctionParams& p, Complex alpha,
                                     long long n, const PhaseSpaceGrid& grid,
                                     std::uint64_t seed) {
  if (n < 1) {
    throw std::invalid_argument("shot count must be at least 1");
  }
  const GaussianMoments mom = output_gaussian_moments(p, alpha);
  const Eigen::Matrix2d chol = mom.cov.llt().matrixL();
  const Eigen::Vector2d mean = mom.mean;

  GaussianPairSource rng(seed);
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(grid.bin_count());

  long long accepted = 0;
  long long proposed = 0;
  while (accepted < n) {
    const Eigen::Vector2d draw = mean + chol * rng.next();
    ++proposed;
    const Complex z(draw[0], draw[1]);
    if (grid.contains(z)) {
      ++counts[grid.bin_index(z)];
      ++accepted;
    }
    if (proposed >= 10000 && accepted * 1000 < proposed) {
      throw RejectionOverflowError(
          "grid acceptance rate below 1e-3; grid badly placed");
    }
  }
  return counts;
}

MeasurementRecord run_experiment(const QFunctionParams& p,
                                 const std::vector<Complex>& inputs,
                                 long long n, const PhaseSpaceGrid& grid,
                                 std::uint64_t seed) {
  if (inputs.empty()) {
    throw std::invalid_argument("need at least one input amplitude");
  }
  MeasurementRecord rec;
  rec.inputs = inputs;
  rec.shots = n;
  const int j_count = rec.input_count();
  rec.gamma.resize(j_count);
  rec.counts.resize(j_count, grid.bin_count());
  for (int j = 0; j < j_count; ++j) {
    rec.gamma[j] = bin_probabilities(p, inputs[j], grid).gamma;
    rec.counts.row(j) = sample_output_counts(
        p, inputs[j], n, grid, derive_seed(seed, static_cast<std::uint64_t>(j)));
  }
  return rec;
}

nlohmann::json record_to_json(const MeasurementRecord& rec) {
  nlohmann::json inputs = nlohmann::json::array();
  for (const Complex& a : rec.inputs) {
    inputs.push_back({a.real(), a.imag()});
  }
  nlohmann::json gamma = nlohmann::json::array();
  for (int j = 0; j < rec.gamma.size(); ++j) {
    gamma.push_back(rec.gamma[j]);
  }
  nlohmann::json counts = nlohmann::json::array();
  for (int j = 0; j < rec.counts.rows(); ++j) {
    nlohmann::json row = nlohmann::json::array();
    for (int k = 0; k < rec.counts.cols(); ++k) {
      row.push_back(rec.counts(j, k));
    }
    counts.push_back(std::move(row));
  }
  return nlohmann::json{{"inputs", std::move(inputs)},
                        {"N", rec.shots},
                        {"gamma", std::move(gamma)},
                        {"counts", std::move(counts)}};
}

MeasurementRecord record_from_json(const nlohmann::json& j) {
  MeasurementRecord rec;
  for (const auto& a : j.at("inputs")) {
    rec.inputs.emplace_back(a.at(0).get<double>(), a.at(1).get<double>());
  }
  rec.shots = j.at("N").get<long long>();
  const auto& gamma = j.at("gamma");
  rec.gamma.resize(static_cast<Eigen::Index>(gamma.size()));
  for (Eigen::Index i = 0; i < rec.gamma.size(); ++i) {
    rec.gamma[i] = gamma.at(static_cast<size_t>(i)).get<double>();
  }
  const auto& counts = j.at("counts");
  const auto rows = static_cast<Eigen::Index>(counts.size());
  const auto cols =
      rows > 0 ? static_cast<Eigen::Index>(counts.at(0).size()) : 0;
  rec.counts.resize(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      rec.counts(r, c) =
          counts.at(static_cast<size_t>(r)).at(static_cast<size_t>(c)).get<int>();
    }
  }
  return rec;
}

}  // namespace gausstomo
