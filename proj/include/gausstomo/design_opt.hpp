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
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "gausstomo/common.hpp"
#include "gausstomo/core_model.hpp"
#include "gausstomo/mse_theory.hpp"
#include "gausstomo/phase_space.hpp"

namespace gausstomo {

enum class DesignStrategy { Geometric, Random, BestNonTp, BestTp };

std::string strategy_name(DesignStrategy s);

struct InputDesign {
  std::vector<Complex> amplitudes;
  double box_halfwidth = 0.0;
  double objective = 0.0;  // optimized figure of merit
  DesignStrategy strategy = DesignStrategy::Random;
  int starts = 0;
  long long evaluations = 0;
  std::uint64_t seed = 0;
};

nlohmann::json design_to_json(const InputDesign& d);
InputDesign design_from_json(const nlohmann::json& j);
void design_csv(const InputDesign& d, std::ostream& os);

// Process-independent design figure of merit: the trace of the leading
// 14 x 14 block of (V^T V)^-1. Returns +infinity for designs whose Gram
// matrix is singular beyond condition 1e12. The process- and N-independent
// upper bound on the asymptotic MSE is J * N * objective.
double geometric_objective(const std::vector<Complex>& amplitudes,
                           const PhaseSpaceGrid& grid);

// Uniformly drawn amplitudes in the [-L, L]^2 box.
std::vector<Complex> random_design(int j, double l, std::uint64_t seed);

// Multi-start simplex minimization of geometric_objective over the box.
// Starts are Latin-hypercube samples, optionally preceded by a warm start;
// deterministic for fixed seed. Requires j >= 6.
InputDesign optimize_geometric(int j, double l, const PhaseSpaceGrid& grid,
                               int starts, std::uint64_t seed,
                               const std::vector<Complex>* warm = nullptr);

enum class MseMode { NonTp, Tp };

// Truth-informed oracle designs minimizing the asymptotic MSE formulas.
// Simulation-only benchmark: requires the unknown process.
InputDesign optimize_best_informed(const QFunctionParams& truth, MseMode mode,
                                   int j, double l, const PhaseSpaceGrid& grid,
                                   long long n, int starts, std::uint64_t seed,
                                   int max_evals_per_start = 0);

// Sorts amplitudes lexicographically by (re, im) for cross-run comparison.
InputDesign canonicalize(InputDesign d);

// Greedy one-state extension: returns base plus the lattice point in the box
// that minimizes geometric_objective of the extended set. Useful as a warm
// start when growing a design by one state.
std::vector<Complex> extend_design_greedy(const std::vector<Complex>& base,
                                          double l,
                                          const PhaseSpaceGrid& grid,
                                          int lattice_points_per_axis = 13);

}  // namespace gausstomo
