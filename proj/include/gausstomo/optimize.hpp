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
#include <functional>

#include "gausstomo/common.hpp"

namespace gausstomo {

// Small deterministic generator for optimizer bookkeeping (start points,
// jitter); measurement sampling uses its own stream.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  double uniform() {  // in [0, 1)
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

struct NelderMeadOptions {
  int max_evals = 4000;
  double f_tol_rel = 1e-8;
  double init_step = 0.25;  // initial simplex edge, in box units
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double f = 0.0;
  int evals = 0;
};

// Derivative-free simplex minimization with coordinates clipped to
// [lo, hi]. Deterministic for a fixed starting point.
NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& x0,
                             const Eigen::VectorXd& lo,
                             const Eigen::VectorXd& hi,
                             const NelderMeadOptions& opts = {});

struct BfgsOptions {
  int max_iterations = 10000;
  double grad_tol = 1e-7;     // infinity norm
  double armijo_c1 = 1e-4;
  int max_backtracks = 50;
  double f_tol_rel = 1e-12;   // flat-progress stop (see patience)
  int patience = 25;          // consecutive near-flat accepted steps allowed
};

struct BfgsResult {
  Eigen::VectorXd x;
  double f = 0.0;
  Eigen::VectorXd grad;
  int iterations = 0;
  bool converged = false;   // gradient tolerance reached
  bool stalled = false;     // no acceptable feasible step found
};

// Quasi-Newton ascent with backtracking line search. Steps that leave the
// feasible set are rejected by the line search; the accepted objective
// sequence is non-decreasing.
BfgsResult bfgs_maximize(
    const std::function<double(const Eigen::VectorXd&)>& value,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& gradient,
    const Eigen::VectorXd& x0,
    const std::function<bool(const Eigen::VectorXd&)>& feasible,
    const BfgsOptions& opts = {});

}  // namespace gausstomo
