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

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace gausstomo {

using Complex = std::complex<double>;

using Mat2c = Eigen::Matrix2cd;
using Mat4c = Eigen::Matrix4cd;
using Vec2c = Eigen::Vector2cd;
using Vec4c = Eigen::Vector4cd;

using Vec9 = Eigen::Matrix<double, 9, 1>;
using Vec14 = Eigen::Matrix<double, 14, 1>;
using Vec15 = Eigen::Matrix<double, 15, 1>;

inline constexpr int kRecoverableParams = 14;  // estimable exponent parameters
inline constexpr int kExtendedParams = 15;     // with the constant slot
inline constexpr int kTpParams = 9;            // trace-preserving model

// Numerical failures (as opposed to configuration errors, which use
// std::invalid_argument). The CLI maps these to distinct exit codes.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularA3Error : NumericalError {
  using NumericalError::NumericalError;
};

struct NonNormalizableError : NumericalError {
  using NumericalError::NumericalError;
};

struct EmptyGridError : NumericalError {
  using NumericalError::NumericalError;
};

struct RejectionOverflowError : NumericalError {
  using NumericalError::NumericalError;
};

struct NotICError : NumericalError {
  using NumericalError::NumericalError;
};

struct AllZeroRowError : NumericalError {
  using NumericalError::NumericalError;
};

struct AllNegativeSpectrumError : NumericalError {
  using NumericalError::NumericalError;
};

struct DivergentIntegralError : NumericalError {
  using NumericalError::NumericalError;
};

struct AllStartsSingularError : NumericalError {
  using NumericalError::NumericalError;
};

struct NoConvergenceError : NumericalError {
  using NumericalError::NumericalError;
};

struct NotCpError : NumericalError {
  using NumericalError::NumericalError;
};

}  // namespace gausstomo
