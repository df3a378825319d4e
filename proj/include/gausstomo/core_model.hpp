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

#include <utility>

#include <nlohmann/json_fwd.hpp>

#include "gausstomo/common.hpp"

namespace gausstomo {

// Exponent data of a single-mode Gaussian process Q function
//
//   log Q(alpha, z) = -Z^dag A Z + B^dag Z + c0,   Z = (alpha, alpha*, z, z*)^T
//
// with the 4x4 Hermitian A assembled from blocks
//
//   A = [[A1, A2], [A2^dag, A3]],
//   A1 = [[a1/2, -conj(c1)], [-c1, a1/2]],
//   A2 = (1/2) [[g2, conj(g1)], [g1, conj(g2)]],
//   A3 = [[a2/2, -conj(c2)], [-c2, a2/2]],
//   B  = (b1, conj(b1), b2, conj(b2))^T.
//
// This struct is the single source of truth for a Gaussian process.
struct QFunctionParams {
  double a1 = 0.0;
  double a2 = 0.0;
  Complex c1{0.0, 0.0};
  Complex c2{0.0, 0.0};
  Complex g1{0.0, 0.0};
  Complex g2{0.0, 0.0};
  Complex b1{0.0, 0.0};
  Complex b2{0.0, 0.0};
  double c0 = 0.0;

  Mat2c block_a1() const;
  Mat2c block_a2() const;
  Mat2c block_a3() const;
  Vec2c bvec1() const;
  Vec2c bvec2() const;

  bool operator==(const QFunctionParams&) const = default;
};

// Fixed basis maps between the complex (z, z*) and real (x, p) pictures:
// z = (x + i p) / sqrt(2).
const Mat2c& u0_matrix();   // [[1, i], [1, -i]] / sqrt(2)
const Mat4c& u_matrix();    // blockdiag(U0, U0)
const Mat2c& sigma_x_2c();  // Pauli x

std::pair<Mat4c, Vec4c> assemble_matrices(const QFunctionParams& p);

// Canonical exponent evaluation, -Z^dag A Z + B^dag Z + c0. Every other Q
// evaluation in the library must agree with this one.
double log_q_value(const QFunctionParams& p, Complex alpha, Complex z);

// Parameter-vector layout. The 14 recoverable entries are
//   x = (a1, a2, b1r, b1i, b2r, b2i, c1r, c1i, c2r, c2i, g1r, g1i, g2r, g2i)
// and the extended vector appends the constant slot. The constant slot
// stores -c0 so that the row returned by build_row_v carries +1 there; see
// the layout note on build_row_v.
Vec14 vector_from_params(const QFunctionParams& p);
Vec15 extended_vector_from_params(const QFunctionParams& p);
QFunctionParams params_from_vector(const Vec14& x, double c0 = 0.0);
QFunctionParams params_from_extended_vector(const Vec15& x);

// Row v with -v^T x' == log_q_value(p, alpha, z) identically in p.
//
// Layout note: the slot/monomial pairing is fixed by that identity under the
// vector layout above. Relative to the commonly printed variant of this row
// (which pairs the cross monomials the other way around and flips a few
// signs), the differences are: slots 3-10 carry -2*alpha_r, -2*alpha_i,
// -2*z_r, -2*z_i, -2*Re(alpha^2), +2*Im(alpha^2), -2*Re(z^2), +2*Im(z^2);
// slots 11-14 pair g1 with conj(alpha)*conj(z) and g2 with alpha*conj(z);
// the constant slot is +1 (hence -c0 in the extended vector). The unit tests
// pin this reconciliation.
Vec15 build_row_v(Complex alpha, Complex z);

// Trace-preserving 9-parameter model, ordered
//   (a2, b2r, b2i, c2r, c2i, g1r, g1i, g2r, g2i).
using TpParamVector = Vec9;

TpParamVector tp_vector_from_params(const QFunctionParams& p);

// Completes (a1, b1, c0) from the other nine parameters:
//   A1 = A2 A3^-1 A2^dag,  b1 = A2 A3^-1 b2,
//   c0 = log(2 sqrt(det A3)) - (1/4) b2^dag A3^-1 b2.
// Throws SingularA3Error unless a2 > 0 and a2^2 - 4|c2|^2 > 1e-12.
QFunctionParams tp_complete(const TpParamVector& t);

struct TpResidual {
  double w_norm = 0.0;  // Frobenius norm of A1 - A2 A3^-1 A2^dag
  double y_norm = 0.0;  // norm of b1 - A2 A3^-1 b2
  double w0 = 0.0;      // c0 - log(2 sqrt(det A3)) + (1/4) b2^dag A3^-1 b2

  bool is_tp(double tol = 1e-10) const {
    return w_norm < tol && y_norm < tol && std::abs(w0) < tol;
  }
};

TpResidual check_tp(const QFunctionParams& p);

enum class PositivityMode { Cp, Tp };

struct PositivityReport {
  PositivityMode mode;
  double value = 0.0;  // CP: min eigenvalue of A; TP: a2^2 - 4|c2|^2
  bool pass = false;   // value >= -1e-10
};

PositivityReport positivity_status(const QFunctionParams& p, PositivityMode mode);

// Spectral projection onto the positive cone in the real representation:
// A' = U^dag A U is symmetrized, eigendecomposed, negative eigenvalues are
// zeroed and the result rescaled to preserve tr(A'). B and c0 pass through.
QFunctionParams project_physical(const QFunctionParams& p);

// CPTP reference process: single retained output arm of a two-mode
// beam-splitter coupling of strength theta; a1 = cos^2(theta), a2 = 1,
// g1 = -cos(theta), everything else zero.
QFunctionParams beam_splitter_process(double theta);

// JSON with fixed keys {a1, a2, c1, c2, g1, g2, b1, b2, c0}; complex values
// serialize as [re, im].
nlohmann::json params_to_json(const QFunctionParams& p);
QFunctionParams params_from_json(const nlohmann::json& j);

}  // namespace gausstomo
