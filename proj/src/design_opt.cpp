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

#include "gausstomo/design_opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <nlohmann/json.hpp>

#include "gausstomo/optimize.hpp"

namespace gausstomo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSingularCond = 1e12;

using Mat15x6 = Eigen::Matrix<double, 15, 6>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

// Every design-row entry is linear in the bin features
// w(z) = (1, z_r, z_i, z_r^2, z_i^2, z_r z_i), so the Gram matrix assembles
// as sum_j P(alpha_j) W P(alpha_j)^T with W = sum_k w(z_k) w(z_k)^T cached
// per grid. This keeps the design objective independent of the bin count.
Mat6 grid_feature_gram(const PhaseSpaceGrid& grid) {
  Mat6 w = Mat6::Zero();
  Eigen::Matrix<double, 6, 1> f;
  for (int k = 0; k < grid.bin_count(); ++k) {
    const Complex z = grid.bin_center(k);
    f << 1.0, z.real(), z.imag(), z.real() * z.real(), z.imag() * z.imag(),
        z.real() * z.imag();
    w += f * f.transpose();
  }
  return w;
}

Mat15x6 row_coefficients(Complex alpha) {
  const double ar = alpha.real();
  const double ai = alpha.imag();
  Mat15x6 p = Mat15x6::Zero();
  p(0, 0) = ar * ar + ai * ai;
  p(1, 3) = 1.0;
  p(1, 4) = 1.0;
  p(2, 0) = -2.0 * ar;
  p(3, 0) = -2.0 * ai;
  p(4, 1) = -2.0;
  p(5, 2) = -2.0;
  p(6, 0) = -2.0 * (ar * ar - ai * ai);
  p(7, 0) = 2.0 * (2.0 * ar * ai);
  p(8, 3) = -2.0;
  p(8, 4) = 2.0;
  p(9, 5) = 4.0;
  p(10, 1) = 2.0 * ar;   // g1r with Re(conj(alpha) conj(z))
  p(10, 2) = -2.0 * ai;
  p(11, 1) = -2.0 * ai;  // g1i
  p(11, 2) = -2.0 * ar;
  p(12, 1) = 2.0 * ar;   // g2r with Re(alpha conj(z))
  p(12, 2) = 2.0 * ai;
  p(13, 1) = 2.0 * ai;   // g2i
  p(13, 2) = -2.0 * ar;
  p(14, 0) = 1.0;
  return p;
}

class GeometricObjective {
 public:
  explicit GeometricObjective(const PhaseSpaceGrid& grid)
      : w_(grid_feature_gram(grid)) {}

  double operator()(const std::vector<Complex>& amps) const {
    Eigen::Matrix<double, 15, 15> gram = Eigen::Matrix<double, 15, 15>::Zero();
    for (const Complex& a : amps) {
      const Mat15x6 p = row_coefficients(a);
      gram += p * w_ * p.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 15, 15>> es(gram);
    const auto& ev = es.eigenvalues();
    if (!(ev[0] > 0.0) || ev[14] / ev[0] >= kSingularCond) {
      return kInf;
    }
    // Trace of the leading 14x14 block of the inverse.
    double tr = 0.0;
    for (int i = 0; i < 15; ++i) {
      const double tail = es.eigenvectors()(14, i);
      tr += (1.0 - tail * tail) / ev[i];
    }
    return tr;
  }

  double operator()(const Eigen::VectorXd& theta) const {
    return (*this)(unpack(theta));
  }

  static std::vector<Complex> unpack(const Eigen::VectorXd& theta) {
    std::vector<Complex> amps(static_cast<size_t>(theta.size() / 2));
    for (size_t j = 0; j < amps.size(); ++j) {
      amps[j] = Complex(theta[2 * static_cast<Eigen::Index>(j)],
                        theta[2 * static_cast<Eigen::Index>(j) + 1]);
    }
    return amps;
  }

  static Eigen::VectorXd pack(const std::vector<Complex>& amps) {
    Eigen::VectorXd theta(2 * static_cast<Eigen::Index>(amps.size()));
    for (size_t j = 0; j < amps.size(); ++j) {
      theta[2 * static_cast<Eigen::Index>(j)] = amps[j].real();
      theta[2 * static_cast<Eigen::Index>(j) + 1] = amps[j].imag();
    }
    return theta;
  }

 private:
  Mat6 w_;
};

// Latin-hypercube start points over [-l, l]^dim.
std::vector<Eigen::VectorXd> lhs_starts(int count, Eigen::Index dim, double l,
                                        SplitMix64& rng) {
  std::vector<Eigen::VectorXd> starts(static_cast<size_t>(count),
                                      Eigen::VectorXd(dim));
  for (Eigen::Index d = 0; d < dim; ++d) {
    std::vector<int> strata(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) strata[static_cast<size_t>(i)] = i;
    for (int i = count - 1; i > 0; --i) {  // Fisher-Yates
      const int k = static_cast<int>(rng.next() % static_cast<std::uint64_t>(i + 1));
      std::swap(strata[static_cast<size_t>(i)], strata[static_cast<size_t>(k)]);
    }
    for (int i = 0; i < count; ++i) {
      const double u =
          (static_cast<double>(strata[static_cast<size_t>(i)]) + rng.uniform()) /
          static_cast<double>(count);
      starts[static_cast<size_t>(i)][d] = -l + 2.0 * l * u;
    }
  }
  return starts;
}

InputDesign run_multistart(
    const std::function<double(const Eigen::VectorXd&)>& objective, int j,
    double l, int starts, std::uint64_t seed, DesignStrategy tag,
    const std::vector<Complex>* warm, int max_evals_per_start) {
  const Eigen::Index dim = 2 * static_cast<Eigen::Index>(j);
  const Eigen::VectorXd lo = Eigen::VectorXd::Constant(dim, -l);
  const Eigen::VectorXd hi = Eigen::VectorXd::Constant(dim, l);

  SplitMix64 rng(seed);
  std::vector<Eigen::VectorXd> x0s = lhs_starts(starts, dim, l, rng);

  NelderMeadOptions nm;
  nm.max_evals = max_evals_per_start > 0
                     ? max_evals_per_start
                     : 400 * static_cast<int>(dim);

  InputDesign best;
  best.objective = kInf;
  best.box_halfwidth = l;
  best.strategy = tag;
  best.starts = static_cast<int>(x0s.size());
  best.seed = seed;
  auto consider = [&](const NelderMeadResult& res) {
    best.evaluations += res.evals;
    if (res.f < best.objective) {
      best.objective = res.f;
      best.amplitudes = GeometricObjective::unpack(res.x);
    }
  };
  for (const Eigen::VectorXd& x0 : x0s) {
    consider(nelder_mead(objective, x0, lo, hi, nm));
  }
  if (warm != nullptr && !warm->empty()) {
    Eigen::VectorXd w0(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      const size_t idx = static_cast<size_t>(i / 2);
      const Complex a = idx < warm->size()
                            ? (*warm)[idx]
                            : Complex(rng.uniform(-l, l), rng.uniform(-l, l));
      w0[i] = (i % 2 == 0) ? a.real() : a.imag();
    }
    NelderMeadOptions polish = nm;  // keep the warm configuration intact
    polish.init_step = 0.03;
    consider(nelder_mead(objective, w0, lo, hi, polish));
    ++best.starts;
  }
  if (!std::isfinite(best.objective)) {
    throw AllStartsSingularError("every optimizer start was singular");
  }
  // final polish from the incumbent with a tight simplex
  {
    NelderMeadOptions polish = nm;
    polish.init_step = 0.02;
    consider(nelder_mead(objective, GeometricObjective::pack(best.amplitudes),
                         lo, hi, polish));
  }
  return best;
}

}  // namespace

std::string strategy_name(DesignStrategy s) {
  switch (s) {
    case DesignStrategy::Geometric:
      return "geometric";
    case DesignStrategy::Random:
      return "random";
    case DesignStrategy::BestNonTp:
      return "best-nontp";
    case DesignStrategy::BestTp:
      return "best-tp";
  }
  return "unknown";
}

nlohmann::json design_to_json(const InputDesign& d) {
  nlohmann::json amps = nlohmann::json::array();
  for (const Complex& a : d.amplitudes) {
    amps.push_back({a.real(), a.imag()});
  }
  return nlohmann::json{{"amplitudes", std::move(amps)},
                        {"L", d.box_halfwidth},
                        {"objective", d.objective},
                        {"strategy", strategy_name(d.strategy)},
                        {"starts", d.starts},
                        {"evaluations", d.evaluations},
                        {"seed", d.seed}};
}

InputDesign design_from_json(const nlohmann::json& j) {
  InputDesign d;
  for (const auto& a : j.at("amplitudes")) {
    d.amplitudes.emplace_back(a.at(0).get<double>(), a.at(1).get<double>());
  }
  d.box_halfwidth = j.value("L", 0.0);
  d.objective = j.value("objective", 0.0);
  d.starts = j.value("starts", 0);
  d.evaluations = j.value("evaluations", 0LL);
  d.seed = j.value("seed", std::uint64_t{0});
  const std::string tag = j.value("strategy", "random");
  if (tag == "geometric") d.strategy = DesignStrategy::Geometric;
  else if (tag == "best-nontp") d.strategy = DesignStrategy::BestNonTp;
  else if (tag == "best-tp") d.strategy = DesignStrategy::BestTp;
  else d.strategy = DesignStrategy::Random;
  return d;
}

void design_csv(const InputDesign& d, std::ostream& os) {
  os << "j,alpha_r,alpha_i\n";
  for (size_t j = 0; j < d.amplitudes.size(); ++j) {
    os << j << ',' << d.amplitudes[j].real() << ',' << d.amplitudes[j].imag()
       << '\n';
  }
}

double geometric_objective(const std::vector<Complex>& amplitudes,
                           const PhaseSpaceGrid& grid) {
  return GeometricObjective(grid)(amplitudes);
}

std::vector<Complex> random_design(int j, double l, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<Complex> amps(static_cast<size_t>(j));
  for (auto& a : amps) {
    a = Complex(rng.uniform(-l, l), rng.uniform(-l, l));
  }
  return amps;
}

InputDesign optimize_geometric(int j, double l, const PhaseSpaceGrid& grid,
                               int starts, std::uint64_t seed,
                               const std::vector<Complex>* warm) {
  if (j < 6) {
    throw std::invalid_argument(
        "geometric designs need at least 6 input states");
  }
  const GeometricObjective obj(grid);
  InputDesign d = run_multistart([&](const Eigen::VectorXd& x) { return obj(x); },
                                 j, l, starts, seed,
                                 DesignStrategy::Geometric, warm, 0);
  return d;
}

InputDesign optimize_best_informed(const QFunctionParams& truth, MseMode mode,
                                   int j, double l, const PhaseSpaceGrid& grid,
                                   long long n, int starts, std::uint64_t seed,
                                   int max_evals_per_start) {
  std::optional<TpParamVector> t;
  if (mode == MseMode::Tp) {
    t = tp_vector_from_params(truth);
  }
  const auto objective = [&](const Eigen::VectorXd& theta) {
    const std::vector<Complex> amps = GeometricObjective::unpack(theta);
    try {
      return mode == MseMode::Tp ? mse_formula_tp(*t, amps, grid, n).total
                                 : mse_formula_nontp(truth, amps, grid, n).total;
    } catch (const NumericalError&) {
      return kInf;
    }
  };
  return run_multistart(objective, j, l, starts, seed,
                        mode == MseMode::Tp ? DesignStrategy::BestTp
                                            : DesignStrategy::BestNonTp,
                        nullptr, max_evals_per_start);
}

std::vector<Complex> extend_design_greedy(const std::vector<Complex>& base,
                                          double l,
                                          const PhaseSpaceGrid& grid,
                                          int lattice_points_per_axis) {
  const GeometricObjective obj(grid);
  std::vector<Complex> out = base;
  out.push_back(base.empty() ? Complex{} : base.back());
  double best = kInf;
  Complex best_z = out.back();
  const int n = std::max(2, lattice_points_per_axis);
  for (int ix = 0; ix < n; ++ix) {
    for (int iy = 0; iy < n; ++iy) {
      const Complex z(-l + 2.0 * l * ix / (n - 1.0),
                      -l + 2.0 * l * iy / (n - 1.0));
      out.back() = z;
      const double f = obj(out);
      if (f < best) {
        best = f;
        best_z = z;
      }
    }
  }
  out.back() = best_z;
  return out;
}

InputDesign canonicalize(InputDesign d) {
  std::sort(d.amplitudes.begin(), d.amplitudes.end(),
            [](const Complex& a, const Complex& b) {
              return a.real() != b.real() ? a.real() < b.real()
                                          : a.imag() < b.imag();
            });
  return d;
}

}  // namespace gausstomo
