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

#include "gausstomo/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace gausstomo {

namespace {

Eigen::VectorXd clip(const Eigen::VectorXd& x, const Eigen::VectorXd& lo,
                     const Eigen::VectorXd& hi) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

}  // namespace

NelderMeadResult nelder_mead(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x0, const Eigen::VectorXd& lo,
    const Eigen::VectorXd& hi, const NelderMeadOptions& opts) {
  const Eigen::Index dim = x0.size();
  const int n_pts = static_cast<int>(dim) + 1;

  NelderMeadResult res;
  res.evals = 0;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++res.evals;
    return f(clip(x, lo, hi));
  };

  std::vector<Eigen::VectorXd> pts(n_pts);
  std::vector<double> vals(n_pts);
  pts[0] = clip(x0, lo, hi);
  vals[0] = eval(pts[0]);
  for (Eigen::Index i = 0; i < dim; ++i) {
    Eigen::VectorXd p = pts[0];
    const double step = opts.init_step * (hi[i] - lo[i]);
    p[i] += (p[i] + step <= hi[i]) ? step : -step;
    pts[static_cast<size_t>(i) + 1] = clip(p, lo, hi);
    vals[static_cast<size_t>(i) + 1] = eval(pts[static_cast<size_t>(i) + 1]);
  }

  std::vector<int> order(n_pts);
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return vals[a] < vals[b]; });
  };

  while (res.evals < opts.max_evals) {
    sort_simplex();
    const int best = order[0];
    const int worst = order[n_pts - 1];
    const int second_worst = order[n_pts - 2];

    const double spread = std::abs(vals[worst] - vals[best]);
    if (spread <= opts.f_tol_rel * (std::abs(vals[best]) + 1e-12)) {
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
    for (int i = 0; i < n_pts; ++i) {
      if (i != worst) centroid += pts[i];
    }
    centroid /= static_cast<double>(dim);

    const Eigen::VectorXd reflected =
        clip(centroid + (centroid - pts[worst]), lo, hi);
    const double fr = eval(reflected);

    if (fr < vals[best]) {
      const Eigen::VectorXd expanded =
          clip(centroid + 2.0 * (centroid - pts[worst]), lo, hi);
      const double fe = eval(expanded);
      if (fe < fr) {
        pts[worst] = expanded;
        vals[worst] = fe;
      } else {
        pts[worst] = reflected;
        vals[worst] = fr;
      }
    } else if (fr < vals[second_worst]) {
      pts[worst] = reflected;
      vals[worst] = fr;
    } else {
      const Eigen::VectorXd contracted =
          clip(centroid + 0.5 * (pts[worst] - centroid), lo, hi);
      const double fc = eval(contracted);
      if (fc < vals[worst]) {
        pts[worst] = contracted;
        vals[worst] = fc;
      } else {
        for (int i = 0; i < n_pts; ++i) {  // shrink toward the best point
          if (i == best) continue;
          pts[i] = clip(pts[best] + 0.5 * (pts[i] - pts[best]), lo, hi);
          vals[i] = eval(pts[i]);
        }
      }
    }
  }

  sort_simplex();
  res.x = pts[order[0]];
  res.f = vals[order[0]];
  return res;
}

BfgsResult bfgs_maximize(
    const std::function<double(const Eigen::VectorXd&)>& value,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& gradient,
    const Eigen::VectorXd& x0,
    const std::function<bool(const Eigen::VectorXd&)>& feasible,
    const BfgsOptions& opts) {
  const Eigen::Index dim = x0.size();

  BfgsResult res;
  res.x = x0;
  res.f = value(x0);
  res.grad = gradient(x0);

  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(dim, dim);
  int flat_steps = 0;

  for (res.iterations = 0; res.iterations < opts.max_iterations;
       ++res.iterations) {
    if (res.grad.lpNorm<Eigen::Infinity>() < opts.grad_tol) {
      res.converged = true;
      return res;
    }

    Eigen::VectorXd dir = h * res.grad;
    double slope = dir.dot(res.grad);
    if (!(slope > 0.0)) {  // curvature information broke down, restart
      h.setIdentity();
      dir = res.grad;
      slope = dir.squaredNorm();
    }

    double step = 1.0;
    bool accepted = false;
    Eigen::VectorXd x_new;
    double f_new = 0.0;
    for (int bt = 0; bt < opts.max_backtracks; ++bt, step *= 0.5) {
      x_new = res.x + step * dir;
      if (!feasible(x_new)) continue;
      f_new = value(x_new);
      if (std::isfinite(f_new) &&
          f_new >= res.f + opts.armijo_c1 * step * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      res.stalled = true;
      return res;
    }
    if (f_new - res.f <= opts.f_tol_rel * (std::abs(res.f) + 1.0)) {
      if (++flat_steps >= opts.patience) {
        res.x = x_new;
        res.f = f_new;
        res.grad = gradient(x_new);
        return res;
      }
    } else {
      flat_steps = 0;
    }

    const Eigen::VectorXd g_new = gradient(x_new);
    const Eigen::VectorXd s = x_new - res.x;
    const Eigen::VectorXd y = res.grad - g_new;  // ascent: -(g_new - g)
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const Eigen::VectorXd hy = h * y;
      const double yhy = y.dot(hy);
      h += ((sy + yhy) / (sy * sy)) * (s * s.transpose()) -
           (hy * s.transpose() + s * hy.transpose()) / sy;
    }

    res.x = x_new;
    res.f = f_new;
    res.grad = g_new;
  }
  return res;
}

}  // namespace gausstomo
