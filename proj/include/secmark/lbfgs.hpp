// Copyright 2026 Secmark Authors
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

#include <cmath>
#include <deque>
#include <functional>
#include <vector>

#include "secmark/errors.hpp"

namespace secmark {

struct LbfgsConfig {
  int memory = 10;
  int max_iters = 200;
  double grad_tol = 1e-5;  // max-abs gradient component
  int max_line_search = 40;
};

struct LbfgsResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Limited-memory BFGS with Armijo backtracking. The objective callback
// returns f(x) and fills the gradient.
inline LbfgsResult lbfgs_minimize(
    const std::function<double(const std::vector<double>&,
                               std::vector<double>*)>& objective,
    std::vector<double> x0, const LbfgsConfig& config = {}) {
  const size_t n = x0.size();
  auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  };
  auto max_abs = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
  };

  LbfgsResult result;
  result.x = std::move(x0);
  std::vector<double> grad(n);
  double f = objective(result.x, &grad);
  if (!std::isfinite(f)) throw NumericError("objective is not finite");

  std::deque<std::vector<double>> s_hist, y_hist;
  std::deque<double> rho_hist;
  std::vector<double> dir(n), x_new(n), grad_new(n);

  for (int iter = 0; iter < config.max_iters; ++iter) {
    if (max_abs(grad) <= config.grad_tol) {
      result.converged = true;
      break;
    }
    // Two-loop recursion for the search direction.
    dir = grad;
    std::vector<double> alpha(s_hist.size());
    for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
      alpha[i] = rho_hist[i] * dot(s_hist[i], dir);
      for (size_t j = 0; j < n; ++j) dir[j] -= alpha[i] * y_hist[i][j];
    }
    if (!s_hist.empty()) {
      const double gamma = dot(s_hist.back(), y_hist.back()) /
                           dot(y_hist.back(), y_hist.back());
      for (double& d : dir) d *= gamma;
    }
    for (size_t i = 0; i < s_hist.size(); ++i) {
      const double beta = rho_hist[i] * dot(y_hist[i], dir);
      for (size_t j = 0; j < n; ++j)
        dir[j] += (alpha[i] - beta) * s_hist[i][j];
    }
    for (double& d : dir) d = -d;

    double dg = dot(dir, grad);
    if (dg >= 0) {
      // Fall back to steepest descent when curvature information is bad.
      for (size_t j = 0; j < n; ++j) dir[j] = -grad[j];
      dg = -dot(grad, grad);
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
    }

    // Armijo backtracking from a unit step.
    double step = 1.0;
    double f_new = f;
    bool accepted = false;
    for (int ls = 0; ls < config.max_line_search; ++ls) {
      for (size_t j = 0; j < n; ++j) x_new[j] = result.x[j] + step * dir[j];
      f_new = objective(x_new, &grad_new);
      if (std::isfinite(f_new) && f_new <= f + 1e-4 * step * dg) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    std::vector<double> s(n), y(n);
    for (size_t j = 0; j < n; ++j) {
      s[j] = x_new[j] - result.x[j];
      y[j] = grad_new[j] - grad[j];
    }
    const double ys = dot(y, s);
    if (ys > 1e-10) {
      if (static_cast<int>(s_hist.size()) == config.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / ys);
    }
    result.x.swap(x_new);
    grad.swap(grad_new);
    f = f_new;
    result.iterations = iter + 1;
  }
  result.value = f;
  return result;
}

}  // namespace secmark
