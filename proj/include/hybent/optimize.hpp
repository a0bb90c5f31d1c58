#pragma once

#include <algorithm>
#include <functional>
#include <numeric>
#include <vector>

namespace hybent {

struct MinimizeResult {
  std::vector<double> x;
  double value;
  int evaluations;
};

/// Derivative-free Nelder-Mead minimization. Deterministic for a given start.
inline MinimizeResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                  std::vector<double> x0, double step, double ftol = 1e-14,
                                  int max_eval = 4000) {
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> simplex(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += step;
  std::vector<double> values(n + 1);
  int evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    return f(x);
  };
  for (std::size_t i = 0; i <= n; ++i) values[i] = eval(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  while (evals < max_eval) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[n - 1];
    if (std::abs(values[worst] - values[best]) <= ftol * (std::abs(values[best]) + ftol)) break;

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k] / static_cast<double>(n);
    }
    auto along = [&](double t) {
      std::vector<double> x(n);
      for (std::size_t k = 0; k < n; ++k) x[k] = centroid[k] + t * (simplex[worst][k] - centroid[k]);
      return x;
    };
    const auto xr = along(-1.0);
    const double fr = eval(xr);
    if (fr < values[best]) {
      const auto xe = along(-2.0);
      const double fe = eval(xe);
      if (fe < fr) {
        simplex[worst] = xe;
        values[worst] = fe;
      } else {
        simplex[worst] = xr;
        values[worst] = fr;
      }
    } else if (fr < values[second]) {
      simplex[worst] = xr;
      values[worst] = fr;
    } else {
      const bool outside = fr < values[worst];
      const auto xc = along(outside ? -0.5 : 0.5);
      const double fc = eval(xc);
      if (fc < (outside ? fr : values[worst])) {
        simplex[worst] = xc;
        values[worst] = fc;
      } else {
        for (std::size_t i = 0; i <= n; ++i) {
          if (i == best) continue;
          for (std::size_t k = 0; k < n; ++k) simplex[i][k] = simplex[best][k] + 0.5 * (simplex[i][k] - simplex[best][k]);
          values[i] = eval(simplex[i]);
        }
      }
    }
  }
  const auto it = std::min_element(values.begin(), values.end());
  const auto idx = static_cast<std::size_t>(it - values.begin());
  return {simplex[idx], *it, evals};
}

}  // namespace hybent
