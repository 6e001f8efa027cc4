#include "gausscorr/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace gausscorr::optimize {

MinimizeResult nelder_mead(const Objective& f, std::vector<double> x0,
                           const NelderMeadOptions& options) {
  const std::size_t n = x0.size();
  MinimizeResult result;
  if (n == 0) {
    result.x = x0;
    result.value = f(x0);
    result.evaluations = 1;
    result.converged = true;
    return result;
  }
  const double dim = static_cast<double>(n);
  const double alpha = 1.0;
  const double beta = 1.0 + 2.0 / dim;
  const double gamma = 0.75 - 1.0 / (2.0 * dim);
  const double delta = 1.0 - 1.0 / dim;

  std::vector<std::vector<double>> simplex(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) {
    const double h = x0[i] != 0.0 ? options.initial_step * std::max(1.0, std::abs(x0[i]))
                                  : options.initial_step;
    simplex[i + 1][i] += h;
  }
  std::vector<double> values(n + 1);
  int evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::max();
  };
  for (std::size_t i = 0; i <= n; ++i) values[i] = eval(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), trial(n), trial2(n);
  bool converged = false;
  while (evals < options.max_evaluations) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[n - 1];

    double x_spread = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      for (std::size_t k = 0; k < n; ++k) {
        x_spread = std::max(x_spread, std::abs(simplex[i][k] - simplex[best][k]));
      }
    }
    const double f_spread = std::abs(values[worst] - values[best]);
    if (x_spread <= options.x_tolerance && f_spread <= options.f_tolerance) {
      converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k] / dim;
    }
    for (std::size_t k = 0; k < n; ++k) {
      trial[k] = centroid[k] + alpha * (centroid[k] - simplex[worst][k]);
    }
    const double f_reflect = eval(trial);
    if (f_reflect < values[best]) {
      for (std::size_t k = 0; k < n; ++k) {
        trial2[k] = centroid[k] + beta * (trial[k] - centroid[k]);
      }
      const double f_expand = eval(trial2);
      if (f_expand < f_reflect) {
        simplex[worst] = trial2;
        values[worst] = f_expand;
      } else {
        simplex[worst] = trial;
        values[worst] = f_reflect;
      }
      continue;
    }
    if (f_reflect < values[second]) {
      simplex[worst] = trial;
      values[worst] = f_reflect;
      continue;
    }
    const bool outside = f_reflect < values[worst];
    for (std::size_t k = 0; k < n; ++k) {
      trial2[k] = outside ? centroid[k] + gamma * (trial[k] - centroid[k])
                          : centroid[k] - gamma * (centroid[k] - simplex[worst][k]);
    }
    const double f_contract = eval(trial2);
    if (f_contract < std::min(f_reflect, values[worst])) {
      simplex[worst] = trial2;
      values[worst] = f_contract;
      continue;
    }
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t k = 0; k < n; ++k) {
        simplex[i][k] = simplex[best][k] + delta * (simplex[i][k] - simplex[best][k]);
      }
      values[i] = eval(simplex[i]);
    }
  }
  const auto best_it = std::min_element(values.begin(), values.end());
  const auto best_idx = static_cast<std::size_t>(best_it - values.begin());
  result.x = simplex[best_idx];
  result.value = *best_it;
  result.evaluations = evals;
  result.converged = converged;
  return result;
}

ScalarResult golden_section(const std::function<double(double)>& f, double lo, double hi,
                            double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  ScalarResult best{c, fc};
  if (fd < best.value) best = {d, fd};
  for (double edge : {lo, hi}) {
    if (edge >= a - tol && edge <= b + tol) {
      const double fe = f(edge);
      if (fe < best.value) best = {edge, fe};
    }
  }
  return best;
}

ScalarResult grid_then_golden(const std::function<double(double)>& f, double lo, double hi,
                              int grid_points, double tol) {
  grid_points = std::max(grid_points, 3);
  const double step = (hi - lo) / (grid_points - 1);
  int best_i = 0;
  double best_v = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid_points; ++i) {
    const double v = f(lo + i * step);
    if (v < best_v) {
      best_v = v;
      best_i = i;
    }
  }
  const double a = lo + std::max(0, best_i - 1) * step;
  const double b = lo + std::min(grid_points - 1, best_i + 1) * step;
  ScalarResult refined = golden_section(f, a, b, tol);
  if (best_v < refined.value) refined = {lo + best_i * step, best_v};
  return refined;
}

}  // namespace gausscorr::optimize
