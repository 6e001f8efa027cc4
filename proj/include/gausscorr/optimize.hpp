#pragma once

// Small derivative-free minimizers used by the discord oracle, the Gaussian
// EoF search and the Duan gain/transmittance optimizations.

#include <functional>
#include <vector>

namespace gausscorr::optimize {

using Objective = std::function<double(const std::vector<double>&)>;

struct NelderMeadOptions {
  double initial_step = 0.1;
  double x_tolerance = 1e-10;
  double f_tolerance = 1e-14;
  int max_evaluations = 20000;
};

struct MinimizeResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/// Adaptive Nelder-Mead (dimension-dependent coefficients).
MinimizeResult nelder_mead(const Objective& f, std::vector<double> x0,
                           const NelderMeadOptions& options = {});

struct ScalarResult {
  double x = 0.0;
  double value = 0.0;
};

/// Golden-section search on [lo, hi]; assumes a unimodal objective.
ScalarResult golden_section(const std::function<double(double)>& f, double lo, double hi,
                            double tol = 1e-10);

/// Coarse grid scan followed by golden-section refinement around the best
/// grid point. Robust to mild multimodality.
ScalarResult grid_then_golden(const std::function<double(double)>& f, double lo, double hi,
                              int grid_points = 41, double tol = 1e-10);

}  // namespace gausscorr::optimize
