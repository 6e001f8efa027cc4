#pragma once

// Certificate that Gaussian measurements are optimal for the discord of a
// modulated squeezed state split on a balanced beamsplitter. The state is
// decomposed as a local squeezer / single-mode channel / squeezer sequence
// acting on a two-mode squeezed vacuum; optimality holds when the channel
// parameters fall in the proven range.

#include <string>

namespace gausscorr {

struct DecompositionParams {
  double m = 1.0;            // TMSV local variance
  double tau_channel = 0.0;  // channel gain
  double eta = 0.0;          // channel added noise
  double r = 1.0;            // inner squeezing
  double xi = 1.0;           // outer squeezing
};

struct SplitStandardForm {
  double a = 1.0;  // a = b for the balanced split
  double c_plus = 0.0;
  double c_minus = 0.0;
};

struct OptimalityCertificate {
  DecompositionParams params;
  bool cond_tau_real = false;
  bool cond_eta = false;
  bool cond_r_range = false;
  bool cond_vx_threshold = false;
  bool certified = false;
};

/// theta(r) = sqrt(eta r + |tau| m).
double decomposition_theta(const DecompositionParams& p, double r);

/// Requires v_p > v_x > 1 (InvalidInput otherwise).
DecompositionParams decomposition_params(double v_x, double v_p);

/// Standard form of the balanced split of diag(v_x, v_p), with the x-block
/// correlation in c_plus and the p-block correlation in c_minus.
SplitStandardForm split_standard_form(double v_x, double v_p);

/// Standard form generated by the decomposition parameters.
SplitStandardForm standard_form_from_decomposition(const DecompositionParams& p);

OptimalityCertificate certify(double v_x, double v_p);

}  // namespace gausscorr
