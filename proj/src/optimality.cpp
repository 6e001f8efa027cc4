#include "gausscorr/optimality.hpp"

#include "gausscorr/errors.hpp"

#include <cmath>
#include <sstream>

namespace gausscorr {

namespace {

void require_ordering(double v_x, double v_p) {
  if (!(v_x > 1.0 && v_p > v_x)) {
    std::ostringstream os;
    os << "optimality certificate needs V_p > V_x > 1 (got V_x=" << v_x << ", V_p=" << v_p << ")";
    throw InvalidInput(os.str());
  }
}

}  // namespace

double decomposition_theta(const DecompositionParams& p, double r) {
  return std::sqrt(p.eta * r + std::abs(p.tau_channel) * p.m);
}

DecompositionParams decomposition_params(double v_x, double v_p) {
  require_ordering(v_x, v_p);
  DecompositionParams p;
  const double denom = (v_x + 1.0) * (v_p + 1.0) - 4.0;
  p.m = std::sqrt((v_x + 1.0) * (v_p + 1.0)) / 2.0;
  p.tau_channel = -(v_x - 1.0) * (v_p - 1.0) / denom;
  p.eta = 2.0 * (v_x * v_p - 1.0) / denom;
  p.r = std::sqrt((v_x + 1.0) / (v_p + 1.0)) * (v_p - 1.0) / (v_x - 1.0);
  p.xi = p.r * decomposition_theta(p, 1.0 / p.r) / decomposition_theta(p, p.r);
  return p;
}

SplitStandardForm split_standard_form(double v_x, double v_p) {
  SplitStandardForm sf;
  sf.a = std::sqrt((v_x + 1.0) * (v_p + 1.0)) / 2.0;
  sf.c_plus = std::sqrt((v_p + 1.0) / (v_x + 1.0)) * (v_x - 1.0) / 2.0;
  sf.c_minus = std::sqrt((v_x + 1.0) / (v_p + 1.0)) * (v_p - 1.0) / 2.0;
  return sf;
}

SplitStandardForm standard_form_from_decomposition(const DecompositionParams& p) {
  const double th_r = decomposition_theta(p, p.r);
  const double th_inv = decomposition_theta(p, 1.0 / p.r);
  const double strength = std::abs(p.tau_channel) * (p.m * p.m - 1.0);
  const double sign = p.tau_channel > 0.0 ? 1.0 : (p.tau_channel < 0.0 ? -1.0 : 0.0);
  SplitStandardForm sf;
  sf.a = th_r * th_inv;
  sf.c_plus = std::sqrt(strength * th_inv / th_r);
  sf.c_minus = -sign * std::sqrt(strength * th_r / th_inv);
  return sf;
}

OptimalityCertificate certify(double v_x, double v_p) {
  OptimalityCertificate cert;
  cert.params = decomposition_params(v_x, v_p);
  const auto& p = cert.params;
  const double tol = 1e-12;
  cert.cond_tau_real = std::isfinite(p.tau_channel);
  cert.cond_eta = p.eta >= std::abs(1.0 - p.tau_channel) - tol;
  cert.cond_r_range = p.r >= 1.0 / p.m - tol && p.r <= p.m + tol;
  cert.cond_vx_threshold = v_x >= 3.0 - 4.0 / (v_p + 1.0);
  cert.certified = cert.cond_tau_real && cert.cond_eta && cert.cond_r_range && cert.cond_vx_threshold;
  return cert;
}

}  // namespace gausscorr
