#pragma once

// Entropic functionals of Gaussian states. All entropies are in nats.

#include "gausscorr/gaussian_core.hpp"

#include <cstdint>
#include <string>

namespace gausscorr {

enum class DiscordBranch { Heterodyne, Homodyne };

const char* to_string(DiscordBranch branch);

struct DiscordReport {
  double mutual_info = 0.0;
  double classical_corr = 0.0;
  double discord = 0.0;
  DiscordBranch branch = DiscordBranch::Heterodyne;
  double inf_det_eps = 1.0;
  int measured_mode = 1;
  /// Set when a symplectic eigenvalue or determinant below 1 had to be
  /// clamped (only possible with allow_nonphysical).
  bool clamped = false;
};

struct DiscordOptions {
  /// Accept measured CMs whose gamma + i Omega is slightly indefinite.
  bool allow_nonphysical = false;
};

/// Pure Gaussian measurement seed sigma0 = R(theta) diag(s, 1/s) R(theta)^T.
struct MeasurementSeed {
  double theta = 0.0;
  double s = 1.0;

  Eigen::Matrix2d covariance() const;
};

struct OracleResult {
  double inf_det_eps = 1.0;
  double inf_term = 0.0;  // f(sqrt(inf_det_eps))
  double discord = 0.0;
  MeasurementSeed seed;
  bool homodyne = false;  // optimum reached in the s -> infinity limit
};

struct GEoFOptions {
  int restarts = 8;
  std::uint64_t seed = 0x5eed;
  /// Symplectic eigenvalues within this distance of 1 count as pure.
  double purity_tol = 1e-8;
};

struct GEoFResult {
  double value = 0.0;
  CovMatrix optimal_pure_cm = CovMatrix::vacuum(1);
  /// min eig of gamma - gamma_p; negative values measure infeasibility.
  double feasibility_gap = 0.0;
  bool converged = false;
};

struct KWFlowPoint {
  double t = 1.0;
  double s_a = 0.0;
  double j_ab = 0.0;
  double e_f_ae = 0.0;
  double residual = 0.0;
};

/// f(x) = ((x+1)/2) ln((x+1)/2) - ((x-1)/2) ln((x-1)/2); x >= 1 - 1e-6.
double entropy_f(double x);

double von_neumann_entropy(const CovMatrix& cm);

/// Conditional CM of the unmeasured mode after a Gaussian measurement with
/// seed covariance sigma0 on `measured_mode` of a two-mode state.
CovMatrix conditional_cm(const CovMatrix& cm, int measured_mode, const Eigen::Matrix2d& sigma0);

/// Limit s -> infinity: homodyne detection of cos(theta) x + sin(theta) p.
CovMatrix homodyne_conditional_cm(const CovMatrix& cm, int measured_mode, double theta);

/// Closed-form two-mode Gaussian discord with measurement on `measured_mode`.
DiscordReport discord(const CovMatrix& cm, int measured_mode = 1, const DiscordOptions& options = {});

/// Brute-force minimization of det(conditional_cm) over measurement seeds.
OracleResult discord_oracle(const CovMatrix& cm, int measured_mode = 1);

double mutual_information(const CovMatrix& cm);
double classical_correlation(const CovMatrix& cm, int measured_mode = 1);

/// Gaussian entanglement of formation across (a_mode | all other modes),
/// minimized over pure Gaussian gamma_p <= gamma. At most three modes.
GEoFResult geof(const CovMatrix& cm, int a_mode = 0, const GEoFOptions& options = {});

/// S(A) - J(AB) - E_F(AE).
double kw_audit(double s_a, double j_ab, double e_f_ae);

}  // namespace gausscorr
