#pragma once

// Gaussian channels and state constructors.
//
// Beamsplitter convention for power transmittance t (T = sqrt(t), R = sqrt(1-t)):
//   x_i' = T x_i + R x_j,   x_j' = R x_i - T x_j   (same for p).

#include "gausscorr/gaussian_core.hpp"

namespace gausscorr {

enum class InputKind { Coherent, Squeezed };

/// Input mode prepared by squeezing and Gaussian displacement.
struct InputSpec {
  InputKind kind = InputKind::Coherent;
  double squeezing_db = 0.0;  // <= 0, 0 for coherent input
  double v_x = 1.0;           // gamma-unit variances after modulation
  double v_p = 1.0;

  /// x-variance of the unmodulated squeezed input.
  double squeezed_variance() const;
  double antisqueezed_variance() const { return 1.0 / squeezed_variance(); }
  /// Throws InvalidInput if the invariants are violated.
  void validate() const;
};

/// Single-mode channel gamma -> X gamma X^T + Y.
struct ChannelXY {
  Eigen::Matrix2d x = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d y = Eigen::Matrix2d::Zero();

  CovMatrix apply(const CovMatrix& single_mode) const;
  /// min eig of Y + i Omega - i X Omega X^T.
  double complete_positivity_margin() const;
};

/// 10^(dB/10).
double db_to_variance(double db);

SymplecticTransform beamsplitter(double t, int mode_i, int mode_j, int n_modes);

/// diag(sqrt(s), 1/sqrt(s)).
Eigen::Matrix2d squeezer(double s);
SymplecticTransform squeezer(double s, int mode, int n_modes);

/// Pure loss on `mode`. With keep_environment the vacuum ancilla is appended
/// as the last mode; otherwise it is traced out.
CovMatrix attenuate(const CovMatrix& cm, int mode, double t, bool keep_environment);

/// Adds classical Gaussian noise diag(w_x, w_p) to `mode`.
CovMatrix modulate(const CovMatrix& cm, int mode, double w_x, double w_p);

/// Common-mode-rejection noise diag(a, a, t a, t a) on a two-mode CM.
CovMatrix cmr_noise(const CovMatrix& cm, double a, double t);

/// Two-mode pure state whose first mode reduces to `single_mode`.
CovMatrix purify_single_mode(const CovMatrix& single_mode);

/// Pure state on n + k modes reproducing `cm` on its first n modes, where k is
/// the number of symplectic eigenvalues above 1 + purity_tol.
CovMatrix purify(const CovMatrix& cm, double purity_tol = 1e-9);

}  // namespace gausscorr
