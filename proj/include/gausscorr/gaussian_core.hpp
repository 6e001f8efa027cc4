#pragma once

// Covariance-matrix representation of multimode Gaussian states.
//
// Conventions used throughout the library:
//   * quadrature ordering (x1, p1, x2, p2, ...);
//   * gamma units: gamma_ij = <xi_i xi_j + xi_j xi_i> - 2 <xi_i><xi_j>, so the
//     vacuum is the identity and the raw quadrature covariance is gamma / 2.

#include <Eigen/Dense>

#include <span>
#include <utility>
#include <vector>

namespace gausscorr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kSymmetryTolerance = 1e-12;
inline constexpr double kPhysicalTolerance = 1e-9;
inline constexpr double kSymplecticClampTolerance = 1e-6;
inline constexpr double kSymplecticTolerance = 1e-8;

/// Symmetric 2n x 2n covariance matrix in gamma units.
class CovMatrix {
 public:
  /// Validates squareness, even dimension, symmetry (relative 1e-12) and a
  /// strictly positive diagonal. The stored matrix is exactly symmetrized.
  explicit CovMatrix(Matrix gamma);

  static CovMatrix vacuum(int n_modes);
  static CovMatrix thermal(double v);
  static CovMatrix diagonal(std::span<const double> entries);
  /// Two-mode squeezed vacuum with local variance m = cosh(2r).
  static CovMatrix tmsv(double m);

  int n_modes() const { return static_cast<int>(gamma_.rows() / 2); }
  int dim() const { return static_cast<int>(gamma_.rows()); }
  const Matrix& gamma() const { return gamma_; }
  double operator()(int i, int j) const { return gamma_(i, j); }

  /// 2x2 block coupling mode i (rows) and mode j (cols).
  Eigen::Matrix2d block(int i, int j) const { return gamma_.block<2, 2>(2 * i, 2 * j); }

 private:
  Matrix gamma_;
};

/// Block-diagonal symplectic form with blocks [[0, 1], [-1, 0]].
Matrix symplectic_form(int n_modes);

/// Real 2n x 2n matrix satisfying S Omega S^T = Omega.
class SymplecticTransform {
 public:
  /// Throws InvalidInput when S Omega S^T deviates from Omega by more than 1e-8.
  explicit SymplecticTransform(Matrix s);

  static SymplecticTransform identity(int n_modes);
  /// Embeds a 2x2 single-mode symplectic acting on `mode` of an n-mode system.
  static SymplecticTransform local(const Eigen::Matrix2d& s, int mode, int n_modes);
  /// S_A (+) S_B for two modes.
  static SymplecticTransform local_pair(const Eigen::Matrix2d& s_a, const Eigen::Matrix2d& s_b);

  int n_modes() const { return static_cast<int>(s_.rows() / 2); }
  const Matrix& matrix() const { return s_; }
  double symplectic_defect() const;
  bool is_symplectic(double tol = 1e-10) const { return symplectic_defect() <= tol; }

  SymplecticTransform operator*(const SymplecticTransform& rhs) const;
  SymplecticTransform inverse() const;

 private:
  Matrix s_;
};

struct SymplecticSpectrum {
  std::vector<double> values;  // ascending, clamped to >= 1
};

struct WilliamsonDecomposition {
  std::vector<double> nu;  // per mode, in the order of the symplectic basis
  Matrix s;                // gamma = s * diag(nu_k, nu_k) * s^T
};

struct StandardForm {
  double a = 1.0;
  double b = 1.0;
  double c_plus = 0.0;
  double c_minus = 0.0;
  Eigen::Matrix2d local_a = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d local_b = Eigen::Matrix2d::Identity();

  CovMatrix matrix() const;
};

/// Minimum eigenvalue of the Hermitian matrix gamma + i Omega.
double physicality_margin(const CovMatrix& cm);
/// Returns the margin; throws NonphysicalState below -kPhysicalTolerance.
double validate_physical(const CovMatrix& cm);
bool is_physical(const CovMatrix& cm, double tol = kPhysicalTolerance);

/// Symplectic eigenvalues without clamping or physicality checks. Requires a
/// positive-definite gamma.
std::vector<double> raw_symplectic_eigenvalues(const CovMatrix& cm);

/// Symplectic spectrum; values in [1 - 1e-6, 1) are clamped to 1, anything
/// lower throws NonphysicalState.
SymplecticSpectrum symplectic_spectrum(const CovMatrix& cm);

/// (nu_minus, nu_plus) from the seralian and det gamma.
std::pair<double, double> symplectic_eigenvalues_two_mode(const CovMatrix& cm);

WilliamsonDecomposition williamson(const CovMatrix& cm);

/// det alpha + det beta + 2 det delta of a two-mode CM.
double seralian(const CovMatrix& cm);

/// Local-symplectic reduction to diag(a,a,b,b) with diagonal cross block
/// (c_plus, c_minus), c_plus >= |c_minus|.
StandardForm standard_form(const CovMatrix& cm);

/// Flips the sign of the momentum quadrature of `mode` (L gamma L^T).
CovMatrix partial_transpose(const CovMatrix& cm, int mode);

/// min eig of gamma^(T_A) + i Omega for a two-mode CM. Non-negative values
/// certify separability.
double ppt_min_eig(const CovMatrix& cm);

CovMatrix reduce(const CovMatrix& cm, std::span<const int> modes);
CovMatrix reduce(const CovMatrix& cm, std::initializer_list<int> modes);
CovMatrix apply_symplectic(const CovMatrix& cm, const SymplecticTransform& s);
CovMatrix tensor(const CovMatrix& first, const CovMatrix& second);

/// Reorders modes; result mode k is input mode order[k].
CovMatrix permute_modes(const CovMatrix& cm, std::span<const int> order);

/// Counter-clockwise phase-space rotation.
Eigen::Matrix2d rotation(double theta);

}  // namespace gausscorr
