#include "gausscorr/gaussian_core.hpp"

#include "gausscorr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <sstream>

namespace gausscorr {

namespace {

using ComplexMatrix = Eigen::MatrixXcd;

Matrix symmetric_sqrt(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.eigenvalues().minCoeff() <= 0.0) {
    throw NonphysicalState("covariance matrix is not positive definite");
  }
  return es.operatorSqrt();
}

double min_hermitian_eig(const Matrix& gamma) {
  const int n = static_cast<int>(gamma.rows() / 2);
  ComplexMatrix h = gamma.cast<std::complex<double>>();
  h += std::complex<double>(0.0, 1.0) * symplectic_form(n).cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void require_two_mode(const CovMatrix& cm, const char* what) {
  if (cm.n_modes() != 2) {
    std::ostringstream os;
    os << what << " requires a two-mode covariance matrix, got " << cm.n_modes() << " modes";
    throw InvalidInput(os.str());
  }
}

// Signed SVD of a 2x2 matrix with proper rotations: m = u diag(s1, s2) v^T,
// det u = det v = 1, s1 >= |s2|.
void rotation_svd(const Eigen::Matrix2d& m, Eigen::Matrix2d& u, Eigen::Vector2d& s,
                  Eigen::Matrix2d& v) {
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  u = svd.matrixU();
  v = svd.matrixV();
  s = svd.singularValues();
  if (u.determinant() < 0.0) {
    u.col(1) *= -1.0;
    s(1) *= -1.0;
  }
  if (v.determinant() < 0.0) {
    v.col(1) *= -1.0;
    s(1) *= -1.0;
  }
  if (u(0, 0) + v(0, 0) < 0.0) {
    u = -u;
    v = -v;
  }
}

}  // namespace

CovMatrix::CovMatrix(Matrix gamma) : gamma_(std::move(gamma)) {
  if (gamma_.rows() != gamma_.cols() || gamma_.rows() == 0 || gamma_.rows() % 2 != 0) {
    throw InvalidInput("covariance matrix must be square with positive even dimension");
  }
  if (!gamma_.allFinite()) {
    throw InvalidInput("covariance matrix has non-finite entries");
  }
  const double scale = std::max(1.0, gamma_.cwiseAbs().maxCoeff());
  const double asym = (gamma_ - gamma_.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTolerance * scale) {
    std::ostringstream os;
    os << "covariance matrix is not symmetric (max asymmetry " << asym << ")";
    throw InvalidInput(os.str());
  }
  gamma_ = 0.5 * (gamma_ + gamma_.transpose()).eval();
  if ((gamma_.diagonal().array() <= 0.0).any()) {
    throw InvalidInput("covariance matrix has a non-positive diagonal entry");
  }
}

CovMatrix CovMatrix::vacuum(int n_modes) {
  if (n_modes < 1) throw InvalidInput("mode count must be positive");
  return CovMatrix(Matrix::Identity(2 * n_modes, 2 * n_modes));
}

CovMatrix CovMatrix::thermal(double v) {
  if (v < 1.0 - kPhysicalTolerance) throw InvalidInput("thermal variance must be >= 1");
  return CovMatrix(v * Matrix::Identity(2, 2));
}

CovMatrix CovMatrix::diagonal(std::span<const double> entries) {
  Vector d(static_cast<Eigen::Index>(entries.size()));
  for (std::size_t i = 0; i < entries.size(); ++i) d(static_cast<Eigen::Index>(i)) = entries[i];
  return CovMatrix(d.asDiagonal().toDenseMatrix());
}

CovMatrix CovMatrix::tmsv(double m) {
  if (m < 1.0) throw InvalidInput("TMSV local variance must be >= 1");
  const double c = std::sqrt(m * m - 1.0);
  Matrix g = Matrix::Zero(4, 4);
  g.topLeftCorner<2, 2>() = m * Eigen::Matrix2d::Identity();
  g.bottomRightCorner<2, 2>() = m * Eigen::Matrix2d::Identity();
  g.topRightCorner<2, 2>() = c * Eigen::Vector2d(1.0, -1.0).asDiagonal();
  g.bottomLeftCorner<2, 2>() = c * Eigen::Vector2d(1.0, -1.0).asDiagonal();
  return CovMatrix(g);
}

Matrix symplectic_form(int n_modes) {
  Matrix omega = Matrix::Zero(2 * n_modes, 2 * n_modes);
  for (int k = 0; k < n_modes; ++k) {
    omega(2 * k, 2 * k + 1) = 1.0;
    omega(2 * k + 1, 2 * k) = -1.0;
  }
  return omega;
}

SymplecticTransform::SymplecticTransform(Matrix s) : s_(std::move(s)) {
  if (s_.rows() != s_.cols() || s_.rows() == 0 || s_.rows() % 2 != 0) {
    throw InvalidInput("symplectic matrix must be square with positive even dimension");
  }
  const double defect = symplectic_defect();
  if (defect > kSymplecticTolerance) {
    std::ostringstream os;
    os << "matrix is not symplectic (|S Omega S^T - Omega| = " << defect << ")";
    throw InvalidInput(os.str());
  }
}

SymplecticTransform SymplecticTransform::identity(int n_modes) {
  return SymplecticTransform(Matrix::Identity(2 * n_modes, 2 * n_modes));
}

SymplecticTransform SymplecticTransform::local(const Eigen::Matrix2d& s, int mode, int n_modes) {
  if (mode < 0 || mode >= n_modes) throw InvalidInput("mode index out of range");
  Matrix m = Matrix::Identity(2 * n_modes, 2 * n_modes);
  m.block<2, 2>(2 * mode, 2 * mode) = s;
  return SymplecticTransform(m);
}

SymplecticTransform SymplecticTransform::local_pair(const Eigen::Matrix2d& s_a,
                                                    const Eigen::Matrix2d& s_b) {
  Matrix m = Matrix::Zero(4, 4);
  m.topLeftCorner<2, 2>() = s_a;
  m.bottomRightCorner<2, 2>() = s_b;
  return SymplecticTransform(m);
}

double SymplecticTransform::symplectic_defect() const {
  const Matrix omega = symplectic_form(n_modes());
  return (s_ * omega * s_.transpose() - omega).cwiseAbs().maxCoeff();
}

SymplecticTransform SymplecticTransform::operator*(const SymplecticTransform& rhs) const {
  if (rhs.n_modes() != n_modes()) throw InvalidInput("symplectic dimension mismatch");
  return SymplecticTransform(s_ * rhs.s_);
}

SymplecticTransform SymplecticTransform::inverse() const {
  // S^{-1} = -Omega S^T Omega
  const Matrix omega = symplectic_form(n_modes());
  return SymplecticTransform(-omega * s_.transpose() * omega);
}

CovMatrix StandardForm::matrix() const {
  Matrix g = Matrix::Zero(4, 4);
  g(0, 0) = g(1, 1) = a;
  g(2, 2) = g(3, 3) = b;
  g(0, 2) = g(2, 0) = c_plus;
  g(1, 3) = g(3, 1) = c_minus;
  return CovMatrix(g);
}

double physicality_margin(const CovMatrix& cm) { return min_hermitian_eig(cm.gamma()); }

double validate_physical(const CovMatrix& cm) {
  const double margin = physicality_margin(cm);
  if (margin < -kPhysicalTolerance) {
    std::ostringstream os;
    os << "covariance matrix violates gamma + i Omega >= 0 (min eigenvalue " << margin << ")";
    throw NonphysicalState(os.str());
  }
  return margin;
}

bool is_physical(const CovMatrix& cm, double tol) { return physicality_margin(cm) >= -tol; }

WilliamsonDecomposition williamson(const CovMatrix& cm) {
  const int n = cm.n_modes();
  const Matrix root = symmetric_sqrt(cm.gamma());
  // i * gamma^{1/2} Omega gamma^{1/2} is Hermitian with eigenvalues +-nu_k.
  const Matrix m = root * symplectic_form(n) * root;
  const ComplexMatrix h = std::complex<double>(0.0, 1.0) * m.cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);

  WilliamsonDecomposition out;
  out.nu.resize(static_cast<std::size_t>(n));
  Matrix z(2 * n, 2 * n);
  Vector inv_sqrt_nu(2 * n);
  // Eigenvalues ascend; the upper half are the positive ones.
  for (int k = 0; k < n; ++k) {
    const int idx = n + k;
    const double nu = es.eigenvalues()(idx);
    const Eigen::VectorXcd v = es.eigenvectors().col(idx);
    z.col(2 * k) = std::sqrt(2.0) * v.imag();
    z.col(2 * k + 1) = std::sqrt(2.0) * v.real();
    out.nu[static_cast<std::size_t>(k)] = nu;
    inv_sqrt_nu(2 * k) = inv_sqrt_nu(2 * k + 1) = 1.0 / std::sqrt(nu);
  }
  out.s = root * z * inv_sqrt_nu.asDiagonal();
  return out;
}

std::vector<double> raw_symplectic_eigenvalues(const CovMatrix& cm) {
  auto nu = williamson(cm).nu;
  std::sort(nu.begin(), nu.end());
  return nu;
}

SymplecticSpectrum symplectic_spectrum(const CovMatrix& cm) {
  auto nu = raw_symplectic_eigenvalues(cm);
  for (double& v : nu) {
    if (v < 1.0 - kSymplecticClampTolerance) {
      std::ostringstream os;
      os << "symplectic eigenvalue " << v << " below 1";
      throw NonphysicalState(os.str());
    }
    v = std::max(v, 1.0);
  }
  return SymplecticSpectrum{std::move(nu)};
}

double seralian(const CovMatrix& cm) {
  require_two_mode(cm, "seralian");
  return cm.block(0, 0).determinant() + cm.block(1, 1).determinant() +
         2.0 * cm.block(0, 1).determinant();
}

std::pair<double, double> symplectic_eigenvalues_two_mode(const CovMatrix& cm) {
  const double delta = seralian(cm);
  const double det = cm.gamma().determinant();
  const double disc = std::sqrt(std::max(0.0, delta * delta - 4.0 * det));
  const double plus_sq = (delta + disc) / 2.0;
  // nu_-^2 nu_+^2 = det gamma avoids the cancellation in (delta - disc) / 2
  const double minus = std::sqrt(std::max(0.0, det / plus_sq));
  const double plus = std::sqrt(plus_sq);
  return {minus, plus};
}

StandardForm standard_form(const CovMatrix& cm) {
  require_two_mode(cm, "standard_form");
  if (!is_physical(cm)) throw NonphysicalState("standard_form requires a physical state");
  const Eigen::Matrix2d alpha = cm.block(0, 0);
  const Eigen::Matrix2d beta = cm.block(1, 1);
  const Eigen::Matrix2d delta = cm.block(0, 1);

  StandardForm sf;
  sf.a = std::sqrt(alpha.determinant());
  sf.b = std::sqrt(beta.determinant());

  // Local Williamson: alpha = a * W_A W_A^T with W_A = (alpha / a)^{1/2}.
  const Eigen::Matrix2d w_a = symmetric_sqrt(alpha / sf.a);
  const Eigen::Matrix2d w_b = symmetric_sqrt(beta / sf.b);
  const Eigen::Matrix2d w_a_inv = w_a.inverse();
  const Eigen::Matrix2d w_b_inv = w_b.inverse();
  const Eigen::Matrix2d d = w_a_inv * delta * w_b_inv.transpose();

  Eigen::Matrix2d u, v;
  Eigen::Vector2d s;
  rotation_svd(d, u, s, v);
  sf.c_plus = s(0);
  sf.c_minus = s(1);
  sf.local_a = u.transpose() * w_a_inv;
  sf.local_b = v.transpose() * w_b_inv;
  return sf;
}

CovMatrix partial_transpose(const CovMatrix& cm, int mode) {
  if (mode < 0 || mode >= cm.n_modes()) throw InvalidInput("mode index out of range");
  Matrix g = cm.gamma();
  const int p = 2 * mode + 1;
  g.row(p) *= -1.0;
  g.col(p) *= -1.0;
  return CovMatrix(g);
}

double ppt_min_eig(const CovMatrix& cm) {
  require_two_mode(cm, "ppt_min_eig");
  return physicality_margin(partial_transpose(cm, 0));
}

CovMatrix reduce(const CovMatrix& cm, std::span<const int> modes) {
  if (modes.empty()) throw InvalidInput("reduce needs at least one mode");
  const auto k = static_cast<Eigen::Index>(modes.size());
  Matrix g(2 * k, 2 * k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const int mi = modes[static_cast<std::size_t>(i)];
    if (mi < 0 || mi >= cm.n_modes()) throw InvalidInput("mode index out of range");
    for (Eigen::Index j = 0; j < k; ++j) {
      const int mj = modes[static_cast<std::size_t>(j)];
      if (mj < 0 || mj >= cm.n_modes()) throw InvalidInput("mode index out of range");
      g.block<2, 2>(2 * i, 2 * j) = cm.block(mi, mj);
    }
  }
  return CovMatrix(g);
}

CovMatrix reduce(const CovMatrix& cm, std::initializer_list<int> modes) {
  return reduce(cm, std::span<const int>(modes.begin(), modes.size()));
}

CovMatrix permute_modes(const CovMatrix& cm, std::span<const int> order) {
  if (static_cast<int>(order.size()) != cm.n_modes()) {
    throw InvalidInput("permutation must list every mode");
  }
  std::vector<int> seen(order.begin(), order.end());
  std::sort(seen.begin(), seen.end());
  for (int k = 0; k < cm.n_modes(); ++k) {
    if (seen[static_cast<std::size_t>(k)] != k) throw InvalidInput("not a permutation");
  }
  return reduce(cm, order);
}

CovMatrix apply_symplectic(const CovMatrix& cm, const SymplecticTransform& s) {
  if (s.n_modes() != cm.n_modes()) throw InvalidInput("symplectic dimension mismatch");
  return CovMatrix(s.matrix() * cm.gamma() * s.matrix().transpose());
}

CovMatrix tensor(const CovMatrix& first, const CovMatrix& second) {
  const int d1 = first.dim();
  const int d2 = second.dim();
  Matrix g = Matrix::Zero(d1 + d2, d1 + d2);
  g.topLeftCorner(d1, d1) = first.gamma();
  g.bottomRightCorner(d2, d2) = second.gamma();
  return CovMatrix(g);
}

Eigen::Matrix2d rotation(double theta) {
  Eigen::Matrix2d r;
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

}  // namespace gausscorr
