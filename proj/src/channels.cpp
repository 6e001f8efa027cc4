#include "gausscorr/channels.hpp"

#include "gausscorr/errors.hpp"

#include <cmath>
#include <complex>
#include <sstream>

namespace gausscorr {

namespace {

void require_transmittance(double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    std::ostringstream os;
    os << "transmittance " << t << " outside [0, 1]";
    throw InvalidInput(os.str());
  }
}

void require_mode(const CovMatrix& cm, int mode) {
  if (mode < 0 || mode >= cm.n_modes()) throw InvalidInput("mode index out of range");
}

}  // namespace

double InputSpec::squeezed_variance() const {
  return kind == InputKind::Coherent ? 1.0 : db_to_variance(squeezing_db);
}

void InputSpec::validate() const {
  if (kind == InputKind::Coherent && squeezing_db != 0.0) {
    throw InvalidInput("coherent input must have squeezing_db = 0");
  }
  if (squeezing_db > 0.0) throw InvalidInput("squeezing_db must be <= 0");
  if (!std::isfinite(v_x) || !std::isfinite(v_p)) throw InvalidInput("non-finite variance");
  const double tol = 1e-12;
  if (v_x < squeezed_variance() - tol) {
    throw InvalidInput("V_x below the squeezed x-variance");
  }
  if (v_p < antisqueezed_variance() - tol) {
    throw InvalidInput("V_p below the anti-squeezed p-variance");
  }
}

CovMatrix ChannelXY::apply(const CovMatrix& single_mode) const {
  if (single_mode.n_modes() != 1) throw InvalidInput("ChannelXY acts on a single mode");
  return CovMatrix(x * single_mode.gamma() * x.transpose() + y);
}

double ChannelXY::complete_positivity_margin() const {
  const Eigen::Matrix2d omega = symplectic_form(1);
  const std::complex<double> i(0.0, 1.0);
  Eigen::Matrix2cd m = y.cast<std::complex<double>>() + i * omega.cast<std::complex<double>>() -
                       i * (x * omega * x.transpose()).cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double db_to_variance(double db) { return std::pow(10.0, db / 10.0); }

SymplecticTransform beamsplitter(double t, int mode_i, int mode_j, int n_modes) {
  require_transmittance(t);
  if (mode_i == mode_j || mode_i < 0 || mode_j < 0 || mode_i >= n_modes || mode_j >= n_modes) {
    throw InvalidInput("beamsplitter needs two distinct valid modes");
  }
  const double tt = std::sqrt(t);
  const double rr = std::sqrt(1.0 - t);
  Matrix s = Matrix::Identity(2 * n_modes, 2 * n_modes);
  for (int q = 0; q < 2; ++q) {
    const int a = 2 * mode_i + q;
    const int b = 2 * mode_j + q;
    s(a, a) = tt;
    s(a, b) = rr;
    s(b, a) = rr;
    s(b, b) = -tt;
  }
  return SymplecticTransform(s);
}

Eigen::Matrix2d squeezer(double s) {
  if (!(s > 0.0)) throw InvalidInput("squeezing factor must be positive");
  Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
  m(0, 0) = std::sqrt(s);
  m(1, 1) = 1.0 / std::sqrt(s);
  return m;
}

SymplecticTransform squeezer(double s, int mode, int n_modes) {
  return SymplecticTransform::local(squeezer(s), mode, n_modes);
}

CovMatrix attenuate(const CovMatrix& cm, int mode, double t, bool keep_environment) {
  require_transmittance(t);
  require_mode(cm, mode);
  const int n = cm.n_modes();
  const CovMatrix extended = tensor(cm, CovMatrix::vacuum(1));
  const CovMatrix out = apply_symplectic(extended, beamsplitter(t, mode, n, n + 1));
  if (keep_environment) return out;
  Matrix g = out.gamma().topLeftCorner(2 * n, 2 * n);
  return CovMatrix(g);
}

CovMatrix modulate(const CovMatrix& cm, int mode, double w_x, double w_p) {
  require_mode(cm, mode);
  if (w_x < 0.0 || w_p < 0.0) throw InvalidInput("noise variance must be non-negative");
  Matrix g = cm.gamma();
  g(2 * mode, 2 * mode) += w_x;
  g(2 * mode + 1, 2 * mode + 1) += w_p;
  return CovMatrix(g);
}

CovMatrix cmr_noise(const CovMatrix& cm, double a, double t) {
  if (cm.n_modes() != 2) throw InvalidInput("cmr_noise acts on two-mode states");
  if (a < 0.0) throw InvalidInput("CMR variance must be non-negative");
  require_transmittance(t);
  Matrix g = cm.gamma();
  g(0, 0) += a;
  g(1, 1) += a;
  g(2, 2) += t * a;
  g(3, 3) += t * a;
  return CovMatrix(g);
}

CovMatrix purify(const CovMatrix& cm, double purity_tol) {
  if (!is_physical(cm)) throw NonphysicalState("cannot purify a nonphysical state");
  const int n = cm.n_modes();
  const WilliamsonDecomposition w = williamson(cm);
  std::vector<int> mixed;
  for (int k = 0; k < n; ++k) {
    if (w.nu[static_cast<std::size_t>(k)] > 1.0 + purity_tol) mixed.push_back(k);
  }
  const int total = n + static_cast<int>(mixed.size());
  Matrix core = Matrix::Identity(2 * total, 2 * total);
  for (std::size_t j = 0; j < mixed.size(); ++j) {
    const int sys = mixed[j];
    const int env = n + static_cast<int>(j);
    const double m = w.nu[static_cast<std::size_t>(sys)];
    const double c = std::sqrt(m * m - 1.0);
    const Eigen::Matrix2d cross = c * Eigen::Vector2d(1.0, -1.0).asDiagonal();
    core.block<2, 2>(2 * sys, 2 * sys) = m * Eigen::Matrix2d::Identity();
    core.block<2, 2>(2 * env, 2 * env) = m * Eigen::Matrix2d::Identity();
    core.block<2, 2>(2 * sys, 2 * env) = cross;
    core.block<2, 2>(2 * env, 2 * sys) = cross;
  }
  Matrix s = Matrix::Identity(2 * total, 2 * total);
  s.topLeftCorner(2 * n, 2 * n) = w.s;
  return CovMatrix(s * core * s.transpose());
}

CovMatrix purify_single_mode(const CovMatrix& single_mode) {
  if (single_mode.n_modes() != 1) throw InvalidInput("purify_single_mode needs one mode");
  const CovMatrix pure = purify(single_mode);
  if (pure.n_modes() == 2) return pure;
  return tensor(pure, CovMatrix::vacuum(1));
}

}  // namespace gausscorr
