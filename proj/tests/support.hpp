#pragma once

#include "gausscorr/channels.hpp"
#include "gausscorr/gaussian_core.hpp"

#include <cmath>
#include <random>
#include <string>

#ifndef GAUSSCORR_DATA_DIR
#define GAUSSCORR_DATA_DIR "data"
#endif

namespace gausscorr::testing {

inline std::string data_path(const std::string& name) {
  return std::string(GAUSSCORR_DATA_DIR) + "/" + name;
}

inline Matrix measured_cm_gamma() {
  Matrix g(4, 4);
  g << 5.42, 0.23, 4.06, 0.04,
       0.23, 19.28, 0.45, 17.29,
       4.06, 0.45, 4.73, 0.55,
       0.04, 17.29, 0.55, 17.70;
  return g;
}

inline Matrix measured_error_matrix() {
  Matrix e(4, 4);
  e << 0.05, 0.02, 0.03, 0.01,
       0.02, 0.17, 0.01, 0.15,
       0.03, 0.01, 0.04, 0.02,
       0.01, 0.15, 0.02, 0.16;
  return e;
}

/// Random symplectic built from local rotations, local squeezers and
/// beamsplitters between every pair of modes.
inline SymplecticTransform random_symplectic(int n, std::mt19937_64& rng, double max_log_squeeze = 1.0) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  std::uniform_real_distribution<double> squeeze(-max_log_squeeze, max_log_squeeze);
  std::uniform_real_distribution<double> trans(0.05, 0.95);
  SymplecticTransform s = SymplecticTransform::identity(n);
  for (int layer = 0; layer < 2; ++layer) {
    for (int k = 0; k < n; ++k) {
      s = SymplecticTransform::local(rotation(angle(rng)), k, n) * s;
      s = squeezer(std::exp(squeeze(rng)), k, n) * s;
      s = SymplecticTransform::local(rotation(angle(rng)), k, n) * s;
    }
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) s = beamsplitter(trans(rng), i, j, n) * s;
    }
  }
  return s;
}

/// gamma = S diag(nu) S^T with random symplectic eigenvalues nu >= 1.
inline CovMatrix random_cm(int n, std::mt19937_64& rng, bool pure = false, double max_log_squeeze = 1.0) {
  std::uniform_real_distribution<double> log_excess(-3.0, 1.5);
  std::vector<double> diag;
  for (int k = 0; k < n; ++k) {
    const double nu = pure ? 1.0 : 1.0 + std::exp(log_excess(rng));
    diag.push_back(nu);
    diag.push_back(nu);
  }
  return apply_symplectic(CovMatrix::diagonal(diag), random_symplectic(n, rng, max_log_squeeze));
}

/// Classical mixture of coherent states: vacuum plus a random PSD noise matrix.
inline CovMatrix random_separable_cm(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix a(2 * n, 2 * n);
  for (int i = 0; i < 2 * n; ++i) {
    for (int j = 0; j < 2 * n; ++j) a(i, j) = normal(rng);
  }
  return CovMatrix(Matrix(Matrix::Identity(2 * n, 2 * n) + 0.5 * a * a.transpose()));
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace gausscorr::testing
