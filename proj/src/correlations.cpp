#include "gausscorr/correlations.hpp"

#include "gausscorr/errors.hpp"
#include "gausscorr/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <tuple>

namespace gausscorr {

namespace {

constexpr double kHomodyneCap = 1e6;

struct Blocks {
  Eigen::Matrix2d kept;      // unmeasured mode
  Eigen::Matrix2d measured;  // measured mode
  Eigen::Matrix2d cross;     // rows: kept, cols: measured
};

Blocks split_blocks(const CovMatrix& cm, int measured_mode) {
  if (cm.n_modes() != 2) throw InvalidInput("expected a two-mode covariance matrix");
  if (measured_mode != 0 && measured_mode != 1) throw InvalidInput("measured mode must be 0 or 1");
  const int kept = 1 - measured_mode;
  return {cm.block(kept, kept), cm.block(measured_mode, measured_mode),
          cm.block(kept, measured_mode)};
}

// f with clamping of values that fell slightly below 1.
double entropy_f_clamped(double x, bool allow, bool& clamped) {
  if (x < 1.0 - kSymplecticClampTolerance) {
    if (!allow) {
      std::ostringstream os;
      os << "symplectic quantity " << x << " below 1";
      throw NonphysicalState(os.str());
    }
    clamped = true;
    return 0.0;
  }
  return entropy_f(std::max(x, 1.0));
}

double inf_det_heterodyne_case(double a, double b, double c, double d) {
  if (b - 1.0 < 1e-12) return a;
  const double root = std::sqrt(std::max(0.0, c * c + (b - 1.0) * (d - a)));
  return (2.0 * c * c + (b - 1.0) * (d - a) + 2.0 * std::abs(c) * root) / ((b - 1.0) * (b - 1.0));
}

double inf_det_homodyne_case(double a, double b, double c, double d) {
  const double arg = c * c * c * c + (d - a * b) * (d - a * b) - 2.0 * c * c * (a * b + d);
  return (a * b - c * c + d - std::sqrt(std::max(0.0, arg))) / (2.0 * b);
}

void sym_exp(const Matrix& k, Matrix& out) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(k);
  out = es.eigenvectors() * es.eigenvalues().array().exp().matrix().asDiagonal() *
        es.eigenvectors().transpose();
}

// Orthonormal basis of symmetric matrices anticommuting with Omega; exp of
// any element is a pure covariance matrix.
std::vector<Matrix> pure_state_generators(int k) {
  const int d = 2 * k;
  const Matrix omega = symplectic_form(k);
  std::vector<Matrix> basis;
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      Matrix x = Matrix::Zero(d, d);
      x(i, j) = x(j, i) = 1.0;
      Matrix p = 0.5 * (x - omega.transpose() * x * omega);
      for (const Matrix& b : basis) p -= (b.cwiseProduct(p).sum()) * b;
      const double norm = p.norm();
      if (norm > 1e-9) basis.push_back(p / norm);
    }
  }
  return basis;
}

double min_sym_eig(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

const char* to_string(DiscordBranch branch) {
  return branch == DiscordBranch::Heterodyne ? "heterodyne-case" : "homodyne-case";
}

Eigen::Matrix2d MeasurementSeed::covariance() const {
  const Eigen::Matrix2d r = rotation(theta);
  return r * Eigen::Vector2d(s, 1.0 / s).asDiagonal() * r.transpose();
}

double entropy_f(double x) {
  if (!std::isfinite(x) || x < 1.0 - kSymplecticClampTolerance) {
    std::ostringstream os;
    os << "entropy_f argument " << x << " below 1";
    throw InvalidInput(os.str());
  }
  if (x <= 1.0) return 0.0;
  const double up = (x + 1.0) / 2.0;
  const double down = (x - 1.0) / 2.0;
  return up * std::log(up) - down * std::log(down);
}

double von_neumann_entropy(const CovMatrix& cm) {
  const auto spectrum = symplectic_spectrum(cm);
  double s = 0.0;
  for (double nu : spectrum.values) s += entropy_f(nu);
  return s;
}

CovMatrix conditional_cm(const CovMatrix& cm, int measured_mode, const Eigen::Matrix2d& sigma0) {
  const Blocks b = split_blocks(cm, measured_mode);
  const Eigen::Matrix2d sum = b.measured + sigma0;
  const double det = sum.determinant();
  if (std::abs(det) < 1e-300 || !std::isfinite(det)) {
    throw InvalidInput("measured block plus seed is singular");
  }
  return CovMatrix(Matrix(b.kept - b.cross * sum.inverse() * b.cross.transpose()));
}

CovMatrix homodyne_conditional_cm(const CovMatrix& cm, int measured_mode, double theta) {
  const Blocks b = split_blocks(cm, measured_mode);
  const Eigen::Vector2d u(std::cos(theta), std::sin(theta));
  const double var = u.dot(b.measured * u);
  if (var <= 0.0) throw InvalidInput("measured quadrature has non-positive variance");
  const Eigen::Vector2d w = b.cross * u;
  return CovMatrix(Matrix(b.kept - w * w.transpose() / var));
}

DiscordReport discord(const CovMatrix& cm, int measured_mode, const DiscordOptions& options) {
  const Blocks blk = split_blocks(cm, measured_mode);
  if (!options.allow_nonphysical && !is_physical(cm)) {
    throw NonphysicalState("discord requires a physical covariance matrix");
  }
  const double a = blk.kept.determinant();
  const double b = blk.measured.determinant();
  const double c = blk.cross.determinant();
  const double d = cm.gamma().determinant();

  DiscordReport report;
  report.measured_mode = measured_mode;

  const double lhs = (d - a * b) * (d - a * b);
  const double rhs = (1.0 + b) * c * c * (a + d);
  const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
  if (std::abs(lhs - rhs) <= 1e-12 * scale) {
    const double het = inf_det_heterodyne_case(a, b, c, d);
    const double hom = inf_det_homodyne_case(a, b, c, d);
    report.inf_det_eps = std::min(het, hom);
    report.branch = het <= hom ? DiscordBranch::Heterodyne : DiscordBranch::Homodyne;
  } else if (lhs < rhs) {
    report.inf_det_eps = inf_det_heterodyne_case(a, b, c, d);
    report.branch = DiscordBranch::Heterodyne;
  } else {
    report.inf_det_eps = inf_det_homodyne_case(a, b, c, d);
    report.branch = DiscordBranch::Homodyne;
  }

  const bool allow = options.allow_nonphysical;
  bool clamped = false;
  // the Hermitian eigensolver stays accurate when nu_- ~ nu_+ (near-pure states),
  // where the closed form loses half the digits
  double nu_minus = 0.0;
  double nu_plus = 0.0;
  try {
    const auto nu = raw_symplectic_eigenvalues(cm);
    nu_minus = nu[0];
    nu_plus = nu[1];
  } catch (const Error&) {
    std::tie(nu_minus, nu_plus) = symplectic_eigenvalues_two_mode(cm);
  }
  const double f_kept = entropy_f_clamped(std::sqrt(std::max(a, 0.0)), allow, clamped);
  const double f_measured = entropy_f_clamped(std::sqrt(std::max(b, 0.0)), allow, clamped);
  const double f_minus = entropy_f_clamped(nu_minus, allow, clamped);
  const double f_plus = entropy_f_clamped(nu_plus, allow, clamped);
  const double f_cond =
      entropy_f_clamped(std::sqrt(std::max(report.inf_det_eps, 0.0)), allow, clamped);

  report.mutual_info = f_kept + f_measured - f_minus - f_plus;
  report.classical_corr = f_kept - f_cond;
  report.discord = report.mutual_info - report.classical_corr;
  report.clamped = clamped;
  return report;
}

OracleResult discord_oracle(const CovMatrix& cm, int measured_mode) {
  if (!is_physical(cm)) throw NonphysicalState("discord_oracle requires a physical state");
  const double log_cap = std::log(kHomodyneCap);
  const double pi = std::acos(-1.0);

  auto det_general = [&](double theta, double log_s) {
    const double ls = std::clamp(log_s, -log_cap, log_cap);
    const MeasurementSeed seed{theta, std::exp(ls)};
    return conditional_cm(cm, measured_mode, seed.covariance()).gamma().determinant();
  };
  auto det_homodyne = [&](double theta) {
    return homodyne_conditional_cm(cm, measured_mode, theta).gamma().determinant();
  };

  struct Candidate {
    double value, theta, log_s;
  };
  std::vector<Candidate> grid;
  const int n_theta = 36;
  const int n_s = 25;
  for (int i = 0; i < n_theta; ++i) {
    const double theta = pi * i / n_theta;
    for (int j = 0; j < n_s; ++j) {
      const double log_s = -log_cap + 2.0 * log_cap * j / (n_s - 1);
      grid.push_back({det_general(theta, log_s), theta, log_s});
    }
  }
  std::partial_sort(grid.begin(), grid.begin() + 4, grid.end(),
                    [](const Candidate& x, const Candidate& y) { return x.value < y.value; });

  OracleResult out;
  out.inf_det_eps = std::numeric_limits<double>::infinity();
  optimize::NelderMeadOptions nm;
  nm.initial_step = 0.05;
  nm.x_tolerance = 1e-12;
  nm.f_tolerance = 1e-15;
  for (int c = 0; c < 4; ++c) {
    const auto res = optimize::nelder_mead(
        [&](const std::vector<double>& x) { return det_general(x[0], x[1]); },
        {grid[static_cast<std::size_t>(c)].theta, grid[static_cast<std::size_t>(c)].log_s}, nm);
    if (res.value < out.inf_det_eps) {
      out.inf_det_eps = res.value;
      out.seed = {std::fmod(std::fmod(res.x[0], pi) + pi, pi),
                  std::exp(std::clamp(res.x[1], -log_cap, log_cap))};
      out.homodyne = false;
    }
  }

  // Homodyne limit: periodic in theta with period pi.
  const auto hom = optimize::grid_then_golden(det_homodyne, 0.0, pi, 73, 1e-12);
  if (hom.value < out.inf_det_eps) {
    out.inf_det_eps = hom.value;
    out.seed = {hom.x, std::numeric_limits<double>::infinity()};
    out.homodyne = true;
  }

  out.inf_term = entropy_f(std::sqrt(std::max(out.inf_det_eps, 1.0)));
  const Blocks blk = split_blocks(cm, measured_mode);
  const auto [nu_minus, nu_plus] = symplectic_eigenvalues_two_mode(cm);
  out.discord = entropy_f(std::sqrt(blk.measured.determinant())) - entropy_f(std::max(nu_minus, 1.0)) -
                entropy_f(std::max(nu_plus, 1.0)) + out.inf_term;
  return out;
}

double mutual_information(const CovMatrix& cm) { return discord(cm).mutual_info; }

double classical_correlation(const CovMatrix& cm, int measured_mode) {
  return discord(cm, measured_mode).classical_corr;
}

constexpr double kDetFloorTol = 1e-10;

GEoFResult geof(const CovMatrix& input, int a_mode, const GEoFOptions& options) {
  const int n = input.n_modes();
  if (n < 2 || n > 3) throw InvalidInput("geof supports 1x1 and 1x2 partitions");
  if (a_mode < 0 || a_mode >= n) throw InvalidInput("partition mode out of range");
  if (!is_physical(input)) throw NonphysicalState("geof requires a physical state");

  std::vector<int> order{a_mode};
  for (int k = 0; k < n; ++k) {
    if (k != a_mode) order.push_back(k);
  }
  const CovMatrix cm = permute_modes(input, order);
  const Matrix& gamma = cm.gamma();
  const WilliamsonDecomposition w = williamson(cm);

  std::vector<int> mixed;
  for (int k = 0; k < n; ++k) {
    if (w.nu[static_cast<std::size_t>(k)] > 1.0 + options.purity_tol) mixed.push_back(k);
  }

  // Inverse permutation to report gamma_p in the caller's mode order.
  std::vector<int> inverse(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) inverse[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = k;

  GEoFResult result;
  if (mixed.empty()) {
    result.value = entropy_f(std::sqrt(std::max(1.0, cm.block(0, 0).determinant())));
    result.optimal_pure_cm = input;
    result.feasibility_gap = 0.0;
    result.converged = true;
    return result;
  }

  const int k = static_cast<int>(mixed.size());
  const std::vector<Matrix> generators = pure_state_generators(k);
  Matrix d_mixed = Matrix::Zero(2 * k, 2 * k);
  for (int i = 0; i < k; ++i) {
    const double nu = w.nu[static_cast<std::size_t>(mixed[static_cast<std::size_t>(i)])];
    d_mixed(2 * i, 2 * i) = d_mixed(2 * i + 1, 2 * i + 1) = nu;
  }

  // Pure CM in the Williamson frame for coordinates x.
  auto frame_cm = [&](const std::vector<double>& x, Matrix& core_block) {
    Matrix kmat = Matrix::Zero(2 * k, 2 * k);
    for (std::size_t i = 0; i < generators.size(); ++i) kmat += x[i] * generators[i];
    sym_exp(kmat, core_block);
    Matrix g = Matrix::Identity(2 * n, 2 * n);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        g.block<2, 2>(2 * mixed[static_cast<std::size_t>(i)], 2 * mixed[static_cast<std::size_t>(j)]) =
            core_block.block<2, 2>(2 * i, 2 * j);
      }
    }
    return g;
  };
  auto reduced_det = [&](const Matrix& frame) {
    const Eigen::Matrix2d ga = (w.s.topRows<2>() * frame * w.s.topRows<2>().transpose());
    return ga.determinant();
  };
  auto slack = [&](const Matrix& core_block) { return min_sym_eig(d_mixed - core_block); };

  const std::size_t dim = generators.size();
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 0.5);

  double best_value = std::numeric_limits<double>::infinity();
  std::vector<double> best_x(dim, 0.0);
  bool best_converged = false;

  const int restarts = std::max(1, options.restarts);
  for (int r = 0; r < restarts; ++r) {
    std::vector<double> x(dim, 0.0);
    if (r > 0) {
      for (double& v : x) v = normal(rng);
    }
    bool converged = false;
    for (double mu : {1e2, 1e4, 1e6, 1e8, 1e10}) {
      auto objective = [&](const std::vector<double>& y) {
        Matrix core;
        const Matrix frame = frame_cm(y, core);
        const double viol = std::min(0.0, slack(core));
        return reduced_det(frame) + mu * viol * viol;
      };
      optimize::NelderMeadOptions nm;
      nm.initial_step = 0.2;
      nm.x_tolerance = 1e-11;
      nm.f_tolerance = 1e-15;
      nm.max_evaluations = 4000 * static_cast<int>(dim);
      const auto res = optimize::nelder_mead(objective, x, nm);
      x = res.x;
      converged = res.converged;
      Matrix c;
      const Matrix f = frame_cm(x, c);
      if (slack(c) >= 0.0 && reduced_det(f) <= 1.0 + kDetFloorTol) {
        converged = true;
        break;
      }
    }

    // Pull back toward the feasible start x = 0 until gamma_p <= gamma.
    Matrix core;
    frame_cm(x, core);
    if (slack(core) < 0.0) {
      double lo = 0.0;
      double hi = 1.0;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        std::vector<double> y(dim);
        for (std::size_t i = 0; i < dim; ++i) y[i] = mid * x[i];
        Matrix c;
        frame_cm(y, c);
        (slack(c) >= 0.0 ? lo : hi) = mid;
      }
      for (double& v : x) v *= lo;
    }
    const double value = reduced_det(frame_cm(x, core));
    if (value < best_value) {
      best_value = value;
      best_x = x;
      best_converged = converged;
    }
    // det of a physical reduced state is bounded below by one
    if (best_value <= 1.0 + kDetFloorTol) {
      best_converged = true;
      break;
    }
  }

  Matrix core;
  const Matrix frame = frame_cm(best_x, core);
  const Matrix gamma_p = w.s * frame * w.s.transpose();
  const CovMatrix pure_cm{Matrix(0.5 * (gamma_p + gamma_p.transpose()))};
  result.value = entropy_f(std::sqrt(std::max(1.0, best_value)));
  result.optimal_pure_cm = permute_modes(pure_cm, inverse);
  result.feasibility_gap = min_sym_eig(gamma - pure_cm.gamma());
  result.converged = best_converged && result.feasibility_gap >= -1e-7;
  return result;
}

double kw_audit(double s_a, double j_ab, double e_f_ae) { return s_a - j_ab - e_f_ae; }

}  // namespace gausscorr
