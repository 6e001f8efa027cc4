#include "gausscorr/sampling.hpp"

#include "gausscorr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <random>
#include <thread>

namespace gausscorr {

namespace {

Matrix covariance_factor(const Matrix& cov) {
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
  const Vector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal();
}

template <typename Fn>
void run_sharded(std::size_t shards, int threads, Fn&& fn) {
  threads = std::max(1, std::min<int>(threads, static_cast<int>(shards)));
  if (threads == 1) {
    for (std::size_t s = 0; s < shards; ++s) fn(s);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t s = static_cast<std::size_t>(w); s < shards;
           s += static_cast<std::size_t>(threads)) {
        fn(s);
      }
    });
  }
  for (auto& t : pool) t.join();
}

std::vector<std::pair<std::string, double>> scalars_for(const CovMatrix& cm, int measured_mode) {
  DiscordOptions opts;
  opts.allow_nonphysical = true;
  return {{"discord", discord(cm, measured_mode, opts).discord},
          {"ppt_min_eig", ppt_min_eig(cm)},
          {"duan", duan_optimize(cm).value}};
}

}  // namespace

int SampleBatch::column(std::string_view name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw InvalidInput("unknown column " + std::string(name));
  return static_cast<int>(it - columns.begin());
}

int SampleBatch::source(std::string_view name) const {
  const auto it = std::find(sources.begin(), sources.end(), name);
  if (it == sources.end()) throw InvalidInput("unknown displacement source " + std::string(name));
  return static_cast<int>(it - sources.begin());
}

int thread_count() {
  if (const char* env = std::getenv("GAUSSCORR_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

SampleBatch sample(const ScenarioState& state, std::size_t n, std::uint64_t seed,
                   const SampleOptions& options) {
  if (!is_physical(state.effective_cm())) {
    throw NonphysicalState("effective covariance matrix of the scenario is not physical");
  }
  const int dim = state.quantum_cm().dim();
  SampleBatch batch;
  batch.n = n;
  batch.seed = seed;
  batch.modes = state.modes();
  for (const auto& m : state.modes()) {
    batch.columns.push_back("x_" + m);
    batch.columns.push_back("p_" + m);
  }
  const auto& loadings = state.noise_loadings();
  for (const auto& l : loadings) batch.sources.push_back(l.source_id);
  batch.data.resize(static_cast<Eigen::Index>(n), dim);
  batch.displacement_record.resize(static_cast<Eigen::Index>(n),
                                   static_cast<Eigen::Index>(loadings.size()));

  const Matrix factor = covariance_factor(0.5 * state.quantum_cm().gamma());
  const Vector mean = state.mean();
  const std::size_t shard_size = std::max<std::size_t>(1, options.shard_size);
  const std::size_t shards = (n + shard_size - 1) / shard_size;
  const int threads = options.threads > 0 ? options.threads : thread_count();

  run_sharded(shards, threads, [&](std::size_t shard) {
    std::mt19937_64 rng(mix_seed(seed, shard));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    const std::size_t begin = shard * shard_size;
    const std::size_t end = std::min(n, begin + shard_size);
    Vector z(dim);
    for (std::size_t i = begin; i < end; ++i) {
      for (int k = 0; k < dim; ++k) z(k) = normal(rng);
      Vector x = mean + factor * z;
      for (std::size_t s = 0; s < loadings.size(); ++s) {
        const NoiseLoading& l = loadings[s];
        double value = 0.0;
        if (l.is_discrete()) {
          double u = uniform(rng);
          std::size_t pick = 0;
          while (pick + 1 < l.weights.size() && u >= l.weights[pick]) {
            u -= l.weights[pick];
            ++pick;
          }
          value = l.amplitudes[pick];
        } else {
          value = std::sqrt(0.5 * l.variance) * normal(rng);
        }
        x += value * l.loading;
        batch.displacement_record(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(s)) = value;
      }
      batch.data.row(static_cast<Eigen::Index>(i)) = x.transpose();
    }
  });
  return batch;
}

CMEstimate estimate_cm(const SampleBatch& batch) {
  if (batch.n < 2) throw InvalidInput("need at least two samples to estimate a covariance");
  const Vector mean = batch.data.colwise().mean();
  const Matrix centered = batch.data.rowwise() - mean.transpose();
  const double dof = static_cast<double>(batch.n - 1);
  const Matrix cov = centered.transpose() * centered / dof;

  CMEstimate est;
  est.cm = CovMatrix(Matrix(2.0 * cov));
  const Eigen::Index d = cov.rows();
  est.std_errors.resize(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      est.std_errors(i, j) = 2.0 * std::sqrt((cov(i, i) * cov(j, j) + cov(i, j) * cov(i, j)) / dof);
    }
  }
  return est;
}

SampleBatch electronic_demodulation(const SampleBatch& batch, double g, double amplitude_t,
                                    double amplitude_r, std::string_view source,
                                    std::string_view mode) {
  SampleBatch out = batch;
  const int col = out.column("x_" + std::string(mode));
  const int src = out.source(source);
  const double prefactor = g * amplitude_t + amplitude_r;
  out.data.col(col) -= prefactor * out.displacement_record.col(src);
  return out;
}

SampleDuan sample_duan(const SampleBatch& batch, double g, int sign) {
  if (!(g > 0.0)) throw InvalidInput("Duan gain must be positive");
  if (sign != 1 && sign != -1) throw InvalidInput("Duan sign must be +1 or -1");
  const double s = static_cast<double>(sign);
  const Vector u = g * batch.data.col(batch.column("x_A")) + s * batch.data.col(batch.column("x_B"));
  const Vector v = g * batch.data.col(batch.column("p_A")) - s * batch.data.col(batch.column("p_B"));
  const double dof = static_cast<double>(batch.n - 1);
  const Vector uc = u.array() - u.mean();
  const Vector vc = v.array() - v.mean();
  const double var_u = uc.squaredNorm() / dof;
  const double var_v = vc.squaredNorm() / dof;
  const double cov_uv = uc.dot(vc) / dof;
  const double norm = (g * g + 1.0) * (g * g + 1.0) / 4.0;

  const double var_var_u = 2.0 * var_u * var_u / dof;
  const double var_var_v = 2.0 * var_v * var_v / dof;
  const double cov_vars = 2.0 * cov_uv * cov_uv / dof;
  const double var_product =
      var_v * var_v * var_var_u + var_u * var_u * var_var_v + 2.0 * var_u * var_v * cov_vars;

  SampleDuan out;
  out.g = g;
  out.sign = sign;
  out.value = var_u * var_v / norm;
  out.std_error = std::sqrt(var_product) / norm;
  return out;
}

void write_batch_csv(const SampleBatch& batch, std::ostream& out) {
  for (std::size_t c = 0; c < batch.columns.size(); ++c) out << (c ? "," : "") << batch.columns[c];
  for (const auto& s : batch.sources) out << ',' << s;
  out << '\n';
  out << std::setprecision(12);
  for (Eigen::Index i = 0; i < batch.data.rows(); ++i) {
    for (Eigen::Index c = 0; c < batch.data.cols(); ++c) out << (c ? "," : "") << batch.data(i, c);
    for (Eigen::Index s = 0; s < batch.displacement_record.cols(); ++s) {
      out << ',' << batch.displacement_record(i, s);
    }
    out << '\n';
  }
}

std::map<std::string, ScalarSummary> error_monte_carlo(const Pipeline& pipeline,
                                                       std::size_t trials, std::uint64_t seed) {
  if (trials == 0) throw InvalidInput("error_monte_carlo needs at least one trial");
  std::map<std::string, std::vector<double>> values;
  for (std::size_t t = 0; t < trials; ++t) {
    for (const auto& [name, v] : pipeline(mix_seed(seed, t))) values[name].push_back(v);
  }
  std::map<std::string, ScalarSummary> out;
  for (const auto& [name, vs] : values) {
    ScalarSummary s;
    s.trials = vs.size();
    for (double v : vs) s.mean += v;
    s.mean /= static_cast<double>(vs.size());
    double ss = 0.0;
    for (double v : vs) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(vs.size()));
    out[name] = s;
  }
  return out;
}

Pipeline perturbed_cm_pipeline(CovMatrix cm, Matrix error_matrix, int measured_mode) {
  if (error_matrix.rows() != cm.dim() || error_matrix.cols() != cm.dim()) {
    throw InvalidInput("error matrix has wrong shape");
  }
  return [cm = std::move(cm), err = std::move(error_matrix), measured_mode](std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix g = cm.gamma();
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
      for (Eigen::Index j = i; j < g.cols(); ++j) {
        const double delta = err(i, j) * normal(rng);
        g(i, j) += delta;
        if (i != j) g(j, i) += delta;
      }
    }
    return scalars_for(CovMatrix(g), measured_mode);
  };
}

double calibrated_sample_size(const CovMatrix& cm, const Matrix& error_matrix) {
  if (error_matrix.rows() != cm.dim() || error_matrix.cols() != cm.dim()) {
    throw InvalidInput("error matrix has wrong shape");
  }
  double log_sum = 0.0;
  for (int i = 0; i < cm.dim(); ++i) {
    if (!(error_matrix(i, i) > 0.0)) throw InvalidInput("error matrix diagonal must be positive");
    // se(gamma_ii) = sqrt(2) gamma_ii / sqrt(n - 1)
    const double n = 2.0 * cm(i, i) * cm(i, i) / (error_matrix(i, i) * error_matrix(i, i)) + 1.0;
    log_sum += std::log(n);
  }
  return std::exp(log_sum / cm.dim());
}

Pipeline resampled_cm_pipeline(CovMatrix cm, std::size_t n, int measured_mode) {
  if (n < 2) throw InvalidInput("resampling needs at least two shots");
  return [cm = std::move(cm), n, measured_mode](std::uint64_t seed) {
    const ScenarioState state(std::vector<std::string>{"A", "B"}, cm);
    SampleOptions opts;
    opts.threads = 1;
    const CovMatrix est = estimate_cm(sample(state, n, seed, opts)).cm;
    return scalars_for(est, measured_mode);
  };
}

Pipeline sampled_cm_pipeline(ScenarioState state, std::size_t n, int measured_mode) {
  return [state = std::move(state), n, measured_mode](std::uint64_t seed) {
    SampleOptions opts;
    const SampleBatch batch = sample(state, n, seed, opts);
    const CovMatrix full = estimate_cm(batch).cm;
    const int a = state.mode_index("A");
    const int b = state.mode_index("B");
    return scalars_for(reduce(full, {a, b}), measured_mode);
  };
}

}  // namespace gausscorr
