#pragma once

// Monte-Carlo emulation of the measured-data pipeline.
//
// Samples are drawn in quadrature units (covariance gamma / 2). Generation is
// split into fixed-size shards, each seeded from (seed, shard index), so the
// output does not depend on the number of worker threads.

#include "gausscorr/scenarios.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gausscorr {

struct SampleBatch {
  std::size_t n = 0;
  std::vector<std::string> modes;
  std::vector<std::string> columns;  // x_<mode>, p_<mode>
  Matrix data;                       // n x columns
  std::vector<std::string> sources;  // one displacement_record column each
  Matrix displacement_record;        // n x sources
  std::uint64_t seed = 0;

  int column(std::string_view name) const;
  int source(std::string_view name) const;
};

struct CMEstimate {
  CovMatrix cm = CovMatrix::vacuum(1);
  Matrix std_errors;
};

struct SampleOptions {
  /// 0 means: GAUSSCORR_THREADS if set, otherwise hardware concurrency.
  int threads = 0;
  std::size_t shard_size = std::size_t{1} << 16;
};

/// Worker count from GAUSSCORR_THREADS (>= 1), defaulting to the hardware.
int thread_count();

/// SplitMix64 finalizer; used to derive shard and trial seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

SampleBatch sample(const ScenarioState& state, std::size_t n, std::uint64_t seed,
                   const SampleOptions& options = {});

/// 2 x sample covariance with Gaussian fourth-moment standard errors.
CMEstimate estimate_cm(const SampleBatch& batch);

/// Per-shot x_<mode> <- x_<mode> - (g T + R) * record[source].
SampleBatch electronic_demodulation(const SampleBatch& batch, double g, double amplitude_t,
                                    double amplitude_r, std::string_view source = kDisplacementSource,
                                    std::string_view mode = "B");

struct SampleDuan {
  double g = 1.0;
  int sign = 1;
  double value = 0.0;
  double std_error = 0.0;
};

/// Duan product estimated from the samples of modes A and B.
SampleDuan sample_duan(const SampleBatch& batch, double g, int sign);

void write_batch_csv(const SampleBatch& batch, std::ostream& out);

struct ScalarSummary {
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t trials = 0;
};

/// One Monte-Carlo trial; receives a trial seed, returns named scalars.
using Pipeline = std::function<std::vector<std::pair<std::string, double>>(std::uint64_t)>;

/// Mean and (population) standard deviation of each scalar over the trials.
std::map<std::string, ScalarSummary> error_monte_carlo(const Pipeline& pipeline,
                                                       std::size_t trials, std::uint64_t seed);

/// Perturbs every independent CM entry with a Gaussian of the given standard
/// deviation, then evaluates discord, PPT minimum eigenvalue and optimized
/// Duan value.
Pipeline perturbed_cm_pipeline(CovMatrix cm, Matrix error_matrix, int measured_mode = 1);

/// Shot count whose Gaussian-estimator standard errors best match the
/// diagonal of `error_matrix` (geometric mean over the diagonal entries).
double calibrated_sample_size(const CovMatrix& cm, const Matrix& error_matrix);

/// Re-estimates the CM from n Gaussian shots drawn from `cm`, so entry errors
/// carry the correlations of a real sample covariance; evaluates the same
/// scalars as perturbed_cm_pipeline.
Pipeline resampled_cm_pipeline(CovMatrix cm, std::size_t n, int measured_mode = 1);

/// Samples n shots from the scenario, re-estimates the (A, B) CM and
/// evaluates the same scalars.
Pipeline sampled_cm_pipeline(ScenarioState state, std::size_t n, int measured_mode = 1);

}  // namespace gausscorr
