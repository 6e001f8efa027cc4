#include "support.hpp"

#include "gausscorr/errors.hpp"
#include "gausscorr/sampling.hpp"

#include <doctest.h>

#include <sstream>

using namespace gausscorr;
using namespace gausscorr::testing;

namespace {

const InputSpec kSqueezed{InputKind::Squeezed, -3.0, 9.84, 38.4};

double max_z(const CMEstimate& est, const Matrix& truth) {
  return ((est.cm.gamma() - truth).array() / est.std_errors.array()).abs().maxCoeff();
}

ScenarioState vacuum_state() { return ScenarioState({"A", "B"}, CovMatrix::vacuum(2)); }

}  // namespace

TEST_CASE("vacuum batch reproduces the identity") {
  const SampleBatch b = sample(vacuum_state(), 1000000, 42);
  CHECK(b.columns == std::vector<std::string>{"x_A", "p_A", "x_B", "p_B"});
  const CMEstimate est = estimate_cm(b);
  CHECK(max_z(est, Matrix::Identity(4, 4)) < 5.0);
  CHECK((est.std_errors.array() >= 0.0).all());
}

TEST_CASE("seeded determinism independent of thread count") {
  const ScenarioState st = build_split_state(kSqueezed, 0.5);
  SampleOptions one;
  one.threads = 1;
  one.shard_size = 1000;
  SampleOptions many = one;
  many.threads = 7;
  const SampleBatch a = sample(st, 25000, 9, one);
  const SampleBatch b = sample(st, 25000, 9, many);
  CHECK(a.data == b.data);
  CHECK(a.displacement_record == b.displacement_record);
  const SampleBatch c = sample(st, 25000, 10, one);
  CHECK(a.data != c.data);

  std::ostringstream sa, sb;
  write_batch_csv(a, sa);
  write_batch_csv(b, sb);
  CHECK(sa.str() == sb.str());
  CHECK(sa.str().rfind("x_A,p_A,x_B,p_B,xbar,pbar\n", 0) == 0);
}

TEST_CASE("standard errors scale as n^-1/2") {
  const ScenarioState st = build_split_state(kSqueezed, 0.5);
  double ratio = 0.0;
  const int trials = 20;
  for (int k = 0; k < trials; ++k) {
    const CMEstimate small = estimate_cm(sample(st, 20000, 100 + k));
    const CMEstimate large = estimate_cm(sample(st, 40000, 500 + k));
    ratio += (large.std_errors.array() / small.std_errors.array()).mean();
  }
  ratio /= trials;
  CHECK(std::abs(ratio - 1.0 / std::sqrt(2.0)) < 0.1 / std::sqrt(2.0));
}

TEST_CASE("scenario samples agree with the analytic effective CM") {
  const ScenarioState st = build_split_state(kSqueezed, 0.5);
  const CMEstimate est = estimate_cm(sample(st, 400000, 3));
  CHECK(max_z(est, st.effective_cm().gamma()) < 5.0);

  const ScenarioState lossy = attenuate_mode(st, "B", 0.4);
  const CMEstimate est3 = estimate_cm(sample(lossy, 400000, 4));
  CHECK(max_z(est3, lossy.effective_cm().gamma()) < 5.0);
}

TEST_CASE("estimator bias over repeated trials") {
  const ScenarioState st = build_split_state(kSqueezed, 0.5);
  Matrix mean = Matrix::Zero(4, 4);
  Matrix se;
  const int trials = 100;
  for (int k = 0; k < trials; ++k) {
    const CMEstimate est = estimate_cm(sample(st, 5000, 1000 + k));
    mean += est.cm.gamma() / trials;
    se = est.std_errors;
  }
  const Matrix z = ((mean - st.effective_cm().gamma()).array() / (se.array() / std::sqrt(trials))).abs();
  CHECK(z.maxCoeff() < 3.5);
}

TEST_CASE("electronic demodulation") {
  const SampleBatch vac = sample(vacuum_state(), 1000, 1);
  CHECK_THROWS_AS(electronic_demodulation(vac, 1.0, 0.7, 0.7), InvalidInput);

  const ScenarioState st = build_split_state(kSqueezed, 0.5);
  const SampleBatch b = sample(st, 300000, 5);
  const double tt = std::sqrt(0.5);
  const SampleBatch d = electronic_demodulation(b, 1.0, tt, tt);
  const int xb = b.column("x_B");
  const int src = b.source(kDisplacementSource);
  CHECK(d.data(7, xb) == doctest::Approx(b.data(7, xb) - std::sqrt(2.0) * b.displacement_record(7, src)));
  CHECK(d.data.col(0) == b.data.col(0));

  const ScenarioState analytic = recover_demodulate(st, 1.0);
  CHECK(max_z(estimate_cm(d), analytic.effective_cm().gamma()) < 5.0);

  const SampleDuan sd = sample_duan(d, 1.0, 1);
  const double cm_level = duan_value(analytic.effective_cm({"A", "B"}), 1.0, 1).value;
  CHECK(sd.value < 1.0);
  CHECK(std::abs(sd.value - cm_level) < 5.0 * sd.std_error);
}

TEST_CASE("zero modulation demodulation is the identity") {
  const ScenarioState st = build_split_state(InputSpec{InputKind::Coherent, 0.0, 1.0, 1.0}, 0.5);
  const SampleBatch b = sample(st, 2000, 8);
  const SampleBatch d = electronic_demodulation(b, 1.3, 0.6, 0.8);
  CHECK(d.data == b.data);
}

TEST_CASE("discrete displacement ensemble") {
  NoiseLoading l{kDisplacementSource, 0.0, Vector::Zero(4), {}, {}};
  CHECK_THROWS_AS(l.set_discrete({1.0, 2.0}, {0.5, 0.5}), InvalidInput);
  l.set_discrete({-1.0, 1.0}, {1.0, 1.0});
  CHECK(l.variance == doctest::Approx(2.0));

  ScenarioState in({"A", "B"}, CovMatrix::vacuum(2));
  l.loading(0) = 1.0;
  const ScenarioState st = in.with_loading(l).apply(beamsplitter(0.5, 0, 1, 2));
  const SampleBatch b = sample(st, 200000, 2);
  for (Eigen::Index i = 0; i < 50; ++i) CHECK(std::abs(b.displacement_record(i, 0)) == 1.0);
  CHECK(max_z(estimate_cm(b), st.effective_cm().gamma()) < 5.0);
}

TEST_CASE("error Monte Carlo") {
  const CovMatrix cm(measured_cm_gamma());
  const auto point = error_monte_carlo(perturbed_cm_pipeline(cm, Matrix::Zero(4, 4)), 1, 3);
  CHECK(point.at("discord").mean == doctest::Approx(discord(cm).discord));
  CHECK(point.at("discord").stddev == 0.0);
  CHECK(point.at("ppt_min_eig").mean == doctest::Approx(ppt_min_eig(cm)));

  const auto a = error_monte_carlo(perturbed_cm_pipeline(cm, measured_error_matrix()), 50, 9);
  const auto b = error_monte_carlo(perturbed_cm_pipeline(cm, measured_error_matrix()), 50, 9);
  CHECK(a.at("discord").mean == b.at("discord").mean);
  CHECK(a.at("discord").stddev > 0.0);

  const double shots = calibrated_sample_size(cm, measured_error_matrix());
  CHECK(shots > 1e4);
  CHECK(shots < 1e5);
  const auto r = error_monte_carlo(resampled_cm_pipeline(cm, static_cast<std::size_t>(shots)), 200, 4);
  CHECK(r.at("discord").stddev > 0.002);
  CHECK(r.at("discord").stddev < 0.02);
  CHECK(std::abs(r.at("discord").mean - 0.4919) < 0.01);
}

TEST_CASE("sampled scenario pipeline") {
  const auto s = error_monte_carlo(sampled_cm_pipeline(build_split_state(kSqueezed, 0.5), 20000), 5, 1);
  CHECK(s.at("discord").mean == doctest::Approx(0.588).epsilon(0.05));
  CHECK(s.at("discord").trials == 5);
}

TEST_CASE("thread count honours the environment") {
  CHECK(thread_count() >= 1);
  CHECK(mix_seed(1, 0) != mix_seed(1, 1));
  CHECK(mix_seed(1, 0) != mix_seed(2, 0));
}
