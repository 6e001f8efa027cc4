// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance        run all criteria
//   acceptance N      run criterion N only

#include "support.hpp"

#include "cli_app.hpp"
#include "gausscorr/io.hpp"
#include "gausscorr/sampling.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

using namespace gausscorr;
using namespace gausscorr::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const InputSpec kFig3{InputKind::Squeezed, -3.0, 9.84, 38.4};

Outcome headline_discord() {
  const std::string path = data_path("measured_squeezed_cm.json");
  const char* argv[] = {"gausscorr", "discord", "--cm", path.c_str()};
  std::ostringstream out, err;
  const auto t0 = std::chrono::steady_clock::now();
  const int code = cli::run(4, argv, out, err);
  const double elapsed = seconds_since(t0);
  if (code != 0) return {false, "discord command failed: " + err.str()};
  const double d = nlohmann::json::parse(out.str())["discord"].get<double>();
  return {std::abs(d - 0.49) <= 0.01 && elapsed < 1.0,
          fmt("discord=%.4f (target 0.49+-0.01), runtime %.3f s", d, elapsed)};
}

Outcome separability_witness() {
  const CovMatrix cm = io::read_cm(data_path("measured_squeezed_cm.json"));
  const Matrix errors = io::parse_matrix(io::read_text(data_path("measured_squeezed_cm.json")), "errors");
  const double ppt = ppt_min_eig(cm);
  const auto shots = static_cast<std::size_t>(calibrated_sample_size(cm, errors));
  const auto mc = error_monte_carlo(resampled_cm_pipeline(cm, shots), 400, 2025);
  const double sd_ppt = mc.at("ppt_min_eig").stddev;
  const double sd_disc = mc.at("discord").stddev;
  const bool spreads_ok = sd_ppt >= 0.003 && sd_ppt <= 0.03 && sd_disc >= 0.003 && sd_disc <= 0.03;
  return {std::abs(ppt - 0.84) <= 0.02 && spreads_ok,
          fmt("ppt_min_eig=%.4f (target 0.84+-0.02); MC (%zu shots, 400 trials) spread: ppt %.4f, discord %.4f",
              ppt, shots, sd_ppt, sd_disc)};
}

Outcome oracle_equivalence() {
  std::mt19937_64 rng(20240601);
  double worst = 0.0;
  const auto t0 = std::chrono::steady_clock::now();
  for (int k = 0; k < 100; ++k) {
    const CovMatrix cm = random_cm(2, rng);
    worst = std::max(worst, std::abs(discord(cm).discord - discord_oracle(cm).discord));
  }
  const double elapsed = seconds_since(t0);
  return {worst <= 1e-4 && elapsed < 60.0,
          fmt("max |closed form - oracle| = %.2e over 100 CMs, runtime %.2f s", worst, elapsed)};
}

Outcome koashi_winter() {
  const ScenarioState st = build_split_state(kFig3, 0.5);
  const CovMatrix global = purify_effective(st, std::vector<std::string>{"A", "B"});
  double worst = 0.0;
  for (int k = 0; k < 9; ++k) {
    const double t = 1.0 - 0.1 * k;
    const CovMatrix q = attenuate(global, 1, t, true);  // modes A, B', E, V
    std::vector<int> env{0};
    for (int m = 2; m < q.n_modes(); ++m) env.push_back(m);
    const double s_a = von_neumann_entropy(reduce(q, {0}));
    const double j = classical_correlation(reduce(q, {0, 1}), 1);
    const double ef = geof(reduce(q, env), 0).value;
    worst = std::max(worst, std::abs(s_a - j - ef));
  }
  return {worst <= 1e-2, fmt("max |S(A) - J(A|B') - E_F(A,E')| = %.2e over 9 losses", worst)};
}

Outcome discord_vs_loss_shape() {
  const InputSpec fig2{InputKind::Coherent, 0.0, 7.1, 1.0};
  std::vector<double> grid;
  for (int k = 0; k <= 8; ++k) grid.push_back(1.0 - 0.1 * k);
  const auto rows = attenuation_sweep(build_split_state(fig2, 0.5), grid, 3.9e-3);
  bool monotone = true;
  double first_drop = -1.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].discord < rows[i - 1].discord - 1e-12) {
      monotone = false;
      if (first_drop < 0.0) first_drop = 1.0 - rows[i].t;
    }
  }
  double best_t = 0.0;
  double best = -1.0;
  for (int k = 1; k <= 9; ++k) {
    const double t = 0.1 * k;
    const double d = discord(build_split_state(fig2, t).effective_cm({"A", "B"})).discord;
    if (d > best) {
      best = d;
      best_t = t;
    }
  }
  const bool balanced_best = std::abs(best_t - 0.5) < 1e-9;
  return {monotone && balanced_best,
          fmt("discord %.4f at 0%% loss, %.4f at 80%% loss, %s; zero-loss argmax over splits t=%.1f "
              "(discord %.4f)",
              rows.front().discord, rows.back().discord,
              monotone ? "non-decreasing" : fmt("first decrease at %.0f%% loss", 100 * first_drop).c_str(),
              best_t, best)};
}

Outcome optimality_certificate() {
  const OptimalityCertificate c = certify(9.84, 38.4);
  const double eta_gap = std::abs(c.params.eta - (1.0 - c.params.tau_channel));
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 20; ++j) {
      const double vx = 1.1 + 0.6 * i;
      const double vp = vx + 0.1 + 2.0 * j;
      const SplitStandardForm a = split_standard_form(vx, vp);
      const SplitStandardForm b = standard_form_from_decomposition(decomposition_params(vx, vp));
      worst = std::max({worst, std::abs(a.a - b.a), std::abs(a.c_plus - b.c_plus),
                        std::abs(a.c_minus - b.c_minus)});
    }
  }
  return {c.certified && eta_gap <= 1e-12 && worst <= 1e-9,
          fmt("certified=%s, |eta-(1-tau)|=%.1e, round trip max error %.1e on 20x20 grid",
              c.certified ? "true" : "false", eta_gap, worst)};
}

Outcome recovery_closed_form_check() {
  double worst = 0.0;
  bool all_entangled = true;
  for (int k = 1; k <= 20; ++k) {
    const double r = 0.05 * k;
    const double v = recovery_closed_form(r, 1.0 / std::sqrt(2.0), 1.0);
    worst = std::max(worst, std::abs(v - std::exp(-2.0 * r)));
    all_entangled = all_entangled && v < 1.0;
  }
  return {worst <= 1e-12 && all_entangled,
          fmt("max |value - exp(-2r)| = %.1e on r in {0.05..1}, entangled for all r: %s", worst,
              all_entangled ? "yes" : "no")};
}

Outcome recovery_pipeline() {
  const ScenarioState st = build_split_state(kFig3, 0.5);
  const DemodulationResult dm = recover_demodulate_optimized(st);
  const InterferenceResult in = recover_interfere(st);

  const SampleBatch raw = sample(st, 1000000, 77);
  const double tt = std::sqrt(st.split_t);
  const double rr = std::sqrt(1.0 - st.split_t);
  const SampleDuan sd = sample_duan(electronic_demodulation(raw, dm.duan.g, tt, rr), dm.duan.g, dm.duan.sign);
  const SampleDuan si = sample_duan(sample(in.state, 1000000, 78), in.duan.g, in.duan.sign);
  const double zd = std::abs(sd.value - dm.duan.value) / sd.std_error;
  const double zi = std::abs(si.value - in.duan.value) / si.std_error;

  const bool pass = dm.duan.value < 1.0 && in.duan.value < 1.0 && dm.duan.value <= in.duan.value &&
                    zd < 5.0 && zi < 5.0;
  return {pass, fmt("demodulate %.4f (benchmark 0.83), interfere %.4f at t_BE=%.3f (benchmark 0.91); "
                    "sample-level z = %.2f / %.2f",
                    dm.duan.value, in.duan.value, in.bs_t_be, zd, zi)};
}

Outcome sampling_statistics() {
  const ScenarioState vac({"A", "B"}, CovMatrix::vacuum(2));
  const CMEstimate est = estimate_cm(sample(vac, 1000000, 1));
  const double zmax =
      ((est.cm.gamma() - Matrix::Identity(4, 4)).array() / est.std_errors.array()).abs().maxCoeff();

  const ScenarioState st = build_split_state(kFig3, 0.5);
  double ratio = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Matrix small = estimate_cm(sample(st, 50000, 300 + k)).std_errors;
    const Matrix large = estimate_cm(sample(st, 100000, 700 + k)).std_errors;
    ratio += (large.array() / small.array()).mean() / 20.0;
  }
  const double scaling_err = std::abs(ratio * std::sqrt(2.0) - 1.0);

  SampleOptions one;
  one.threads = 1;
  SampleOptions four;
  four.threads = 4;
  std::ostringstream a, b, c;
  write_batch_csv(sample(st, 150000, 5, one), a);
  write_batch_csv(sample(st, 150000, 5, four), b);
  write_batch_csv(sample(st, 150000, 5, one), c);
  const bool identical = a.str() == b.str() && a.str() == c.str();

  return {zmax < 5.0 && scaling_err < 0.1 && identical,
          fmt("vacuum max |z| = %.2f; se ratio on doubling %.4f (1/sqrt2 = 0.7071); byte-identical: %s", zmax,
              ratio, identical ? "yes" : "no")};
}

Outcome geof_sanity() {
  std::mt19937_64 rng(1234);
  double worst_sep = geof(CovMatrix(measured_cm_gamma())).value;
  int count = 1;
  while (count < 20) {
    const CovMatrix cm = random_separable_cm(2, rng);
    if (ppt_min_eig(cm) < 0.0) continue;
    worst_sep = std::max(worst_sep, geof(cm).value);
    ++count;
  }
  double worst_pure = 0.0;
  for (int k = 0; k < 10; ++k) {
    const CovMatrix pure = random_cm(2, rng, true);
    worst_pure = std::max(worst_pure, std::abs(geof(pure).value - von_neumann_entropy(reduce(pure, {0}))));
  }
  return {worst_sep <= 1e-4 && worst_pure <= 1e-6,
          fmt("max GEoF on 20 PPT states = %.1e; max |GEoF - S(A)| on pure states = %.1e", worst_sep,
              worst_pure)};
}

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
};

const Criterion kCriteria[] = {
    {"headline discord", headline_discord},
    {"separability witness", separability_witness},
    {"oracle equivalence", oracle_equivalence},
    {"Koashi-Winter balance", koashi_winter},
    {"discord-vs-loss shape", discord_vs_loss_shape},
    {"optimality certificate", optimality_certificate},
    {"recovery closed form", recovery_closed_form_check},
    {"recovery pipeline", recovery_pipeline},
    {"sampling statistics", sampling_statistics},
    {"GEoF sanity", geof_sanity},
};

}  // namespace

int main(int argc, char** argv) {
  constexpr int n = static_cast<int>(std::size(kCriteria));
  int only = 0;
  if (argc > 1) {
    only = std::atoi(argv[1]);
    if (only < 1 || only > n) {
      std::cerr << "criterion must be in 1.." << n << '\n';
      return 2;
    }
  }
  int failures = 0;
  for (int i = 1; i <= n; ++i) {
    if (only && i != only) continue;
    Outcome o;
    try {
      o = kCriteria[i - 1].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << "  #" << i << ' ' << kCriteria[i - 1].name << ": " << o.detail
              << std::endl;
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
