#include "cli_app.hpp"

#include "gausscorr/errors.hpp"
#include "gausscorr/io.hpp"
#include "gausscorr/sampling.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

namespace gausscorr::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitInvalid = 2;
constexpr int kExitNumerical = 3;

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json duan_json(const DuanReport& d) {
  return {{"g", d.g}, {"sign", d.sign}, {"value", d.value}, {"entangled", d.entangled}};
}

void require_file(const std::string& path, const char* what) {
  if (path.empty()) throw InvalidInput(std::string("missing ") + what);
  if (!fs::is_regular_file(path)) throw InvalidInput(std::string(what) + " not found: " + path);
}

// Opens the destination before any computation so bad paths fail fast.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (path.empty()) return;
    const fs::path p(path);
    if (p.has_parent_path() && !fs::is_directory(p.parent_path())) {
      throw InvalidInput("output directory does not exist: " + p.parent_path().string());
    }
    file_ = std::make_unique<std::ofstream>(p);
    if (!*file_) throw InvalidInput("cannot write " + path);
    stream_ = file_.get();
  }
  std::ostream& get() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

int measured_mode_index(const std::string& name) {
  if (name == "A") return 0;
  if (name == "B") return 1;
  throw InvalidInput("--measured-mode must be A or B");
}

struct DiscordArgs {
  std::string cm_path;
  std::string measured = "B";
  bool bits = false;
  bool allow_measured = false;
  std::string errors_path;
  std::size_t trials = 0;
  std::uint64_t seed = 1;
  std::string mc_model = "resampled";
};

int cmd_discord(const DiscordArgs& a, std::ostream& out) {
  require_file(a.cm_path, "CM file");
  const int mode = measured_mode_index(a.measured);
  io::CMReadOptions read_opts;
  read_opts.skip_physicality = a.allow_measured;
  const std::string text = io::read_text(a.cm_path);
  const CovMatrix cm = io::parse_cm(text, read_opts);
  if (cm.n_modes() != 2) throw InvalidInput("discord needs a two-mode CM");

  DiscordOptions opts;
  opts.allow_nonphysical = a.allow_measured;
  const DiscordReport r = discord(cm, mode, opts);
  const double scale = a.bits ? 1.0 / std::log(2.0) : 1.0;

  json doc = {{"discord", r.discord * scale},
              {"mutual_info", r.mutual_info * scale},
              {"classical_corr", r.classical_corr * scale},
              {"branch", to_string(r.branch)},
              {"measured_mode", a.measured},
              {"ppt_min_eig", ppt_min_eig(cm)},
              {"physical", is_physical(cm)},
              {"clamped", r.clamped},
              {"units", a.bits ? "bits" : "nats"}};

  if (a.trials > 0) {
    Matrix errors;
    if (!a.errors_path.empty()) {
      require_file(a.errors_path, "error matrix file");
      errors = io::parse_matrix(io::read_text(a.errors_path), "errors");
    } else {
      errors = io::parse_matrix(text, "errors");
    }
    json model = {{"name", a.mc_model}};
    Pipeline pipeline;
    if (a.mc_model == "independent") {
      pipeline = perturbed_cm_pipeline(cm, errors, mode);
    } else {
      const auto shots = static_cast<std::size_t>(std::llround(calibrated_sample_size(cm, errors)));
      model["shots"] = shots;
      pipeline = resampled_cm_pipeline(cm, shots, mode);
    }
    const auto summary = error_monte_carlo(pipeline, a.trials, a.seed);
    json mc = json::object();
    for (const auto& [name, s] : summary) {
      const double k = (name == "discord") ? scale : 1.0;
      mc[name] = {{"mean", s.mean * k}, {"std", s.stddev * k}};
    }
    doc["monte_carlo"] = {{"trials", a.trials}, {"seed", a.seed}, {"model", model}, {"summary", mc}};
  }
  out << doc.dump(2) << '\n';
  return 0;
}

struct ConfigArgs {
  std::string config;
  std::string out_path;
};

void write_sweep_csv(const std::vector<SweepRow>& rows, bool flow, std::ostream& out) {
  out << "t,discord,mutual_info,classical_corr";
  if (flow) out << ",E_F_AE,S_A,residual";
  out << '\n' << std::setprecision(10);
  for (const auto& r : rows) {
    out << r.t << ',' << r.discord << ',' << r.mutual_info << ',' << r.classical_corr;
    if (flow) out << ',' << r.e_f_ae.value_or(NAN) << ',' << r.s_a << ',' << r.residual.value_or(NAN);
    out << '\n';
  }
}

int cmd_sweep(const ConfigArgs& a, std::ostream& out) {
  require_file(a.config, "config file");
  const io::ScenarioConfig cfg = io::read_config(a.config);
  Sink sink(a.out_path, out);
  const ScenarioState state = cfg.build_state();
  const auto rows = attenuation_sweep(state, cfg.attenuation_grid, cfg.cmr_a, cfg.flow);
  write_sweep_csv(rows, cfg.flow, sink.get());
  return 0;
}

int cmd_recover(const ConfigArgs& a, const std::string& mode_flag, std::ostream& out) {
  require_file(a.config, "config file");
  const io::ScenarioConfig cfg = io::read_config(a.config);
  const io::RecoveryMode mode = mode_flag.empty() ? cfg.recovery : io::parse_recovery_mode(mode_flag);
  Sink sink(a.out_path, out);
  const ScenarioState state = cfg.build_state();

  const DuanReport before = duan_optimize(state.effective_cm({"A", "B"}));
  json doc = {{"mode", io::to_string(mode)}, {"before", duan_json(before)}};
  DuanReport after;
  if (mode == io::RecoveryMode::Demodulate) {
    if (cfg.gain) {
      const CovMatrix cm = recover_demodulate(state, *cfg.gain).effective_cm({"A", "B"});
      const DuanReport plus = duan_value(cm, *cfg.gain, 1);
      const DuanReport minus = duan_value(cm, *cfg.gain, -1);
      after = plus.value <= minus.value ? plus : minus;
    } else {
      after = recover_demodulate_optimized(state).duan;
    }
  } else {
    const InterferenceResult r = recover_interfere(state, cfg.bs_t_be);
    after = r.duan;
    doc["bs_t_be"] = r.bs_t_be;
  }
  doc["duan"] = duan_json(after);
  doc["g"] = after.g;
  doc["value"] = after.value;
  doc["entangled"] = after.entangled;
  sink.get() << doc.dump(2) << '\n';
  return 0;
}

int cmd_certify(double vx, double vp, std::ostream& out) {
  const OptimalityCertificate c = certify(vx, vp);
  const auto& p = c.params;
  json doc = {{"vx", vx},
              {"vp", vp},
              {"certified", c.certified},
              {"params", {{"m", p.m}, {"tau", p.tau_channel}, {"eta", p.eta}, {"r", p.r}, {"xi", p.xi}}},
              {"conditions",
               {{"tau_real", c.cond_tau_real},
                {"eta_equals_one_minus_tau", c.cond_eta},
                {"r_range", c.cond_r_range},
                {"vx_threshold", c.cond_vx_threshold}}}};
  out << doc.dump(2) << '\n';
  return 0;
}

struct SimulateArgs {
  std::string config;
  std::string out_path;
  std::string estimate_path;
  std::size_t n = 100000;
  std::uint64_t seed = 1;
  bool demodulate = false;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  require_file(a.config, "config file");
  if (a.n < 2) throw InvalidInput("--n must be at least 2");
  const io::ScenarioConfig cfg = io::read_config(a.config);
  Sink batch_sink(a.out_path, out);
  Sink estimate_sink(a.estimate_path, out);
  ScenarioState state = cfg.build_state();

  SampleBatch batch = sample(state, a.n, a.seed);
  CovMatrix analytic = state.effective_cm();
  if (a.demodulate) {
    const double g = cfg.gain.value_or(1.0);
    const double t = state.split_t;
    batch = electronic_demodulation(batch, g, std::sqrt(t), std::sqrt(1.0 - t));
    analytic = recover_demodulate(state, g).effective_cm();
  }
  const CMEstimate est = estimate_cm(batch);

  if (!a.out_path.empty()) write_batch_csv(batch, batch_sink.get());
  json modes = json::array();
  for (const auto& m : batch.modes) modes.push_back(m);
  json doc = {{"n", batch.n},
              {"seed", batch.seed},
              {"modes", modes},
              {"gamma", matrix_json(est.cm.gamma())},
              {"std_errors", matrix_json(est.std_errors)},
              {"analytic_gamma", matrix_json(analytic.gamma())}};
  estimate_sink.get() << doc.dump(2) << '\n';
  return 0;
}

void emit_error(std::ostream& err, const std::string& kind, const std::string& message, int code) {
  err << json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << '\n';
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gaussian-state correlation toolkit", "gausscorr"};
  app.require_subcommand(1);

  DiscordArgs discord_args;
  auto* discord_cmd = app.add_subcommand("discord", "Gaussian discord and PPT witness of a two-mode CM");
  discord_cmd->add_option("--cm", discord_args.cm_path, "CM JSON file")->required();
  discord_cmd->add_option("--measured-mode", discord_args.measured, "Measured mode (A or B)")
      ->check(CLI::IsMember({"A", "B"}));
  discord_cmd->add_flag("--bits", discord_args.bits, "Report entropic quantities in bits");
  discord_cmd->add_flag("--allow-measured", discord_args.allow_measured,
                        "Accept slightly nonphysical measured CMs");
  discord_cmd->add_option("--errors", discord_args.errors_path,
                          "Error matrix JSON (defaults to the CM file's \"errors\" entry)");
  discord_cmd->add_option("--mc-trials", discord_args.trials, "Monte-Carlo error trials (0 = off)");
  discord_cmd->add_option("--seed", discord_args.seed, "Monte-Carlo seed");
  discord_cmd->add_option("--mc-model", discord_args.mc_model,
                          "resampled: shot count calibrated to the error matrix; "
                          "independent: per-entry Gaussian perturbation")
      ->check(CLI::IsMember({"resampled", "independent"}));

  ConfigArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand("sweep", "Correlations versus attenuation of mode B (CSV)");
  sweep_cmd->add_option("--config", sweep_args.config, "Scenario config JSON")->required();
  sweep_cmd->add_option("--out", sweep_args.out_path, "Output CSV (stdout if omitted)");

  ConfigArgs recover_args;
  std::string recover_mode;
  auto* recover_cmd = app.add_subcommand("recover", "Entanglement recovery and Duan criterion (JSON)");
  recover_cmd->add_option("--config", recover_args.config, "Scenario config JSON")->required();
  recover_cmd->add_option("--mode", recover_mode, "demodulate or interfere")
      ->check(CLI::IsMember({"demodulate", "interfere"}));
  recover_cmd->add_option("--out", recover_args.out_path, "Output JSON (stdout if omitted)");

  double vx = 0.0;
  double vp = 0.0;
  auto* certify_cmd = app.add_subcommand("certify", "Gaussian-measurement optimality certificate (JSON)");
  certify_cmd->add_option("--vx", vx, "Input x variance")->required();
  certify_cmd->add_option("--vp", vp, "Input p variance")->required();

  SimulateArgs sim_args;
  auto* simulate_cmd = app.add_subcommand("simulate", "Sample a scenario and estimate its CM");
  simulate_cmd->add_option("--config", sim_args.config, "Scenario config JSON")->required();
  simulate_cmd->add_option("--n", sim_args.n, "Number of shots");
  simulate_cmd->add_option("--seed", sim_args.seed, "RNG seed");
  simulate_cmd->add_option("--out", sim_args.out_path, "Batch CSV");
  simulate_cmd->add_option("--estimate", sim_args.estimate_path, "CM estimate JSON (stdout if omitted)");
  simulate_cmd->add_flag("--demodulate", sim_args.demodulate,
                         "Subtract the displacement record from x_B before estimating");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    emit_error(err, "invalid-input", e.what(), kExitInvalid);
    return kExitInvalid;
  }

  try {
    if (*discord_cmd) return cmd_discord(discord_args, out);
    if (*sweep_cmd) return cmd_sweep(sweep_args, out);
    if (*recover_cmd) return cmd_recover(recover_args, recover_mode, out);
    if (*certify_cmd) return cmd_certify(vx, vp, out);
    if (*simulate_cmd) return cmd_simulate(sim_args, out);
  } catch (const NumericalFailure& e) {
    emit_error(err, to_string(e.kind()), e.what(), kExitNumerical);
    return kExitNumerical;
  } catch (const Error& e) {
    emit_error(err, to_string(e.kind()), e.what(), kExitInvalid);
    return kExitInvalid;
  } catch (const std::exception& e) {
    emit_error(err, "internal", e.what(), kExitNumerical);
    return kExitNumerical;
  }
  return kExitInvalid;
}

}  // namespace gausscorr::cli
