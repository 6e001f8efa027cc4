#include "gausscorr/scenarios.hpp"

#include "gausscorr/errors.hpp"
#include "gausscorr/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gausscorr {

namespace {

Vector unit(int dim, int index) {
  Vector v = Vector::Zero(dim);
  v(index) = 1.0;
  return v;
}

}  // namespace

void NoiseLoading::set_discrete(std::vector<double> amps, std::vector<double> w) {
  if (amps.empty() || amps.size() != w.size()) {
    throw InvalidInput("discrete ensemble needs matching amplitudes and weights");
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  if (!(total > 0.0) || std::any_of(w.begin(), w.end(), [](double x) { return x < 0.0; })) {
    throw InvalidInput("discrete weights must be non-negative with positive sum");
  }
  double mean = 0.0;
  for (std::size_t i = 0; i < amps.size(); ++i) mean += w[i] / total * amps[i];
  if (std::abs(mean) > 1e-12 * std::max(1.0, std::abs(amps.front()))) {
    throw InvalidInput("discrete displacement ensemble must have zero mean");
  }
  double second = 0.0;
  for (std::size_t i = 0; i < amps.size(); ++i) {
    w[i] /= total;
    second += w[i] * amps[i] * amps[i];
  }
  amplitudes = std::move(amps);
  weights = std::move(w);
  variance = 2.0 * second;
}

ScenarioState::ScenarioState(std::vector<std::string> modes, CovMatrix quantum,
                             std::vector<NoiseLoading> loadings, Vector mean)
    : modes_(std::move(modes)),
      quantum_(std::move(quantum)),
      loadings_(std::move(loadings)),
      mean_(std::move(mean)) {
  if (static_cast<int>(modes_.size()) != quantum_.n_modes()) {
    throw InvalidInput("mode names do not match the covariance matrix");
  }
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    for (std::size_t j = i + 1; j < modes_.size(); ++j) {
      if (modes_[i] == modes_[j]) throw InvalidInput("duplicate mode name " + modes_[i]);
    }
  }
  if (mean_.size() == 0) mean_ = Vector::Zero(quantum_.dim());
  if (mean_.size() != quantum_.dim()) throw InvalidInput("mean vector has wrong length");
  for (const auto& l : loadings_) {
    if (l.loading.size() != quantum_.dim()) {
      throw InvalidInput("loading vector of " + l.source_id + " has wrong length");
    }
    if (l.variance < 0.0) throw InvalidInput("negative noise variance for " + l.source_id);
  }
}

int ScenarioState::mode_index(std::string_view name) const {
  const auto it = std::find(modes_.begin(), modes_.end(), name);
  if (it == modes_.end()) throw InvalidInput("unknown mode " + std::string(name));
  return static_cast<int>(it - modes_.begin());
}

bool ScenarioState::has_mode(std::string_view name) const {
  return std::find(modes_.begin(), modes_.end(), name) != modes_.end();
}

const NoiseLoading* ScenarioState::find_loading(std::string_view source_id) const {
  for (const auto& l : loadings_) {
    if (l.source_id == source_id) return &l;
  }
  return nullptr;
}

CovMatrix ScenarioState::effective_cm() const {
  Matrix g = quantum_.gamma();
  for (const auto& l : loadings_) g += l.variance * l.loading * l.loading.transpose();
  return CovMatrix(g);
}

CovMatrix ScenarioState::effective_cm(std::initializer_list<std::string_view> names) const {
  std::vector<int> idx;
  for (auto n : names) idx.push_back(mode_index(n));
  return reduce(effective_cm(), idx);
}

CovMatrix ScenarioState::effective_cm(std::span<const std::string> names) const {
  std::vector<int> idx;
  for (const auto& n : names) idx.push_back(mode_index(n));
  return reduce(effective_cm(), idx);
}

ScenarioState ScenarioState::apply(const SymplecticTransform& s) const {
  std::vector<NoiseLoading> loadings = loadings_;
  for (auto& l : loadings) l.loading = s.matrix() * l.loading;
  ScenarioState out(modes_, apply_symplectic(quantum_, s), std::move(loadings), s.matrix() * mean_);
  out.input = input;
  out.split_t = split_t;
  return out;
}

ScenarioState ScenarioState::append_vacuum(std::string name) const {
  std::vector<std::string> modes = modes_;
  modes.push_back(std::move(name));
  std::vector<NoiseLoading> loadings = loadings_;
  for (auto& l : loadings) {
    Vector v = Vector::Zero(l.loading.size() + 2);
    v.head(l.loading.size()) = l.loading;
    l.loading = v;
  }
  Vector mean = Vector::Zero(mean_.size() + 2);
  mean.head(mean_.size()) = mean_;
  ScenarioState out(std::move(modes), tensor(quantum_, CovMatrix::vacuum(1)), std::move(loadings),
                    std::move(mean));
  out.input = input;
  out.split_t = split_t;
  return out;
}

ScenarioState ScenarioState::with_loading(NoiseLoading loading) const {
  if (find_loading(loading.source_id) != nullptr) {
    throw InvalidInput("noise source " + loading.source_id + " already present");
  }
  std::vector<NoiseLoading> loadings = loadings_;
  loadings.push_back(std::move(loading));
  ScenarioState out(modes_, quantum_, std::move(loadings), mean_);
  out.input = input;
  out.split_t = split_t;
  return out;
}

ScenarioState ScenarioState::with_loading_vector(std::string_view source_id, Vector loading) const {
  std::vector<NoiseLoading> loadings = loadings_;
  auto it = std::find_if(loadings.begin(), loadings.end(),
                         [&](const NoiseLoading& l) { return l.source_id == source_id; });
  if (it == loadings.end()) throw InvalidInput("unknown noise source " + std::string(source_id));
  it->loading = std::move(loading);
  ScenarioState out(modes_, quantum_, std::move(loadings), mean_);
  out.input = input;
  out.split_t = split_t;
  return out;
}

ScenarioState build_split_state(const InputSpec& spec, double bs_t) {
  spec.validate();
  const double s = spec.squeezed_variance();
  const std::vector<double> diag{s, 1.0 / s, 1.0, 1.0};
  const CovMatrix quantum = CovMatrix::diagonal(diag);

  std::vector<NoiseLoading> loadings;
  loadings.push_back({kDisplacementSource, std::max(0.0, spec.v_x - s), unit(4, 0), {}, {}});
  const double w_p = spec.v_p - 1.0 / s;
  if (w_p > 0.0) loadings.push_back({kMomentumNoiseSource, w_p, unit(4, 1), {}, {}});

  ScenarioState in({"A", "B"}, quantum, std::move(loadings));
  in.input = spec;
  in.split_t = bs_t;
  return in.apply(beamsplitter(bs_t, 0, 1, 2));
}

ScenarioState attenuate_mode(const ScenarioState& state, std::string_view mode, double t,
                             std::string env_name) {
  const int idx = state.mode_index(mode);
  const ScenarioState extended = state.append_vacuum(std::move(env_name));
  return extended.apply(beamsplitter(t, idx, extended.n_modes() - 1, extended.n_modes()));
}

CovMatrix purify_effective(const ScenarioState& state, std::span<const std::string> modes) {
  return purify(state.effective_cm(modes));
}

std::vector<KWFlowPoint> correlation_flow(const ScenarioState& state,
                                          std::span<const double> t_grid,
                                          const GEoFOptions& geof_options) {
  const std::vector<std::string> system{"A", "B"};
  const CovMatrix global = purify_effective(state, system);
  const int n_env = global.n_modes() - 2;
  if (n_env > 1) throw InvalidInput("correlation flow needs a single purifying mode");

  std::vector<KWFlowPoint> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) {
    const CovMatrix q = attenuate(global, 1, t, true);
    const int n = q.n_modes();
    std::vector<int> env_side{0};
    for (int k = 2; k < n; ++k) env_side.push_back(k);

    KWFlowPoint p;
    p.t = t;
    p.s_a = von_neumann_entropy(reduce(q, {0}));
    p.j_ab = discord(reduce(q, {0, 1}), 1).classical_corr;
    p.e_f_ae = geof(reduce(q, env_side), 0, geof_options).value;
    p.residual = kw_audit(p.s_a, p.j_ab, p.e_f_ae);
    out.push_back(p);
  }
  return out;
}

std::vector<SweepRow> attenuation_sweep(const ScenarioState& state, std::span<const double> t_grid,
                                        double cmr_a, bool with_eof,
                                        const GEoFOptions& geof_options) {
  for (double t : t_grid) {
    if (!(t >= 0.0 && t <= 1.0)) throw InvalidInput("attenuation grid must lie in [0, 1]");
  }
  std::vector<KWFlowPoint> flow;
  if (with_eof) flow = correlation_flow(state, t_grid, geof_options);

  std::vector<SweepRow> rows;
  rows.reserve(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double t = t_grid[i];
    const ScenarioState lossy = attenuate_mode(state, "B", t);
    const CovMatrix noisy = cmr_noise(lossy.effective_cm({"A", "B"}), cmr_a, t);
    const DiscordReport d = discord(noisy, 1);
    SweepRow row;
    row.t = t;
    row.discord = d.discord;
    row.mutual_info = d.mutual_info;
    row.classical_corr = d.classical_corr;
    row.branch = to_string(d.branch);
    row.s_a = von_neumann_entropy(state.effective_cm({"A"}));
    if (with_eof) {
      row.e_f_ae = flow[i].e_f_ae;
      row.residual = flow[i].residual;
    }
    rows.push_back(row);
  }
  return rows;
}

DuanReport duan_value(const CovMatrix& cm, double g, int sign) {
  if (cm.n_modes() != 2) throw InvalidInput("Duan criterion needs a two-mode CM");
  if (!(g > 0.0)) throw InvalidInput("Duan gain must be positive");
  if (sign != 1 && sign != -1) throw InvalidInput("Duan sign must be +1 or -1");
  const Matrix& y = cm.gamma();
  const double s = static_cast<double>(sign);
  const double var_x = g * g * y(0, 0) + y(2, 2) + 2.0 * s * g * y(0, 2);
  const double var_p = g * g * y(1, 1) + y(3, 3) - 2.0 * s * g * y(1, 3);
  const double norm = (g * g + 1.0) * (g * g + 1.0);
  DuanReport r;
  r.g = g;
  r.sign = sign;
  r.value = std::max(0.0, var_x * var_p / norm);
  // values within rounding of the vacuum bound are not a violation
  r.entangled = r.value < 1.0 - 1e-9;
  return r;
}

DuanReport duan_optimize(const CovMatrix& cm) {
  DuanReport best;
  best.value = std::numeric_limits<double>::infinity();
  for (int sign : {1, -1}) {
    const auto res = optimize::grid_then_golden(
        [&](double log_g) { return duan_value(cm, std::exp(log_g), sign).value; }, -6.0, 6.0, 121,
        1e-10);
    const DuanReport r = duan_value(cm, std::exp(res.x), sign);
    if (r.value < best.value) best = r;
  }
  return best;
}

ScenarioState recover_demodulate(const ScenarioState& state, double g) {
  const NoiseLoading* xbar = state.find_loading(kDisplacementSource);
  if (xbar == nullptr) throw InvalidInput("state carries no x_bar loading to demodulate");
  const int xa = 2 * state.mode_index("A");
  const int xb = 2 * state.mode_index("B");
  Vector l = xbar->loading;
  const double coefficient = g * l(xa) + l(xb);
  l(xb) -= coefficient;
  return state.with_loading_vector(kDisplacementSource, std::move(l));
}

DemodulationResult recover_demodulate_optimized(const ScenarioState& state) {
  auto value_at = [&](double log_g) {
    const double g = std::exp(log_g);
    const CovMatrix cm = recover_demodulate(state, g).effective_cm({"A", "B"});
    return std::min(duan_value(cm, g, 1).value, duan_value(cm, g, -1).value);
  };
  const auto res = optimize::grid_then_golden(value_at, -6.0, 6.0, 121, 1e-10);
  const double g = std::exp(res.x);
  ScenarioState out = recover_demodulate(state, g);
  const CovMatrix cm = out.effective_cm({"A", "B"});
  DuanReport plus = duan_value(cm, g, 1);
  DuanReport minus = duan_value(cm, g, -1);
  return {std::move(out), plus.value <= minus.value ? plus : minus};
}

InterferenceResult recover_interfere(const ScenarioState& state, std::optional<double> bs_t_be) {
  const NoiseLoading* xbar = state.find_loading(kDisplacementSource);
  if (xbar == nullptr) throw InvalidInput("state carries no x_bar loading");
  ScenarioState with_ancilla = state.append_vacuum("Etilde");
  Vector l = with_ancilla.find_loading(kDisplacementSource)->loading;
  const int xe = 2 * with_ancilla.mode_index("Etilde");
  l(xe) = -1.0;
  with_ancilla = with_ancilla.with_loading_vector(kDisplacementSource, std::move(l));
  const int b = with_ancilla.mode_index("B");

  auto mixed = [&](double t) {
    return with_ancilla.apply(beamsplitter(t, b, xe / 2, with_ancilla.n_modes()));
  };
  double t = 1.0;
  if (bs_t_be) {
    t = *bs_t_be;
    if (!(t >= 0.0 && t <= 1.0)) throw InvalidInput("interference transmittance outside [0, 1]");
  } else {
    t = optimize::grid_then_golden(
            [&](double x) { return duan_optimize(mixed(x).effective_cm({"A", "B"})).value; }, 0.0,
            1.0, 51, 1e-10)
            .x;
  }
  ScenarioState out = mixed(t);
  DuanReport duan = duan_optimize(out.effective_cm({"A", "B"}));
  return {std::move(out), t, duan};
}

double recovery_closed_form(double r, double amplitude_t, double g) {
  if (amplitude_t < 0.0 || amplitude_t > 1.0) throw InvalidInput("T must lie in [0, 1]");
  const double big_r = std::sqrt(1.0 - amplitude_t * amplitude_t);
  const double t = amplitude_t;
  const double first = std::exp(2.0 * r) * (g * t - big_r) * (g * t - big_r) +
                       (g * big_r + t) * (g * big_r + t);
  const double second = std::exp(-2.0 * r) * (g * t + big_r) * (g * t + big_r) +
                         (g * big_r - t) * (g * big_r - t);
  return first * second / ((g * g + 1.0) * (g * g + 1.0));
}

OptimalityNote optimality_note(const ScenarioState& state) {
  OptimalityNote note;
  if (!state.input || state.input->kind != InputKind::Squeezed) {
    note.reason = "outside proven family";
    return note;
  }
  const InputSpec& in = *state.input;
  if (std::abs(state.split_t - 0.5) > 1e-12 || !(in.v_p > in.v_x && in.v_x > 1.0)) {
    note.reason = "outside proven family";
    return note;
  }
  note.certificate = certify(in.v_x, in.v_p);
  note.reason = note.certificate->certified ? "certified" : "conditions not met";
  return note;
}

}  // namespace gausscorr
