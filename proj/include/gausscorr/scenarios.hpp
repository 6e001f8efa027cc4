#pragma once

// End-to-end builders: split modulated states, attenuation sweeps, the
// correlation flow into the environment, the Duan product criterion and the
// two entanglement-recovery protocols.
//
// A ScenarioState keeps the classical modulation separate from the quantum
// covariance matrix: every Gaussian noise source contributes W * l l^T to the
// effective CM, where the loading vector l transforms covariantly with every
// applied symplectic map. Keeping x_bar explicit is what makes demodulation
// computable.

#include "gausscorr/channels.hpp"
#include "gausscorr/correlations.hpp"
#include "gausscorr/optimality.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gausscorr {

inline constexpr const char* kDisplacementSource = "xbar";
inline constexpr const char* kMomentumNoiseSource = "pbar";

struct NoiseLoading {
  std::string source_id;
  double variance = 0.0;  // W, gamma units
  Vector loading;         // coefficient of the noise variable per quadrature
  /// Optional discrete displacement ensemble (quadrature units). When set,
  /// variance == 2 * sum(w a^2) with normalized weights.
  std::vector<double> amplitudes;
  std::vector<double> weights;

  bool is_discrete() const { return !amplitudes.empty(); }
  /// Replaces the Gaussian ensemble by a discrete one; updates `variance`.
  void set_discrete(std::vector<double> amps, std::vector<double> w);
};

class ScenarioState {
 public:
  ScenarioState(std::vector<std::string> modes, CovMatrix quantum,
                std::vector<NoiseLoading> loadings = {}, Vector mean = Vector());

  const std::vector<std::string>& modes() const { return modes_; }
  int n_modes() const { return static_cast<int>(modes_.size()); }
  /// Throws InvalidInput for unknown names.
  int mode_index(std::string_view name) const;
  bool has_mode(std::string_view name) const;

  const CovMatrix& quantum_cm() const { return quantum_; }
  const Vector& mean() const { return mean_; }
  const std::vector<NoiseLoading>& noise_loadings() const { return loadings_; }
  const NoiseLoading* find_loading(std::string_view source_id) const;

  /// quantum + sum W l l^T.
  CovMatrix effective_cm() const;
  CovMatrix effective_cm(std::initializer_list<std::string_view> names) const;
  CovMatrix effective_cm(std::span<const std::string> names) const;

  ScenarioState apply(const SymplecticTransform& s) const;
  ScenarioState append_vacuum(std::string name) const;
  ScenarioState with_loading(NoiseLoading loading) const;
  /// Replaces the loading vector of an existing source.
  ScenarioState with_loading_vector(std::string_view source_id, Vector loading) const;

  std::optional<InputSpec> input;
  double split_t = 0.5;

 private:
  std::vector<std::string> modes_;
  CovMatrix quantum_;
  std::vector<NoiseLoading> loadings_;
  Vector mean_;
};

struct DuanReport {
  double g = 1.0;
  /// +1: (g x_A + x_B, g p_A - p_B); -1: (g x_A - x_B, g p_A + p_B).
  int sign = 1;
  double value = 1.0;
  bool entangled = false;
};

struct SweepRow {
  double t = 1.0;
  double discord = 0.0;
  double mutual_info = 0.0;
  double classical_corr = 0.0;
  double s_a = 0.0;
  std::optional<double> e_f_ae;
  std::optional<double> residual;
  std::string branch;
};

struct InterferenceResult {
  ScenarioState state;
  double bs_t_be = 1.0;
  DuanReport duan;
};

struct DemodulationResult {
  ScenarioState state;
  DuanReport duan;
};

struct OptimalityNote {
  std::optional<OptimalityCertificate> certificate;
  std::string reason;
};

/// Input mode split on a beamsplitter of transmittance bs_t toward A.
/// Modes A, B; pure quantum part plus x_bar (and p-noise) loadings.
ScenarioState build_split_state(const InputSpec& spec, double bs_t);

/// Loss on `mode`; the environment ancilla is kept as a new mode.
ScenarioState attenuate_mode(const ScenarioState& state, std::string_view mode, double t,
                             std::string env_name = "V");

/// Pure CM over `modes` of the effective state followed by purifying modes.
CovMatrix purify_effective(const ScenarioState& state, std::span<const std::string> modes);

std::vector<SweepRow> attenuation_sweep(const ScenarioState& state, std::span<const double> t_grid,
                                        double cmr_a, bool with_eof = false,
                                        const GEoFOptions& geof_options = {});

/// Koashi-Winter flow for measurement on B' with the purified environment
/// E' = (E, loss ancilla).
std::vector<KWFlowPoint> correlation_flow(const ScenarioState& state,
                                          std::span<const double> t_grid,
                                          const GEoFOptions& geof_options = {});

DuanReport duan_value(const CovMatrix& two_mode, double g, int sign);
/// Minimizes over g > 0 and both sign pairs.
DuanReport duan_optimize(const CovMatrix& two_mode);

/// x_B <- x_B - (g l_xA + l_xB) x_bar, cancelling x_bar in g x_A + x_B.
ScenarioState recover_demodulate(const ScenarioState& state, double g);
/// Demodulation with the gain that minimizes the resulting Duan value.
DemodulationResult recover_demodulate_optimized(const ScenarioState& state);

/// Appends a vacuum mode carrying -x_bar on x and mixes it with B. Without a
/// transmittance the optimized Duan value picks it.
InterferenceResult recover_interfere(const ScenarioState& state,
                                     std::optional<double> bs_t_be = std::nullopt);

/// Duan product for squeezing r, amplitude transmittance T and gain g after
/// ideal demodulation.
double recovery_closed_form(double r, double amplitude_t, double g);

/// Optimality certificate for split modulated squeezed inputs.
OptimalityNote optimality_note(const ScenarioState& state);

}  // namespace gausscorr
