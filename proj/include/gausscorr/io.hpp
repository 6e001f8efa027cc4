#pragma once

// JSON readers and writers for covariance matrices and scenario configs.
//
// CM files: { "n_modes": n, "gamma": [[...], ...] } with a row-major 2n x 2n
// array in (x1, p1, x2, p2, ...) ordering and gamma units (vacuum = I).

#include "gausscorr/gaussian_core.hpp"
#include "gausscorr/scenarios.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace gausscorr::io {

struct CMReadOptions {
  /// Accept measured matrices that are symmetric but violate gamma + i Omega >= 0.
  bool skip_physicality = false;
};

CovMatrix parse_cm(const std::string& text, const CMReadOptions& options = {});
CovMatrix read_cm(const std::filesystem::path& path, const CMReadOptions& options = {});
std::string format_cm(const CovMatrix& cm);
void write_cm(const CovMatrix& cm, const std::filesystem::path& path);

/// Plain 2n x 2n array (e.g. an error matrix) with the same layout as "gamma".
Matrix parse_matrix(const std::string& text, const std::string& key = "gamma");

enum class RecoveryMode { Demodulate, Interfere };

struct DiscreteModulation {
  std::vector<double> amplitudes;
  std::vector<double> weights;
};

struct ScenarioConfig {
  InputSpec input;
  double bs_t = 0.5;
  std::vector<double> attenuation_grid;
  double cmr_a = 0.0;
  /// Adds E_F(A, E'), S(A) and the Koashi-Winter residual to sweeps.
  bool flow = false;
  RecoveryMode recovery = RecoveryMode::Demodulate;
  std::optional<double> bs_t_be;
  /// Fixed Duan / demodulation gain; optimized when absent.
  std::optional<double> gain;
  std::optional<DiscreteModulation> discrete;
  int measured_mode = 1;

  /// Split state with the configured modulation ensemble.
  ScenarioState build_state() const;
};

/// Unknown keys and out-of-range values raise InvalidInput.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig read_config(const std::filesystem::path& path);

RecoveryMode parse_recovery_mode(const std::string& name);
std::string to_string(RecoveryMode mode);

std::string read_text(const std::filesystem::path& path);

}  // namespace gausscorr::io
