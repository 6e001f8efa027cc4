#include "gausscorr/io.hpp"

#include "gausscorr/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace gausscorr::io {

using nlohmann::json;

namespace {

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("malformed JSON: ") + e.what());
  }
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw InvalidInput(where + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw InvalidInput("unknown key '" + key + "' in " + where);
  }
}

double number(const json& obj, const std::string& key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number()) throw InvalidInput("'" + key + "' must be a number");
  return obj.at(key).get<double>();
}

std::vector<double> number_list(const json& v, const std::string& key) {
  if (!v.is_array()) throw InvalidInput("'" + key + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw InvalidInput("'" + key + "' must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

Matrix matrix_from(const json& rows, const std::string& key) {
  if (!rows.is_array() || rows.empty()) throw InvalidInput("'" + key + "' must be a non-empty array");
  const auto d = static_cast<Eigen::Index>(rows.size());
  Matrix m(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const auto row = number_list(rows[static_cast<std::size_t>(i)], key);
    if (static_cast<Eigen::Index>(row.size()) != d) throw InvalidInput("'" + key + "' must be square");
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = row[static_cast<std::size_t>(j)];
  }
  return m;
}

int mode_from(const json& v) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "A") return 0;
    if (s == "B") return 1;
  } else if (v.is_number_integer()) {
    const int m = v.get<int>();
    if (m == 0 || m == 1) return m;
  }
  throw InvalidInput("'measured_mode' must be \"A\" or \"B\"");
}

}  // namespace

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Matrix parse_matrix(const std::string& text, const std::string& key) {
  const json doc = parse_json(text);
  if (doc.is_array()) return matrix_from(doc, key);
  if (!doc.is_object() || !doc.contains(key)) throw InvalidInput("missing '" + key + "'");
  return matrix_from(doc.at(key), key);
}

CovMatrix parse_cm(const std::string& text, const CMReadOptions& options) {
  const json doc = parse_json(text);
  reject_unknown(doc, {"n_modes", "gamma", "errors", "comment"}, "CM file");
  if (!doc.contains("n_modes") || !doc.at("n_modes").is_number_integer()) {
    throw InvalidInput("'n_modes' must be an integer");
  }
  if (!doc.contains("gamma")) throw InvalidInput("missing 'gamma'");
  const int n = doc.at("n_modes").get<int>();
  const Matrix g = matrix_from(doc.at("gamma"), "gamma");
  if (n < 1 || g.rows() != 2 * n) throw InvalidInput("'gamma' must be 2*n_modes square");
  CovMatrix cm(g);
  if (!options.skip_physicality) validate_physical(cm);
  return cm;
}

CovMatrix read_cm(const std::filesystem::path& path, const CMReadOptions& options) {
  return parse_cm(read_text(path), options);
}

std::string format_cm(const CovMatrix& cm) {
  json doc;
  doc["n_modes"] = cm.n_modes();
  json rows = json::array();
  for (int i = 0; i < cm.dim(); ++i) {
    json row = json::array();
    for (int j = 0; j < cm.dim(); ++j) row.push_back(cm(i, j));
    rows.push_back(row);
  }
  doc["gamma"] = rows;
  return doc.dump(2);
}

void write_cm(const CovMatrix& cm, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path.string());
  out << format_cm(cm) << '\n';
}

RecoveryMode parse_recovery_mode(const std::string& name) {
  if (name == "demodulate") return RecoveryMode::Demodulate;
  if (name == "interfere") return RecoveryMode::Interfere;
  throw InvalidInput("recovery mode must be 'demodulate' or 'interfere', got '" + name + "'");
}

std::string to_string(RecoveryMode mode) {
  return mode == RecoveryMode::Demodulate ? "demodulate" : "interfere";
}

ScenarioConfig parse_config(const std::string& text) {
  const json doc = parse_json(text);
  reject_unknown(doc,
                 {"input", "bs_t", "attenuation_grid", "cmr_a", "flow", "recovery", "gain",
                  "discrete_modulation", "measured_mode", "comment"},
                 "scenario config");
  ScenarioConfig cfg;

  if (!doc.contains("input")) throw InvalidInput("scenario config needs 'input'");
  const json& in = doc.at("input");
  reject_unknown(in, {"kind", "squeezing_db", "vx", "vp"}, "input");
  const std::string kind = in.value("kind", std::string("squeezed"));
  if (kind == "coherent") {
    cfg.input.kind = InputKind::Coherent;
  } else if (kind == "squeezed") {
    cfg.input.kind = InputKind::Squeezed;
  } else {
    throw InvalidInput("input kind must be 'coherent' or 'squeezed'");
  }
  cfg.input.squeezing_db = number(in, "squeezing_db", 0.0);
  cfg.input.v_x = number(in, "vx", 1.0);
  cfg.input.v_p = number(in, "vp", 1.0);
  cfg.input.validate();

  cfg.bs_t = number(doc, "bs_t", 0.5);
  if (!(cfg.bs_t >= 0.0 && cfg.bs_t <= 1.0)) throw InvalidInput("'bs_t' must lie in [0, 1]");
  if (doc.contains("attenuation_grid")) {
    cfg.attenuation_grid = number_list(doc.at("attenuation_grid"), "attenuation_grid");
    for (double t : cfg.attenuation_grid) {
      if (!(t >= 0.0 && t <= 1.0)) throw InvalidInput("attenuation grid values must lie in [0, 1]");
    }
  }
  cfg.cmr_a = number(doc, "cmr_a", 0.0);
  if (cfg.cmr_a < 0.0) throw InvalidInput("'cmr_a' must be non-negative");
  if (doc.contains("flow")) {
    if (!doc.at("flow").is_boolean()) throw InvalidInput("'flow' must be a boolean");
    cfg.flow = doc.at("flow").get<bool>();
  }
  if (doc.contains("recovery")) {
    const json& rec = doc.at("recovery");
    reject_unknown(rec, {"mode", "bs_t_be"}, "recovery");
    if (rec.contains("mode")) {
      if (!rec.at("mode").is_string()) throw InvalidInput("recovery 'mode' must be a string");
      cfg.recovery = parse_recovery_mode(rec.at("mode").get<std::string>());
    }
    if (rec.contains("bs_t_be")) {
      const double t = number(rec, "bs_t_be", 1.0);
      if (!(t >= 0.0 && t <= 1.0)) throw InvalidInput("'bs_t_be' must lie in [0, 1]");
      cfg.bs_t_be = t;
    }
  }
  if (doc.contains("gain")) {
    const json& g = doc.at("gain");
    if (g.is_string()) {
      if (g.get<std::string>() != "optimize") throw InvalidInput("'gain' must be a number or \"optimize\"");
    } else {
      const double v = number(doc, "gain", 1.0);
      if (!(v > 0.0)) throw InvalidInput("'gain' must be positive");
      cfg.gain = v;
    }
  }
  if (doc.contains("discrete_modulation")) {
    const json& dm = doc.at("discrete_modulation");
    reject_unknown(dm, {"amplitudes", "weights"}, "discrete_modulation");
    DiscreteModulation d;
    d.amplitudes = number_list(dm.value("amplitudes", json::array()), "amplitudes");
    d.weights = number_list(dm.value("weights", json::array()), "weights");
    cfg.discrete = std::move(d);
  }
  if (doc.contains("measured_mode")) cfg.measured_mode = mode_from(doc.at("measured_mode"));
  return cfg;
}

ScenarioConfig read_config(const std::filesystem::path& path) {
  return parse_config(read_text(path));
}

ScenarioState ScenarioConfig::build_state() const {
  ScenarioState state = build_split_state(input, bs_t);
  if (!discrete) return state;
  std::vector<NoiseLoading> loadings = state.noise_loadings();
  auto it = std::find_if(loadings.begin(), loadings.end(),
                         [](const NoiseLoading& l) { return l.source_id == kDisplacementSource; });
  if (it == loadings.end()) throw InvalidInput("discrete modulation needs an x displacement source");
  // the quantum part is fixed by the input squeezing, so V_x follows the ensemble
  it->set_discrete(discrete->amplitudes, discrete->weights);
  ScenarioState out(state.modes(), state.quantum_cm(), std::move(loadings), state.mean());
  out.input = state.input;
  out.split_t = state.split_t;
  return out;
}

}  // namespace gausscorr::io
