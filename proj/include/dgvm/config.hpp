// Run configuration: benchmark selection and parameters, with a flat
// key = value file format. CLI flags override file values.
#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "dgvm/integrator.hpp"

namespace dgvm {

enum class BenchmarkCase { landau, two_stream, weibel };

inline std::string to_string(BenchmarkCase c) {
  switch (c) {
    case BenchmarkCase::landau:
      return "landau";
    case BenchmarkCase::two_stream:
      return "two_stream";
    case BenchmarkCase::weibel:
      return "weibel";
  }
  return "?";
}

inline BenchmarkCase benchmark_case_from(const std::string& s) {
  if (s == "landau") return BenchmarkCase::landau;
  if (s == "two_stream") return BenchmarkCase::two_stream;
  if (s == "weibel") return BenchmarkCase::weibel;
  throw std::invalid_argument("unknown case: " + s);
}

/// Per-case physical constants. Defaults are the standard benchmark values;
/// a config file may override any of them.
struct BenchmarkParams {
  double amplitude = 0.5;   // perturbation amplitude A (landau/two_stream)
  double wavenumber = 0.5;  // k (landau/two_stream) or kappa0 (weibel)
  double length = 4.0 * M_PI;
  double v_cut = 6.0 * M_PI;
  // weibel only
  double beta = 0.01;
  double b = 0.001;
  double delta = 0.5;
  double omega1 = 0.3;
  double omega2 = 0.3;
};

inline BenchmarkParams default_params(BenchmarkCase c) {
  BenchmarkParams p;
  switch (c) {
    case BenchmarkCase::landau:
      p.amplitude = 0.5;
      break;
    case BenchmarkCase::two_stream:
      p.amplitude = 0.05;
      break;
    case BenchmarkCase::weibel:
      p.wavenumber = 0.2;  // kappa0; domain length L_y = 2 pi / kappa0
      p.length = 2.0 * M_PI / 0.2;
      p.v_cut = 1.8;
      break;
  }
  return p;
}

struct RunConfig {
  BenchmarkCase bench = BenchmarkCase::landau;
  int nx = 32;
  int nv = 32;  // cells per velocity axis
  int degree = 1;
  double cfl = 0.0;  // 0 -> per-degree default
  double t_final = 1.0;
  bool filter = true;
  DtMode dt_mode = DtMode::frozen;
  double dt_exponent = 0.0;  // 0 -> by-degree rule
  std::string out_dir = ".";
  long snapshot_every = 0;  // steps between snapshots; 0 disables
  BenchmarkParams params = default_params(BenchmarkCase::landau);

  SystemKind kind() const {
    return bench == BenchmarkCase::weibel ? SystemKind::StreamingWeibel1D2V
                                          : SystemKind::VlasovAmpere1D1V;
  }

  double effective_cfl() const {
    return cfl > 0.0 ? cfl : default_cfl(degree, kind());
  }

  TimeControls controls() const {
    TimeControls c;
    c.cfl = effective_cfl();
    c.t_final = t_final;
    c.dt_mode = dt_mode;
    c.dt_exponent_override = dt_exponent;
    return c;
  }
};

inline std::map<std::string, std::string> parse_key_values(std::istream& is) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

inline void apply_config(const std::map<std::string, std::string>& kv,
                         RunConfig& cfg) {
  const auto get_d = [](const std::string& v) {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("bad number: " + v);
    return d;
  };
  const auto get_b = [](const std::string& v) {
    if (v == "true" || v == "1" || v == "on") return true;
    if (v == "false" || v == "0" || v == "off") return false;
    throw std::invalid_argument("bad flag: " + v);
  };
  bool params_reset = false;
  if (auto it = kv.find("case"); it != kv.end()) {
    cfg.bench = benchmark_case_from(it->second);
    cfg.params = default_params(cfg.bench);
    params_reset = true;
  }
  (void)params_reset;
  for (const auto& [key, val] : kv) {
    if (key == "case") continue;
    if (key == "nx") cfg.nx = static_cast<int>(get_d(val));
    else if (key == "nv") cfg.nv = static_cast<int>(get_d(val));
    else if (key == "degree") cfg.degree = static_cast<int>(get_d(val));
    else if (key == "cfl") cfg.cfl = get_d(val);
    else if (key == "tfinal") cfg.t_final = get_d(val);
    else if (key == "filter") cfg.filter = get_b(val);
    else if (key == "dt_mode") {
      if (val == "adaptive") cfg.dt_mode = DtMode::adaptive;
      else if (val == "frozen") cfg.dt_mode = DtMode::frozen;
      else throw std::invalid_argument("dt_mode must be adaptive or frozen");
    } else if (key == "dt_exponent") cfg.dt_exponent = get_d(val);
    else if (key == "out") cfg.out_dir = val;
    else if (key == "snapshot_every")
      cfg.snapshot_every = static_cast<long>(get_d(val));
    else if (key == "amplitude") cfg.params.amplitude = get_d(val);
    else if (key == "wavenumber") cfg.params.wavenumber = get_d(val);
    else if (key == "length") cfg.params.length = get_d(val);
    else if (key == "vcut") cfg.params.v_cut = get_d(val);
    else if (key == "beta") cfg.params.beta = get_d(val);
    else if (key == "b") cfg.params.b = get_d(val);
    else if (key == "delta") cfg.params.delta = get_d(val);
    else if (key == "omega1") cfg.params.omega1 = get_d(val);
    else if (key == "omega2") cfg.params.omega2 = get_d(val);
    else throw std::invalid_argument("unknown config key: " + key);
  }
  if (cfg.nx < 1 || cfg.nv < 1)
    throw std::invalid_argument("mesh counts must be positive");
  if (cfg.degree < 1 || cfg.degree > 3)
    throw std::invalid_argument("degree must be 1, 2 or 3");
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot open config file " + path);
  RunConfig cfg;
  apply_config(parse_key_values(is), cfg);
  return cfg;
}

/// All effective values, in the same key = value format parse accepts.
inline std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  os << "case = " << to_string(cfg.bench) << '\n';
  os << "nx = " << cfg.nx << '\n';
  os << "nv = " << cfg.nv << '\n';
  os << "degree = " << cfg.degree << '\n';
  os << "cfl = " << cfg.cfl << '\n';
  os << "tfinal = " << cfg.t_final << '\n';
  os << "filter = " << (cfg.filter ? "true" : "false") << '\n';
  os << "dt_mode = "
     << (cfg.dt_mode == DtMode::adaptive ? "adaptive" : "frozen") << '\n';
  os << "dt_exponent = " << cfg.dt_exponent << '\n';
  os << "out = " << cfg.out_dir << '\n';
  os << "snapshot_every = " << cfg.snapshot_every << '\n';
  os << "amplitude = " << cfg.params.amplitude << '\n';
  os << "wavenumber = " << cfg.params.wavenumber << '\n';
  os << "length = " << cfg.params.length << '\n';
  os << "vcut = " << cfg.params.v_cut << '\n';
  os << "beta = " << cfg.params.beta << '\n';
  os << "b = " << cfg.params.b << '\n';
  os << "delta = " << cfg.params.delta << '\n';
  os << "omega1 = " << cfg.params.omega1 << '\n';
  os << "omega2 = " << cfg.params.omega2 << '\n';
  return os.str();
}

}  // namespace dgvm
