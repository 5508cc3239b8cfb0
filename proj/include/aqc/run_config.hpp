#pragma once

// Sweep configuration shared by the command-line front end: `key = value`
// config files, figure presets, manifests, and the sweep driver itself.

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "aqc/core.hpp"
#include "aqc/observables.hpp"

namespace aqc {

inline constexpr std::string_view kVersion = "0.1.0";

struct RunConfig {
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double lambda3 = 0.0;
  double alpha = 5.0;
  double beta = 5.0;
  AtomicPreparation atoms = AtomicPreparation::excited_excited;
  FieldKind field1 = FieldKind::coherent;
  double tmax = 50.0;  // in units of the dimensionless time T
  std::size_t samples = 2001;
  double tail_tol = kDefaultTailTol;
  Engine engine = Engine::spectral;
  int precision = 12;
};

// Shortest decimal that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline double parse_real(std::string_view key, std::string_view text) {
  text = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw InvalidArgument("invalid value for " + std::string(key) + ": '" + std::string(text) + "'");
  }
  return v;
}

inline long long parse_integer(std::string_view key, std::string_view text) {
  text = trim(text);
  long long v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw InvalidArgument("invalid value for " + std::string(key) + ": '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace detail

inline AtomicPreparation parse_atoms(std::string_view text) {
  text = detail::trim(text);
  if (text == "ee") return AtomicPreparation::excited_excited;
  if (text == "eg") return AtomicPreparation::excited_ground;
  if (text == "ge") return AtomicPreparation::ground_excited;
  if (text == "bell") return AtomicPreparation::bell_plus;
  throw InvalidArgument("invalid value for atoms: '" + std::string(text) + "' (expected ee|eg|ge|bell)");
}

inline FieldKind parse_field_kind(std::string_view text) {
  text = detail::trim(text);
  if (text == "coherent") return FieldKind::coherent;
  if (text == "even-coherent") return FieldKind::even_coherent;
  if (text == "vacuum") return FieldKind::vacuum;
  throw InvalidArgument("invalid value for field1: '" + std::string(text) +
                        "' (expected coherent|even-coherent|vacuum)");
}

inline Engine parse_engine(std::string_view text) {
  text = detail::trim(text);
  if (text == "closed") return Engine::closed;
  if (text == "spectral") return Engine::spectral;
  if (text == "rk") return Engine::rk;
  throw InvalidArgument("invalid value for engine: '" + std::string(text) + "' (expected closed|spectral|rk)");
}

// Keys written to manifests that carry no configuration.
inline bool is_manifest_only_key(std::string_view key) {
  return key == "version" || key == "duration_seconds" || key == "n_max" || key == "m_max" ||
         key == "time_convention" || key == "time_scale" || key == "threads";
}

inline void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value) {
  if (key == "lambda1") cfg.lambda1 = detail::parse_real(key, value);
  else if (key == "lambda2") cfg.lambda2 = detail::parse_real(key, value);
  else if (key == "lambda3") cfg.lambda3 = detail::parse_real(key, value);
  else if (key == "alpha") cfg.alpha = detail::parse_real(key, value);
  else if (key == "beta") cfg.beta = detail::parse_real(key, value);
  else if (key == "atoms") cfg.atoms = parse_atoms(value);
  else if (key == "field1") cfg.field1 = parse_field_kind(value);
  else if (key == "tmax") cfg.tmax = detail::parse_real(key, value);
  else if (key == "samples") {
    const long long s = detail::parse_integer(key, value);
    if (s < 0) throw InvalidArgument("invalid value for samples: must be at least 2");
    cfg.samples = static_cast<std::size_t>(s);
  } else if (key == "tail-tol") cfg.tail_tol = detail::parse_real(key, value);
  else if (key == "engine") cfg.engine = parse_engine(value);
  else if (key == "precision") cfg.precision = static_cast<int>(detail::parse_integer(key, value));
  else if (!is_manifest_only_key(key)) {
    throw InvalidArgument("unknown config key '" + std::string(key) + "'");
  }
}

// `key = value` lines; blank lines and `#` comments are skipped.
inline std::vector<std::pair<std::string, std::string>> parse_key_values(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end == std::string_view::npos ? text.npos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw InvalidArgument("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    out.emplace_back(std::string(detail::trim(line.substr(0, eq))),
                     std::string(detail::trim(line.substr(eq + 1))));
  }
  return out;
}

inline void apply_config_text(RunConfig& cfg, std::string_view text) {
  for (const auto& [k, v] : parse_key_values(text)) apply_setting(cfg, k, v);
}

// Built-in presets. Their time axis is T = lambda1 t with lambda1 = 1.
inline void apply_preset(RunConfig& cfg, std::string_view name) {
  struct Preset {
    std::string_view name;
    double lambda2, lambda3;
  };
  static constexpr Preset presets[] = {
      {"fig2a", 1.0, 0.0}, {"fig2b", 1.0, 0.6}, {"fig2c", 2.0, 3.0}, {"fig2d", 1.0, 1.0},
      {"fig3a", 1.0, 0.0}, {"fig3b", 1.0, 0.6}, {"fig3c", 2.0, 3.0}, {"fig3d", 2.0, 3.0},
  };
  for (const auto& p : presets) {
    if (p.name != name) continue;
    cfg.lambda1 = 1.0;
    cfg.lambda2 = p.lambda2;
    cfg.lambda3 = p.lambda3;
    cfg.alpha = 5.0;
    cfg.beta = 5.0;
    cfg.atoms = AtomicPreparation::excited_excited;
    cfg.field1 = FieldKind::coherent;
    cfg.tmax = 50.0;
    cfg.samples = 2001;
    return;
  }
  throw InvalidArgument("unknown preset '" + std::string(name) + "'");
}

inline void validate(const RunConfig& cfg) {
  if (cfg.samples < 2) throw InvalidArgument("invalid value for samples: must be at least 2");
  if (!(cfg.tmax > 0.0) || !std::isfinite(cfg.tmax)) {
    throw InvalidArgument("invalid value for tmax: must be positive");
  }
  if (!(cfg.tail_tol > 0.0 && cfg.tail_tol < 1.0)) {
    throw InvalidArgument("invalid value for tail-tol: must lie in (0, 1)");
  }
  if (cfg.precision < 1 || cfg.precision > 17) {
    throw InvalidArgument("invalid value for precision: must lie in [1, 17]");
  }
  if (!std::isfinite(cfg.alpha)) throw InvalidArgument("invalid value for alpha");
  if (!std::isfinite(cfg.beta)) throw InvalidArgument("invalid value for beta");
  const CouplerParams params(cfg.lambda1, cfg.lambda2, cfg.lambda3);
  require_supported(cfg.atoms, params);
}

inline std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& cfg) {
  return {
      {"lambda1", format_double(cfg.lambda1)},
      {"lambda2", format_double(cfg.lambda2)},
      {"lambda3", format_double(cfg.lambda3)},
      {"alpha", format_double(cfg.alpha)},
      {"beta", format_double(cfg.beta)},
      {"atoms", std::string(to_string(cfg.atoms))},
      {"field1", std::string(to_string(cfg.field1))},
      {"tmax", format_double(cfg.tmax)},
      {"samples", std::to_string(cfg.samples)},
      {"tail-tol", format_double(cfg.tail_tol)},
      {"engine", std::string(to_string(cfg.engine))},
      {"precision", std::to_string(cfg.precision)},
  };
}

inline FieldPreparation build_field(const RunConfig& cfg) {
  FieldPreparation f;
  switch (cfg.field1) {
    case FieldKind::coherent: f.mode1 = coherent_field(cfg.alpha, cfg.tail_tol); break;
    case FieldKind::even_coherent: f.mode1 = even_coherent_field(cfg.alpha, cfg.tail_tol); break;
    default: f.mode1 = vacuum_field(); break;
  }
  f.mode2 = coherent_field(cfg.beta, cfg.tail_tol);
  return f;
}

struct SweepResult {
  std::vector<ObservableSample> samples;
  std::size_t n_max = 0;
  std::size_t m_max = 0;
  TimeConvention convention;
  double duration_seconds = 0.0;
};

inline SweepResult run_sweep(const RunConfig& cfg, unsigned threads) {
  validate(cfg);
  const auto start = std::chrono::steady_clock::now();
  const CouplerParams params(cfg.lambda1, cfg.lambda2, cfg.lambda3);
  const FieldPreparation field = build_field(cfg);
  SweepResult r;
  r.n_max = field.mode1.n_max();
  r.m_max = field.mode2.n_max();
  r.convention = time_convention(params);

  std::vector<double> grid(cfg.samples), times(cfg.samples);
  for (std::size_t i = 0; i < cfg.samples; ++i) {
    grid[i] = cfg.tmax * static_cast<double>(i) / static_cast<double>(cfg.samples - 1);
    times[i] = grid[i] / r.convention.scale;
  }
  SweepOptions opt;
  opt.engine = cfg.engine;
  opt.threads = std::max(1u, threads);
  r.samples = sweep_observables(field, cfg.atoms, params, times, opt);
  for (std::size_t i = 0; i < cfg.samples; ++i) r.samples[i].t_dimensionless = grid[i];
  r.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

inline std::string manifest_text(const RunConfig& cfg, const SweepResult& r, unsigned threads) {
  std::ostringstream os;
  os << "# aqc sweep manifest\n";
  for (const auto& [k, v] : config_entries(cfg)) os << k << " = " << v << '\n';
  os << "version = " << kVersion << '\n';
  os << "n_max = " << r.n_max << '\n';
  os << "m_max = " << r.m_max << '\n';
  os << "time_convention = T = " << r.convention.name << " * t\n";
  os << "time_scale = " << format_double(r.convention.scale) << '\n';
  os << "threads = " << threads << '\n';
  os << "duration_seconds = " << format_double(r.duration_seconds) << '\n';
  return os.str();
}

}  // namespace aqc
