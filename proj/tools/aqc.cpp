// aqc: command-line front end for the linear atomic quantum coupler.

#include <iostream>
#include <map>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "aqc/csv.hpp"
#include "aqc/limits.hpp"
#include "aqc/run_config.hpp"
#include "aqc/svg_plot.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitNumeric = 2;
constexpr int kExitLimits = 3;
constexpr double kInspectTolerance = 1e-7;

struct SettingFlag {
  const char* key;
  const char* type;
  const char* help;
};

// Config keys settable from the command line.
const std::vector<SettingFlag> kSettingFlags = {
    {"lambda1", "REAL", "Atom-field coupling in waveguide 1"},
    {"lambda2", "REAL", "Atom-field coupling in waveguide 2"},
    {"lambda3", "REAL", "Evanescent coupling between the waveguides"},
    {"alpha", "REAL", "Mode-1 field amplitude"},
    {"beta", "REAL", "Mode-2 coherent amplitude"},
    {"atoms", "ee|eg|ge|bell", "Initial atomic state"},
    {"field1", "coherent|even-coherent|vacuum", "Mode-1 field kind"},
    {"tmax", "REAL", "End of the T grid"},
    {"samples", "INT", "Number of grid points, at least 2"},
    {"tail-tol", "REAL", "Discarded photon-number probability per mode"},
    {"engine", "closed|spectral|rk", "Block propagator"},
    {"precision", "INT", "Significant digits in the CSV"},
};

struct ConfigFlags {
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  std::string config_path;
  std::string preset;
};

void add_config_flags(CLI::App* sub, ConfigFlags& flags, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) {
    const SettingFlag& f = kSettingFlags[i];
    flags.options[f.key] = sub->add_option(std::string("--") + f.key, flags.values[f.key], f.help)
                               ->type_name(f.type);
  }
}

// Defaults, then preset, then config file, then explicit flags.
aqc::RunConfig resolve_config(const ConfigFlags& flags) {
  aqc::RunConfig cfg;
  if (!flags.preset.empty()) aqc::apply_preset(cfg, flags.preset);
  if (!flags.config_path.empty()) aqc::apply_config_text(cfg, aqc::read_file(flags.config_path));
  for (const auto& [key, opt] : flags.options) {
    if (opt->count() > 0) aqc::apply_setting(cfg, key, flags.values.at(key));
  }
  return cfg;
}

unsigned default_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

std::string format_complex(aqc::complex z) {
  return "(" + aqc::format_number(z.real(), 12) + ", " + aqc::format_number(z.imag(), 12) + ")";
}

int cmd_sweep(const ConfigFlags& flags, const std::string& out, unsigned threads) {
  const aqc::RunConfig cfg = resolve_config(flags);
  const aqc::SweepResult result = aqc::run_sweep(cfg, threads);
  aqc::write_file(out, aqc::csv_text(result.samples, cfg.precision));
  aqc::write_file(out + ".manifest", aqc::manifest_text(cfg, result, threads));
  std::cout << "wrote " << result.samples.size() << " samples to " << out << " (n_max=" << result.n_max
            << ", m_max=" << result.m_max << ")\n";
  return 0;
}

int cmd_inspect(const ConfigFlags& flags, std::size_t n, std::size_t m, double t) {
  const aqc::RunConfig cfg = resolve_config(flags);
  const aqc::CouplerParams params(cfg.lambda1, cfg.lambda2, cfg.lambda3);
  const aqc::BlockIndex idx{n, m};
  const aqc::BlockConstants k = aqc::block_constants(params, idx);
  const aqc::EngineReport closed = aqc::evolve_block_closed(params, idx, t);
  const aqc::BlockCoefficients spectral = aqc::evolve_block_spectral(params, idx, t);
  const aqc::BlockCoefficients rk = aqc::integrate_block(params, idx, t);
  const aqc::EngineComparison cmp = aqc::compare_engines(params, idx, {t});

  auto num = [](double v) { return aqc::format_number(v, 12); };
  std::cout << "block n=" << n << " m=" << m << " lambda=(" << num(cfg.lambda1) << ", "
            << num(cfg.lambda2) << ", " << num(cfg.lambda3) << ") t=" << num(t) << '\n';
  std::cout << "rate1=" << num(k.rate1) << " rate2=" << num(k.rate2) << " A=" << num(k.a_nm)
            << " c1=" << num(k.c1) << " c2=" << num(k.c2) << '\n';
  std::cout << "omega_plus=" << num(k.omega_plus) << " omega_minus=" << num(k.omega_minus) << '\n';
  std::cout << "conditioning=" << num(closed.conditioning)
            << " fallback=" << (closed.used_fallback ? "true" : "false") << '\n';
  const std::pair<const char*, const aqc::BlockCoefficients*> rows[] = {
      {"closed", &closed.coefficients}, {"spectral", &spectral}, {"rk", &rk}};
  for (const auto& [name, x] : rows) {
    std::cout << name << ':';
    for (std::size_t j = 0; j < 4; ++j) std::cout << " x" << j + 1 << '=' << format_complex((*x)[j]);
    std::cout << '\n';
  }
  std::cout << "deviation closed-spectral=" << num(cmp.closed_vs_spectral)
            << " spectral-rk=" << num(cmp.spectral_vs_rk) << " closed-rk=" << num(cmp.closed_vs_rk)
            << '\n';
  const bool ok = cmp.max_deviation < kInspectTolerance;
  std::cout << (ok ? "engines agree" : "engines disagree") << " (max deviation " << num(cmp.max_deviation)
            << ", tolerance " << num(kInspectTolerance) << ")\n";
  return ok ? 0 : kExitNumeric;
}

int cmd_limits() {
  bool all = true;
  for (const auto& c : aqc::run_limit_suite()) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.summary << '\n';
    all = all && c.passed;
  }
  return all ? 0 : kExitLimits;
}

int cmd_plot(const std::string& csv_path, const std::vector<std::string>& columns,
             const std::string& out) {
  const aqc::CsvTable table = aqc::parse_csv(aqc::read_file(csv_path));
  aqc::write_file(out, aqc::render_svg(table, columns));
  std::cout << "wrote " << out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear atomic quantum coupler simulator"};
  app.set_version_flag("--version", std::string(aqc::kVersion));
  app.require_subcommand(1);

  ConfigFlags sweep_flags;
  std::string sweep_out;
  unsigned threads = default_threads();
  CLI::App* sweep = app.add_subcommand("sweep", "Sample observables on a uniform T grid");
  add_config_flags(sweep, sweep_flags, kSettingFlags.size());
  sweep->add_option("--config", sweep_flags.config_path, "key = value config file");
  sweep->add_option("--preset", sweep_flags.preset, "fig2a|fig2b|fig2c|fig2d|fig3a|fig3b|fig3c|fig3d");
  sweep->add_option("--out", sweep_out, "CSV output path; the manifest goes to <out>.manifest")->required();
  sweep->add_option("--threads", threads, "Worker threads")->envname("AQC_THREADS")->check(CLI::PositiveNumber);

  ConfigFlags inspect_flags;
  std::size_t block_n = 0, block_m = 0;
  double block_t = 0.0;
  CLI::App* inspect = app.add_subcommand("inspect-block", "Compare the three engines on one block");
  add_config_flags(inspect, inspect_flags, 3);  // the couplings only
  inspect->add_option("--config", inspect_flags.config_path, "key = value config file");
  inspect->add_option("--preset", inspect_flags.preset, "Preset supplying the couplings");
  inspect->add_option("--n", block_n, "Mode-1 photon number")->required();
  inspect->add_option("--m", block_m, "Mode-2 photon number")->required();
  inspect->add_option("--t", block_t, "Physical time")->required();

  CLI::App* limits = app.add_subcommand("limits", "Run the built-in limiting-case suite");

  std::string plot_csv, plot_out;
  std::vector<std::string> plot_columns;
  CLI::App* plot = app.add_subcommand("plot", "Render CSV columns as an SVG line chart");
  plot->add_option("--csv", plot_csv, "Sweep CSV")->required();
  plot->add_option("--columns", plot_columns, "Comma-separated column names")->required()->delimiter(',');
  plot->add_option("--out", plot_out, "SVG output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  }

  try {
    if (*sweep) return cmd_sweep(sweep_flags, sweep_out, threads);
    if (*inspect) return cmd_inspect(inspect_flags, block_n, block_m, block_t);
    if (*limits) return cmd_limits();
    if (*plot) return cmd_plot(plot_csv, plot_columns, plot_out);
  } catch (const aqc::NumericError& e) {
    std::cerr << "aqc: numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const aqc::TruncationOverflow& e) {
    std::cerr << "aqc: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const aqc::Error& e) {
    std::cerr << "aqc: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
