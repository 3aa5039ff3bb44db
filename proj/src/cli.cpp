#include "lzchain/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <unistd.h>

#include "lzchain/chain_spectrum.hpp"
#include "lzchain/errors.hpp"
#include "lzchain/lz_core.hpp"
#include "lzchain/oracle.hpp"
#include "lzchain/sweep.hpp"

namespace lzchain::cli {

namespace {

// Physics failure reported with exit code 3.
class ToleranceFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TableWriter {
 public:
  TableWriter(const RunConfig& config)
      : delimiter_(config.format == "csv" ? ',' : '\t'), precision_(config.precision) {}

  void comment(const std::string& text) { buffer_ << "# " << text << '\n'; }

  void header(const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (i > 0) buffer_ << delimiter_;
      buffer_ << names[i];
    }
    buffer_ << '\n';
  }

  void row(const std::vector<std::string>& cells) { header(cells); }

  std::string number(double value) const {
    char text[64];
    std::snprintf(text, sizeof text, "%.*g", precision_, value);
    return text;
  }

  std::string str() const { return buffer_.str(); }

 private:
  char delimiter_;
  int precision_;
  std::ostringstream buffer_;
};

// Shortest of %.15g..%.17g that reads back to the same double.
std::string fmt(double value) {
  char text[64];
  for (int digits = 15; digits <= 17; ++digits) {
    std::snprintf(text, sizeof text, "%.*g", digits, value);
    if (std::strtod(text, nullptr) == value) break;
  }
  return text;
}

std::string quoted(const std::string& text) { return "\"" + text + "\""; }

void emit(const RunConfig& config, const std::string& text, std::ostream& out) {
  if (config.out.empty()) {
    out << text;
    return;
  }
  namespace fs = std::filesystem;
  const fs::path target(config.out);
  fs::path temp = target;
  temp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream file(temp, std::ios::binary | std::ios::trunc);
    if (!file) throw ValidationError("out", "cannot open '" + temp.string() + "' for writing");
    file << text;
    file.flush();
    if (!file) throw ValidationError("out", "failed writing '" + temp.string() + "'");
  }
  fs::rename(temp, target);
}

ChainSpec chain_from(const RunConfig& config) {
  ChainSpec spec;
  spec.kind = config.kind == "xy" ? ChainKind::XY : ChainKind::Ising;
  spec.n = config.n;
  spec.j = config.j;
  spec.lambda = config.lambda;
  spec.gamma = config.gamma;
  spec.validate();
  return spec;
}

LZParams params_from(const RunConfig& config) {
  LZParams params{config.delta, config.v, config.g, config.hbar};
  params.validate();
  return params;
}

GaplessPolicy policy_from(const RunConfig& config) {
  return config.strict_gapless ? GaplessPolicy::Strict : GaplessPolicy::Limit;
}

void parameter_comments(TableWriter& table, const RunConfig& config) {
  table.comment("version=" + std::string(kVersion));
  table.comment("kind=" + config.kind + " N=" + std::to_string(config.n) + " J=" + fmt(config.j) +
                " lambda=" + fmt(config.lambda) + " gamma=" + fmt(config.gamma));
  table.comment("delta=" + fmt(config.delta) + " v=" + fmt(config.v) + " g=" + fmt(config.g) +
                " hbar=" + fmt(config.hbar));
  table.comment("units: energies in J, v in J^2/hbar");
}

int cmd_spectrum(const RunConfig& config, std::ostream& out) {
  const Spectrum spec = spectrum(chain_from(config), policy_from(config));
  const GroundMoments gm = ground_moments(spec);
  TableWriter table(config);
  table.comment("lzchain spectrum");
  parameter_comments(table, config);
  table.header({"k", "momentum", "eps", "xi", "cos_theta", "sin_theta"});
  for (const Mode& mode : spec.modes) {
    table.row({std::to_string(mode.k), table.number(mode.momentum), table.number(mode.eps),
               table.number(mode.xi), table.number(mode.cos_theta), table.number(mode.sin_theta)});
  }
  table.comment("summary m=" + table.number(gm.m) + " s2=" + table.number(gm.s2));
  emit(config, table.str(), out);
  return kExitOk;
}

int cmd_prob(const RunConfig& config, std::ostream& out) {
  const LZResult result =
      chain_driven_probability(chain_from(config), params_from(config), policy_from(config));
  TableWriter table(config);
  table.comment("lzchain prob");
  parameter_comments(table, config);
  table.header({"gamma2", "p_flip", "p_survive"});
  table.row({table.number(result.gamma2), table.number(result.p_flip),
             table.number(result.p_survive)});
  emit(config, table.str(), out);
  return kExitOk;
}

int cmd_sweep(const RunConfig& config, std::ostream& out) {
  if (config.grids.empty()) throw ValidationError("grid", "sweep needs --grid or --preset");
  if (config.grids.size() > 2) throw ValidationError("grid", "at most two --grid axes");
  GridSpec grid;
  grid.axis1 = parse_axis(config.grids[0]);
  if (config.grids.size() == 2) grid.axis2 = parse_axis(config.grids[1]);
  grid.chain = chain_from(config);
  grid.params = params_from(config);
  grid.policy = policy_from(config);
  const SweepTable result = run_sweep(grid);

  std::vector<std::string> columns = available_columns(result);
  TableWriter table(config);
  table.comment("lzchain sweep");
  if (!config.preset.empty()) {
    const FigurePreset preset = figure_preset(config.preset);
    columns = preset.columns;
    table.comment("preset=" + preset.name + ": " + preset.description);
    table.comment("N=201 (odd) is used in place of N=200");
  }
  parameter_comments(table, config);
  for (const std::string& axis : config.grids) table.comment("grid=" + axis);
  table.header(columns);
  for (const SweepRow& row : result.rows) {
    std::vector<std::string> cells;
    cells.reserve(columns.size());
    for (const std::string& column : columns) {
      const auto value = column_value(result, row, column);
      if (!value) throw ValidationError("preset", "column '" + column + "' unavailable");
      cells.push_back(table.number(*value));
    }
    table.row(cells);
  }
  emit(config, table.str(), out);
  return kExitOk;
}

oracle::OracleConfig oracle_config_from(const RunConfig& config) {
  oracle::OracleConfig oc;
  oc.t_span = config.t_span;
  oc.validate();
  return oc;
}

void warn_short_window(const oracle::OracleResult& r, const RunConfig& config, std::ostream& err) {
  if (r.short_window) {
    err << "warning: v T = " << fmt(config.v * config.t_span)
        << " is below 20 max(delta, max xi_k); the sweep window may be too short to reach the "
           "asymptotic regime\n";
  }
}

int cmd_oracle(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const ChainSpec chain = chain_from(config);
  const LZParams params = params_from(config);
  const oracle::ConvergenceReport report =
      oracle::check_convergence(chain, params, oracle_config_from(config));
  const oracle::OracleResult& r = report.primary;
  warn_short_window(r, config, err);
  TableWriter table(config);
  table.comment("lzchain oracle");
  parameter_comments(table, config);
  table.comment("t_span=" + fmt(config.t_span));
  table.header({"p_flip", "p_survive", "norm_drift", "t_span", "converged", "p_flip_extended",
                "survivor_ground_overlap", "sector_dim", "steps"});
  table.row({table.number(r.p_flip), table.number(r.p_survive), table.number(r.norm_drift),
             table.number(r.t_span_used), r.converged ? "true" : "false",
             table.number(report.p_long), table.number(r.survivor_ground_overlap),
             std::to_string(r.sector_dim), std::to_string(r.steps)});
  emit(config, table.str(), out);
  if (!report.converged) {
    throw ToleranceFailure("oracle did not converge: p_flip " + fmt(report.p_short) + " at T=" +
                           fmt(report.t_short) + " vs " + fmt(report.p_long) + " at T=" +
                           fmt(report.t_long));
  }
  return kExitOk;
}

int cmd_compare(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const ChainSpec chain = chain_from(config);
  const LZParams params = params_from(config);
  if (!(config.tolerance >= 0.0)) throw ValidationError("tolerance", "tolerance must be >= 0");
  const double p_formula = chain_driven_probability(chain, params, policy_from(config)).p_flip;
  const oracle::ConvergenceReport report =
      oracle::check_convergence(chain, params, oracle_config_from(config));
  const double p_dense =
      lz_probability(oracle::ground_state_gamma_squared(chain, params), params).p_flip;
  const double diff = std::abs(report.primary.p_flip - p_formula);
  warn_short_window(report.primary, config, err);

  TableWriter table(config);
  table.comment("lzchain compare");
  parameter_comments(table, config);
  table.comment("t_span=" + fmt(config.t_span) + " tolerance=" + fmt(config.tolerance));
  table.header({"p_formula", "p_oracle", "abs_diff", "norm_drift", "converged",
                "p_oracle_extended", "p_dense_moments"});
  table.row({table.number(p_formula), table.number(report.primary.p_flip), table.number(diff),
             table.number(report.primary.norm_drift), report.converged ? "true" : "false",
             table.number(report.p_long), table.number(p_dense)});
  emit(config, table.str(), out);
  if (!report.converged) {
    throw ToleranceFailure("not converged: p_flip " + fmt(report.p_short) + " at T=" +
                           fmt(report.t_short) + " vs " + fmt(report.p_long) + " at T=" +
                           fmt(report.t_long));
  }
  if (diff > config.tolerance) {
    throw ToleranceFailure("abs_diff " + fmt(diff) + " exceeds tolerance " +
                           fmt(config.tolerance));
  }
  return kExitOk;
}

}  // namespace

std::string dump_config(const RunConfig& config) {
  std::ostringstream text;
  text << "# lzchain " << config.command << " configuration; replay with: lzchain "
       << config.command << " --config <file>\n";
  text << "kind=" << quoted(config.kind) << '\n';
  text << "n=" << config.n << '\n';
  text << "j=" << fmt(config.j) << '\n';
  text << "lambda=" << fmt(config.lambda) << '\n';
  text << "gamma=" << fmt(config.gamma) << '\n';
  text << "delta=" << fmt(config.delta) << '\n';
  text << "g=" << fmt(config.g) << '\n';
  text << "v=" << fmt(config.v) << '\n';
  text << "hbar=" << fmt(config.hbar) << '\n';
  if (!config.grids.empty()) {
    text << "grid=[";
    for (std::size_t i = 0; i < config.grids.size(); ++i) {
      text << (i > 0 ? "," : "") << quoted(config.grids[i]);
    }
    text << "]\n";
  }
  if (!config.preset.empty()) text << "preset=" << quoted(config.preset) << '\n';
  text << "t-span=" << fmt(config.t_span) << '\n';
  text << "tolerance=" << fmt(config.tolerance) << '\n';
  if (!config.out.empty()) text << "out=" << quoted(config.out) << '\n';
  text << "format=" << quoted(config.format) << '\n';
  text << "precision=" << config.precision << '\n';
  text << "strict-gapless=" << (config.strict_gapless ? "true" : "false") << '\n';
  return text.str();
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Landau-Zener transitions of a qubit driven by a transverse-field spin chain",
               "lzchain"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read key=value settings (flags take precedence)");

  RunConfig config;
  bool dump = false;
  auto* kind = app.add_option("--kind", config.kind, "Chain kind")
                   ->check(CLI::IsMember({"ising", "xy"}));
  auto* n = app.add_option("--n", config.n, "Chain length (odd, >= 3)");
  auto* j = app.add_option("--j", config.j, "Exchange energy J");
  auto* lambda = app.add_option("--lambda", config.lambda, "Transverse field (units of J)");
  auto* gamma = app.add_option("--gamma", config.gamma, "XY anisotropy in [0, 1]");
  auto* delta = app.add_option("--delta", config.delta, "Tunnelling element");
  auto* g = app.add_option("--g", config.g, "System-chain coupling");
  auto* v = app.add_option("--v", config.v, "Sweep velocity (J^2/hbar)");
  auto* hbar = app.add_option("--hbar", config.hbar, "Planck constant in chosen units");
  auto* grid = app.add_option("--grid", config.grids, "Sweep axis name:min:max:points (max 2)");
  app.add_option("--preset", config.preset, "Figure preset")
      ->check(CLI::IsMember({"fig1", "fig2", "fig3", "fig4"}));
  app.add_option("--t-span", config.t_span, "Oracle half-window T");
  app.add_option("--tolerance", config.tolerance, "compare: allowed |p_oracle - p_formula|");
  app.add_option("--out", config.out, "Write output to this path (atomic)");
  app.add_option("--format", config.format, "Delimiter style")
      ->check(CLI::IsMember({"tsv", "csv"}));
  app.add_option("--precision", config.precision, "Significant digits")
      ->check(CLI::Range(1, 17));
  app.add_flag("--strict-gapless", config.strict_gapless, "Fail on gapless XX modes");
  app.add_flag("--dump-config", dump, "Print the effective configuration and exit");

  for (const auto& [name, help] :
       {std::pair{"spectrum", "Per-mode spectrum and ground-state moments"},
        std::pair{"prob", "Closed-form flip probability"},
        std::pair{"sweep", "Parameter sweep table"},
        std::pair{"oracle", "Brute-force time evolution"},
        std::pair{"compare", "Oracle versus closed form"}}) {
    app.add_subcommand(name, help)->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitValidation;
  }
  config.command = app.get_subcommands().front()->get_name();

  try {
    if (!config.preset.empty()) {
      const FigurePreset preset = figure_preset(config.preset);
      const auto given = [](const CLI::Option* opt) { return opt->count() > 0; };
      const GridSpec& pg = preset.grid;
      if (!given(kind)) config.kind = to_string(pg.chain.kind);
      if (!given(n)) config.n = pg.chain.n;
      if (!given(j)) config.j = pg.chain.j;
      if (!given(lambda)) config.lambda = pg.chain.lambda;
      if (!given(gamma)) config.gamma = pg.chain.gamma;
      if (!given(delta)) config.delta = pg.params.delta;
      if (!given(g)) config.g = pg.params.g;
      if (!given(v)) config.v = pg.params.v;
      if (!given(hbar)) config.hbar = pg.params.hbar;
      if (!given(grid)) {
        config.grids = {format_axis(pg.axis1)};
        if (pg.axis2) config.grids.push_back(format_axis(*pg.axis2));
      }
    }

    if (dump) {
      out << dump_config(config);
      return kExitOk;
    }

    if (config.command == "spectrum") return cmd_spectrum(config, out);
    if (config.command == "prob") return cmd_prob(config, out);
    if (config.command == "sweep") return cmd_sweep(config, out);
    if (config.command == "oracle") return cmd_oracle(config, out, err);
    return cmd_compare(config, out, err);
  } catch (const ValidationError& e) {
    std::string flag = e.field();
    std::replace(flag.begin(), flag.end(), '_', '-');
    err << "error: invalid --" << flag << ": " << e.what() << '\n';
    return kExitValidation;
  } catch (const GaplessModeError& e) {
    err << "error: " << e.what() << " (drop --strict-gapless to use the limiting convention)\n";
    return kExitValidation;
  } catch (const DimensionCapError& e) {
    err << "error: invalid --n: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ToleranceFailure& e) {
    err << "failure: " << e.what() << '\n';
    return kExitTolerance;
  } catch (const NormBudgetExceeded& e) {
    err << "failure: " << e.what() << '\n';
    return kExitTolerance;
  } catch (const NonConvergent& e) {
    err << "failure: " << e.what() << '\n';
    return kExitTolerance;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("lzchain");
  for (const std::string& arg : args) argv.push_back(arg.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace lzchain::cli
