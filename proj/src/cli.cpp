#include "qwalk/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "qwalk/analysis.hpp"
#include "qwalk/errors.hpp"
#include "qwalk/evolve.hpp"
#include "qwalk/io.hpp"
#include "qwalk/oracle.hpp"
#include "qwalk/sweep.hpp"
#include "qwalk/walk.hpp"

namespace qwalk {

namespace fs = std::filesystem;

namespace {

const double kGroverRho = 1.0 / std::numbers::sqrt3;

struct SimulateArgs {
  double rho = kGroverRho;
  std::optional<double> theta;
  double theta_offset = 0.0;
  long steps = 10'000;
  std::string cadence = "geometric:1.25";
  bool wavefront = false;
  bool stationary = false;
  std::vector<long> snapshots;
  std::string format = "csv";
  std::string out = "series.csv";
};

struct SweepArgs {
  std::vector<double> rho;
  std::vector<double> rho_linspace;
  std::vector<double> theta;
  std::vector<double> theta_linspace;
  std::vector<double> theta_offset;
  std::vector<double> theta_offset_linspace;
  bool fig5 = false;
  long steps = 10'000;
  unsigned threads = 0;
  bool resume = false;
  bool timestamps = false;
  std::string out = "sweep.csv";
};

struct FitArgs {
  std::string input;
  std::string kind = "log";
  std::string column = "pr";
  double t_min = 100.0;
  double t_max = 1e4;
  std::string out = "fit.json";
};

struct CollapseArgs {
  std::vector<std::string> inputs;
  std::string surface;
  std::string observable = "sp";
  std::vector<long> times{2000, 4000, 8000, 16000};
  std::optional<double> rho;
  std::optional<double> b;
  std::string fit;
  bool no_log_correction = false;
  double eta_exponent = 0.5;
  std::size_t grid_points = 201;
  std::string surface_out;
  std::string out = "collapse.csv";
};

struct OracleArgs {
  std::string what = "omega";
  double rho = kGroverRho;
  std::size_t nu_points = 401;
  std::vector<double> nu;
  long t = 10'000;
  std::optional<double> front_c;
  long calibrate_steps = 10'000;
  long steps = 10'000;
  std::string cadence = "geometric:1.25";
  std::string out = "oracle.csv";
};

std::vector<double> linspace(const std::vector<double>& spec, const std::string& flag) {
  if (spec.size() != 3) throw ValidationError(flag + " takes lo,hi,n");
  const double n = spec[2];
  if (!(n >= 1.0) || n != std::floor(n)) throw ValidationError(flag + " needs a whole number of points");
  std::vector<double> out;
  const auto count = static_cast<int>(n);
  for (int i = 0; i < count; ++i) {
    out.push_back(count == 1 ? spec[0] : (spec[0] * (count - 1 - i) + spec[1] * i) / (count - 1));
  }
  return out;
}

void save_text(const fs::path& path, const std::function<void(std::ostream&)>& writer) {
  std::ostringstream buf;
  writer(buf);
  write_file_atomic(path, buf.str());
}

fs::path with_suffix(const fs::path& base, const std::string& suffix) {
  return base.parent_path() / (base.stem().string() + suffix);
}

TimeSeries load_series(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  if (path.extension() == ".json") return read_series_json(in);
  return read_series_csv(in);
}

void cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  const CoinParameter rho(a.rho);
  const MixingAngle theta = a.theta ? MixingAngle(*a.theta) : MixingAngle(theta_c(rho).value() + a.theta_offset);
  if (a.steps < 0) throw DomainError("--steps must be non-negative");
  if (a.format != "csv" && a.format != "json" && a.format != "both") throw ValidationError("--format is csv, json or both");
  EvolveOptions options;
  options.cadence = RecordCadence::parse(a.cadence);
  options.track_wavefront = a.wavefront;
  options.snapshot_times = a.snapshots;
  options.estimate_stationary = a.stationary;
  for (long t : a.snapshots) {
    if (t < 0 || t > a.steps) throw DomainError("snapshot time " + std::to_string(t) + " outside [0, steps]");
  }
  if (a.stationary && a.steps < 4) throw DomainError("--stationary needs at least 4 steps");

  const EvolutionResult run = evolve(theta, rho, a.steps, options);
  const fs::path base(a.out);
  if (a.format != "json") save_text(with_suffix(base, ".csv"), [&](std::ostream& o) { write_series_csv(o, run.series); });
  if (a.format != "csv") save_text(with_suffix(base, ".json"), [&](std::ostream& o) { write_series_json(o, run.series); });
  const Provenance params{{"rho", format_double(rho.value())}, {"theta", format_double(theta.value())}};
  for (const SpatialDistribution& d : run.snapshots) {
    save_text(with_suffix(base, "_t" + std::to_string(d.time()) + ".csv"),
              [&](std::ostream& o) { write_distribution_csv(o, d, params); });
  }
  if (run.stationary) {
    const StationaryEstimate& s = *run.stationary;
    out << "stationary sp=" << format_double(s.sp) << " pr=" << format_double(s.pr)
        << " sp_saturated=" << s.sp_saturated() << " pr_saturated=" << s.pr_saturated() << '\n';
  }
  out << "wrote " << run.series.records.size() << " records to " << base.stem().string() << '\n';
}

void cmd_sweep(const SweepArgs& a, std::ostream& out) {
  SweepPlan plan;
  if (a.fig5) {
    plan = SweepPlan::fig5_default();
  } else {
    plan.rho_grid = !a.rho_linspace.empty() ? linspace(a.rho_linspace, "--rho-linspace") : a.rho;
    if (!a.theta_offset.empty() || !a.theta_offset_linspace.empty()) {
      plan.theta_mode = ThetaMode::offset;
      plan.theta_grid =
          !a.theta_offset_linspace.empty() ? linspace(a.theta_offset_linspace, "--theta-offset-linspace") : a.theta_offset;
    } else {
      plan.theta_grid = !a.theta_linspace.empty() ? linspace(a.theta_linspace, "--theta-linspace") : a.theta;
    }
  }
  plan.steps = a.steps;
  plan.validate();
  SweepOptions options;
  options.threads = a.threads;
  options.output = fs::path(a.out);
  options.resume = a.resume;
  options.timestamps = a.timestamps;
  const SweepResult result = run_sweep(plan, options);
  out << "wrote " << result.rows.size() << " rows to " << a.out << '\n';
}

void cmd_fit(const FitArgs& a, std::ostream& out) {
  if (a.input.empty()) throw ValidationError("--input is required");
  if (a.kind != "log" && a.kind != "power") throw ValidationError("--kind is log or power");
  if (!(a.t_min <= a.t_max)) throw ValidationError("--t-min must not exceed --t-max");
  const TimeSeries series = load_series(a.input);
  const FitWindow window{a.t_min, a.t_max};
  const Provenance params{{"input", fs::path(a.input).filename().string()},
                          {"rho", format_double(series.metadata.rho)},
                          {"theta", format_double(series.metadata.theta)}};
  if (a.kind == "log") {
    const ScalingFit fit = fit_log_correction(series, window);
    save_text(a.out, [&](std::ostream& o) { write_fit_json(o, fit, params); });
    out << "a=" << format_double(fit.a) << " b=" << format_double(fit.b) << '\n';
    return;
  }
  std::vector<Sample> samples;
  if (a.column == "sp") samples = sp_samples(series);
  else if (a.column == "pr") samples = pr_samples(series);
  else if (a.column == "delta") samples = delta_samples(series);
  else if (a.column == "p_front") samples = front_probability_samples(series);
  else throw ValidationError("--column is sp, pr, delta or p_front");
  Provenance with_column = params;
  with_column.emplace_back("column", a.column);
  const PowerLawFit fit = fit_power_law(samples, window);
  save_text(a.out, [&](std::ostream& o) { write_power_law_json(o, fit, with_column); });
  out << "exponent=" << format_double(fit.exponent) << '\n';
}

void cmd_collapse(const CollapseArgs& a, std::ostream& out) {
  if (a.inputs.empty() == a.surface.empty()) throw ValidationError("give either --inputs or --surface");
  if (a.observable != "sp" && a.observable != "pr") throw ValidationError("--observable is sp or pr");
  if (a.times.empty()) throw ValidationError("--times must not be empty");
  if (a.grid_points < 2) throw ValidationError("--grid-points must be at least 2");
  double b = 0.0;
  if (a.observable == "pr" && !a.no_log_correction) {
    if (a.b) {
      b = *a.b;
    } else if (!a.fit.empty()) {
      std::ifstream in(a.fit);
      if (!in) throw IoError("cannot read " + a.fit);
      b = read_fit_json(in).b;
    } else {
      throw ValidationError("a PR collapse needs --b or --fit unless --no-log-correction is given");
    }
  }

  Surface surface;
  std::optional<double> rho = a.rho;
  if (!a.surface.empty()) {
    std::ifstream in(a.surface);
    if (!in) throw IoError("cannot read " + a.surface);
    surface = read_surface_csv(in);
  } else {
    for (const std::string& path : a.inputs) {
      const TimeSeries s = load_series(path);
      if (rho && std::abs(*rho - s.metadata.rho) > 1e-12 && !a.rho) {
        throw PreconditionError("input series mix different rho values");
      }
      if (!rho) rho = s.metadata.rho;
      auto& row = surface[s.metadata.theta];
      for (const Record& r : s.records) row[r.t] = a.observable == "sp" ? r.sp : r.pr;
    }
  }
  if (!rho) throw ValidationError("--rho is required with --surface");
  std::vector<std::int64_t> times(a.times.begin(), a.times.end());
  const CollapseOptions options{a.grid_points};
  const CollapseResult result = a.observable == "sp"
                                    ? collapse_sp(surface, *rho, times, a.eta_exponent, options)
                                    : collapse_pr(surface, *rho, times, b, !a.no_log_correction, options);
  Provenance params{{"observable", a.observable}, {"rho", format_double(*rho)}};
  if (a.observable == "sp") params.emplace_back("eta_exponent", format_double(a.eta_exponent));
  if (a.observable == "pr") params.emplace_back("b", a.no_log_correction ? "none" : format_double(b));
  save_text(a.out, [&](std::ostream& o) { write_collapse_csv(o, result, params); });
  if (!a.surface_out.empty()) save_text(a.surface_out, [&](std::ostream& o) { write_surface_csv(o, surface, a.observable); });
  out << "quality=" << format_double(result.quality) << '\n';
}

void cmd_oracle(const OracleArgs& a, std::ostream& out) {
  if (!(a.rho > 0.0 && a.rho < 1.0)) throw DomainError("--rho must lie in (0, 1) for the oracle");
  const auto c = [&] { return a.front_c ? *a.front_c : calibrate_front_constant(a.rho, a.calibrate_steps); };
  const Provenance base{{"rho", format_double(a.rho)}};
  if (a.what == "omega") {
    std::vector<double> nu = a.nu;
    for (double v : nu) {
      if (!(std::abs(v) < a.rho)) throw DomainError("omega needs |nu| < rho, got " + format_double(v));
    }
    if (nu.empty()) {
      if (a.nu_points < 1) throw ValidationError("--nu-points must be positive");
      // Midpoints of equal cells, so the singular endpoints are never hit.
      for (std::size_t i = 0; i < a.nu_points; ++i) {
        nu.push_back(-a.rho + a.rho * (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(a.nu_points));
      }
    }
    save_text(a.out, [&](std::ostream& o) {
      o << "# qwalk " << QWALK_VERSION << "\n# kind=omega\n# rho=" << format_double(a.rho) << "\nnu,omega\n";
      for (double v : nu) o << format_double(v) << ',' << format_double(omega(v, a.rho)) << '\n';
    });
    out << "wrote " << nu.size() << " omega samples\n";
  } else if (a.what == "distribution") {
    if (a.t < 1) throw DomainError("--t must be at least 1");
    const DeltaLaw cut{c()};
    const SpatialDistribution d = asymptotic_distribution(a.t, a.rho, cut);
    Provenance params = base;
    params.emplace_back("front_c", format_double(cut.c));
    save_text(a.out, [&](std::ostream& o) { write_distribution_csv(o, d, params); });
    out << "wrote asymptotic distribution at t=" << a.t << '\n';
  } else if (a.what == "ipr") {
    if (a.steps < 1) throw DomainError("--steps must be at least 1");
    const RecordCadence cadence = RecordCadence::parse(a.cadence);
    const DeltaLaw delta{c()};
    std::vector<long> times;
    for (long t : cadence.times(a.steps)) {
      if (t >= 1 && a.rho * static_cast<double>(t) - delta(static_cast<double>(t)) > 0.0) times.push_back(t);
    }
    TimeSeries series = oracle_series(a.rho, times, delta);
    series.metadata.cadence = cadence.describe();
    save_text(a.out, [&](std::ostream& o) { write_series_csv(o, series); });
    out << "wrote " << series.records.size() << " oracle records (front_c=" << format_double(delta.c) << ")\n";
  } else {
    throw ValidationError("--what is omega, distribution or ipr");
  }
}

void add_config(CLI::App* sub) {
  // Expanded by expand_config before parsing; registered for --help.
  static std::string unused;
  sub->add_option("--config", unused, "Flat key=value file using the flag names; command-line flags win");
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

// Turns each key=value line of the --config file into --key value unless the
// command line already sets --key. Unknown keys then fail the normal parse.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  std::optional<std::string> config;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config = args[i].substr(9);
    } else {
      out.push_back(args[i]);
    }
  }
  if (!config) return out;
  std::ifstream in(*config);
  if (!in) throw ValidationError("cannot read config file " + *config);
  auto given = [&out](const std::string& flag) {
    for (const auto& a : out) {
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    }
    return false;
  };
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ValidationError("config line without '=': " + line);
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.rfind("--", 0) == 0) key = key.substr(2);
    const std::string flag = "--" + key;
    if (given(flag)) continue;
    if (value == "true") {
      out.push_back(flag);
    } else if (value != "false") {
      out.push_back(flag);
      out.push_back(value);
    }
  }
  return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Three-state quantum walk: simulation, sweeps, scaling fits and asymptotic oracles", "qwalk"};
  app.set_version_flag("--version", std::string(QWALK_VERSION));
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Evolve one walk and write its SP/PR time series");
  add_config(s);
  s->add_option("--rho", sim.rho, "Coin parameter in [0, 1]")->capture_default_str();
  auto* theta_opt = s->add_option("--theta", sim.theta, "Absolute mixing angle in [0, pi]");
  s->add_option("--theta-offset", sim.theta_offset, "Mixing angle relative to theta_c(rho)")
      ->capture_default_str()
      ->excludes(theta_opt);
  s->add_option("--steps", sim.steps, "Number of steps T")->capture_default_str();
  s->add_option("--cadence", sim.cadence, "Record times: every:N or geometric:F")->capture_default_str();
  s->add_flag("--wavefront", sim.wavefront, "Track the right-front maximum");
  s->add_flag("--stationary", sim.stationary, "Estimate the t -> infinity SP and PR");
  s->add_option("--snapshots", sim.snapshots, "Times at which to dump P_x")->delimiter(',');
  s->add_option("--format", sim.format, "csv, json or both")->capture_default_str();
  s->add_option("--out", sim.out, "Output path; the extension follows --format")->capture_default_str();

  SweepArgs sw;
  auto* w = app.add_subcommand("sweep", "Final SP and PR over a (rho, theta) grid");
  add_config(w);
  w->add_option("--rho", sw.rho, "Explicit rho values")->delimiter(',');
  w->add_option("--rho-linspace", sw.rho_linspace, "lo,hi,n")->delimiter(',');
  w->add_option("--theta", sw.theta, "Absolute theta values")->delimiter(',');
  w->add_option("--theta-linspace", sw.theta_linspace, "lo,hi,n")->delimiter(',');
  w->add_option("--theta-offset", sw.theta_offset, "Theta offsets from theta_c(rho)")->delimiter(',');
  w->add_option("--theta-offset-linspace", sw.theta_offset_linspace, "lo,hi,n")->delimiter(',');
  w->add_flag("--fig5", sw.fig5, "61 x 61 grid over rho in [0.05, 0.95], theta in [pi/2, pi]");
  w->add_option("--steps", sw.steps, "Steps per run")->capture_default_str();
  w->add_option("--threads", sw.threads, "Worker threads, 0 for all cores")->capture_default_str();
  w->add_flag("--resume", sw.resume, "Continue from <out>.partial");
  w->add_flag("--timestamps", sw.timestamps, "Record wall-clock times in the JSON sidecar");
  w->add_option("--out", sw.out, "CSV output path")->capture_default_str();

  FitArgs ft;
  auto* f = app.add_subcommand("fit", "Fit PR = a t/(b + ln t) or a power law to a time series");
  add_config(f);
  f->add_option("--input", ft.input, "Time series CSV or JSON");
  f->add_option("--kind", ft.kind, "log or power")->capture_default_str();
  f->add_option("--column", ft.column, "Power-law column: sp, pr, delta or p_front")->capture_default_str();
  f->add_option("--t-min", ft.t_min, "Window start")->capture_default_str();
  f->add_option("--t-max", ft.t_max, "Window end")->capture_default_str();
  f->add_option("--out", ft.out, "JSON output path")->capture_default_str();

  CollapseArgs co;
  auto* c = app.add_subcommand("collapse", "Single-parameter scaling collapse of SP or PR");
  add_config(c);
  c->add_option("--inputs", co.inputs, "Time series files, one per theta")->delimiter(',');
  c->add_option("--surface", co.surface, "Surface CSV (theta, t, value)");
  c->add_option("--observable", co.observable, "sp or pr")->capture_default_str();
  c->add_option("--times", co.times, "Times to collapse")->delimiter(',')->capture_default_str();
  c->add_option("--rho", co.rho, "Coin parameter (default: from the inputs)");
  c->add_option("--b", co.b, "Log-correction constant for PR");
  c->add_option("--fit", co.fit, "Take b from a fit JSON");
  c->add_flag("--no-log-correction", co.no_log_correction, "Rescale PR by t instead of t/(b + ln t)");
  c->add_option("--eta-exponent", co.eta_exponent, "SP scaling exponent p in eta = dtheta t^p")->capture_default_str();
  c->add_option("--grid-points", co.grid_points, "Points on the common eta grid")->capture_default_str();
  c->add_option("--surface-out", co.surface_out, "Also write the assembled surface");
  c->add_option("--out", co.out, "CSV output path")->capture_default_str();

  OracleArgs orc;
  auto* o = app.add_subcommand("oracle", "Weak-limit asymptotics at theta_c");
  add_config(o);
  o->add_option("--what", orc.what, "omega, distribution or ipr")->capture_default_str();
  o->add_option("--rho", orc.rho, "Coin parameter in (0, 1)")->capture_default_str();
  o->add_option("--nu-points", orc.nu_points, "Samples across (-rho, rho)")->capture_default_str();
  o->add_option("--nu", orc.nu, "Explicit nu values")->delimiter(',');
  o->add_option("--t", orc.t, "Time for the asymptotic distribution")->capture_default_str();
  o->add_option("--front-c", orc.front_c, "c in delta = c t^(1/3); calibrated from a simulation if absent");
  o->add_option("--calibrate-steps", orc.calibrate_steps, "Steps of the calibration run")->capture_default_str();
  o->add_option("--steps", orc.steps, "Last time of the analytic PR curve")->capture_default_str();
  o->add_option("--cadence", orc.cadence, "Times of the analytic PR curve")->capture_default_str();
  o->add_option("--out", orc.out, "CSV output path")->capture_default_str();

  try {
    const std::vector<std::string> expanded = expand_config(args);
    std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? exit_ok : exit_validation;
  } catch (const ValidationError& e) {
    err << "qwalk: invalid input: " << e.what() << '\n';
    return exit_validation;
  }

  try {
    if (s->parsed()) cmd_simulate(sim, out);
    else if (w->parsed()) cmd_sweep(sw, out);
    else if (f->parsed()) cmd_fit(ft, out);
    else if (c->parsed()) cmd_collapse(co, out);
    else if (o->parsed()) cmd_oracle(orc, out);
  } catch (const ValidationError& e) {
    err << "qwalk: invalid input: " << e.what() << '\n';
    return exit_validation;
  } catch (const std::exception& e) {
    err << "qwalk: " << e.what() << '\n';
    return exit_computation;
  }
  return exit_ok;
}

}  // namespace qwalk
