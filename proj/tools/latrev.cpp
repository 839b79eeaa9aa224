#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "latrev/analysis.hpp"
#include "latrev/artifacts.hpp"
#include "latrev/classical.hpp"
#include "latrev/config.hpp"
#include "latrev/error.hpp"
#include "latrev/mathieu.hpp"
#include "latrev/output.hpp"
#include "latrev/quantum.hpp"
#include "latrev/recipes.hpp"
#include "latrev/resonance.hpp"
#include "latrev/units.hpp"
#include "latrev/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace latrev;

namespace {

struct Globals {
  std::string config;
  std::string out_dir;
  unsigned threads = 0;
  bool full = false;
};

std::optional<config::RunConfig> maybe_config(const Globals& g) {
  if (g.config.empty()) return std::nullopt;
  config::RunConfig cfg = config::load_config(g.config);
  for (const std::string& w : cfg.warnings) std::cerr << "warning: " << w << '\n';
  return cfg;
}

config::RunConfig need_config(const Globals& g, const char* command) {
  if (g.config.empty()) fail(ErrorKind::Validation, std::string(command) + " needs --config");
  return *maybe_config(g);
}

fs::path out_dir(const Globals& g, const std::string& fallback) {
  return g.out_dir.empty() ? fs::path("out") / fallback : fs::path(g.out_dir);
}

json command_meta(const Globals& g, const std::string& command, const std::optional<config::RunConfig>& cfg) {
  json meta = output::base_meta(command);
  meta["threads"] = g.threads;
  meta["full"] = g.full;
  if (cfg) {
    meta["config"] = config::to_input_json(*cfg);
    meta["derived"] = config::to_json(*cfg);
  }
  return meta;
}

void finish(output::Manifest& manifest, const fs::path& file, json meta) {
  manifest.add_file(file);
  manifest.add_file(output::write_meta(file, meta));
}

// units ------------------------------------------------------------------

struct UnitsArgs {
  double depth = 2.0;
  double frequency = 0.0;
  double amplitude = 0.0;
  double wavelength = 852e-9;
  double G = 0.0;
};

void run_units(const Globals& g, const UnitsArgs& a) {
  PhysicalSetup setup;
  if (auto cfg = maybe_config(g); cfg && cfg->physical) {
    setup = *cfg->physical;
  } else {
    if (!(a.frequency > 0.0)) fail(ErrorKind::Validation, "units needs --frequency or a physical config block");
    setup.lattice_depth = a.depth;
    setup.drive_frequency = a.frequency;
    setup.drive_amplitude = a.amplitude;
    setup.lattice_wavelength = a.wavelength;
    setup.interaction_G = a.G;
  }
  const ScaledParams s = scale_setup(setup);
  const ValidityReport v = effective_potential_validity(s);
  json doc = {{"physical", config::to_json(setup)},
              {"scaled", config::to_json(s)},
              {"recoil_frequency_hz", setup.recoil_frequency() / constants::kTwoPi},
              {"validity", {{"status", to_string(v.status)}, {"message", v.message}}}};
  std::cout << doc.dump(2) << '\n';
  if (!g.out_dir.empty()) {
    output::OutputDir dir(g.out_dir);
    output::write_json(dir / "units.json", doc);
  }
}

// mathieu / bands ----------------------------------------------------------

struct MathieuArgs {
  std::vector<double> nu;
  std::vector<double> q;
  std::string q_grid;
  int truncation = 64;
};

void run_mathieu(const Globals& g, const MathieuArgs& a) {
  std::vector<double> qs = a.q;
  if (!a.q_grid.empty()) {
    const auto grid = analysis::parse_grid(a.q_grid);
    qs.insert(qs.end(), grid.begin(), grid.end());
  }
  if (a.nu.empty() || qs.empty()) fail(ErrorKind::Validation, "mathieu needs --nu and --q (or --q-grid)");
  std::vector<artifacts::MathieuRow> rows;
  for (double nu : a.nu) {
    for (double q : qs) rows.push_back({nu, q, mathieu::char_value({nu, q, a.truncation})});
  }
  if (g.out_dir.empty()) {
    std::cout << "nu,q,a\n";
    for (const auto& r : rows) {
      std::cout << output::format_double(r.nu) << ',' << output::format_double(r.q) << ','
                << output::format_double(r.a) << '\n';
    }
    return;
  }
  output::OutputDir dir(g.out_dir);
  output::Manifest manifest(dir.path());
  json meta = command_meta(g, "mathieu", std::nullopt);
  meta["truncation"] = a.truncation;
  artifacts::write_mathieu(dir / "mathieu.csv", rows);
  finish(manifest, dir / "mathieu.csv", meta);
  manifest.write(output::base_meta("mathieu"));
}

struct BandsArgs {
  std::optional<double> vprime;
  int bands = 3;
  int points = 51;
};

void run_bands(const Globals& g, const BandsArgs& a) {
  const auto cfg = maybe_config(g);
  double vprime = 0.0;
  if (a.vprime) vprime = *a.vprime;
  else if (cfg) vprime = cfg->scaled.effective_depth;
  else fail(ErrorKind::Validation, "bands needs --vprime or --config");
  const double q0 = vprime / 4.0;
  const auto points = mathieu::band_structure(a.bands, a.points, q0);
  const mathieu::BandEdgeGaps gaps = mathieu::band_edge_gaps(q0);
  json summary = {{"Vprime", vprime},
                  {"q0", q0},
                  {"gap_zone_center_Er", gaps.at_zone_center},
                  {"gap_zone_edge_Er", gaps.at_zone_edge},
                  {"mean_separation_Er", gaps.kappa_average}};
  if (cfg && cfg->physical) {
    const double er_hz = cfg->physical->recoil_energy() / (constants::kHbar * constants::kTwoPi);
    summary["recoil_energy_hz"] = er_hz;
    summary["gap_zone_edge_khz"] = gaps.at_zone_edge * er_hz / 1e3;
    summary["mean_separation_khz"] = gaps.kappa_average * er_hz / 1e3;
  }
  std::cout << summary.dump(2) << '\n';
  const output::OutputDir dir(out_dir(g, "bands"));
  output::Manifest manifest(dir.path());
  artifacts::write_bands(dir / "bands.csv", points);
  json meta = command_meta(g, "bands", cfg);
  meta["summary"] = summary;
  finish(manifest, dir / "bands.csv", meta);
  manifest.write(output::base_meta("bands"));
}

// times / sweep ------------------------------------------------------------

struct TimesArgs {
  std::string regime = "auto";
  std::string lambda_grid;
};

std::vector<double> lambdas(const config::RunConfig& cfg, const std::string& override_grid) {
  if (!override_grid.empty()) return analysis::parse_grid(override_grid);
  if (cfg.lambda_grid) return analysis::parse_grid(*cfg.lambda_grid);
  return {cfg.scaled.lambda};
}

void run_times(const Globals& g, const TimesArgs& a) {
  const config::RunConfig cfg = need_config(g, "times");
  const resonance::Formula formula = resonance::parse_formula(a.regime);
  std::vector<artifacts::TimesRow> rows;
  for (double lambda : lambdas(cfg, a.lambda_grid)) {
    artifacts::TimesRow row;
    row.lambda = lambda;
    try {
      ScaledParams p = cfg.scaled;
      p.lambda = lambda;
      const auto ctx = resonance::build_context(p, cfg.resonance);
      row.q = ctx.q;
      row.warnings = ctx.warnings;
      row.times = resonance::evaluate(ctx, formula);
      for (const std::string& w : row.times->validity_warnings) row.warnings.push_back(w);
    } catch (const Error& e) {
      row.warnings.emplace_back(e.what());
    }
    rows.push_back(std::move(row));
  }
  if (g.out_dir.empty()) {
    std::cout << "lambda,q,t_cl,t_rev,t_spr,warnings\n";
    for (const auto& r : rows) {
      std::cout << output::format_double(r.lambda) << ',' << output::format_double(r.q);
      if (r.times) {
        std::cout << ',' << output::format_double(r.times->t_classical) << ','
                  << output::format_double(r.times->t_revival) << ','
                  << output::format_double(r.times->t_super_revival);
      } else {
        std::cout << ",,,";
      }
      std::cout << ',' << (r.warnings.empty() ? "" : "\"" + r.warnings.front() + "\"") << '\n';
    }
    return;
  }
  const output::OutputDir dir(g.out_dir);
  output::Manifest manifest(dir.path());
  artifacts::write_times(dir / "times.csv", rows);
  json meta = command_meta(g, "times", cfg);
  meta["regime"] = a.regime;
  meta["unit"] = "drive";
  finish(manifest, dir / "times.csv", meta);
  manifest.write(output::base_meta("times"));
}

struct SweepArgs {
  std::string lambda_grid;
  bool simulate = false;
};

void run_sweep(const Globals& g, const SweepArgs& a) {
  const config::RunConfig cfg = need_config(g, "sweep");
  analysis::SweepOptions opt;
  opt.lambdas = lambdas(cfg, a.lambda_grid);
  opt.base = cfg.scaled;
  opt.context = cfg.resonance;
  opt.simulate = a.simulate;
  opt.grid = cfg.grid;
  opt.evolve.tau_end = cfg.run.tau_end;
  opt.evolve.dt = cfg.run.dt;
  opt.evolve.with_interaction = cfg.run.with_interaction;
  opt.z0 = cfg.initial.z0;
  opt.p0 = cfg.initial.p0;
  opt.delta_p = cfg.initial.delta_p;
  opt.threads = g.threads;
  const auto rows = analysis::sweep(opt);
  const output::OutputDir dir(out_dir(g, "sweep"));
  output::Manifest manifest(dir.path());
  artifacts::write_sweep(dir / "sweep.csv", rows);
  json meta = command_meta(g, "sweep", cfg);
  meta["simulate"] = a.simulate;
  finish(manifest, dir / "sweep.csv", meta);
  manifest.write(output::base_meta("sweep"));
  std::cout << "wrote " << rows.size() << " rows to " << (dir / "sweep.csv").string() << '\n';
}

// poincare -----------------------------------------------------------------

struct PoincareArgs {
  std::optional<double> kappa;
  std::optional<double> lambda;
  std::string seeds = "grid";
  std::optional<int> periods;
  std::optional<int> steps_per_period;
  std::optional<int> order;
};

std::vector<classical::PhasePoint> read_seeds(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot read seed file " + path.string());
  std::vector<classical::PhasePoint> seeds;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'z') continue;
    for (char& c : line) {
      if (c == ',') c = ' ';
    }
    std::istringstream ss(line);
    classical::PhasePoint x;
    if (!(ss >> x.z >> x.p)) fail(ErrorKind::Validation, path.string() + ": expected 'z,p' rows");
    seeds.push_back(x);
  }
  if (seeds.empty()) fail(ErrorKind::Validation, path.string() + ": no seeds");
  return seeds;
}

void run_poincare(const Globals& g, const PoincareArgs& a) {
  const auto cfg = maybe_config(g);
  config::ClassicalBlock block = cfg ? cfg->classical : config::ClassicalBlock{};
  if (a.kappa) block.params.kappa = *a.kappa;
  if (a.lambda) block.params.lambda = *a.lambda;
  if (a.periods) block.periods = *a.periods;
  if (a.steps_per_period) block.params.steps_per_period = *a.steps_per_period;
  if (a.order) block.params.order = *a.order;
  classical::validate(block.params);
  if (block.periods < 1) fail(ErrorKind::Validation, "--periods must be positive");

  std::vector<classical::PhasePoint> seeds;
  if (a.seeds == "grid") {
    seeds = classical::seed_grid(block.seeds_z, block.seeds_p, block.params.kappa);
  } else if (auto x = a.seeds.find('x'); x != std::string::npos && fs::path(a.seeds).extension().empty() &&
                                         !fs::exists(a.seeds)) {
    seeds = classical::seed_grid(std::stoi(a.seeds.substr(0, x)), std::stoi(a.seeds.substr(x + 1)),
                                 block.params.kappa);
  } else {
    seeds = read_seeds(a.seeds);
  }
  const auto section = classical::poincare(seeds, block.params, block.periods, g.threads);
  const double fraction = classical::bounded_libration_fraction(seeds, block.params, block.periods, g.threads);

  const output::OutputDir dir(out_dir(g, "poincare"));
  output::Manifest manifest(dir.path());
  artifacts::write_poincare(dir / "poincare.csv", section);
  json meta = command_meta(g, "poincare", cfg);
  meta["classical"] = {{"kappa", block.params.kappa},
                       {"lambda", block.params.lambda},
                       {"steps_per_period", block.params.steps_per_period},
                       {"order", block.params.order},
                       {"periods", block.periods}};
  meta["seeds"] = json::array();
  for (const auto& s : seeds) meta["seeds"].push_back({s.z, s.p});
  meta["bounded_libration_fraction"] = fraction;
  if (block.params.lambda > 0.0) {
    try {
      const auto fp = classical::resonance_fixed_point(block.params);
      meta["fixed_point"] = {{"z", fp.x.z}, {"p", fp.x.p}, {"residual", fp.residual}, {"trace", fp.trace}};
    } catch (const Error& e) {
      meta["fixed_point"] = {{"error", e.what()}};
    }
  }
  finish(manifest, dir / "poincare.csv", meta);
  manifest.write(output::base_meta("poincare"));
  std::cout << "wrote " << section.samples.size() << " samples to " << (dir / "poincare.csv").string()
            << "; bounded fraction " << fraction << '\n';
}

// evolve / analyze -----------------------------------------------------------

void run_evolve(const Globals& g) {
  const config::RunConfig cfg = need_config(g, "evolve");
  const auto start = std::chrono::steady_clock::now();
  const auto psi = quantum::init_gaussian(cfg.grid, cfg.initial.z0, cfg.initial.p0, cfg.initial.delta_p,
                                          cfg.scaled.kbar);
  quantum::EvolveOptions opt;
  opt.tau_end = cfg.run.tau_end;
  opt.dt = cfg.run.dt;
  opt.snapshot_stride = cfg.run.snapshot_stride;
  opt.with_interaction = cfg.run.with_interaction;
  const auto rec = quantum::evolve(cfg.grid, psi, cfg.scaled, opt);
  const auto series = quantum::autocorrelation(rec);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const output::OutputDir dir(out_dir(g, "evolve"));
  output::Manifest manifest(dir.path());
  json meta = command_meta(g, "evolve", cfg);
  meta["wall_time_s"] = wall;
  meta["steps"] = rec.steps;
  meta["max_norm_drift"] = rec.max_norm_drift;
  try {
    const auto ctx = resonance::build_context(cfg.scaled, cfg.resonance);
    meta["analytic"] = artifacts::to_json(resonance::evaluate(ctx, resonance::Formula::Auto));
  } catch (const Error& e) {
    meta["analytic"] = {{"error", e.what()}};
  }
  artifacts::write_autocorr(dir / "autocorr.csv", series);
  json ac = meta;
  ac["columns"] = artifacts::kAutocorrColumns;
  finish(manifest, dir / "autocorr.csv", ac);
  if (!rec.densities.empty()) {
    artifacts::write_density(dir / "density.csv", quantum::density_map(rec));
    json dm = meta;
    dm["columns"] = artifacts::kDensityColumns;
    finish(manifest, dir / "density.csv", dm);
  }
  output::write_json(dir / "meta.json", meta);
  manifest.add_file(dir / "meta.json");
  manifest.write(output::base_meta("evolve"));
  std::cout << "evolved " << rec.steps << " steps in " << wall << " s; max norm drift " << rec.max_norm_drift
            << "; outputs in " << dir.path().string() << '\n';
}

struct AnalyzeArgs {
  std::string kind;
  std::string csv;
  std::optional<double> t_cl;
  std::optional<double> t_rev;
  std::optional<double> t_spr;
  std::string regime = "auto";
  bool super = false;
};

void run_analyze(const Globals& g, const AnalyzeArgs& a) {
  if (a.kind != "autocorr") fail(ErrorKind::Validation, "analyze supports 'autocorr' only, got '" + a.kind + "'");
  const AutocorrelationSeries series = artifacts::read_autocorr(a.csv);
  const auto cfg = maybe_config(g);
  resonance::TimeScales analytic;
  if (cfg) {
    const auto ctx = resonance::build_context(cfg->scaled, cfg->resonance);
    analytic = resonance::evaluate(ctx, resonance::parse_formula(a.regime));
  }
  if (a.t_cl) analytic.t_classical = *a.t_cl;
  if (a.t_rev) analytic.t_revival = *a.t_rev;
  if (a.t_spr) analytic.t_super_revival = *a.t_spr;
  if (!(analytic.t_classical > 0.0)) {
    fail(ErrorKind::Validation, "analyze needs analytic hints: give --config or --t-cl/--t-rev");
  }
  analysis::CompareOptions opts;
  if (cfg) opts = {cfg->analysis.classical, cfg->analysis.envelope};
  const analysis::RecurrenceReport report = analysis::compare(series, analytic, a.super, opts);
  const std::string text = analysis::to_json(report);
  std::cout << text << '\n';
  if (!g.out_dir.empty()) {
    const output::OutputDir dir(g.out_dir);
    output::Manifest manifest(dir.path());
    output::write_json(dir / "report.json", json::parse(text));
    manifest.add_file(dir / "report.json");
    artifacts::write_report(dir / "report.csv", report);
    json meta = command_meta(g, "analyze", cfg);
    meta["input"] = a.csv;
    meta["columns"] = artifacts::kReportColumns;
    finish(manifest, dir / "report.csv", meta);
    manifest.write(output::base_meta("analyze"));
  }
}

// recipe -------------------------------------------------------------------

int run_recipe(const Globals& g, const std::string& name) {
  recipes::RecipeOptions opt;
  opt.out_dir = out_dir(g, name);
  opt.threads = g.threads;
  opt.full = g.full;
  const recipes::RecipeResult r = recipes::run_recipe(name, opt);
  for (const output::Assertion& a : r.assertions) {
    std::cout << (a.passed ? "PASS " : "FAIL ") << name << ' ' << a.name << ": " << a.detail << '\n';
  }
  std::cout << "manifest: " << r.manifest.string() << '\n';
  return r.passed ? 0 : exit_code(ErrorKind::Assertion);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Recurrence time scales of matter waves in a driven optical lattice"};
  app.set_version_flag("--version", std::string(kVersion) + " (" + kGitDescribe + ")");
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config, "JSON run configuration");
  app.add_option("--out-dir", g.out_dir, "output directory");
  app.add_option("--threads", g.threads, "worker threads (0 = all cores)");
  app.add_flag("--full", g.full, "full-fidelity recipe variants");

  std::function<int()> action;

  UnitsArgs ua;
  auto* units = app.add_subcommand("units", "convert laboratory parameters to scaled ones");
  units->add_option("--depth", ua.depth, "lattice depth V0 in recoil energies");
  units->add_option("--frequency", ua.frequency, "drive frequency in Hz");
  units->add_option("--amplitude", ua.amplitude, "drive amplitude in m");
  units->add_option("--wavelength", ua.wavelength, "lattice laser wavelength in m");
  units->add_option("--G", ua.G, "mean-field strength");
  units->callback([&] { action = [&] { return run_units(g, ua), 0; }; });

  MathieuArgs ma;
  auto* math = app.add_subcommand("mathieu", "Mathieu characteristic values a_nu(q)");
  math->add_option("--nu", ma.nu, "orders")->delimiter(',');
  math->add_option("--q", ma.q, "parameters")->delimiter(',');
  math->add_option("--q-grid", ma.q_grid, "start:stop:steps");
  math->add_option("--truncation", ma.truncation, "initial Fourier half-size");
  math->callback([&] { action = [&] { return run_mathieu(g, ma), 0; }; });

  BandsArgs ba;
  auto* bands = app.add_subcommand("bands", "Bloch bands of the undriven lattice");
  bands->add_option("--vprime", ba.vprime, "lattice depth in recoil energies");
  bands->add_option("--bands", ba.bands, "number of bands");
  bands->add_option("--points", ba.points, "quasimomentum points");
  bands->callback([&] { action = [&] { return run_bands(g, ba), 0; }; });

  TimesArgs ta;
  auto* times = app.add_subcommand("times", "closed-form recurrence time scales");
  times->add_option("--regime", ta.regime, "auto, undriven, delicate, robust or robust-harmonic");
  times->add_option("--lambda-grid", ta.lambda_grid, "start:stop:steps");
  times->callback([&] { action = [&] { return run_times(g, ta), 0; }; });

  PoincareArgs pa;
  auto* poinc = app.add_subcommand("poincare", "stroboscopic sections of the classical pendulum");
  poinc->add_option("--kappa", pa.kappa, "well depth");
  poinc->add_option("--lambda", pa.lambda, "drive strength");
  poinc->add_option("--seeds", pa.seeds, "'grid', NZxNP, or a z,p file");
  poinc->add_option("--periods", pa.periods, "drive periods");
  poinc->add_option("--steps-per-period", pa.steps_per_period, "integrator steps per period");
  poinc->add_option("--order", pa.order, "integrator order, 2 or 6");
  poinc->callback([&] { action = [&] { return run_poincare(g, pa), 0; }; });

  auto* evolve = app.add_subcommand("evolve", "split-step propagation of a Gaussian condensate");
  evolve->callback([&] { action = [&] { return run_evolve(g), 0; }; });

  AnalyzeArgs aa;
  auto* analyze = app.add_subcommand("analyze", "extract recurrence times from an autocorrelation CSV");
  analyze->add_option("kind", aa.kind, "input kind (autocorr)")->required();
  analyze->add_option("csv", aa.csv, "autocorrelation CSV")->required();
  analyze->add_option("--t-cl", aa.t_cl, "analytic classical period");
  analyze->add_option("--t-rev", aa.t_rev, "analytic revival time");
  analyze->add_option("--t-spr", aa.t_spr, "analytic super-revival time");
  analyze->add_option("--regime", aa.regime, "formula family used with --config");
  analyze->add_flag("--super", aa.super, "also extract the super-revival");
  analyze->callback([&] { action = [&] { return run_analyze(g, aa), 0; }; });

  SweepArgs sa;
  auto* sweep = app.add_subcommand("sweep", "time scales over a lambda grid");
  sweep->add_option("--lambda-grid", sa.lambda_grid, "start:stop:steps");
  sweep->add_flag("--simulate", sa.simulate, "also evolve and extract at each lambda");
  sweep->callback([&] { action = [&] { return run_sweep(g, sa), 0; }; });

  std::string recipe_name;
  auto* recipe = app.add_subcommand("recipe", "reproduce a figure analogue");
  recipe->add_option("name", recipe_name, "fig1 ... fig6")->required();
  recipe->callback([&] { action = [&] { return run_recipe(g, recipe_name); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : exit_code(ErrorKind::Validation);
  }
  try {
    return action();
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
