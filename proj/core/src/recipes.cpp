#include "latrev/recipes.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "latrev/analysis.hpp"
#include "latrev/artifacts.hpp"
#include "latrev/classical.hpp"
#include "latrev/error.hpp"
#include "latrev/parallel.hpp"
#include "latrev/quantum.hpp"
#include "latrev/resonance.hpp"

namespace latrev::recipes {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using constants::kPi;

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::string label_value(double v) {
  std::string s = num(v);
  for (char& c : s) {
    if (c == '.') c = 'p';
  }
  return s;
}

config::RunConfig parse(const json& doc) { return config::parse_config(doc); }

json quantum_doc(double kbar, const json& depth, double lambda, double delta_p, int periods) {
  json scaled = {{"kbar", kbar}, {"lambda", lambda}};
  scaled.update(depth);
  return {{"scaled", scaled},
          {"grid", {{"cells", 32}, {"points", 2048}}},
          {"run", {{"periods", periods}, {"steps_per_period", 1000}, {"snapshots_per_period", 16}}},
          {"initial", {{"z0", kPi / 2.0}, {"p0", 0.0}, {"delta_p", delta_p}}}};
}

FigureRecipe fig1(bool full) {
  FigureRecipe r{"fig1", "Poincare sections of the classical pendulum for three drive strengths and two well depths", {},
                 {"energy conserved to 1e-8 on the undriven sections",
                  "stable period-1 stroboscopic fixed point at lambda = 0.5",
                  "bounded-libration fraction at lambda = 1.5 below its value at lambda = 0.5"}};
  const int periods = full ? 2000 : 300;
  for (double kappa : {2.0, 16.0}) {
    for (double lambda : {0.0, 0.5, 1.5}) {
      const json doc = {{"scaled", {{"kbar", 0.5}, {"Vprime", kappa}, {"lambda", lambda}}},
                        {"classical",
                         {{"kappa", kappa},
                          {"lambda", lambda},
                          {"steps_per_period", 1000},
                          {"order", 6},
                          {"periods", periods},
                          {"seeds", {{"nz", 5}, {"np", 4}}}}}};
      r.panels.push_back({"k" + label_value(kappa) + "_l" + label_value(lambda), parse(doc)});
    }
  }
  return r;
}

FigureRecipe fig2(bool) {
  FigureRecipe r{"fig2", "Recurrence time scales against drive strength from the closed-form expressions", {},
                 {"weak drive: classical period increases with lambda", "weak drive: revival time decreases",
                  "strong drive: classical period decreases", "strong drive: super-revival time increases"}};
  struct Lattice {
    const char* name;
    double vprime;
    int nbar;
    const char* regime;
  };
  for (const Lattice& lat : {Lattice{"deep", 16.0, 0, "deep"}, Lattice{"shallow", 2.0, 2, "shallow"}}) {
    json doc = {{"scaled", {{"kbar", 0.5}, {"Vprime", lat.vprime}, {"lambda", 0.0}}},
                {"resonance", {{"N", 1}, {"nbar", lat.nbar}, {"l", 0}, {"regime", lat.regime}}}};
    const config::RunConfig base = parse(doc);
    const double beta0 = resonance::build_context(base.scaled, base.resonance).beta0;
    // Weak drive spans q in [0.05, 1], strong drive q in [40, 400].
    doc["lambda_grid"] = num(0.05 * beta0) + ":" + num(beta0) + ":40";
    r.panels.push_back({std::string(lat.name) + "_weak", parse(doc)});
    doc["lambda_grid"] = num(40.0 * beta0) + ":" + num(400.0 * beta0) + ":40";
    r.panels.push_back({std::string(lat.name) + "_strong", parse(doc)});
  }
  return r;
}

FigureRecipe fig3(bool full) {
  const int periods = full ? 60 : 20;
  FigureRecipe r{"fig3", "Spatio-temporal density in a shallow lattice, undriven, driven, and driven with mean field", {},
                 {"norm conserved", "density spreads to neighbouring wells",
                  "mean-field run differs from the linear driven run"}};
  r.panels.push_back({"a", parse(quantum_doc(1.0, {{"Vprime", 2.0}}, 0.0, 0.5, periods))});
  r.panels.push_back({"b", parse(quantum_doc(1.0, {{"Vprime", 2.0}}, 0.2, 0.5, periods))});
  // G is not given for the interacting panel; 17/12 screens V0 = 2 down to V' = 0.3.
  json c = quantum_doc(1.0, {{"V0", 2.0}, {"G", 17.0 / 12.0}}, 0.2, 0.5, periods);
  c["run"]["with_interaction"] = true;
  r.panels.push_back({"c", parse(c)});
  return r;
}

FigureRecipe fig4(bool full) {
  const int periods = full ? 100 : 20;
  FigureRecipe r{"fig4", "Spatio-temporal density in a deep lattice without and with strong drive", {},
                 {"norm conserved", "driven revival time within 10% of the strong-drive expression"}};
  r.panels.push_back({"a", parse(quantum_doc(0.16, {{"Vprime", 16.0}}, 0.0, 0.1, periods))});
  r.panels.push_back({"b", parse(quantum_doc(0.16, {{"Vprime", 16.0}}, 3.0, 0.1, periods))});
  return r;
}

FigureRecipe fig56(const std::string& name, double lambda, bool full) {
  const int periods = full ? 400 : 40;
  FigureRecipe r{name, "Autocorrelation of a Gaussian condensate in a driven deep lattice", {}, {}};
  r.checks = {"classical period within 10% of the strong-drive expression",
              "revival time within 10% of the strong-drive expression"};
  if (name == "fig6") r.checks.emplace_back("super-revival time within 20% of the strong-drive expression");
  json doc = quantum_doc(0.5, {{"Vprime", 16.0}}, lambda, 0.5, periods);
  doc["run"]["snapshots_per_period"] = 4;
  r.panels.push_back({"main", parse(doc)});
  return r;
}

struct Context {
  fs::path dir;
  output::Manifest manifest;
  RecipeOptions options;
  std::string command;
};

json sidecar(const Context& ctx, const config::RunConfig& cfg, const std::vector<std::string>& columns) {
  json meta = output::base_meta(ctx.command);
  meta["config"] = config::to_input_json(cfg);
  meta["derived"] = config::to_json(cfg);
  meta["columns"] = columns;
  meta["threads"] = ctx.options.threads;
  meta["full"] = ctx.options.full;
  return meta;
}

void emit(Context& ctx, const fs::path& file, json meta) {
  ctx.manifest.add_file(file);
  ctx.manifest.add_file(output::write_meta(file, meta));
}

// Analytic triple in drive units for a quantum panel, chosen as in
// resonance::evaluate unless the strong-drive expressions are forced.
struct Analytic {
  std::optional<resonance::TimeScales> times;
  std::string error;
};

Analytic analytic_times(const config::RunConfig& cfg, bool force_robust = false) {
  Analytic a;
  try {
    const resonance::ResonanceContext rc = resonance::build_context(cfg.scaled, cfg.resonance);
    a.times = resonance::evaluate(rc, force_robust ? resonance::Formula::Robust : resonance::Formula::Auto);
  } catch (const Error& e) {
    a.error = e.what();
  }
  return a;
}

json analytic_json(const Analytic& a) {
  if (a.times) return artifacts::to_json(*a.times);
  return {{"error", a.error}};
}

struct QuantumRun {
  quantum::EvolutionRecord record;
  AutocorrelationSeries series;
  double wall_seconds = 0.0;
};

std::vector<QuantumRun> run_panels(const std::vector<Panel>& panels, unsigned threads) {
  std::vector<QuantumRun> runs(panels.size());
  parallel_for(panels.size(), threads, [&](std::size_t i) {
    const config::RunConfig& cfg = panels[i].config;
    const auto start = std::chrono::steady_clock::now();
    const auto psi = quantum::init_gaussian(cfg.grid, cfg.initial.z0, cfg.initial.p0, cfg.initial.delta_p,
                                            cfg.scaled.kbar);
    quantum::EvolveOptions opt;
    opt.tau_end = cfg.run.tau_end;
    opt.dt = cfg.run.dt;
    opt.snapshot_stride = cfg.run.snapshot_stride;
    opt.with_interaction = cfg.run.with_interaction;
    runs[i].record = quantum::evolve(cfg.grid, psi, cfg.scaled, opt);
    runs[i].series = quantum::autocorrelation(runs[i].record);
    runs[i].wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  });
  return runs;
}

void write_quantum_panel(Context& ctx, const std::string& suffix, const config::RunConfig& cfg, const QuantumRun& run,
                         const Analytic& analytic, const artifacts::DensityWindow& window) {
  const fs::path ac = ctx.dir / ("autocorr_" + suffix + ".csv");
  artifacts::write_autocorr(ac, run.series);
  json meta = sidecar(ctx, cfg, artifacts::kAutocorrColumns);
  meta["analytic"] = analytic_json(analytic);
  meta["wall_time_s"] = run.wall_seconds;
  meta["max_norm_drift"] = run.record.max_norm_drift;
  emit(ctx, ac, meta);
  if (!run.record.densities.empty()) {
    const fs::path dens = ctx.dir / ("density_" + suffix + ".csv");
    artifacts::write_density(dens, quantum::density_map(run.record), window);
    json dm = sidecar(ctx, cfg, artifacts::kDensityColumns);
    dm["window"] = {{"z_min", window.z_min}, {"z_max", window.z_max}, {"stride", window.stride}};
    dm["wall_time_s"] = run.wall_seconds;
    emit(ctx, dens, dm);
  }
}

// Largest fraction of the norm found outside |z - z0| <= halfwidth over all
// snapshots.
double max_mass_outside(const quantum::EvolutionRecord& rec, double z0, double halfwidth) {
  const std::vector<double> z = rec.grid.positions();
  double worst = 0.0;
  for (const std::vector<double>& rho : rec.densities) {
    double inside = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) {
      if (std::abs(z[j] - z0) <= halfwidth) inside += rho[j];
    }
    worst = std::max(worst, 1.0 - inside * rec.grid.dz());
  }
  return worst;
}

// Snapshot-averaged ∫|ρ₁ - ρ₂| dz.
double mean_density_distance(const quantum::EvolutionRecord& a, const quantum::EvolutionRecord& b) {
  const std::size_t n = std::min(a.densities.size(), b.densities.size());
  if (n == 0) return 0.0;
  double total = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    double d = 0.0;
    for (std::size_t j = 0; j < a.densities[s].size(); ++j) d += std::abs(a.densities[s][j] - b.densities[s][j]);
    total += d * a.grid.dz();
  }
  return total / static_cast<double>(n);
}

void check_norm(Context& ctx, const std::string& label, const QuantumRun& run) {
  const double drift = run.record.max_norm_drift;
  ctx.manifest.add_assertion("norm_" + label, drift < 1e-10, "max norm drift " + num(drift) + " (limit 1e-10)");
}

void within(Context& ctx, const std::string& name, const std::optional<double>& extracted, double analytic,
            double tol) {
  if (!extracted) {
    ctx.manifest.add_assertion(name, false, "no value extracted from the simulation");
    return;
  }
  const double err = std::abs(*extracted - analytic) / std::abs(analytic);
  ctx.manifest.add_assertion(name, err <= tol,
                             "extracted " + num(*extracted) + ", expected " + num(analytic) + ", relative error " +
                                 num(err) + " (limit " + num(tol) + ")");
}

void run_fig1(Context& ctx, const FigureRecipe& recipe) {
  struct Row {
    double kappa = 0.0, lambda = 0.0, energy_error = 0.0, fraction = 0.0;
    std::optional<classical::FixedPoint> fixed;
    std::string fixed_error;
  };
  std::vector<Row> rows;
  for (const Panel& panel : recipe.panels) {
    const config::RunConfig& cfg = panel.config;
    const classical::ClassicalParams& p = cfg.classical.params;
    const auto seeds = classical::seed_grid(cfg.classical.seeds_z, cfg.classical.seeds_p, p.kappa);
    const auto section = classical::poincare(seeds, p, cfg.classical.periods, ctx.options.threads);
    const fs::path file = ctx.dir / ("poincare_" + panel.label + ".csv");
    artifacts::write_poincare(file, section);
    Row row;
    row.kappa = p.kappa;
    row.lambda = p.lambda;
    if (p.lambda == 0.0) {
      for (const classical::PoincareSample& s : section.samples) {
        const double e0 = classical::energy(seeds[static_cast<std::size_t>(s.seed_id)], p.kappa);
        row.energy_error = std::max(row.energy_error, std::abs(classical::energy({s.z, s.p}, p.kappa) - e0));
      }
    } else {
      try {
        row.fixed = classical::resonance_fixed_point(p);
      } catch (const Error& e) {
        row.fixed_error = e.what();
      }
    }
    row.fraction = classical::bounded_libration_fraction(seeds, p, cfg.classical.periods, ctx.options.threads);
    json meta = sidecar(ctx, cfg, artifacts::kPoincareColumns);
    meta["seeds"] = json::array();
    for (const auto& s : seeds) meta["seeds"].push_back({s.z, s.p});
    meta["bounded_libration_fraction"] = row.fraction;
    if (row.fixed) {
      meta["fixed_point"] = {{"z", row.fixed->x.z},
                             {"p", row.fixed->x.p},
                             {"residual", row.fixed->residual},
                             {"trace", row.fixed->trace}};
    }
    emit(ctx, file, meta);
    rows.push_back(std::move(row));
  }
  auto find = [&](double kappa, double lambda) -> const Row& {
    for (const Row& r : rows) {
      if (r.kappa == kappa && r.lambda == lambda) return r;
    }
    fail(ErrorKind::Assertion, "missing fig1 panel");
  };
  for (double kappa : {2.0, 16.0}) {
    const std::string k = label_value(kappa);
    const Row& r0 = find(kappa, 0.0);
    ctx.manifest.add_assertion("energy_conservation_k" + k, r0.energy_error < 1e-8,
                               "max |H - H0| = " + num(r0.energy_error) + " (limit 1e-8)");
    const Row& r05 = find(kappa, 0.5);
    if (r05.fixed) {
      ctx.manifest.add_assertion("fixed_point_k" + k, r05.fixed->stable() && r05.fixed->residual < 1e-8,
                                 "z = " + num(r05.fixed->x.z) + ", p = " + num(r05.fixed->x.p) + ", residual " +
                                     num(r05.fixed->residual) + ", trace " + num(r05.fixed->trace));
    } else {
      ctx.manifest.add_assertion("fixed_point_k" + k, false, r05.fixed_error);
    }
    const Row& r15 = find(kappa, 1.5);
    ctx.manifest.add_assertion("libration_trend_k" + k, r15.fraction < r05.fraction,
                               "bounded fraction " + num(r05.fraction) + " at lambda 0.5, " + num(r15.fraction) +
                                   " at lambda 1.5");
  }
}

bool monotone(const std::vector<double>& v, int sign) {
  if (v.size() < 2) return false;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(sign * (v[i] - v[i - 1]) > 0.0)) return false;
  }
  return true;
}

void run_fig2(Context& ctx, const FigureRecipe& recipe) {
  for (const Panel& panel : recipe.panels) {
    const config::RunConfig& cfg = panel.config;
    analysis::SweepOptions opt;
    opt.lambdas = analysis::parse_grid(*cfg.lambda_grid);
    opt.base = cfg.scaled;
    opt.context = cfg.resonance;
    opt.threads = ctx.options.threads;
    const auto rows = analysis::sweep(opt);
    const fs::path file = ctx.dir / ("sweep_" + panel.label + ".csv");
    artifacts::write_sweep(file, rows);
    emit(ctx, file, sidecar(ctx, cfg, artifacts::kSweepColumns));

    const bool weak = panel.label.ends_with("_weak");
    std::vector<double> a, b;
    std::string missing;
    for (const analysis::SweepRow& row : rows) {
      const analysis::TimesCell& cell = weak ? row.delicate : row.robust;
      if (!cell.times) {
        missing = "lambda " + num(row.lambda) + ": " + (row.error.empty() ? cell.error : row.error);
        break;
      }
      a.push_back(cell.times->t_classical);
      b.push_back(weak ? cell.times->t_revival : cell.times->t_super_revival);
    }
    const std::string grid = " over lambda " + *cfg.lambda_grid;
    if (weak) {
      ctx.manifest.add_assertion(panel.label + "_t_classical_increasing", missing.empty() && monotone(a, +1),
                                 missing.empty() ? "weak-drive classical period" + grid : missing);
      ctx.manifest.add_assertion(panel.label + "_t_revival_decreasing", missing.empty() && monotone(b, -1),
                                 missing.empty() ? "weak-drive revival time" + grid : missing);
    } else {
      ctx.manifest.add_assertion(panel.label + "_t_classical_decreasing", missing.empty() && monotone(a, -1),
                                 missing.empty() ? "strong-drive classical period" + grid : missing);
      ctx.manifest.add_assertion(panel.label + "_t_super_revival_increasing", missing.empty() && monotone(b, +1),
                                 missing.empty() ? "strong-drive super-revival time" + grid : missing);
    }
  }
}

void run_fig3(Context& ctx, const FigureRecipe& recipe) {
  const auto runs = run_panels(recipe.panels, ctx.options.threads);
  const artifacts::DensityWindow window{kPi / 2.0 - 4.0 * kPi, kPi / 2.0 + 4.0 * kPi, 4};
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const Panel& panel = recipe.panels[i];
    write_quantum_panel(ctx, panel.label, panel.config, runs[i], analytic_times(panel.config), window);
    check_norm(ctx, panel.label, runs[i]);
  }
  for (std::size_t i : {0u, 1u}) {
    const double out = max_mass_outside(runs[i].record, kPi / 2.0, kPi / 2.0);
    ctx.manifest.add_assertion("spreading_" + recipe.panels[i].label, out > 0.5,
                               "largest norm fraction outside the initial well " + num(out) + " (needs > 0.5)");
  }
  const double d = mean_density_distance(runs[1].record, runs[2].record);
  ctx.manifest.add_assertion("interaction_changes_pattern", d > 0.1,
                             "mean L1 distance between panels b and c " + num(d) + " (needs > 0.1)");
}

void run_fig4(Context& ctx, const FigureRecipe& recipe) {
  const auto runs = run_panels(recipe.panels, ctx.options.threads);
  const artifacts::DensityWindow window{kPi / 2.0 - 6.0 * kPi, kPi / 2.0 + 6.0 * kPi, 4};
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const Panel& panel = recipe.panels[i];
    const Analytic analytic = analytic_times(panel.config, i == 1);
    write_quantum_panel(ctx, panel.label, panel.config, runs[i], analytic, window);
    check_norm(ctx, panel.label, runs[i]);
    if (i == 1) {
      if (!analytic.times) {
        ctx.manifest.add_assertion("revival_b", false, "strong-drive expression unavailable: " + analytic.error);
        continue;
      }
      const analysis::RecurrenceReport rep = analysis::compare(runs[i].series, *analytic.times);
      const fs::path file = ctx.dir / "report_b.json";
      output::write_json(file, json::parse(analysis::to_json(rep)));
      ctx.manifest.add_file(file);
      within(ctx, "revival_b", rep.t_revival, analytic.times->t_revival, 0.10);
    }
  }
}

void run_fig56(Context& ctx, const FigureRecipe& recipe) {
  const bool super = recipe.name == "fig6";
  const auto runs = run_panels(recipe.panels, ctx.options.threads);
  const Panel& panel = recipe.panels.front();
  const Analytic analytic = analytic_times(panel.config, true);
  const artifacts::DensityWindow window{kPi / 2.0 - 4.0 * kPi, kPi / 2.0 + 4.0 * kPi, 4};
  write_quantum_panel(ctx, panel.label, panel.config, runs.front(), analytic, window);
  check_norm(ctx, panel.label, runs.front());

  const std::vector<std::string> names = super ? std::vector<std::string>{"t_classical", "t_revival", "t_super_revival"}
                                               : std::vector<std::string>{"t_classical", "t_revival"};
  if (!analytic.times) {
    for (const std::string& n : names) {
      ctx.manifest.add_assertion(n, false, "strong-drive expression unavailable: " + analytic.error);
    }
    // Record what the simulation shows even without a reference.
    resonance::TimeScales none;
    const analysis::RecurrenceReport rep = analysis::compare(runs.front().series, none, false);
    const fs::path file = ctx.dir / "report.json";
    output::write_json(file, json::parse(analysis::to_json(rep)));
    ctx.manifest.add_file(file);
    return;
  }
  const analysis::RecurrenceReport rep = analysis::compare(runs.front().series, *analytic.times, super);
  const fs::path file = ctx.dir / "report.json";
  output::write_json(file, json::parse(analysis::to_json(rep)));
  ctx.manifest.add_file(file);
  within(ctx, "t_classical", rep.t_classical, analytic.times->t_classical, 0.10);
  within(ctx, "t_revival", rep.t_revival, analytic.times->t_revival, 0.10);
  if (super) within(ctx, "t_super_revival", rep.t_super_revival, analytic.times->t_super_revival, 0.20);
}

}  // namespace

const std::vector<std::string>& recipe_names() {
  static const std::vector<std::string> names{"fig1", "fig2", "fig3", "fig4", "fig5", "fig6"};
  return names;
}

FigureRecipe make_recipe(const std::string& name, bool full) {
  if (name == "fig1") return fig1(full);
  if (name == "fig2") return fig2(full);
  if (name == "fig3") return fig3(full);
  if (name == "fig4") return fig4(full);
  if (name == "fig5") return fig56(name, 0.5, full);
  if (name == "fig6") return fig56(name, 1.5, full);
  std::string list;
  for (const std::string& n : recipe_names()) list += (list.empty() ? "" : ", ") + n;
  fail(ErrorKind::InvalidInput, "unknown recipe '" + name + "'; available: " + list);
}

RecipeResult run_recipe(const std::string& name, const RecipeOptions& options) {
  const FigureRecipe recipe = make_recipe(name, options.full);
  const output::OutputDir dir(options.out_dir);
  Context ctx{dir.path(), output::Manifest(dir.path()), options, "recipe " + name};
  const auto start = std::chrono::steady_clock::now();
  if (name == "fig1") run_fig1(ctx, recipe);
  else if (name == "fig2") run_fig2(ctx, recipe);
  else if (name == "fig3") run_fig3(ctx, recipe);
  else if (name == "fig4") run_fig4(ctx, recipe);
  else run_fig56(ctx, recipe);

  json extra = output::base_meta(ctx.command);
  extra["recipe"] = recipe.name;
  extra["summary"] = recipe.summary;
  extra["checks"] = recipe.checks;
  extra["full"] = options.full;
  extra["threads"] = options.threads;
  extra["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  RecipeResult result;
  result.name = name;
  result.manifest = ctx.manifest.write(extra);
  result.assertions = ctx.manifest.assertions();
  result.passed = ctx.manifest.all_passed();
  return result;
}

}  // namespace latrev::recipes
