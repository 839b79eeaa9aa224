#include "latrev/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "latrev/error.hpp"
#include "latrev/parallel.hpp"

namespace latrev::analysis {
namespace {

double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

double refine(const std::vector<double>& t, const std::vector<double>& y, std::size_t i, double* value = nullptr) {
  const double ym = y[i - 1], y0 = y[i], yp = y[i + 1];
  const double denom = ym - 2.0 * y0 + yp;
  double shift = 0.0;
  if (denom < 0.0) shift = 0.5 * (ym - yp) / denom;
  shift = std::clamp(shift, -0.5, 0.5);
  if (value) *value = y0 - 0.25 * (ym - yp) * shift;
  const double h = shift >= 0.0 ? t[i + 1] - t[i] : t[i] - t[i - 1];
  return t[i] + shift * h;
}

EnvelopeEstimate envelope_peak(const AutocorrelationSeries& series, double window, const EnvelopeOptions& options) {
  const std::vector<double> env = moving_average(series.times, series.values, window);
  EnvelopeEstimate out;
  out.window = window;
  out.initial_envelope = env.front();
  std::size_t collapse = env.size();
  for (std::size_t i = 0; i < env.size(); ++i) {
    if (env[i] < options.collapse_fraction * out.initial_envelope) {
      collapse = i;
      break;
    }
  }
  if (collapse == env.size()) fail(ErrorKind::Extraction, "no revival structure: envelope never collapses");
  out.collapse_time = series.times[collapse];

  const auto [lo, hi] = std::minmax_element(env.begin(), env.end());
  const std::vector<Peak> peaks = find_peaks(series.times, env, options.relative_prominence * (*hi - *lo));
  for (const Peak& p : peaks) {
    if (p.index <= collapse) continue;
    out.time = p.time;
    out.peak_envelope = p.value;
    out.peak_index = p.index;
    return out;
  }
  fail(ErrorKind::Extraction, "no revival structure: no envelope maximum after the collapse");
}

}  // namespace

void validate(const AutocorrelationSeries& series) {
  if (series.times.size() != series.values.size()) fail(ErrorKind::InvalidInput, "times and values differ in length");
  if (series.times.size() < 3) fail(ErrorKind::InvalidInput, "series needs at least three samples");
  for (std::size_t i = 1; i < series.times.size(); ++i) {
    if (!(series.times[i] > series.times[i - 1])) fail(ErrorKind::InvalidInput, "times must be strictly ascending");
  }
  for (double v : series.values) {
    if (!(v >= 0.0)) fail(ErrorKind::InvalidInput, "autocorrelation values must be non-negative");
  }
}

std::vector<Peak> find_peaks(const std::vector<double>& times, const std::vector<double>& values,
                             double min_prominence) {
  std::vector<Peak> out;
  const std::size_t n = values.size();
  if (n < 3) return out;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double y = values[i];
    if (!(y > values[i - 1] && y >= values[i + 1])) continue;
    // Plateau: accept only its first sample.
    double left_min = y;
    for (std::size_t k = i; k-- > 0;) {
      if (values[k] > y) break;
      left_min = std::min(left_min, values[k]);
    }
    double right_min = y;
    for (std::size_t k = i + 1; k < n; ++k) {
      if (values[k] > y) break;
      right_min = std::min(right_min, values[k]);
    }
    const double prominence = y - std::max(left_min, right_min);
    if (prominence < min_prominence) continue;
    Peak p;
    p.index = i;
    p.time = refine(times, values, i, &p.value);
    p.prominence = prominence;
    out.push_back(p);
  }
  return out;
}

std::vector<double> moving_average(const std::vector<double>& times, const std::vector<double>& values,
                                   double window) {
  if (!(window > 0.0)) fail(ErrorKind::InvalidInput, "smoothing window must be positive");
  const std::size_t n = values.size();
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + values[i];
  std::vector<double> out(n);
  // The slack keeps samples exactly on the window edge inside regardless of
  // rounding, so the result does not change when the time axis is rescaled.
  const double half = 0.5 * window * (1.0 + 1e-9);
  for (std::size_t i = 0; i < n; ++i) {
    const auto lo = std::lower_bound(times.begin(), times.end(), times[i] - half) - times.begin();
    const auto hi = std::upper_bound(times.begin(), times.end(), times[i] + half) - times.begin();
    out[i] = (prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo);
  }
  return out;
}

PeriodEstimate extract_classical_period(const AutocorrelationSeries& series, const ClassicalOptions& options) {
  validate(series);
  if (options.peaks < 2) fail(ErrorKind::InvalidInput, "need at least two peaks for a period");
  const double threshold = options.relative_prominence * max_of(series.values);
  std::vector<Peak> peaks = find_peaks(series.times, series.values, threshold);
  if (peaks.size() < 3) {
    std::ostringstream os;
    os << "extraction failed: " << peaks.size() << " qualifying peaks, need 3";
    fail(ErrorKind::Extraction, os.str());
  }
  if (peaks.size() > static_cast<std::size_t>(options.peaks)) peaks.resize(static_cast<std::size_t>(options.peaks));
  // A gap much longer than the first spacing means the oscillation collapsed
  // in between; later maxima belong to the revival.
  const double first_gap = peaks[1].time - peaks[0].time;
  for (std::size_t i = 2; i < peaks.size(); ++i) {
    if (peaks[i].time - peaks[i - 1].time > options.max_gap_ratio * first_gap) {
      peaks.resize(i);
      break;
    }
  }
  if (peaks.size() < 3) {
    fail(ErrorKind::Extraction, "extraction failed: oscillation collapses before the third qualifying peak");
  }
  PeriodEstimate out;
  const double span = peaks.back().time - peaks.front().time;
  const double gaps = static_cast<double>(peaks.size() - 1);
  out.period = span / gaps;
  const double spacing = (series.times.back() - series.times.front()) / static_cast<double>(series.times.size() - 1);
  out.uncertainty = std::sqrt(2.0) * 0.5 * spacing / gaps;
  out.peaks = std::move(peaks);
  return out;
}

EnvelopeEstimate extract_revival_time(const AutocorrelationSeries& series, double t_cl_hint,
                                      const EnvelopeOptions& options) {
  validate(series);
  if (!(t_cl_hint > 0.0)) fail(ErrorKind::InvalidInput, "classical-period hint must be positive");
  return envelope_peak(series, options.window_factor * t_cl_hint, options);
}

EnvelopeEstimate extract_super_revival(const AutocorrelationSeries& series, double t_rev_hint,
                                       std::optional<double> t_spr_expected, const EnvelopeOptions& options) {
  validate(series);
  if (!(t_rev_hint > 0.0)) fail(ErrorKind::InvalidInput, "revival hint must be positive");
  const double window = options.window_factor * t_rev_hint;
  const double span = series.times.back() - series.times.front();
  double required = window;
  if (t_spr_expected) required = std::max(required, 1.2 * *t_spr_expected);
  if (span < required) {
    std::ostringstream os;
    os << "insufficient span: series covers " << span << ", need " << required;
    fail(ErrorKind::Extraction, os.str());
  }
  return envelope_peak(series, window, options);
}

RecurrenceReport compare(const AutocorrelationSeries& series, const resonance::TimeScales& analytic,
                         bool want_super, const CompareOptions& options) {
  RecurrenceReport r;
  r.analytic = analytic;
  auto rel = [](double x, double ref) { return std::abs(x - ref) / std::abs(ref); };
  try {
    PeriodEstimate p = extract_classical_period(series, options.classical);
    r.t_classical = p.period;
    r.err_classical = rel(p.period, analytic.t_classical);
    r.classical_detail = std::move(p);
  } catch (const Error& e) {
    r.diagnostics.emplace_back(std::string("classical: ") + e.what());
  }
  if (analytic.t_classical > 0.0) {
    try {
      const EnvelopeEstimate e = extract_revival_time(series, analytic.t_classical, options.envelope);
      r.t_revival = e.time;
      r.err_revival = rel(e.time, analytic.t_revival);
      r.revival_detail = e;
    } catch (const Error& e) {
      r.diagnostics.emplace_back(std::string("revival: ") + e.what());
    }
  }
  if (want_super && analytic.t_revival > 0.0) {
    try {
      const EnvelopeEstimate e = extract_super_revival(series, analytic.t_revival, std::nullopt, options.envelope);
      r.t_super_revival = e.time;
      r.err_super_revival = rel(e.time, analytic.t_super_revival);
      r.super_detail = e;
    } catch (const Error& e) {
      r.diagnostics.emplace_back(std::string("super-revival: ") + e.what());
    }
  }
  return r;
}

std::string to_json(const RecurrenceReport& report) {
  using nlohmann::json;
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  auto env = [](const EnvelopeEstimate& e) {
    return json{{"time", e.time},
                {"window", e.window},
                {"collapse_time", e.collapse_time},
                {"initial_envelope", e.initial_envelope},
                {"peak_envelope", e.peak_envelope},
                {"peak_index", e.peak_index}};
  };
  json j;
  j["extracted"] = {{"t_classical", opt(report.t_classical)},
                    {"t_revival", opt(report.t_revival)},
                    {"t_super_revival", opt(report.t_super_revival)}};
  j["analytic"] = {{"t_classical", report.analytic.t_classical},
                   {"t_revival", report.analytic.t_revival},
                   {"t_super_revival", report.analytic.t_super_revival},
                   {"regime_tag", resonance::to_string(report.analytic.regime_tag)},
                   {"unit", resonance::to_string(report.analytic.unit)},
                   {"validity_warnings", report.analytic.validity_warnings}};
  json rel = json::object();
  if (report.err_classical) rel["t_classical"] = *report.err_classical;
  if (report.err_revival) rel["t_revival"] = *report.err_revival;
  if (report.err_super_revival) rel["t_super_revival"] = *report.err_super_revival;
  j["relative_errors"] = rel;
  json diag;
  if (report.classical_detail) {
    json peaks = json::array();
    for (const Peak& p : report.classical_detail->peaks) {
      peaks.push_back({{"index", p.index}, {"time", p.time}, {"value", p.value}, {"prominence", p.prominence}});
    }
    diag["classical"] = {{"period", report.classical_detail->period},
                         {"uncertainty", report.classical_detail->uncertainty},
                         {"peaks", peaks}};
  }
  if (report.revival_detail) diag["revival"] = env(*report.revival_detail);
  if (report.super_detail) diag["super_revival"] = env(*report.super_detail);
  diag["messages"] = report.diagnostics;
  j["diagnostics"] = diag;
  return j.dump(2);
}

std::vector<SweepRow> sweep(const SweepOptions& options) {
  if (options.lambdas.empty()) fail(ErrorKind::InvalidInput, "empty lambda grid");
  std::vector<SweepRow> rows(options.lambdas.size());
  parallel_for(rows.size(), options.threads, [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.lambda = options.lambdas[i];
    try {
      ScaledParams params = options.base;
      params.lambda = row.lambda;
      const resonance::ResonanceContext ctx = resonance::build_context(params, options.context);
      row.q = ctx.q;
      row.beta = ctx.beta;
      row.warnings = ctx.warnings;
      auto cell = [](TimesCell& c, auto&& fn) {
        try {
          c.times = fn();
        } catch (const Error& e) {
          c.error = e.what();
        }
      };
      cell(row.delicate, [&] {
        const auto t0 = resonance::undriven_times(ctx.nbar, ctx.q0, ctx.regime);
        return resonance::delicate_times(ctx, t0);
      });
      cell(row.robust, [&] { return resonance::robust_times(ctx); });
      cell(row.robust_harmonic, [&] { return resonance::robust_times_harmonic(ctx, ctx.q0, ctx.lambda); });

      if (options.simulate) {
        const resonance::TimeScales* hint = nullptr;
        resonance::TimeScales converted;
        if (ctx.q >= 5.0 && row.robust.times) {
          hint = &*row.robust.times;
        } else if (row.delicate.times) {
          converted = resonance::to_drive_units(*row.delicate.times, ctx.kbar);
          hint = &converted;
        }
        const auto psi = quantum::init_gaussian(options.grid, options.z0, options.p0, options.delta_p, params.kbar);
        const auto rec = quantum::evolve(options.grid, psi, params, options.evolve);
        const auto series = quantum::autocorrelation(rec);
        try {
          row.sim_t_classical = extract_classical_period(series).period;
        } catch (const Error& e) {
          row.warnings.emplace_back(std::string("simulation classical: ") + e.what());
        }
        if (hint) {
          try {
            row.sim_t_revival = extract_revival_time(series, hint->t_classical).time;
          } catch (const Error& e) {
            row.warnings.emplace_back(std::string("simulation revival: ") + e.what());
          }
        }
      }
    } catch (const Error& e) {
      row.error = e.what();
    }
  });
  return rows;
}

std::vector<double> parse_grid(const std::string& spec) {
  double start = 0.0, stop = 0.0;
  long steps = 0;
  const char* p = spec.data();
  const char* end = p + spec.size();
  auto bad = [&] { fail(ErrorKind::Validation, "grid must be start:stop:steps, got '" + spec + "'"); };
  auto r1 = std::from_chars(p, end, start);
  if (r1.ec != std::errc() || r1.ptr == end || *r1.ptr != ':') bad();
  auto r2 = std::from_chars(r1.ptr + 1, end, stop);
  if (r2.ec != std::errc() || r2.ptr == end || *r2.ptr != ':') bad();
  auto r3 = std::from_chars(r2.ptr + 1, end, steps);
  if (r3.ec != std::errc() || r3.ptr != end || steps < 1) bad();
  std::vector<double> out(static_cast<std::size_t>(steps));
  for (long i = 0; i < steps; ++i) {
    out[i] = steps == 1 ? start : start + (stop - start) * static_cast<double>(i) / static_cast<double>(steps - 1);
  }
  return out;
}

}  // namespace latrev::analysis
