#pragma once

#include <optional>
#include <string>
#include <vector>

#include "latrev/quantum.hpp"
#include "latrev/resonance.hpp"
#include "latrev/series.hpp"
#include "latrev/units.hpp"

namespace latrev::analysis {

void validate(const AutocorrelationSeries& series);

struct Peak {
  std::size_t index = 0;
  double time = 0.0;        // parabola-refined
  double value = 0.0;
  double prominence = 0.0;
};

// Interior local maxima with topographic prominence >= min_prominence.
std::vector<Peak> find_peaks(const std::vector<double>& times, const std::vector<double>& values,
                             double min_prominence);

// Centred moving average over a window of the given duration; the window is
// truncated at the ends of the series.
std::vector<double> moving_average(const std::vector<double>& times, const std::vector<double>& values,
                                   double window);

struct PeriodEstimate {
  double period = 0.0;
  double uncertainty = 0.0;
  std::vector<Peak> peaks;
};

struct ClassicalOptions {
  int peaks = 5;                     // K
  double relative_prominence = 0.1;  // of the series maximum
  double max_gap_ratio = 1.5;        // stop at a spacing this much above the first
};

// Mean spacing of the first K qualifying maxima, cut at the first spacing
// that exceeds max_gap_ratio times the first one.
PeriodEstimate extract_classical_period(const AutocorrelationSeries& series, const ClassicalOptions& options = {});

struct EnvelopeEstimate {
  double time = 0.0;
  double window = 0.0;
  double collapse_time = 0.0;
  double initial_envelope = 0.0;
  double peak_envelope = 0.0;
  std::size_t peak_index = 0;
};

struct EnvelopeOptions {
  double window_factor = 3.0;        // window = factor × hint
  double collapse_fraction = 0.5;
  double relative_prominence = 0.1;  // of the envelope range
};

// First envelope maximum after the envelope has collapsed below half its
// starting value.
EnvelopeEstimate extract_revival_time(const AutocorrelationSeries& series, double t_cl_hint,
                                      const EnvelopeOptions& options = {});

// Same procedure one level up, windowed on the revival time. When a
// super-revival estimate is given the series must span 1.2 times it.
EnvelopeEstimate extract_super_revival(const AutocorrelationSeries& series, double t_rev_hint,
                                       std::optional<double> t_spr_expected = std::nullopt,
                                       const EnvelopeOptions& options = {});

struct RecurrenceReport {
  std::optional<double> t_classical;
  std::optional<double> t_revival;
  std::optional<double> t_super_revival;
  resonance::TimeScales analytic;
  std::optional<double> err_classical;
  std::optional<double> err_revival;
  std::optional<double> err_super_revival;
  std::optional<PeriodEstimate> classical_detail;
  std::optional<EnvelopeEstimate> revival_detail;
  std::optional<EnvelopeEstimate> super_detail;
  std::vector<std::string> diagnostics;
};

// Runs the extractors whose hints are available in `analytic` and fills in
// relative errors |extracted − analytic| / analytic. Extraction failures are
// recorded as diagnostics.
struct CompareOptions {
  ClassicalOptions classical;
  EnvelopeOptions envelope;
};

RecurrenceReport compare(const AutocorrelationSeries& series, const resonance::TimeScales& analytic,
                         bool want_super = false, const CompareOptions& options = {});

std::string to_json(const RecurrenceReport& report);

struct SweepOptions {
  std::vector<double> lambdas;
  ScaledParams base;
  resonance::ContextOptions context;
  bool simulate = false;
  quantum::Grid grid;
  quantum::EvolveOptions evolve;
  double z0 = constants::kPi / 2.0;
  double p0 = 0.0;
  double delta_p = 0.5;
  unsigned threads = 0;
};

struct TimesCell {
  std::optional<resonance::TimeScales> times;
  std::string error;
};

struct SweepRow {
  double lambda = 0.0;
  double q = 0.0;
  double beta = 0.0;
  TimesCell delicate;
  TimesCell robust;
  TimesCell robust_harmonic;
  std::optional<double> sim_t_classical;
  std::optional<double> sim_t_revival;
  std::vector<std::string> warnings;
  std::string error;  // context construction failure
};

std::vector<SweepRow> sweep(const SweepOptions& options);

// start:stop:steps, inclusive of both ends.
std::vector<double> parse_grid(const std::string& spec);

}  // namespace latrev::analysis
