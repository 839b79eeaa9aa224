#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "latrev/analysis.hpp"
#include "latrev/classical.hpp"
#include "latrev/mathieu.hpp"
#include "latrev/quantum.hpp"
#include "latrev/resonance.hpp"
#include "latrev/series.hpp"

// CSV layouts read by the plotting scripts. Column names and order are part
// of the interface.
namespace latrev::artifacts {

inline const std::vector<std::string> kPoincareColumns{"seed_id", "period_index", "z", "p"};
inline const std::vector<std::string> kAutocorrColumns{"tau", "A2"};
inline const std::vector<std::string> kDensityColumns{"tau", "z", "rho"};
inline const std::vector<std::string> kSweepColumns{"lambda",          "q",          "beta",
                                                    "formula",         "t_classical", "t_revival",
                                                    "t_super_revival", "unit",        "sim_t_classical",
                                                    "sim_t_revival",   "error"};
inline const std::vector<std::string> kMathieuColumns{"nu", "q", "a"};
inline const std::vector<std::string> kTimesColumns{"lambda", "q", "t_cl", "t_rev", "t_spr", "warnings"};
inline const std::vector<std::string> kReportColumns{"quantity", "extracted", "analytic", "relative_error"};
inline const std::vector<std::string> kBandColumns{"n", "kappa", "energy_Er"};

void write_poincare(const std::filesystem::path& path, const classical::PoincareSection& section);
void write_autocorr(const std::filesystem::path& path, const AutocorrelationSeries& series);

// Keeps grid points with z in [z_min, z_max], every `stride`-th one.
struct DensityWindow {
  double z_min = -1e300;
  double z_max = 1e300;
  int stride = 1;
};
void write_density(const std::filesystem::path& path, const quantum::DensityMap& map, const DensityWindow& window = {});

// One row per λ and formula family. Failed cells leave the times empty and
// carry the error text.
void write_sweep(const std::filesystem::path& path, const std::vector<analysis::SweepRow>& rows);
void write_bands(const std::filesystem::path& path, const std::vector<mathieu::BandPoint>& bands);

struct MathieuRow {
  double nu = 0.0;
  double q = 0.0;
  double a = 0.0;
};
void write_mathieu(const std::filesystem::path& path, const std::vector<MathieuRow>& rows);

// One triple per λ, in drive units. A missing triple leaves the times empty
// and the reason goes to the warnings cell; warnings are joined with "; ".
struct TimesRow {
  double lambda = 0.0;
  double q = 0.0;
  std::optional<resonance::TimeScales> times;
  std::vector<std::string> warnings;
};
void write_times(const std::filesystem::path& path, const std::vector<TimesRow>& rows);

void write_report(const std::filesystem::path& path, const analysis::RecurrenceReport& report);

// Reads a two-column autocorrelation CSV written by write_autocorr.
AutocorrelationSeries read_autocorr(const std::filesystem::path& path);

nlohmann::json to_json(const resonance::TimeScales& times);

// Header row of a CSV file, split on commas.
std::vector<std::string> read_header(const std::filesystem::path& path);

}  // namespace latrev::artifacts
