#include "latrev/artifacts.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "latrev/error.hpp"
#include "latrev/output.hpp"

namespace latrev::artifacts {
namespace fs = std::filesystem;
using output::CsvWriter;

void write_poincare(const fs::path& path, const classical::PoincareSection& section) {
  CsvWriter csv(path, kPoincareColumns);
  for (const classical::PoincareSample& s : section.samples) {
    csv << s.seed_id << s.period_index << s.z << s.p;
    csv.end_row();
  }
  csv.close();
}

void write_autocorr(const fs::path& path, const AutocorrelationSeries& series) {
  CsvWriter csv(path, kAutocorrColumns);
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    csv << series.times[i] << series.values[i];
    csv.end_row();
  }
  csv.close();
}

void write_density(const fs::path& path, const quantum::DensityMap& map, const DensityWindow& window) {
  if (window.stride < 1) fail(ErrorKind::InvalidInput, "density stride must be positive");
  CsvWriter csv(path, kDensityColumns);
  for (Eigen::Index r = 0; r < map.rho.rows(); ++r) {
    for (std::size_t j = 0; j < map.z.size(); j += static_cast<std::size_t>(window.stride)) {
      if (map.z[j] < window.z_min || map.z[j] > window.z_max) continue;
      csv << map.tau[static_cast<std::size_t>(r)] << map.z[j] << map.rho(r, static_cast<Eigen::Index>(j));
      csv.end_row();
    }
  }
  csv.close();
}

void write_sweep(const fs::path& path, const std::vector<analysis::SweepRow>& rows) {
  CsvWriter csv(path, kSweepColumns);
  auto opt = [&](const std::optional<double>& v) {
    if (v) csv << *v;
    else csv << std::string_view();
  };
  for (const analysis::SweepRow& row : rows) {
    const std::pair<const char*, const analysis::TimesCell*> cells[] = {
        {"delicate", &row.delicate}, {"robust", &row.robust}, {"robust_harmonic", &row.robust_harmonic}};
    for (const auto& [name, cell] : cells) {
      csv << row.lambda << row.q << row.beta << std::string_view(name);
      if (cell->times) {
        csv << cell->times->t_classical << cell->times->t_revival << cell->times->t_super_revival
            << std::string_view(resonance::to_string(cell->times->unit));
      } else {
        csv << std::string_view() << std::string_view() << std::string_view() << std::string_view();
      }
      opt(row.sim_t_classical);
      opt(row.sim_t_revival);
      csv << std::string_view(row.error.empty() ? cell->error : row.error);
      csv.end_row();
    }
  }
  csv.close();
}

void write_bands(const fs::path& path, const std::vector<mathieu::BandPoint>& bands) {
  CsvWriter csv(path, kBandColumns);
  for (const mathieu::BandPoint& b : bands) {
    csv << b.band_index << b.quasimomentum << b.energy;
    csv.end_row();
  }
  csv.close();
}

void write_mathieu(const fs::path& path, const std::vector<MathieuRow>& rows) {
  CsvWriter csv(path, kMathieuColumns);
  for (const MathieuRow& r : rows) {
    csv << r.nu << r.q << r.a;
    csv.end_row();
  }
  csv.close();
}

namespace {
std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const std::string& p : parts) out += (out.empty() ? "" : "; ") + p;
  return out;
}
}  // namespace

void write_times(const fs::path& path, const std::vector<TimesRow>& rows) {
  CsvWriter csv(path, kTimesColumns);
  for (const TimesRow& r : rows) {
    csv << r.lambda << r.q;
    if (r.times) {
      csv << r.times->t_classical << r.times->t_revival << r.times->t_super_revival;
    } else {
      csv << std::string_view() << std::string_view() << std::string_view();
    }
    csv << std::string_view(join(r.warnings));
    csv.end_row();
  }
  csv.close();
}

void write_report(const fs::path& path, const analysis::RecurrenceReport& report) {
  CsvWriter csv(path, kReportColumns);
  auto row = [&](std::string_view name, const std::optional<double>& got, double expected,
                 const std::optional<double>& err) {
    csv << name;
    if (got) csv << *got;
    else csv << std::string_view();
    csv << expected;
    if (err) csv << *err;
    else csv << std::string_view();
    csv.end_row();
  };
  row("t_classical", report.t_classical, report.analytic.t_classical, report.err_classical);
  row("t_revival", report.t_revival, report.analytic.t_revival, report.err_revival);
  row("t_super_revival", report.t_super_revival, report.analytic.t_super_revival, report.err_super_revival);
  csv.close();
}

AutocorrelationSeries read_autocorr(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != "tau,A2") fail(ErrorKind::Validation, path.string() + ": expected header 'tau,A2'");
  AutocorrelationSeries s;
  s.source = path.string();
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    double t = 0.0, v = 0.0;
    const char* b = line.data();
    const char* e = b + line.size();
    const auto r1 = comma == std::string::npos ? std::from_chars_result{b, std::errc::invalid_argument}
                                               : std::from_chars(b, b + comma, t);
    const auto r2 = std::from_chars(b + std::min(comma + 1, line.size()), e, v);
    if (r1.ec != std::errc() || r2.ec != std::errc() || r2.ptr != e) {
      fail(ErrorKind::Validation, path.string() + ":" + std::to_string(lineno) + ": malformed row");
    }
    s.times.push_back(t);
    s.values.push_back(v);
  }
  analysis::validate(s);
  return s;
}

nlohmann::json to_json(const resonance::TimeScales& t) {
  return {{"t_classical", t.t_classical},
          {"t_revival", t.t_revival},
          {"t_super_revival", t.t_super_revival},
          {"regime_tag", resonance::to_string(t.regime_tag)},
          {"unit", resonance::to_string(t.unit)},
          {"validity_warnings", t.validity_warnings}};
}

std::vector<std::string> read_header(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace latrev::artifacts
