#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace latrev::output {

// Shortest representation that parses back to the same double.
std::string format_double(double v);

// Streaming CSV writer. Text cells are quoted when they contain a comma,
// quote or newline.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  CsvWriter& operator<<(double v);
  CsvWriter& operator<<(long v);
  CsvWriter& operator<<(int v) { return *this << static_cast<long>(v); }
  CsvWriter& operator<<(std::string_view s);
  void end_row();
  void close();

  const std::filesystem::path& path() const { return path_; }

 private:
  void separator();

  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_ = 0;
  std::size_t cell_ = 0;
};

// Fields common to every sidecar: tool version, build description and the
// creation time.
nlohmann::json base_meta(std::string_view command);

// Writes <file>.meta.json next to `data_file` and returns its path.
std::filesystem::path write_meta(const std::filesystem::path& data_file, const nlohmann::json& meta);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

std::string sha256_file(const std::filesystem::path& path);

struct Assertion {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Collects output files and assertion outcomes and writes manifest.json.
class Manifest {
 public:
  explicit Manifest(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void add_file(const std::filesystem::path& file);
  void add_assertion(std::string name, bool passed, std::string detail = {});
  bool all_passed() const;
  const std::vector<Assertion>& assertions() const { return assertions_; }
  std::filesystem::path write(const nlohmann::json& extra = nlohmann::json::object()) const;

 private:
  std::filesystem::path dir_;
  std::vector<std::filesystem::path> files_;
  std::vector<Assertion> assertions_;
};

// Creates the directory, refusing to reuse one that holds a run lock. The
// lock is released when the guard goes out of scope.
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path dir);
  ~OutputDir();
  OutputDir(const OutputDir&) = delete;
  OutputDir& operator=(const OutputDir&) = delete;

  const std::filesystem::path& path() const { return dir_; }
  std::filesystem::path operator/(const std::string& name) const { return dir_ / name; }

 private:
  std::filesystem::path dir_;
  std::filesystem::path lock_;
};

}  // namespace latrev::output
