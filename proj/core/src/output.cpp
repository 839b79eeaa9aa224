#include "latrev/output.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <iomanip>
#include <memory>
#include <sstream>

#include <openssl/evp.h>

#include "latrev/error.hpp"
#include "latrev/version.hpp"

namespace latrev::output {
namespace fs = std::filesystem;

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), r.ptr);
}

CsvWriter::CsvWriter(const fs::path& path, const std::vector<std::string>& header)
    : path_(path), columns_(header.size()) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  out_.open(path, std::ios::binary | std::ios::trunc);
  if (!out_) fail(ErrorKind::Io, "cannot write " + path.string());
  for (const std::string& h : header) *this << std::string_view(h);
  end_row();
}

void CsvWriter::separator() {
  if (cell_++ > 0) out_ << ',';
}

CsvWriter& CsvWriter::operator<<(double v) {
  separator();
  out_ << format_double(v);
  return *this;
}

CsvWriter& CsvWriter::operator<<(long v) {
  separator();
  out_ << v;
  return *this;
}

CsvWriter& CsvWriter::operator<<(std::string_view s) {
  separator();
  if (s.find_first_of(",\"\n") == std::string_view::npos) {
    out_ << s;
  } else {
    out_ << '"';
    for (char c : s) {
      if (c == '"') out_ << '"';
      out_ << c;
    }
    out_ << '"';
  }
  return *this;
}

void CsvWriter::end_row() {
  if (cell_ != columns_) {
    std::ostringstream os;
    os << path_.string() << ": row has " << cell_ << " cells, header has " << columns_;
    fail(ErrorKind::Assertion, os.str());
  }
  out_ << '\n';
  cell_ = 0;
}

void CsvWriter::close() {
  out_.close();
  if (!out_) fail(ErrorKind::Io, "error while writing " + path_.string());
}

nlohmann::json base_meta(std::string_view command) {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream ts;
  ts << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return {{"tool", "latrev"},
          {"version", std::string(kVersion)},
          {"build", std::string(kGitDescribe)},
          {"command", std::string(command)},
          {"created", ts.str()}};
}

void write_json(const fs::path& path, const nlohmann::json& doc) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) fail(ErrorKind::Io, "error while writing " + path.string());
}

fs::path write_meta(const fs::path& data_file, const nlohmann::json& meta) {
  fs::path p = data_file;
  p += ".meta.json";
  write_json(p, meta);
  return p;
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot read " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    fail(ErrorKind::Io, "SHA-256 initialisation failed");
  }
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return hex.str();
}

void Manifest::add_file(const fs::path& file) { files_.push_back(file); }

void Manifest::add_assertion(std::string name, bool passed, std::string detail) {
  assertions_.push_back({std::move(name), passed, std::move(detail)});
}

bool Manifest::all_passed() const {
  for (const Assertion& a : assertions_) {
    if (!a.passed) return false;
  }
  return true;
}

fs::path Manifest::write(const nlohmann::json& extra) const {
  nlohmann::json files = nlohmann::json::array();
  for (const fs::path& f : files_) {
    files.push_back({{"path", fs::relative(f, dir_).generic_string()},
                     {"bytes", fs::file_size(f)},
                     {"sha256", sha256_file(f)}});
  }
  nlohmann::json checks = nlohmann::json::array();
  for (const Assertion& a : assertions_) {
    checks.push_back({{"name", a.name}, {"passed", a.passed}, {"detail", a.detail}});
  }
  nlohmann::json doc = extra;
  doc["files"] = files;
  doc["assertions"] = checks;
  doc["all_passed"] = all_passed();
  const fs::path p = dir_ / "manifest.json";
  write_json(p, doc);
  return p;
}

OutputDir::OutputDir(fs::path dir) : dir_(std::move(dir)) {
  fs::create_directories(dir_);
  lock_ = dir_ / ".latrev.lock";
  std::FILE* f = std::fopen(lock_.c_str(), "wx");
  if (!f) {
    lock_.clear();
    fail(ErrorKind::Io, "output directory " + dir_.string() + " is owned by another run (lock file present)");
  }
  std::fclose(f);
}

OutputDir::~OutputDir() {
  if (!lock_.empty()) {
    std::error_code ec;
    fs::remove(lock_, ec);
  }
}

}  // namespace latrev::output
