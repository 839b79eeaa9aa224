#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct Result {
  int status = -1;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(LATREV_BINARY) + " " + args + " 2>&1";
  Result r;
  std::FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), p)) r.out += buf.data();
  const int raw = pclose(p);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string config(const std::string& name) { return std::string(LATREV_CONFIG_DIR) + "/" + name; }

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(run("").status == 2);
  CHECK(run("frobnicate").status == 2);
  CHECK(run("times --regime sideways").status == 2);
  const Result r = run("recipe fig9");
  CHECK(r.status == 2);
  CHECK(r.out.find("fig6") != std::string::npos);
}

TEST_CASE("bad configurations exit with 2") {
  TempDir tmp("latrev_cli_cfg");
  std::ofstream(tmp.path / "bad.json") << R"({"kbar": 0.5, "Vprime": 16, "run": {"dt": 1.0}})";
  CHECK(run("evolve --config " + (tmp.path / "bad.json").string() + " --out-dir " + (tmp.path / "o").string())
            .status == 2);
  std::ofstream(tmp.path / "dt.json") << R"({"kbar": 0.5, "Vprime": 2, "classical": {"dt": 0.007}})";
  CHECK(run("poincare --config " + (tmp.path / "dt.json").string() + " --out-dir " + (tmp.path / "p").string())
            .status == 2);
}

TEST_CASE("units and mathieu") {
  const Result u = run("units --depth 16 --frequency 9000");
  CHECK(u.status == 0);
  CHECK(u.out.find("kbar") != std::string::npos);
  const Result m = run("mathieu --nu 0 --q 1");
  CHECK(m.status == 0);
  CHECK(m.out.find("nu,q,a") != std::string::npos);
  CHECK(m.out.find("-0.45513") != std::string::npos);
}

TEST_CASE("times table") {
  const Result t = run("--config " + config("minimal.json") + " times --regime robust --lambda-grid 4:8:3");
  CHECK(t.status == 0);
  CHECK(t.out.rfind("lambda,q,t_cl,t_rev,t_spr,warnings", 0) == 0);
  int lines = 0;
  for (char c : t.out) lines += c == '\n';
  CHECK(lines == 4);
}

TEST_CASE("fig1 writes six sections") {
  TempDir tmp("latrev_cli_fig1");
  const Result r = run("recipe fig1 --out-dir " + tmp.path.string());
  CHECK(r.status == 0);
  int sections = 0;
  for (const auto& e : fs::directory_iterator(tmp.path)) {
    const std::string n = e.path().filename().string();
    if (n.rfind("poincare_", 0) == 0 && e.path().extension() == ".csv") ++sections;
  }
  CHECK(sections == 6);
  CHECK(fs::exists(tmp.path / "manifest.json"));
  CHECK_FALSE(fs::exists(tmp.path / ".latrev.lock"));
}

TEST_CASE("evolve then analyze") {
  TempDir tmp("latrev_cli_evolve");
  std::ofstream(tmp.path / "short.json") << R"({
    "kbar": 0.5, "Vprime": 16, "lambda": 0.5,
    "grid": {"cells": 8, "points": 512},
    "run": {"periods": 6, "steps_per_period": 400, "snapshots_per_period": 2}
  })";
  const std::string out = (tmp.path / "run").string();
  const Result e = run("evolve --config " + (tmp.path / "short.json").string() + " --out-dir " + out);
  CHECK(e.status == 0);
  CHECK(fs::exists(tmp.path / "run" / "autocorr.csv"));
  CHECK(fs::exists(tmp.path / "run" / "density.csv"));

  const Result a = run("analyze autocorr " + out + "/autocorr.csv --t-cl 0.8 --t-rev 10 --out-dir " +
                       (tmp.path / "rep").string());
  CHECK(a.status == 0);
  CHECK(fs::exists(tmp.path / "rep" / "report.json"));
  CHECK(fs::exists(tmp.path / "rep" / "report.csv"));

  const Result locked = [&] {
    std::ofstream(tmp.path / "run" / ".latrev.lock") << "";
    return run("evolve --config " + (tmp.path / "short.json").string() + " --out-dir " + out);
  }();
  CHECK(locked.status != 0);
}
