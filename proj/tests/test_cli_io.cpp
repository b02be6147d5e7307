#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "qdyn/config.hpp"
#include "qdyn/report.hpp"

using namespace qdyn;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  fs::path d = fs::temp_directory_path() / "qdyn_test";
  fs::create_directories(d);
  return d;
}

void write(const fs::path& p, const std::string& body) {
  std::ofstream os(p);
  os << body;
}

int run_cli(const std::string& args) {
  const char* cli = std::getenv("QDYN_CLI");
  if (!cli) return -1;
  std::string cmd = std::string(cli) + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("config: empty file keeps the defaults") {
  fs::path p = temp_dir() / "empty.cfg";
  write(p, "");
  RunConfig cfg = load_config(p.string());
  RunConfig def;
  CHECK(cfg.period == def.period);
  CHECK(cfg.rho == def.rho);
  CHECK(cfg.delta == def.delta);
}

TEST_CASE("config: values, comments, and precedence hooks") {
  fs::path p = temp_dir() / "basic.cfg";
  write(p, "# comment\nrho = 0.05\nperiod = 8\n");
  RunConfig cfg = load_config(p.string());
  CHECK(cfg.rho == 0.05);
  CHECK(cfg.period == 8);
  // flag override path
  apply_config_entry(cfg, "rho", "0.02");
  CHECK(cfg.rho == 0.02);
}

TEST_CASE("config: malformed line names the line number") {
  fs::path p = temp_dir() / "broken.cfg";
  write(p, "rho 0.05\n");
  try {
    load_config(p.string());
    FAIL("expected a parse error");
  } catch (const error& e) {
    CHECK(e.code() == errc::parse);
    CHECK(std::string(e.what()).find("line 1") != std::string::npos);
  }
}

TEST_CASE("config: unknown keys and out-of-range values are rejected") {
  fs::path p = temp_dir() / "unknown.cfg";
  write(p, "rhoo = 0.05\n");
  CHECK_THROWS_AS(load_config(p.string()), error);
  fs::path q = temp_dir() / "range.cfg";
  write(q, "rho = 0.5\n");
  CHECK_THROWS_AS(load_config(q.string()), error);
}

TEST_CASE("report round trip") {
  RenormFixedPointApprox a;
  a.period = 2;
  a.degree = 3;
  a.lambda = -0.3995;
  a.coeffs = {-0.91, 0.02, -0.003};
  a.residual = 1e-9;
  fs::path p = temp_dir() / "approx.json";
  write_json_file(p.string(), to_json(a));
  RenormFixedPointApprox b = renorm_approx_from_json(read_json_file(p.string()));
  CHECK(b.period == a.period);
  CHECK(b.degree == a.degree);
  CHECK(b.lambda == a.lambda);
  CHECK(b.coeffs == a.coeffs);
  CHECK(b.residual == a.residual);
  // byte stability for fixed inputs
  fs::path p2 = temp_dir() / "approx2.json";
  write_json_file(p2.string(), to_json(b));
  std::ifstream f1(p), f2(p2);
  std::string s1((std::istreambuf_iterator<char>(f1)), {});
  std::string s2((std::istreambuf_iterator<char>(f2)), {});
  CHECK(s1 == s2);
}

TEST_CASE("CLI: usage and validation exit codes") {
  if (std::getenv("QDYN_CLI") == nullptr) return;  // only under ctest
  CHECK(run_cli("definitely-not-a-command") == 64);
  CHECK(run_cli("certify-delta --delta 0.9 --period 6") == 64);
  fs::path out = temp_dir() / "cli_findparam";
  CHECK(run_cli("find-param --period 3 --out " + out.string()) == 0);
  CHECK(fs::exists(out / "parameter.json"));
  CHECK(fs::exists(out / "manifest.json"));
  json j = read_json_file((out / "parameter.json").string());
  CHECK(std::abs(j["c"].get<double>() - 1.7548776662) < 1e-6);
}

TEST_CASE("CLI: series subcommand emits a series bound") {
  if (std::getenv("QDYN_CLI") == nullptr) return;
  fs::path out = temp_dir() / "cli_series";
  int rc = run_cli("series --family \"A'<-[U\\V']-+A'\" --period 8 --delta 2 --depth 15 --out " +
                   out.string());
  CHECK(rc == 0);
  CHECK(fs::exists(out / "series.json"));
  json j = read_json_file((out / "series.json").string());
  CHECK(j["delta"].get<double>() == 2.0);
  CHECK(j["j"].get<int>() == 15);
  CHECK(j["upper_bound"].get<double>() >= j["point_estimate"].get<double>());
}
