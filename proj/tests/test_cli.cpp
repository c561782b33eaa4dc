#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "sspde/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv = {"sspde"};
  for (const std::string& a : args) argv.push_back(a.c_str());

  std::ostringstream out, err;
  std::streambuf* old_out = std::cout.rdbuf(out.rdbuf());
  std::streambuf* old_err = std::cerr.rdbuf(err.rdbuf());
  CliResult res;
  try {
    res.code = sspde::cli::run(static_cast<int>(argv.size()), argv.data());
  } catch (...) {
    std::cout.rdbuf(old_out);
    std::cerr.rdbuf(old_err);
    throw;
  }
  std::cout.rdbuf(old_out);
  std::cerr.rdbuf(old_err);
  res.out = out.str();
  res.err = err.str();
  return res;
}

std::string shipped_config() {
  return std::string(SSPDE_SOURCE_DIR) + "/configs/standard.json";
}

nlohmann::json small_config(const std::string& output_dir) {
  std::ifstream f(shipped_config());
  auto j = nlohmann::json::parse(f);
  j["grid"]["cells_per_unit"] = 24;
  j["pipeline"]["n_max"] = 2;
  j["output_dir"] = output_dir;
  return j;
}

std::string write_config(const nlohmann::json& j, const std::string& name) {
  const fs::path p = fs::temp_directory_path() / name;
  std::ofstream f(p);
  f << j.dump(2) << "\n";
  return p.string();
}

}  // namespace

TEST_CASE("diagnostic subcommands succeed on the shipped config") {
  const std::string cfg = shipped_config();

  const CliResult op = run_cli({"check-operator", "--config", cfg});
  CHECK(op.code == 0);
  const auto jop = nlohmann::json::parse(op.out);
  CHECK(jop.at("growth_exponent") == doctest::Approx(2.0));
  CHECK(jop.at("i_a") == doctest::Approx(0.0));
  CHECK(jop.at("ellipticity").at("passed") == true);

  const CliResult ex = run_cli({"check-exponents", "--config", cfg});
  CHECK(ex.code == 0);
  const auto jex = nlohmann::json::parse(ex.out);
  CHECK(jex.at("zeta") == doctest::Approx(4.0 / 3.0));
  CHECK(jex.at("p_star") == "inf");

  const CliResult ver = run_cli({"verify-appendix", "--config", cfg});
  CHECK(ver.code == 0);
  const auto jver = nlohmann::json::parse(ver.out);
  CHECK(jver.at("conditions").at("eigenvalue_bounds").at("passed") == true);
  CHECK(jver.at("conditions").at("omega_envelope").at("passed") == true);
}

TEST_CASE("configuration problems map to exit code 2") {
  CHECK(run_cli({"check-operator", "--config", "/no/such/file.json"}).code == 2);

  const fs::path garbled = fs::temp_directory_path() / "sspde_cli_garbled.json";
  { std::ofstream(garbled) << "{ not valid json"; }
  CHECK(run_cli({"check-operator", "--config", garbled.string()}).code == 2);
  fs::remove(garbled);

  auto j = small_config("");
  j["surprise"] = 1;
  const std::string extra = write_config(j, "sspde_cli_extra.json");
  CHECK(run_cli({"check-operator", "--config", extra}).code == 2);
  fs::remove(extra);

  auto j2 = small_config("");
  j2["solver"] = {{"newton_tolerance", 1e-10}};
  const std::string badkey = write_config(j2, "sspde_cli_badkey.json");
  CHECK(run_cli({"check-exponents", "--config", badkey}).code == 2);
  fs::remove(badkey);

  // no subcommand at all is a usage error
  CHECK(run_cli({"--config", shipped_config()}).code == 2);
  CHECK(run_cli({"frobnicate", "--config", shipped_config()}).code == 2);
}

TEST_CASE("inadmissible exponent combinations are rejected up front") {
  auto j = small_config("");
  j["reaction"]["r"] = 1.5;  // needs r < p - 1 = 1
  const std::string path = write_config(j, "sspde_cli_badr.json");
  CHECK(run_cli({"check-exponents", "--config", path}).code == 2);
  fs::remove(path);

  auto j2 = small_config("");
  j2["reaction"]["theta"] = 4.0 / 3.0;  // collides with zeta
  const std::string path2 = write_config(j2, "sspde_cli_badtheta.json");
  CHECK(run_cli({"check-exponents", "--config", path2}).code == 2);
  fs::remove(path2);

  CHECK(run_cli({"solve", "--config", shipped_config(), "--n", "0"}).code == 2);
}

TEST_CASE("solve subcommand reports a trapped solution and writes the field") {
  const fs::path out = fs::temp_directory_path() / "sspde_cli_solve_out";
  fs::remove_all(out);
  auto j = small_config(out.string());
  j["grid"]["cells_per_unit"] = 48;
  const std::string path = write_config(j, "sspde_cli_solve.json");

  const CliResult res = run_cli({"solve", "--config", path, "--n", "1"});
  CHECK(res.code == 0);
  const auto jr = nlohmann::json::parse(res.out);
  CHECK(jr.at("ball") == 1);
  CHECK(jr.at("within_trap") == true);
  CHECK(jr.at("center").get<double>() > 0.0);
  CHECK(fs::exists(out / "fields" / "solve_1.csv"));

  fs::remove(path);
  fs::remove_all(out);
}

TEST_CASE("pipeline subcommand runs end to end and honors exit semantics") {
  const fs::path out = fs::temp_directory_path() / "sspde_cli_pipe_out";
  fs::remove_all(out);
  const std::string path = write_config(small_config(out.string()), "sspde_cli_pipe.json");

  const CliResult res = run_cli({"pipeline", "--config", path});
  CHECK(res.code == 0);
  const auto jr = nlohmann::json::parse(res.out);
  CHECK(jr.at("sandwich_ok") == true);
  CHECK(jr.at("positivity_ok") == true);
  CHECK(fs::exists(out / "report.json"));
  fs::remove(path);
  fs::remove_all(out);

  auto weak = small_config("");
  weak["pipeline"]["super_scale"] = 0.5;
  const std::string weak_path = write_config(weak, "sspde_cli_weak.json");
  CHECK(run_cli({"pipeline", "--config", weak_path}).code == 1);
  fs::remove(weak_path);
}
