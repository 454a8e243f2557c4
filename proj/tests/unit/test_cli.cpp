#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "fbmclt/cli.hpp"

using namespace fbmclt;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "fbmclt");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("fbmclt_cli_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("constants at the Brownian point") {
  const Run r = run_cli({"constants", "--H", "0.5", "--d", "1"});
  CHECK(r.code == cli::kExitPass);
  const Json j = Json::parse(r.out);
  CHECK(j["result"]["integral"]["value"].get<double>() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(j["result"]["closed"].get<double>() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(j["result"]["relative_residual"].get<double>() < 1e-8);
  CHECK(j["config"]["H"].get<double>() == 0.5);
  CHECK_FALSE(j.contains("metadata"));
}

TEST_CASE("usage errors exit with status 2 and name the inequality") {
  Run r = run_cli({"constants", "--H", "1.5"});
  CHECK(r.code == cli::kExitUsage);
  CHECK(r.err.find("0 < H < 1") != std::string::npos);
  r = run_cli({"clt-test", "--H", "0.3", "--d", "1"});
  CHECK(r.code == cli::kExitUsage);
  CHECK(r.err.find("requires 1/(d+1) < H < 1/d") != std::string::npos);
  r = run_cli({"clt-test", "--n", "256", "--grid", "1024"});
  CHECK(r.code == cli::kExitUsage);
  CHECK(r.err.find("M >= 16 n") != std::string::npos);
  CHECK(run_cli({"frobnicate"}).code == cli::kExitUsage);
  CHECK(run_cli({"norm", "--method", "psychic"}).code == cli::kExitUsage);
  CHECK(run_cli({"moments", "--intervals", "0,1", "--m", "20"}).code == cli::kExitUsage);
  CHECK(run_cli({"verify", "--quick", "--full"}).code == cli::kExitUsage);
}

TEST_CASE("norm reports both representations and their gap") {
  const Run r = run_cli({"norm", "--f", "gaussian-diff:1,2", "--beta", "0.6667", "--method", "both"});
  CHECK(r.code == cli::kExitPass);
  const Json j = Json::parse(r.out);
  CHECK(j["result"]["relative_gap"].get<double>() < 1e-6);
  CHECK(j["result"]["direct"]["value"].get<double>() > 0.0);
  CHECK(j["result"]["fourier"].contains("error"));
}

TEST_CASE("moments subcommand") {
  Run r = run_cli({"moments", "--H", "0.5", "--d", "1", "--intervals", "0,1", "--m", "4"});
  CHECK(r.code == cli::kExitPass);
  CHECK(Json::parse(r.out)["result"]["moment"]["value"].get<double>() == doctest::Approx(3.0).epsilon(1e-8));
  r = run_cli({"moments", "--intervals", "0,0.5;0.5,1", "--m", "2,1"});
  CHECK(Json::parse(r.out)["result"]["moment"]["value"].get<double>() == 0.0);
}

TEST_CASE("reruns are byte-identical and metadata is opt-in") {
  const std::vector<std::string> args{"clt-test", "--n", "16", "--grid", "256", "--paths", "50", "--seed", "4"};
  const Run a = run_cli(args);
  const Run b = run_cli(args);
  CHECK(a.out == b.out);
  auto with_meta = args;
  with_meta.push_back("--metadata");
  const Json j = Json::parse(run_cli(with_meta).out);
  CHECK(j["metadata"].contains("timestamp"));
}

TEST_CASE("config file values are overridden by flags") {
  const auto dir = scratch_dir("config");
  const auto cfg = dir / "run.cfg";
  std::ofstream(cfg) << "# experiment\nH = 0.55\nd = 1\nmetadata = false\n";
  Run r = run_cli({"constants", "--config", cfg.string()});
  CHECK(Json::parse(r.out)["config"]["H"].get<double>() == 0.55);
  r = run_cli({"constants", "--config", cfg.string(), "--H", "0.7"});
  CHECK(Json::parse(r.out)["config"]["H"].get<double>() == 0.7);
  std::ofstream(dir / "bad.cfg") << "H 0.5\n";
  CHECK(run_cli({"constants", "--config", (dir / "bad.cfg").string()}).code == cli::kExitUsage);
  std::istringstream in("quick = true\nseed = 9 # trailing\n");
  const auto tokens = cli::config_file_tokens(in, "inline");
  CHECK(tokens == std::vector<std::string>{"--quick", "--seed", "9"});
}

TEST_CASE("reports and samples are written to disk") {
  const auto dir = scratch_dir("out");
  const auto report = dir / "sub" / "norm.json";
  Run r = run_cli({"norm", "--method", "fourier", "--out", report.string()});
  CHECK(r.code == cli::kExitPass);
  std::ifstream in(report);
  std::stringstream text;
  text << in.rdbuf();
  CHECK(text.str() == r.out);

  setenv(cli::kOutDirEnv, dir.string().c_str(), 1);
  r = run_cli({"simulate", "--grid", "8", "--csv", (dir / "path.csv").string()});
  unsetenv(cli::kOutDirEnv);
  CHECK(r.code == cli::kExitPass);
  CHECK(std::filesystem::exists(dir / "simulate.json"));
  std::ifstream csv(dir / "path.csv");
  std::string line;
  std::getline(csv, line);
  CHECK(line.rfind("# fbm", 0) == 0);

  r = run_cli({"clt-test", "--n", "4", "--grid", "64", "--paths", "20", "--samples", (dir / "s.csv").string()});
  std::ifstream samples(dir / "s.csv");
  std::getline(samples, line);
  std::getline(samples, line);
  CHECK(line == "functional,limit_law");
}

TEST_CASE("conjectured regime is explicit and labeled") {
  const Run r = run_cli({"clt-test", "--H", "0.45", "--n", "4", "--grid", "64", "--paths", "20", "--conjecture"});
  CHECK(r.code != cli::kExitUsage);
  CHECK(Json::parse(r.out)["result"]["exploratory"].get<bool>());
}

TEST_CASE("quick verification tier passes") {
  const Run r = run_cli({"verify", "--quick"});
  CHECK(r.code == cli::kExitPass);
  const Json j = Json::parse(r.out);
  CHECK(j["result"]["criteria"].size() == 5);
}
