#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fldelay/commands.hpp"

namespace fs = std::filesystem;
using namespace fldelay;

namespace {

const std::string kCli = FLDELAY_CLI_PATH;
const std::string kConfigs = FLDELAY_CONFIG_DIR;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fldelay_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run(const std::string& args) {
  const std::string cmd = kCli + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("exit codes") {
  const fs::path out = scratch("codes");
  const std::string svm = kConfigs + "/svm.json";
  CHECK(run("analyze --config " + svm + " --out " + out.string() + " --target user_uplink") == kExitOk);
  CHECK(run("analyze --config " + svm + " --out " + out.string() + " --scheme both") == kExitValidation);
  CHECK(run("analyze --config /no/such/file.json --out " + out.string()) == kExitValidation);
  CHECK(run("analyze") == kExitValidation);
  write_file(out / "bad.json", R"({"num_users": 0})");
  CHECK(run("analyze --config " + (out / "bad.json").string() + " --out " + out.string()) == kExitValidation);
  write_file(out / "unknown.json", R"({"num_users": 3, "colour": 1})");
  CHECK(run("analyze --config " + (out / "unknown.json").string() + " --out " + out.string()) == kExitValidation);
}

TEST_CASE("analyze writes the pmf and summary") {
  const fs::path out = scratch("analyze");
  RunManifest m;
  m.config_path = kConfigs + "/svm.json";
  m.out_dir = out.string();
  m.target = "iteration";
  m.scheme = "async";
  std::ostringstream log;
  REQUIRE(cmd_analyze(m, log) == kExitOk);
  const std::string pmf = slurp(out / "analyze_iteration_async.csv");
  CHECK(pmf.rfind("d,t_seconds,pmf,cdf,tail_mass_note", 0) == 0);
  const std::string summary = slurp(out / "analyze_iteration_async_summary.csv");
  CHECK(summary.find("mean_s") != std::string::npos);
  CHECK(log.str().find("mean 0.1436") != std::string::npos);
}

TEST_CASE("simulate is deterministic for a fixed seed") {
  const fs::path a = scratch("sim_a"), b = scratch("sim_b");
  const std::string base = "simulate --config " + kConfigs + "/svm.json --target iteration --trials 3000 --seed 5";
  REQUIRE(run(base + " --out " + a.string()) == kExitOk);
  REQUIRE(run(base + " --threads 3 --out " + b.string()) == kExitOk);
  const std::string sa = slurp(a / "samples_iteration_sync.csv");
  CHECK(!sa.empty());
  CHECK(sa == slurp(b / "samples_iteration_sync.csv"));
  CHECK(fs::exists(a / "samples_iteration_sync.csv.manifest.json"));
}

TEST_CASE("compare verdicts") {
  const fs::path out = scratch("compare");
  const std::string svm = kConfigs + "/svm.json";
  CHECK(run("compare --config " + svm + " --target user_uplink --trials 200000 --out " + out.string()) == kExitOk);
  CHECK(run("compare --config " + svm + " --target user_uplink --trials 1 --out " + out.string()) ==
        kExitInconclusive);
  // samples with the right provenance but a shifted law
  REQUIRE(run("simulate --config " + svm + " --target user_uplink --trials 100000 --out " + out.string()) ==
          kExitOk);
  const fs::path samples = out / "samples_user_uplink_sync.csv";
  write_file(samples, "d,count\n70,60000\n71,40000\n");
  CHECK(run("compare --config " + svm + " --target user_uplink --mc-input " + samples.string() + " --out " +
            out.string()) == kExitVerdictFail);
  CHECK(fs::exists(out / "compare_user_uplink_sync.csv"));
}

TEST_CASE("compare refuses samples from another configuration") {
  const fs::path out = scratch("mismatch");
  REQUIRE(run("simulate --config " + kConfigs + "/svm.json --target user_uplink --trials 2000 --out " +
              out.string()) == kExitOk);
  const std::string samples = (out / "samples_user_uplink_sync.csv").string();
  CHECK(run("compare --config " + kConfigs + "/svm.json --target user_uplink --mc-input " + samples + " --out " +
            out.string()) != kExitValidation);
  CHECK(run("compare --config " + kConfigs + "/cnn.json --target user_uplink --mc-input " + samples + " --out " +
            out.string()) == kExitValidation);
  CHECK(run("compare --config " + kConfigs + "/svm.json --target iteration --mc-input " + samples + " --out " +
            out.string()) == kExitValidation);
}

TEST_CASE("overall reports the iteration bound") {
  const fs::path out = scratch("overall");
  RunManifest m;
  m.config_path = kConfigs + "/svm.json";
  m.out_dir = out.string();
  m.iterations = 3;
  std::ostringstream log;
  REQUIRE(cmd_overall(m, log) == kExitOk);
  const std::string report = slurp(out / "i0_report.csv");
  CHECK(report.find("1396") != std::string::npos);
  CHECK(report.find("1395") != std::string::npos);
  CHECK(fs::exists(out / "overall_fixed_3_sync.csv"));

  write_file(out / "n.csv", "n,count\n2,1\n3,1\n");
  m.n_dist_path = (out / "n.csv").string();
  REQUIRE(cmd_overall(m, log) == kExitOk);
  CHECK(fs::exists(out / "overall_compound_sync.csv"));
}

TEST_CASE("asymptotics writes the Gumbel fit and tau sweep") {
  const fs::path out = scratch("asym");
  RunManifest m;
  m.config_path = kConfigs + "/svm.json";
  m.out_dir = out.string();
  m.tau_steps = 5;
  std::ostringstream log;
  REQUIRE(cmd_asymptotics(m, log) == kExitOk);
  CHECK(fs::exists(out / "gumbel_fit_sync.csv"));
  CHECK(fs::exists(out / "evt_overlay_sync.csv"));
  const std::string sweep = slurp(out / "tau_sweep_sync.csv");
  std::size_t lines = 0;
  for (char c : sweep) lines += c == '\n';
  CHECK(lines == 6);
}

TEST_CASE("run_guarded maps errors to exit codes") {
  RunManifest m;
  m.config_path = "/no/such/config.json";
  std::ostringstream log, err;
  CHECK(run_guarded(cmd_analyze, m, log, err) == kExitValidation);
  CHECK(!err.str().empty());
}
