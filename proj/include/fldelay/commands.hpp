#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace fldelay {

enum ExitCode : int {
  kExitOk = 0,
  kExitRuntime = 1,
  kExitValidation = 2,
  kExitVerdictFail = 3,
  kExitInconclusive = 4,
};

struct RunManifest {
  std::string command;
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  std::int64_t trials = 100000;
  std::string scheme = "sync";
  std::string target = "iteration";
  double tv_threshold = 0.03;
  std::optional<double> tau_min;
  std::optional<double> tau_max;
  int tau_steps = 20;
  std::string n_dist_path;
  std::string mc_input;
  std::int64_t iterations = 0;  // overall target; 0 means the iteration bound
  unsigned threads = 0;
};

/// Each command writes its CSV files under out_dir, logs to `log` and returns
/// an exit code. Validation and runtime errors propagate as exceptions.
int cmd_analyze(const RunManifest& m, std::ostream& log);
int cmd_compare(const RunManifest& m, std::ostream& log);
int cmd_asymptotics(const RunManifest& m, std::ostream& log);
int cmd_overall(const RunManifest& m, std::ostream& log);
int cmd_simulate(const RunManifest& m, std::ostream& log);

/// Maps exceptions to exit codes 1 and 2 with a diagnostic on `err`.
int run_guarded(int (*command)(const RunManifest&, std::ostream&), const RunManifest& m, std::ostream& log,
                std::ostream& err);

}  // namespace fldelay
