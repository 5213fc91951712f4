#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fldelay/config.hpp"
#include "fldelay/delay.hpp"
#include "fldelay/overall.hpp"
#include "fldelay/pmf.hpp"

namespace fldelay {

enum class SimTarget { user_uplink, system_uplink, iteration, overall_fixed, overall_random };

SimTarget parse_target(const std::string& name);
std::string to_string(SimTarget target);

struct SimSpec {
  SystemConfig config;
  Scheme scheme = Scheme::sync;
  std::int64_t trials = 1;
  std::uint64_t seed = 1;
  SimTarget target = SimTarget::user_uplink;
  std::int64_t iterations = 1;          // overall_fixed
  std::optional<EmpiricalDist> n_dist;  // overall_random
  unsigned threads = 0;                 // 0: hardware concurrency

  void validate() const;
};

/// Slot-count frequencies of the simulated delay. The delay of a trial is
/// slots * slot_len + offset_s seconds.
struct SimResult {
  std::map<std::int64_t, std::uint64_t> counts;
  std::int64_t trials = 0;
  double slot_len = 1.0;
  double offset_s = 0.0;

  EmpiricalDist empirical() const;
  double mean_slots() const;
  double variance_slots() const;
  double mean_seconds() const { return mean_slots() * slot_len + offset_s; }
};

SimResult simulate(const SimSpec& spec);

/// One draw per trial, in trial order; same streams as simulate.
std::vector<std::int64_t> simulate_samples(const SimSpec& spec);

/// Mean with the half-width of a normal-approximation interval at level z
/// standard errors, in seconds.
struct MeanCi {
  double mean = 0.0;
  double std_error = 0.0;
  double halfwidth = 0.0;
};
MeanCi mean_ci(const SimResult& result, double z = 1.96);

/// 1/2 sum |p - q| over the union support; the analytic tail mass counts as disagreement.
double tv_distance(const SlotPmf& analytic, const EmpiricalDist& empirical);
double tv_distance(const EmpiricalDist& a, const EmpiricalDist& b);

/// Per-trial generator: xoshiro256++ seeded from (seed, trial) by splitmix64.
class TrialRng {
 public:
  TrialRng(std::uint64_t seed, std::uint64_t stream);
  std::uint64_t next();
  /// Uniform on (0, 1].
  double uniform_open0();
  /// |h|^2 for a unit-scale Rayleigh channel: exponential with mean 2.
  double channel_gain() { return -2.0 * std::log(uniform_open0()); }

 private:
  std::uint64_t s_[4];
};

/// |h| draws for the marginal check.
std::vector<double> sample_rayleigh_magnitude(std::uint64_t seed, std::int64_t count);

/// Sums of n draws taken with replacement from pool, one per trial.
std::vector<std::int64_t> resample_sums(const std::vector<std::int64_t>& pool, std::int64_t n,
                                        std::int64_t trials, std::uint64_t seed);

}  // namespace fldelay
