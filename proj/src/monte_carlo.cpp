#include "fldelay/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "fldelay/errors.hpp"

namespace fldelay {

SimTarget parse_target(const std::string& name) {
  if (name == "user_uplink") return SimTarget::user_uplink;
  if (name == "system_uplink") return SimTarget::system_uplink;
  if (name == "iteration") return SimTarget::iteration;
  if (name == "overall") return SimTarget::overall_fixed;
  if (name == "overall_random") return SimTarget::overall_random;
  throw ValidationError("target", "unknown target '" + name + "'");
}

std::string to_string(SimTarget target) {
  switch (target) {
    case SimTarget::user_uplink: return "user_uplink";
    case SimTarget::system_uplink: return "system_uplink";
    case SimTarget::iteration: return "iteration";
    case SimTarget::overall_fixed: return "overall";
    case SimTarget::overall_random: return "overall_random";
  }
  return "?";
}

void SimSpec::validate() const {
  config.validate();
  if (trials < 1) throw ValidationError("trials", "must be at least 1");
  if (target == SimTarget::overall_fixed && iterations < 1)
    throw ValidationError("iterations", "must be at least 1");
  if (target == SimTarget::overall_random) {
    if (!n_dist) throw ValidationError("n_dist", "required for the random round count target");
    n_dist->validate();
    if (config.compute_delay_s != 0.0)
      throw ValidationError("compute_delay_s", "random round counts need a zero compute delay");
  }
}

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

__extension__ typedef unsigned __int128 Wide;

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

TrialRng::TrialRng(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t x = seed;
  const std::uint64_t mixed = splitmix64(x) ^ stream;
  std::uint64_t y = mixed * 0xd1342543de82ef95ULL + 0x632be59bd9b4e019ULL;
  for (auto& w : s_) w = splitmix64(y);
}

std::uint64_t TrialRng::next() {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double TrialRng::uniform_open0() {
  return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
}

namespace {

struct Sampler {
  const SystemConfig& cfg;
  double c_ul, c_dl;

  explicit Sampler(const SystemConfig& c)
      : cfg(c), c_ul(c.uplink_threshold()), c_dl(c.downlink_threshold()) {}

  // Slots until the accumulated normalized rate reaches c.
  std::int64_t single_link(TrialRng& rng, double snr, double c) const {
    double acc = 0.0;
    std::int64_t d = 0;
    while (acc < c) {
      acc += std::log1p(snr * rng.channel_gain());
      ++d;
    }
    return d;
  }

  std::int64_t user_uplink(TrialRng& rng) const { return single_link(rng, cfg.snr_ul, c_ul); }

  std::int64_t system_uplink(TrialRng& rng) const {
    std::int64_t worst = 0;
    for (int k = 0; k < cfg.num_users; ++k) worst = std::max(worst, user_uplink(rng));
    return worst;
  }

  // Broadcast at the per-slot minimum of the K channel gains.
  std::int64_t sync_downlink(TrialRng& rng) const {
    double acc = 0.0;
    std::int64_t d = 0;
    while (acc < c_dl) {
      double g = rng.channel_gain();
      for (int k = 1; k < cfg.num_users; ++k) g = std::min(g, rng.channel_gain());
      acc += std::log1p(cfg.snr_dl * g);
      ++d;
    }
    return d;
  }

  std::int64_t iteration(TrialRng& rng, Scheme scheme) const {
    if (scheme == Scheme::sync) {
      const std::int64_t ul = system_uplink(rng);
      return ul + sync_downlink(rng);
    }
    std::int64_t worst = 0;
    for (int k = 0; k < cfg.num_users; ++k) {
      const std::int64_t ul = user_uplink(rng);
      worst = std::max(worst, ul + single_link(rng, cfg.snr_dl, c_dl));
    }
    return worst;
  }
};

std::int64_t draw_n(TrialRng& rng, const EmpiricalDist& dist) {
  const double u = rng.uniform_open0();
  double acc = 0.0;
  for (const auto& [n, p] : dist.probs) {
    acc += p;
    if (u <= acc) return n;
  }
  return dist.probs.rbegin()->first;
}

std::int64_t one_trial(const SimSpec& spec, const Sampler& sampler, std::int64_t trial) {
  TrialRng rng(spec.seed, static_cast<std::uint64_t>(trial));
  switch (spec.target) {
    case SimTarget::user_uplink: return sampler.user_uplink(rng);
    case SimTarget::system_uplink: return sampler.system_uplink(rng);
    case SimTarget::iteration: return sampler.iteration(rng, spec.scheme);
    case SimTarget::overall_fixed: {
      std::int64_t total = 0;
      for (std::int64_t i = 0; i < spec.iterations; ++i) total += sampler.iteration(rng, spec.scheme);
      return total;
    }
    case SimTarget::overall_random: {
      const std::int64_t n = draw_n(rng, *spec.n_dist);
      std::int64_t total = 0;
      for (std::int64_t i = 0; i < n; ++i) total += sampler.iteration(rng, spec.scheme);
      return total;
    }
  }
  return 0;
}

unsigned thread_count(const SimSpec& spec) {
  unsigned t = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::int64_t>(t, spec.trials));
}

double offset_for(const SimSpec& spec) {
  switch (spec.target) {
    case SimTarget::iteration: return spec.config.compute_delay_s;
    case SimTarget::overall_fixed: return spec.config.compute_delay_s * static_cast<double>(spec.iterations);
    default: return 0.0;
  }
}

}  // namespace

std::vector<std::int64_t> simulate_samples(const SimSpec& spec) {
  spec.validate();
  const Sampler sampler(spec.config);
  std::vector<std::int64_t> out(static_cast<std::size_t>(spec.trials));
  const unsigned nt = thread_count(spec);
  auto work = [&](unsigned w) {
    for (std::int64_t t = w; t < spec.trials; t += nt) out[static_cast<std::size_t>(t)] = one_trial(spec, sampler, t);
  };
  if (nt <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < nt; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  return out;
}

SimResult simulate(const SimSpec& spec) {
  const std::vector<std::int64_t> samples = simulate_samples(spec);
  SimResult res;
  res.trials = spec.trials;
  res.slot_len = spec.config.slot_len_s;
  res.offset_s = offset_for(spec);
  for (std::int64_t d : samples) ++res.counts[d];
  return res;
}

EmpiricalDist SimResult::empirical() const {
  if (trials < 1) throw ValidationError("empirical distribution of an empty sample");
  EmpiricalDist out;
  out.provenance = "monte-carlo";
  for (const auto& [d, c] : counts) out.probs[d] = static_cast<double>(c) / static_cast<double>(trials);
  return out;
}

double SimResult::mean_slots() const {
  if (trials < 1) throw ValidationError("mean of an empty sample");
  double m = 0.0;
  for (const auto& [d, c] : counts) m += static_cast<double>(d) * static_cast<double>(c);
  return m / static_cast<double>(trials);
}

double SimResult::variance_slots() const {
  if (trials < 2) return INFINITY;
  const double mu = mean_slots();
  double v = 0.0;
  for (const auto& [d, c] : counts) v += static_cast<double>(c) * (static_cast<double>(d) - mu) * (static_cast<double>(d) - mu);
  return v / static_cast<double>(trials - 1);
}

MeanCi mean_ci(const SimResult& r, double z) {
  MeanCi ci;
  ci.mean = r.mean_seconds();
  ci.std_error = std::sqrt(r.variance_slots() / static_cast<double>(r.trials)) * r.slot_len;
  ci.halfwidth = z * ci.std_error;
  return ci;
}

double tv_distance(const SlotPmf& analytic, const EmpiricalDist& empirical) {
  double sum = 0.0;
  for (std::int64_t d = analytic.first_slot; d <= analytic.last_slot(); ++d) {
    const auto it = empirical.probs.find(d);
    sum += std::abs(analytic.prob(d) - (it == empirical.probs.end() ? 0.0 : it->second));
  }
  for (const auto& [d, q] : empirical.probs)
    if (d < analytic.first_slot || d > analytic.last_slot()) sum += q;
  return 0.5 * (sum + analytic.tail_mass);
}

double tv_distance(const EmpiricalDist& a, const EmpiricalDist& b) {
  double sum = 0.0;
  for (const auto& [d, p] : a.probs) {
    const auto it = b.probs.find(d);
    sum += std::abs(p - (it == b.probs.end() ? 0.0 : it->second));
  }
  for (const auto& [d, q] : b.probs)
    if (!a.probs.count(d)) sum += q;
  return 0.5 * sum;
}

std::vector<double> sample_rayleigh_magnitude(std::uint64_t seed, std::int64_t count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  TrialRng rng(seed, 0);
  for (double& v : out) v = std::sqrt(rng.channel_gain());
  return out;
}

std::vector<std::int64_t> resample_sums(const std::vector<std::int64_t>& pool, std::int64_t n,
                                        std::int64_t trials, std::uint64_t seed) {
  if (pool.empty()) throw ValidationError("resample_sums: empty pool");
  std::vector<std::int64_t> out(static_cast<std::size_t>(trials));
  const auto size = static_cast<std::uint64_t>(pool.size());
  for (std::int64_t t = 0; t < trials; ++t) {
    TrialRng rng(seed, static_cast<std::uint64_t>(t));
    std::int64_t total = 0;
    for (std::int64_t i = 0; i < n; ++i) {
      // Multiply-shift reduction to [0, size).
      const auto idx = static_cast<std::uint64_t>((static_cast<Wide>(rng.next()) * size) >> 64);
      total += pool[idx];
    }
    out[static_cast<std::size_t>(t)] = total;
  }
  return out;
}

}  // namespace fldelay
