#include "fldelay/delay.hpp"

#include "fldelay/errors.hpp"
#include "fldelay/saddlepoint.hpp"

namespace fldelay {

Scheme parse_scheme(const std::string& name) {
  if (name == "sync") return Scheme::sync;
  if (name == "async") return Scheme::async;
  throw ValidationError("scheme", "expected sync or async, got '" + name + "'");
}

std::string to_string(Scheme scheme) { return scheme == Scheme::sync ? "sync" : "async"; }

// Tail budgets are split so that every composed pmf stays within truncation_eps.

SlotPmf user_uplink_pmf(const SystemConfig& config) {
  return slot_pmf(SlotFamily::user_uplink, config, config.truncation_eps);
}

SlotPmf uplink_system_pmf(const SystemConfig& config) {
  const double eps = config.truncation_eps;
  const SlotPmf rho = slot_pmf(SlotFamily::user_uplink, config, eps / (2.0 * config.num_users));
  return max_order_pmf(rho, config.num_users);
}

SlotPmf sync_downlink_pmf(const SystemConfig& config) {
  return slot_pmf(SlotFamily::sync_downlink, config, config.truncation_eps);
}

SlotPmf async_downlink_pmf(const SystemConfig& config) {
  return slot_pmf(SlotFamily::async_downlink, config, config.truncation_eps);
}

IterationPmf sync_iteration_pmf(const SystemConfig& config) {
  const double eps = config.truncation_eps;
  const SlotPmf phi = uplink_system_pmf(config);
  const SlotPmf ups = slot_pmf(SlotFamily::sync_downlink, config, eps / 2.0);
  IterationPmf out;
  out.pmf = convolve_pmf(phi, ups);
  out.pmf.offset_s = config.compute_delay_s;
  out.scheme = Scheme::sync;
  out.config = config;
  return out;
}

IterationPmf async_iteration_pmf(const SystemConfig& config) {
  const double eps = config.truncation_eps;
  const double share = eps / (4.0 * config.num_users);
  const SlotPmf rho = slot_pmf(SlotFamily::user_uplink, config, share);
  const SlotPmf theta = slot_pmf(SlotFamily::async_downlink, config, share);
  IterationPmf out;
  out.pmf = max_order_pmf(convolve_pmf(rho, theta), config.num_users);
  out.pmf.offset_s = config.compute_delay_s;
  out.scheme = Scheme::async;
  out.config = config;
  return out;
}

IterationPmf iteration_pmf(const SystemConfig& config, Scheme scheme) {
  return scheme == Scheme::sync ? sync_iteration_pmf(config) : async_iteration_pmf(config);
}

SlotPmf per_user_iteration_pmf(const SystemConfig& config, Scheme scheme) {
  const double eps = config.truncation_eps;
  const SlotPmf rho = slot_pmf(SlotFamily::user_uplink, config, eps / 2.0);
  const SlotPmf dl = slot_pmf(scheme == Scheme::sync ? SlotFamily::sync_downlink : SlotFamily::async_downlink,
                              config, eps / 2.0);
  SlotPmf out = convolve_pmf(rho, dl);
  out.offset_s = config.compute_delay_s;
  return out;
}

}  // namespace fldelay
