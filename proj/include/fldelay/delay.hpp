#pragma once

#include <string>

#include "fldelay/config.hpp"
#include "fldelay/pmf.hpp"

namespace fldelay {

enum class Scheme { sync, async };

Scheme parse_scheme(const std::string& name);
std::string to_string(Scheme scheme);

struct IterationPmf {
  SlotPmf pmf;
  Scheme scheme = Scheme::sync;
  SystemConfig config;
};

/// One user's uplink delay (rho).
SlotPmf user_uplink_pmf(const SystemConfig& config);
/// Slowest of the K uplinks (phi).
SlotPmf uplink_system_pmf(const SystemConfig& config);
/// Common downlink at the worst channel (upsilon).
SlotPmf sync_downlink_pmf(const SystemConfig& config);
/// One user's own downlink (theta).
SlotPmf async_downlink_pmf(const SystemConfig& config);

/// phi * upsilon plus the compute delay.
IterationPmf sync_iteration_pmf(const SystemConfig& config);
/// Maximum over K users of rho * theta plus the compute delay.
IterationPmf async_iteration_pmf(const SystemConfig& config);
IterationPmf iteration_pmf(const SystemConfig& config, Scheme scheme);

/// One user's iteration delay, the law whose K-fold maximum is the iteration
/// delay: rho * upsilon (sync) or rho * theta (async).
SlotPmf per_user_iteration_pmf(const SystemConfig& config, Scheme scheme);

}  // namespace fldelay
