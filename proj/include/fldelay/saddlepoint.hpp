#pragma once

#include <cstdint>
#include <vector>

#include "fldelay/config.hpp"
#include "fldelay/pmf.hpp"
#include "fldelay/rate_model.hpp"

namespace fldelay {

/// Saddle point of K_d with the Lugannani-Rice ingredients.
struct SaddleInfo {
  int d = 0;
  double s_star = 0.0;
  double omega = 0.0;
  double psi = 0.0;
  double cgf_at_star = 0.0;
  double cgf_d2_at_star = 0.0;
  double cgf_d3_at_star = 0.0;
  double residual = 0.0;  // K_d'(s_star)
  /// +1 or -1 when the minimum of K_d is so negative that the tail is 1 or 0 to
  /// double precision; s_star is then only the last bracket probe.
  int saturated = 0;
};

/// |s*| below this uses the removable-singularity limit of the LR formula.
inline constexpr double kNearMeanTilt = 1e-4;
/// Minimum of K_d below this is treated as a certain event.
inline constexpr double kSaturationLog = -1000.0;

SaddleInfo solve_saddle(const CgfSpec& spec);

/// Two-term Lugannani-Rice approximation of Pr{Z_d > 0}, clamped to [0, 1].
double lr_tail(const SaddleInfo& info);

enum class SlotFamily {
  user_uplink,    // rho: one user's uplink
  sync_downlink,  // upsilon: broadcast at the worst of K channels
  async_downlink  // theta: one user's own downlink channel
};

CgfSpec family_spec(SlotFamily family, const SystemConfig& config, int d);

struct SlotPmfBuild {
  SlotPmf pmf;
  std::vector<double> tails;  // Pr{Z_d > 0} for d = 0, 1, ..., last enumerated
  std::vector<SaddleInfo> saddles;  // index d
  int clamp_events = 0;
};

inline constexpr int kMaxSlots = 10000;

/// p(d) = Pr{Z_{d-1} > 0} - Pr{Z_d > 0}, enumerated until the remaining tail is
/// below tail_budget (truncation_eps when not positive).
SlotPmfBuild build_slot_pmf(SlotFamily family, const SystemConfig& config, double tail_budget = 0.0);
SlotPmf slot_pmf(SlotFamily family, const SystemConfig& config, double tail_budget = 0.0);

}  // namespace fldelay
