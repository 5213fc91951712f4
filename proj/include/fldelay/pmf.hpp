#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace fldelay {

/// Probability mass over slot counts first_slot, first_slot + 1, ... with the
/// unenumerated mass kept in tail_mass. A delay of d slots lasts
/// d * slot_len + offset_s seconds; offset_s carries deterministic compute time.
struct SlotPmf {
  std::int64_t first_slot = 1;
  std::vector<double> probs;
  double tail_mass = 0.0;
  double slot_len = 1.0;
  double offset_s = 0.0;

  std::int64_t last_slot() const { return first_slot + static_cast<std::int64_t>(probs.size()) - 1; }
  std::size_t size() const { return probs.size(); }
  double prob(std::int64_t d) const;
  /// Enumerated mass at or below d.
  double cdf(std::int64_t d) const;
  /// Pr{D > d}: enumerated mass above d plus tail_mass.
  double survival(std::int64_t d) const;
  double total_mass() const;

  /// Moments of the enumerated part, renormalized to unit mass.
  double mean_slots() const;
  double variance_slots() const;
  double mean_seconds() const { return mean_slots() * slot_len + offset_s; }
  double seconds(std::int64_t d) const { return static_cast<double>(d) * slot_len + offset_s; }

  /// Throws if entries are negative or mass is not conserved within tol.
  void check(double tol = 1e-9) const;
};

SlotPmf point_mass(std::int64_t d, double slot_len);

/// Ceiling on the number of stored entries of any derived pmf.
inline constexpr std::size_t kMaxSupport = std::size_t{1} << 24;
/// Below this many entries in the shorter input the convolution is summed directly.
inline constexpr std::size_t kDirectConvolutionLimit = 4096;

/// r(d) = sum_i p(i) q(d - i); tails add as an upper bound on the unenumerated mass.
/// Entries below 1e-15 of the peak at either end are trimmed into tail_mass.
SlotPmf convolve_pmf(const SlotPmf& p, const SlotPmf& q);
/// Same, forcing the direct or the spectral path.
SlotPmf convolve_pmf_direct(const SlotPmf& p, const SlotPmf& q);
SlotPmf convolve_pmf_spectral(const SlotPmf& p, const SlotPmf& q);

/// Law of the maximum of K independent copies: q(d) = F(d)^K - F(d - 1)^K.
SlotPmf max_order_pmf(const SlotPmf& p, int K);

/// Raw linear convolution of coefficient arrays; spectral above the direct limit.
std::vector<double> convolve_sequences(const std::vector<double>& a, const std::vector<double>& b);

/// Drops the near-zero runs at both ends into tail_mass.
void trim_pmf(SlotPmf& p, double rel_threshold = 1e-15);

}  // namespace fldelay
