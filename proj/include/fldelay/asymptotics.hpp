#pragma once

#include <cstdint>

#include "fldelay/delay.hpp"
#include "fldelay/overall.hpp"
#include "fldelay/pmf.hpp"

namespace fldelay {

/// R(t) = T0 ceil(t/T0) - t + T0 sum_{d >= ceil(t/T0)} S(d) / S(floor(t/T0)),
/// S the survival of p. The sum runs over the enumerated support, with the
/// tail mass treated as sitting one slot past it. t is in seconds, measured
/// after the pmf's offset.
double mean_residual_life(const SlotPmf& p, double t);

struct GumbelFit {
  double a = 0.0;  // seconds
  double b = 0.0;  // seconds
  std::int64_t a_slot = 0;
  int num_users = 0;
  Scheme scheme = Scheme::sync;

  /// Pr{T < y} = exp(-exp(-(y - a) / b)).
  double cdf(double y) const;
  double mean() const;
};

/// a = smallest lattice point with survival <= 1/K, b = R(a). K >= 2.
GumbelFit gumbel_fit(const SlotPmf& per_user_iteration, int K, Scheme scheme = Scheme::sync);

struct TailExponent {
  double tau = 0.0;
  std::int64_t i0 = 0;
  double s_star = 0.0;      // 1/s
  double rate_value = 0.0;  // Lambda*(tau / i0)
  double log_bound = 0.0;
  double bound = 0.0;
  double residual = 0.0;    // tilted mean minus tau / i0
  /// Relative size of tail_mass e^{s* x_max} against the truncated MGF.
  double tail_correction = 0.0;
};

/// Log of the MGF of the renormalized enumerated pmf, in seconds: ln E e^{s T}.
double log_mgf(const SlotPmf& p, double s);
/// Solves E_s[T] = x for the tilt s; x must lie strictly inside the support.
double solve_tilt(const SlotPmf& p, double x);
/// Legendre transform sup_s (s x - ln E e^{sT}).
double rate_function(const SlotPmf& p, double x);

/// exp(-s* tau + i0 ln sum_d e^{s* x_d} p(d)); tau must exceed i0 * mean.
TailExponent ldt_tail(const SlotPmf& iteration, std::int64_t i0, double tau);

struct EvtLdtResult {
  double log_bound = 0.0;
  double bound = 0.0;
  double integral = 0.0;  // int_0^inf e^{(s - 1/b) y} e^{-e^{-y/b}} dy
};

/// int_0^inf e^{(s - 1/b) y} e^{-e^{-y/b}} dy by quadrature; requires s < 1/b.
double gumbel_tilt_integral(double b, double s);

/// Combined bound exp(-s tau) [e^{a/b - e^{a/b}} / b * integral]^{i0}, in log space.
EvtLdtResult evt_ldt_tail(const GumbelFit& fit, std::int64_t i0, double tau, double s_star);

/// Tilt solving int y e^{(s-1/b)y} e^{-e^{-y/b}} dy = (tau/i0) int e^{(s-1/b)y} e^{-e^{-y/b}} dy.
double gumbel_integral_tilt(const GumbelFit& fit, double x);

/// Chernoff bound of an i0-fold sum of Gumbel(a, b) variables through the exact
/// MGF e^{sa} Gamma(1 - sb).
TailExponent gumbel_chernoff_tail(const GumbelFit& fit, std::int64_t i0, double tau);

struct StochasticOrderReport {
  double max_violation = 0.0;      // max over the lattice of CCDF_N - CCDF_{i0}
  double truncation_bound = 0.0;   // tail mass of both sides
  bool assumption_breach = false;  // N has mass above i0
  std::int64_t strict_points = 0;  // lattice points with CCDF_N < CCDF_{i0}
  std::int64_t lattice_points = 0;
};

StochasticOrderReport stochastic_order_check(const EmpiricalDist& n_dist, const SlotPmf& iteration,
                                             std::int64_t i0);

}  // namespace fldelay
