#include "fldelay/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "fldelay/errors.hpp"

namespace fldelay {

namespace {

// Snaps t / T0 to the nearest integer when it is one up to rounding.
double lattice_ratio(double t, double slot_len) {
  const double k = t / slot_len;
  const double r = std::round(k);
  return std::abs(k - r) <= 1e-9 * std::max(1.0, std::abs(r)) ? r : k;
}

}  // namespace

double mean_residual_life(const SlotPmf& p, double t) {
  const double t_lat = t - p.offset_s;
  if (!(t_lat >= 0.0)) throw ValidationError("t", "mean residual life needs t >= 0");
  const double k = lattice_ratio(t_lat, p.slot_len);
  const auto up = static_cast<std::int64_t>(std::ceil(k));
  const auto down = static_cast<std::int64_t>(std::floor(k));
  const double denom = p.survival(down);
  if (!(denom > 0.0)) throw ValidationError("t", "survival is zero at t");
  double sum = 0.0;
  for (std::int64_t d = std::max(up, std::int64_t{0}); d <= p.last_slot(); ++d) sum += p.survival(d);
  return p.slot_len * static_cast<double>(up) - t_lat + p.slot_len * sum / denom;
}

double GumbelFit::cdf(double y) const { return std::exp(-std::exp(-(y - a) / b)); }

double GumbelFit::mean() const { return a + std::numbers::egamma * b; }

GumbelFit gumbel_fit(const SlotPmf& per_user, int K, Scheme scheme) {
  if (K < 2) throw ValidationError("num_users", "Gumbel fit needs K >= 2");
  const double level = 1.0 / K;
  // Survival is nonincreasing; the first slot at or under the level is the location.
  std::int64_t d = per_user.first_slot - 1;
  double surv = per_user.survival(d);
  while (surv > level) {
    ++d;
    if (d > per_user.last_slot() + 1) throw NumericalError("gumbel_fit: survival never reaches 1/K");
    surv = per_user.survival(d);
  }
  GumbelFit fit;
  fit.a_slot = d;
  fit.a = per_user.seconds(d);
  fit.b = mean_residual_life(per_user, fit.a);
  fit.num_users = K;
  fit.scheme = scheme;
  if (!(fit.b > 0.0)) throw NumericalError("gumbel_fit: nonpositive scale");
  return fit;
}

namespace {

struct Tilted {
  double log_sum = 0.0;  // ln sum p e^{s x}, unnormalized
  double mean = 0.0;
};

Tilted tilted(const SlotPmf& p, double s) {
  const double x_ref = s > 0 ? p.seconds(p.last_slot()) : p.seconds(p.first_slot);
  double w_sum = 0.0, xw_sum = 0.0;
  for (std::size_t i = 0; i < p.probs.size(); ++i) {
    const double x = p.seconds(p.first_slot + static_cast<std::int64_t>(i));
    const double w = p.probs[i] * std::exp(s * (x - x_ref));
    w_sum += w;
    xw_sum += w * x;
  }
  if (!(w_sum > 0.0)) throw NumericalError("tilted pmf has no mass");
  return {std::log(w_sum) + s * x_ref, xw_sum / w_sum};
}

double enumerated_mass(const SlotPmf& p) {
  double m = 0.0;
  for (double v : p.probs) m += v;
  return m;
}

}  // namespace

double log_mgf(const SlotPmf& p, double s) {
  return tilted(p, s).log_sum - std::log(enumerated_mass(p));
}

double solve_tilt(const SlotPmf& p, double x) {
  const double x_min = p.seconds(p.first_slot);
  const double x_max = p.seconds(p.last_slot());
  if (!(x > x_min && x < x_max))
    throw ValidationError("tau", "tilted mean target lies outside the enumerated support");
  const double mean = p.mean_seconds();
  if (x == mean) return 0.0;
  const double scale = 1.0 / std::max(std::sqrt(p.variance_slots()) * p.slot_len, 1e-300);
  double lo = 0.0, hi = 0.0;
  if (x > mean) {
    hi = scale;
    while (tilted(p, hi).mean < x) { lo = hi; hi *= 2.0; }
  } else {
    lo = -scale;
    while (tilted(p, lo).mean > x) { hi = lo; lo *= 2.0; }
  }
  const double tol = 1e-12 * std::abs(x);
  for (int i = 0; i < 400; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double m = tilted(p, mid).mean;
    if (std::abs(m - x) <= tol) return mid;
    if (m < x) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

double rate_function(const SlotPmf& p, double x) {
  const double s = solve_tilt(p, x);
  return s * x - log_mgf(p, s);
}

TailExponent ldt_tail(const SlotPmf& iteration, std::int64_t i0, double tau) {
  if (i0 < 1) throw ValidationError("i0", "must be at least 1");
  const double x = tau / static_cast<double>(i0);
  if (!(x > iteration.mean_seconds()))
    throw ValidationError("tau", "bound is vacuous for tau <= i0 * mean");
  TailExponent out;
  out.tau = tau;
  out.i0 = i0;
  out.s_star = solve_tilt(iteration, x);
  const double k = log_mgf(iteration, out.s_star);
  out.rate_value = out.s_star * x - k;
  out.log_bound = -out.s_star * tau + static_cast<double>(i0) * k;
  out.bound = std::exp(out.log_bound);
  out.residual = tilted(iteration, out.s_star).mean - x;
  out.tail_correction =
      iteration.tail_mass * std::exp(out.s_star * iteration.seconds(iteration.last_slot()) - k);
  return out;
}

double gumbel_tilt_integral(double b, double s) {
  if (!(b > 0.0)) throw ValidationError("b", "scale must be positive");
  const double sigma = s * b;
  if (!(sigma < 1.0)) throw ValidationError("s_star", "Gumbel integral diverges for s >= 1/b");
  using Quad = boost::math::quadrature::gauss_kronrod<double, 61>;
  auto f = [sigma](double u) { return std::exp((sigma - 1.0) * u - std::exp(-u)); };
  double err = 0.0;
  const double v = Quad::integrate(f, 0.0, std::numeric_limits<double>::infinity(), 20, 1e-13, &err);
  if (!(err <= 1e-9 * v)) throw NumericalError("gumbel_tilt_integral: quadrature did not converge");
  return b * v;
}

EvtLdtResult evt_ldt_tail(const GumbelFit& fit, std::int64_t i0, double tau, double s_star) {
  if (i0 < 1) throw ValidationError("i0", "must be at least 1");
  if (!(tau > static_cast<double>(i0) * fit.mean()))
    throw ValidationError("tau", "bound is vacuous for tau <= i0 * Gumbel mean");
  EvtLdtResult out;
  out.integral = gumbel_tilt_integral(fit.b, s_star);
  const double ab = fit.a / fit.b;
  const double log_factor = ab - std::exp(ab) - std::log(fit.b) + std::log(out.integral);
  out.log_bound = -s_star * tau + static_cast<double>(i0) * log_factor;
  out.bound = std::exp(out.log_bound);
  return out;
}

namespace {

double gumbel_ratio(double b, double sigma) {
  using Quad = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double inf = std::numeric_limits<double>::infinity();
  auto f0 = [sigma](double u) { return std::exp((sigma - 1.0) * u - std::exp(-u)); };
  auto f1 = [sigma](double u) { return u * std::exp((sigma - 1.0) * u - std::exp(-u)); };
  const double j0 = Quad::integrate(f0, 0.0, inf, 20, 1e-13);
  const double j1 = Quad::integrate(f1, 0.0, inf, 20, 1e-13);
  return b * j1 / j0;
}

template <class F>
double bisect_increasing(F f, double lo, double hi, double target) {
  for (int i = 0; i < 300; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (f(mid) < target) lo = mid; else hi = mid;
    if (hi - lo <= 1e-15 * std::max(1.0, std::abs(mid))) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double gumbel_integral_tilt(const GumbelFit& fit, double x) {
  if (!(x > 0.0)) throw ValidationError("tau", "target must be positive");
  double lo = -1.0;
  while (gumbel_ratio(fit.b, lo) > x) {
    lo *= 2.0;
    if (lo < -1e12) throw NumericalError("gumbel_integral_tilt: no bracket");
  }
  // The ratio grows like b / (1 - sigma) near sigma = 1.
  const double hi = 1.0 - std::min(0.5, 0.1 * fit.b / x);
  double top = hi;
  while (gumbel_ratio(fit.b, top) < x) top = 1.0 - (1.0 - top) / 4.0;
  const double sigma = bisect_increasing([&](double s) { return gumbel_ratio(fit.b, s); }, lo, top, x);
  return sigma / fit.b;
}

TailExponent gumbel_chernoff_tail(const GumbelFit& fit, std::int64_t i0, double tau) {
  if (i0 < 1) throw ValidationError("i0", "must be at least 1");
  const double x = tau / static_cast<double>(i0);
  if (!(x > fit.mean())) throw ValidationError("tau", "bound is vacuous for tau <= i0 * Gumbel mean");
  // d/ds [s a + ln Gamma(1 - s b)] = a - b digamma(1 - s b), increasing in s.
  auto tilted_mean = [&](double sigma) { return fit.a - fit.b * boost::math::digamma(1.0 - sigma); };
  double top = 0.5;
  while (tilted_mean(top) < x) top = 1.0 - (1.0 - top) / 4.0;
  const double sigma = bisect_increasing(tilted_mean, 0.0, top, x);
  TailExponent out;
  out.tau = tau;
  out.i0 = i0;
  out.s_star = sigma / fit.b;
  const double k = out.s_star * fit.a + boost::math::lgamma(1.0 - sigma);
  out.rate_value = out.s_star * x - k;
  out.log_bound = -out.s_star * tau + static_cast<double>(i0) * k;
  out.bound = std::exp(out.log_bound);
  out.residual = tilted_mean(sigma) - x;
  return out;
}

StochasticOrderReport stochastic_order_check(const EmpiricalDist& n_dist, const SlotPmf& iteration,
                                             std::int64_t i0) {
  if (i0 < 1) throw ValidationError("i0", "must be at least 1");
  n_dist.validate();
  StochasticOrderReport rep;
  rep.assumption_breach = n_dist.max_value() > i0;
  const SlotPmf random_n = compound_pmf(iteration, n_dist);
  const SlotPmf fixed = overall_pmf_fixed(iteration, i0);
  rep.truncation_bound = random_n.tail_mass + fixed.tail_mass;
  const std::int64_t lo = std::min(random_n.first_slot, fixed.first_slot) - 1;
  const std::int64_t hi = std::max(random_n.last_slot(), fixed.last_slot());
  // Survival arrays from the top down.
  auto survival_array = [&](const SlotPmf& p) {
    std::vector<double> s(static_cast<std::size_t>(hi - lo + 1));
    double acc = p.tail_mass;
    for (std::int64_t d = hi; d >= lo; --d) {
      s[static_cast<std::size_t>(d - lo)] = acc;
      acc += p.prob(d);
    }
    return s;
  };
  const std::vector<double> sn = survival_array(random_n);
  const std::vector<double> sf = survival_array(fixed);
  rep.max_violation = 0.0;
  for (std::size_t i = 0; i < sn.size(); ++i) {
    rep.max_violation = std::max(rep.max_violation, sn[i] - sf[i]);
    if (sn[i] < sf[i]) ++rep.strict_points;
  }
  rep.lattice_points = static_cast<std::int64_t>(sn.size());
  return rep;
}

}  // namespace fldelay
