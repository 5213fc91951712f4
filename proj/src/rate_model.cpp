#include "fldelay/rate_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fldelay/errors.hpp"
#include "fldelay/special.hpp"

namespace fldelay {

double RateDensity::effective_snr() const {
  return kind == RateKind::downlink_min_of_k ? snr / num_users : snr;
}

void RateDensity::validate() const {
  if (!std::isfinite(snr) || snr <= 0.0) throw ValidationError("snr", "must be positive");
  if (num_users < 1) throw ValidationError("num_users", "must be at least 1");
}

double density_at(const RateDensity& density, double r) {
  if (!(r >= 0.0)) return 0.0;
  const double x0 = 0.5 / density.effective_snr();
  return x0 * std::exp(x0 + r - x0 * std::exp(r));
}

double rate_cdf(const RateDensity& density, double r) {
  if (!(r > 0.0)) return 0.0;
  const double x0 = 0.5 / density.effective_snr();
  return -std::expm1(-x0 * std::expm1(r));
}

namespace {

// Log-integrand offsets below this are dropped; e^{-45} is far under any tolerance used.
constexpr double kWindow = 45.0;

// Bisection for the point where a monotone g crosses zero between lo and hi.
template <class G>
double crossing(G g, double lo, double hi) {
  const bool lo_negative = g(lo) < 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if ((g(mid) < 0.0) == lo_negative) lo = mid; else hi = mid;
    if (std::abs(hi - lo) <= 1e-14 * std::max(std::abs(lo), std::abs(hi))) break;
  }
  return 0.5 * (lo + hi);
}

// Integration window in x = r - r_peak where the log-integrand offset dh(x) stays above -kWindow.
struct Window {
  double peak = 0.0;     // r at the maximum of the tilted integrand over r >= 0
  double h_peak = 0.0;   // a r - x0 e^r at the peak
  double lo = 0.0;
  double hi = 0.0;
  bool interior = false;  // peak strictly inside (0, inf)
  double a = 0.0;
  double x0 = 0.0;

  double dh(double x) const {
    if (interior) return -a * expm1_minus_x(x);
    return a * x - x0 * std::expm1(x);
  }
};

Window make_window(double s, double x0) {
  Window w;
  w.a = 1.0 - s;
  w.x0 = x0;
  w.interior = w.a > x0;
  if (w.interior) {
    w.peak = std::log(w.a / x0);
    w.h_peak = w.a * w.peak - w.a;
    auto g = [&](double x) { return w.dh(x) + kWindow; };
    const double width = std::sqrt(2.0 * kWindow / w.a);
    double hi = width;
    while (g(hi) > 0.0) hi *= 2.0;
    w.hi = crossing(g, 0.0, hi);
    if (g(-w.peak) >= 0.0) {
      w.lo = -w.peak;
    } else {
      double lo = -width;
      while (lo > -w.peak && g(lo) > 0.0) lo *= 2.0;
      lo = std::max(lo, -w.peak);
      w.lo = crossing(g, lo, 0.0);
    }
  } else {
    w.peak = 0.0;
    w.h_peak = -x0;
    auto g = [&](double x) { return w.dh(x) + kWindow; };
    double hi = 1e-300;
    while (g(hi) > 0.0) hi *= 2.0;
    w.lo = 0.0;
    w.hi = crossing(g, hi / 2.0, hi);
  }
  return w;
}

template <class F>
double integrate(F f, const Window& w, double tol, double& rel_err) {
  using Quad = boost::math::quadrature::gauss_kronrod<double, 31>;
  double total = 0.0;
  double err = 0.0;
  // Each piece is mapped onto [0, 1]: this Boost version compares an unscaled
  // error estimate with a scaled tolerance, so the interval length must be O(1).
  auto piece = [&](double a, double b) {
    const double len = b - a;
    double e = 0.0;
    double l1 = 0.0;
    total += len * Quad::integrate([&](double t) { return f(a + len * t); }, 0.0, 1.0, 15, tol, &e, &l1);
    err += len * e;
  };
  if (w.lo < 0.0 && w.hi > 0.0) {
    piece(w.lo, 0.0);
    piece(0.0, w.hi);
  } else {
    piece(w.lo, w.hi);
  }
  rel_err = total != 0.0 ? err / std::abs(total) : err;
  return total;
}

}  // namespace

TiltedMoments tilted_moments(const RateDensity& density, double s, double quad_tol) {
  density.validate();
  if (!std::isfinite(s)) throw ValidationError("tilted_moments: tilt must be finite");
  const double x0 = 0.5 / density.effective_snr();
  const Window w = make_window(s, x0);
  const double inner_tol = std::min(1e-12, quad_tol * 1e-2);

  TiltedMoments out;
  double e0 = 0.0, e1 = 0.0, e2 = 0.0, e3 = 0.0;
  const double i0 = integrate([&](double x) { return std::exp(w.dh(x)); }, w, inner_tol, e0);
  if (!(i0 > 0.0) || !std::isfinite(i0))
    throw NumericalError("tilted_moments: degenerate normalizer at s = " + std::to_string(s));
  const double i1 = integrate([&](double x) { return x * std::exp(w.dh(x)); }, w, inner_tol, e1);
  const double mx = i1 / i0;
  const double i2 = integrate(
      [&](double x) { const double y = x - mx; return y * y * std::exp(w.dh(x)); }, w, inner_tol, e2);
  const double i3 = integrate(
      [&](double x) { const double y = x - mx; return y * y * y * std::exp(w.dh(x)); }, w, inner_tol, e3);

  out.log_m0 = std::log(x0) + x0 + w.h_peak + std::log(i0);
  out.mean = w.peak + mx;
  out.variance = i2 / i0;
  out.third_central = i3 / i0;
  // The third central moment can be near zero, so its error is judged against variance^{3/2}.
  const double e3_scaled = std::abs(i3) * e3 / (i0 * std::pow(out.variance, 1.5));
  out.error = std::max({e0, e2, e3_scaled,
                        std::abs(i1) * e1 / (i0 * std::max(std::abs(out.mean), std::sqrt(out.variance)))});
  if (out.error > quad_tol)
    throw NumericalError("tilted_moments: quadrature error " + std::to_string(out.error) +
                         " exceeds tolerance at s = " + std::to_string(s));
  return out;
}

double tilted_moment(const RateDensity& density, int j, double s, double quad_tol) {
  const TiltedMoments m = tilted_moments(density, s, quad_tol);
  const double m0 = std::exp(m.log_m0);
  switch (j) {
    case 0: return m0;
    case 1: return m0 * m.mean;
    case 2: return m0 * (m.variance + m.mean * m.mean);
    default: throw ValidationError("tilted_moment: order must be 0, 1 or 2");
  }
}

double closed_form_m0(const RateDensity& density, double s) {
  const double x0 = 0.5 / density.effective_snr();
  return std::exp(x0 + s * std::log(x0)) * upper_incomplete_gamma(1.0 - s, x0);
}

void CgfSpec::validate() const {
  if (d < 0) throw ValidationError("d", "slot count must be nonnegative");
  if (!std::isfinite(c) || c <= 0.0) throw ValidationError("c", "offset must be positive");
  density.validate();
}

CgfValue cgf_all(const CgfSpec& spec, double s, double quad_tol) {
  spec.validate();
  CgfValue v;
  if (spec.d == 0) {
    v.k = spec.c * s;
    v.k1 = spec.c;
    return v;
  }
  const TiltedMoments m = tilted_moments(spec.density, s, quad_tol);
  v.k = spec.c * s + spec.d * m.log_m0;
  v.k1 = spec.c - spec.d * m.mean;
  v.k2 = spec.d * m.variance;
  v.k3 = -spec.d * m.third_central;
  return v;
}

double cgf(const CgfSpec& spec, double s) { return cgf_all(spec, s).k; }
double cgf_d1(const CgfSpec& spec, double s) { return cgf_all(spec, s).k1; }
double cgf_d2(const CgfSpec& spec, double s) { return cgf_all(spec, s).k2; }

}  // namespace fldelay
