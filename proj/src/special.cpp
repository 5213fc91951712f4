#include "fldelay/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "fldelay/errors.hpp"

namespace fldelay {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Modified Lentz evaluation of
//   Gamma(a, x) = e^{-x} x^a / (x + 1 - a - 1(1 - a) / (x + 3 - a - 2(2 - a) / ...)).
double continued_fraction(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 4 * kEps) {
      return std::exp(a * std::log(x) - x) * h;
    }
  }
  throw NumericalError("upper_incomplete_gamma: continued fraction did not converge");
}

// Sum_{n>=1} (-1)^n x^{a+n} / (n! (a+n)), the tail of the alternating series for gamma(a, x).
double alternating_tail(double a, double x) {
  double term = 1.0;
  double sum = 0.0;
  for (int n = 1; n < 500; ++n) {
    term *= -x / n;
    const double add = term / (a + n);
    sum += add;
    if (std::abs(add) < kEps * std::abs(sum)) break;
  }
  return sum;
}

}  // namespace

double expm1_minus_x(double x) {
  if (std::abs(x) < 0.1) {
    double term = x * x / 2.0;
    double sum = term;
    for (int n = 3; n < 40; ++n) {
      term *= x / n;
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  return std::expm1(x) - x;
}

double upper_incomplete_gamma(double a, double x) {
  if (!(x > 0.0) || !std::isfinite(a) || !std::isfinite(x))
    throw ValidationError("upper_incomplete_gamma: requires x > 0 and finite a");
  if (x >= a + 1.0 && x >= 1.0) return continued_fraction(a, x);
  if (a < 0.0 && !(std::abs(a) < 1.0 && x < a + 1.0)) {
    // Small x and negative a: the fraction converges slowly, so step down with
    // Gamma(a, x) = (Gamma(a + 1, x) - x^a e^{-x}) / a from a + n in [0, 1).
    const double n = std::ceil(-a);
    double b = a + n;
    if (b >= 1.0) b -= 1.0;
    double g = upper_incomplete_gamma(b, x);
    for (double c = b - 1.0; c >= a - 0.5; c -= 1.0) g = (g - std::exp(c * std::log(x) - x)) / c;
    return g;
  }
  if (std::abs(a) < 1.0) {
    // Gamma(a) - x^a / a, written so that the a -> 0 limit -gamma_E - ln x is reached smoothly.
    const double lx = std::log(x);
    const double g = a == 0.0 ? -std::numbers::egamma : boost::math::tgamma1pm1(a) / a;
    const double p = a == 0.0 ? lx : std::expm1(a * lx) / a;
    return g - p - std::exp(a * lx) * alternating_tail(a, x);
  }
  // Gamma(a) - gamma(a, x) with gamma(a, x) = x^a e^{-x} sum_n x^n / (a (a+1) ... (a+n)).
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < 10000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (term < kEps * sum) break;
  }
  const double lower = std::exp(a * std::log(x) - x) * sum;
  return boost::math::tgamma(a) - lower;
}

double exponential_integral_e1(double x) { return upper_incomplete_gamma(0.0, x); }

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

}  // namespace fldelay
