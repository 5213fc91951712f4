#pragma once

namespace fldelay {

/// Upper incomplete gamma function Gamma(a, x) for real a and x > 0.
/// Continued fraction for x >= a + 1, series complement otherwise. Values that
/// exceed the double range overflow to infinity.
double upper_incomplete_gamma(double a, double x);

/// Exponential integral E1(x) = Gamma(0, x), x > 0.
double exponential_integral_e1(double x);

double normal_pdf(double x);
double normal_cdf(double x);
/// 1 - Phi(x) without cancellation for large x.
double normal_sf(double x);

/// expm1(x) - x, accurate near zero.
double expm1_minus_x(double x);

}  // namespace fldelay
