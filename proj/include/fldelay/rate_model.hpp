#pragma once

namespace fldelay {

/// Which channel feeds the per-slot rate r = ln(1 + lambda_eff g), g ~ Exp(mean 2).
enum class RateKind {
  uplink_single,      // lambda_eff = lambda
  downlink_min_of_k,  // broadcast limited by the worst of K channels, lambda_eff = lambda_d / K
  downlink_single,    // lambda_eff = lambda_d
};

struct RateDensity {
  RateKind kind = RateKind::uplink_single;
  double snr = 1.0;  // linear
  int num_users = 1;

  double effective_snr() const;
  void validate() const;
};

/// f(r) = x0 e^{x0} e^{r - x0 e^r} for r >= 0 with x0 = 1 / (2 lambda_eff).
double density_at(const RateDensity& density, double r);
double rate_cdf(const RateDensity& density, double r);

/// Moments of the exponentially tilted rate law e^{-s r} f(r) / m0(s).
struct TiltedMoments {
  double log_m0 = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  double third_central = 0.0;
  double error = 0.0;  // largest relative quadrature error estimate
};

inline constexpr double kDefaultQuadTol = 1e-10;

/// Throws NumericalError if the quadrature error estimate exceeds quad_tol.
TiltedMoments tilted_moments(const RateDensity& density, double s, double quad_tol = kDefaultQuadTol);

/// m_j(s) = int_0^inf r^j e^{-s r} f(r) dr for j in {0, 1, 2}.
double tilted_moment(const RateDensity& density, int j, double s, double quad_tol = kDefaultQuadTol);

/// m0(s) = e^{x0} x0^{s} Gamma(1 - s, x0), through the incomplete gamma function.
double closed_form_m0(const RateDensity& density, double s);

/// Z_d = c - sum_{t=1}^{d} r_t with c = S / (B T0).
struct CgfSpec {
  int d = 0;
  double c = 0.0;
  RateDensity density;

  void validate() const;
};

struct CgfValue {
  double k = 0.0;   // K_d(s)
  double k1 = 0.0;  // K_d'(s)
  double k2 = 0.0;  // K_d''(s)
  double k3 = 0.0;  // K_d'''(s)
};

CgfValue cgf_all(const CgfSpec& spec, double s, double quad_tol = kDefaultQuadTol);
double cgf(const CgfSpec& spec, double s);
double cgf_d1(const CgfSpec& spec, double s);
double cgf_d2(const CgfSpec& spec, double s);

}  // namespace fldelay
