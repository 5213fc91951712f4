#include "fldelay/saddlepoint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "fldelay/errors.hpp"
#include "fldelay/special.hpp"

namespace fldelay {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SaddleInfo finish(const CgfSpec& spec, double s, const CgfValue& v) {
  SaddleInfo info;
  info.d = spec.d;
  info.s_star = s;
  info.cgf_at_star = v.k;
  info.cgf_d2_at_star = v.k2;
  info.cgf_d3_at_star = v.k3;
  info.residual = v.k1;
  const double sign = s > 0 ? 1.0 : (s < 0 ? -1.0 : 0.0);
  info.omega = sign * std::sqrt(std::max(0.0, -2.0 * v.k));
  info.psi = s * std::sqrt(v.k2);
  return info;
}

SaddleInfo saturated(const CgfSpec& spec, double s, const CgfValue& v, int side) {
  SaddleInfo info = finish(spec, s, v);
  info.saturated = side;
  return info;
}

}  // namespace

SaddleInfo solve_saddle(const CgfSpec& spec) {
  spec.validate();
  if (spec.d == 0) {
    SaddleInfo info;
    info.omega = -kInf;
    info.psi = -kInf;
    return info;
  }
  const double tol = 1e-10 * std::max(1.0, spec.c);
  const CgfValue at0 = cgf_all(spec, 0.0);
  if (std::abs(at0.k1) <= tol) return finish(spec, 0.0, at0);

  // K' is increasing. Expand away from 0 until K' changes sign.
  double lo = 0.0, hi = 0.0;
  CgfValue vlo = at0, vhi = at0;
  if (at0.k1 > 0.0) {
    double probe = -1.0;
    for (int i = 0;; ++i) {
      const CgfValue v = cgf_all(spec, probe);
      if (v.k < kSaturationLog) return saturated(spec, probe, v, +1);
      if (v.k1 <= 0.0) { lo = probe; vlo = v; break; }
      hi = probe; vhi = v;
      if (i > 1100) throw NumericalError("solve_saddle: no bracket for d = " + std::to_string(spec.d));
      probe *= 2.0;
    }
  } else {
    double probe = 1.0;
    for (int i = 0;; ++i) {
      const CgfValue v = cgf_all(spec, probe);
      if (v.k < kSaturationLog) return saturated(spec, probe, v, -1);
      if (v.k1 >= 0.0) { hi = probe; vhi = v; break; }
      lo = probe; vlo = v;
      if (i > 1100) throw NumericalError("solve_saddle: no bracket for d = " + std::to_string(spec.d));
      probe *= 2.0;
    }
  }
  if (std::abs(vlo.k1) <= tol) return finish(spec, lo, vlo);
  if (std::abs(vhi.k1) <= tol) return finish(spec, hi, vhi);

  // Newton steps kept inside the bracket, bisection otherwise.
  double s = vlo.k2 > vhi.k2 ? lo : hi;
  CgfValue v = s == lo ? vlo : vhi;
  for (int iter = 0; iter < 300; ++iter) {
    double next = v.k2 > 0.0 ? s - v.k1 / v.k2 : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == s) next = 0.5 * (lo + hi);
    s = next;
    v = cgf_all(spec, s);
    if (std::abs(v.k1) <= tol) return finish(spec, s, v);
    if (v.k1 < 0.0) lo = s; else hi = s;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi))) {
      // At machine resolution in s; accept the last evaluation.
      return finish(spec, s, v);
    }
  }
  throw NumericalError("solve_saddle: refinement did not converge for d = " + std::to_string(spec.d));
}

double lr_tail(const SaddleInfo& info) {
  if (info.d == 0) return 1.0;
  if (info.saturated > 0) return 1.0;
  if (info.saturated < 0) return 0.0;
  double p;
  if (std::abs(info.s_star) < kNearMeanTilt || info.omega == 0.0 || info.cgf_at_star >= 0.0) {
    // Limit of the LR formula as s* -> 0, kept to first order in psi.
    const double k2 = info.cgf_d2_at_star;
    const double root2pi = std::sqrt(2.0 * std::numbers::pi);
    p = 0.5 - info.psi / root2pi - info.cgf_d3_at_star / (6.0 * root2pi * std::pow(k2, 1.5));
  } else {
    p = normal_sf(info.omega) + normal_pdf(info.omega) * (1.0 / info.psi - 1.0 / info.omega);
  }
  if (!std::isfinite(p)) throw NumericalError("lr_tail: non-finite value at d = " + std::to_string(info.d));
  return std::clamp(p, 0.0, 1.0);
}

CgfSpec family_spec(SlotFamily family, const SystemConfig& config, int d) {
  CgfSpec spec;
  spec.d = d;
  switch (family) {
    case SlotFamily::user_uplink:
      spec.c = config.uplink_threshold();
      spec.density = {RateKind::uplink_single, config.snr_ul, 1};
      break;
    case SlotFamily::sync_downlink:
      spec.c = config.downlink_threshold();
      spec.density = {RateKind::downlink_min_of_k, config.snr_dl, config.num_users};
      break;
    case SlotFamily::async_downlink:
      spec.c = config.downlink_threshold();
      spec.density = {RateKind::downlink_single, config.snr_dl, 1};
      break;
  }
  return spec;
}

SlotPmfBuild build_slot_pmf(SlotFamily family, const SystemConfig& config, double tail_budget) {
  config.validate();
  if (!(tail_budget > 0.0)) tail_budget = config.truncation_eps;
  SlotPmfBuild out;
  out.tails.push_back(1.0);
  out.saddles.push_back(solve_saddle(family_spec(family, config, 0)));
  std::vector<double> p;
  for (int d = 1;; ++d) {
    if (d > kMaxSlots)
      throw NumericalError("slot_pmf: tail budget not reached within " + std::to_string(kMaxSlots) + " slots");
    const SaddleInfo info = solve_saddle(family_spec(family, config, d));
    const double tail = lr_tail(info);
    out.saddles.push_back(info);
    out.tails.push_back(tail);
    p.push_back(out.tails[d - 1] - tail);
    if (tail < tail_budget) break;
  }

  double excess = 0.0;
  for (double& v : p) {
    if (v < 0.0) {
      if (v < -1e-12)
        throw NumericalError("slot_pmf: tail approximation not monotone, entry " + std::to_string(v));
      excess -= v;
      v = 0.0;
      ++out.clamp_events;
    }
  }
  SlotPmf& pmf = out.pmf;
  pmf.slot_len = config.slot_len_s;
  pmf.first_slot = 1;
  pmf.tail_mass = std::max(0.0, out.tails.back() - excess);
  std::size_t lead = 0;
  while (lead + 1 < p.size() && p[lead] == 0.0) ++lead;
  pmf.first_slot += static_cast<std::int64_t>(lead);
  pmf.probs.assign(p.begin() + static_cast<std::ptrdiff_t>(lead), p.end());
  return out;
}

SlotPmf slot_pmf(SlotFamily family, const SystemConfig& config, double tail_budget) {
  return build_slot_pmf(family, config, tail_budget).pmf;
}

}  // namespace fldelay
