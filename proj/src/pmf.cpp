#include "fldelay/pmf.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>

#include <fftw3.h>

#include "fldelay/errors.hpp"
#include "fftw_lock.hpp"

namespace fldelay {

double SlotPmf::prob(std::int64_t d) const {
  if (d < first_slot || d > last_slot()) return 0.0;
  return probs[static_cast<std::size_t>(d - first_slot)];
}

double SlotPmf::cdf(std::int64_t d) const {
  if (d < first_slot) return 0.0;
  const std::int64_t stop = std::min(d, last_slot());
  double acc = 0.0;
  for (std::int64_t i = first_slot; i <= stop; ++i) acc += probs[static_cast<std::size_t>(i - first_slot)];
  return acc;
}

double SlotPmf::survival(std::int64_t d) const {
  double acc = tail_mass;
  const std::int64_t start = std::max(d + 1, first_slot);
  for (std::int64_t i = last_slot(); i >= start; --i) acc += probs[static_cast<std::size_t>(i - first_slot)];
  return acc;
}

double SlotPmf::total_mass() const {
  return std::accumulate(probs.begin(), probs.end(), 0.0) + tail_mass;
}

double SlotPmf::mean_slots() const {
  double m = 0.0, w = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    m += probs[i] * static_cast<double>(i);
    w += probs[i];
  }
  if (!(w > 0.0)) throw NumericalError("mean of an empty pmf");
  return static_cast<double>(first_slot) + m / w;
}

double SlotPmf::variance_slots() const {
  const double mu = mean_slots() - static_cast<double>(first_slot);
  double v = 0.0, w = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double y = static_cast<double>(i) - mu;
    v += probs[i] * y * y;
    w += probs[i];
  }
  return v / w;
}

void SlotPmf::check(double tol) const {
  for (double p : probs)
    if (!(p >= 0.0)) throw NumericalError("pmf has a negative or non-finite entry");
  if (!(tail_mass >= 0.0)) throw NumericalError("pmf has negative tail mass");
  const double total = total_mass();
  if (std::abs(total - 1.0) > tol)
    throw NumericalError("pmf mass " + std::to_string(total) + " differs from 1");
}

SlotPmf point_mass(std::int64_t d, double slot_len) {
  SlotPmf p;
  p.first_slot = d;
  p.probs = {1.0};
  p.slot_len = slot_len;
  return p;
}

void trim_pmf(SlotPmf& p, double rel_threshold) {
  if (p.probs.empty()) return;
  const double peak = *std::max_element(p.probs.begin(), p.probs.end());
  const double cut = peak * rel_threshold;
  std::size_t lo = 0, hi = p.probs.size();
  double dropped = 0.0;
  while (lo + 1 < hi && p.probs[lo] <= cut) dropped += std::max(0.0, p.probs[lo++]);
  while (hi - 1 > lo && p.probs[hi - 1] <= cut) dropped += std::max(0.0, p.probs[--hi]);
  if (lo > 0 || hi < p.probs.size()) {
    p.probs = std::vector<double>(p.probs.begin() + static_cast<std::ptrdiff_t>(lo),
                                  p.probs.begin() + static_cast<std::ptrdiff_t>(hi));
    p.first_slot += static_cast<std::int64_t>(lo);
    p.tail_mass += dropped;
  }
}

namespace {

std::vector<double> direct(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ai = a[i];
    if (ai == 0.0) continue;
    double* o = out.data() + i;
    for (std::size_t j = 0; j < b.size(); ++j) o[j] += ai * b[j];
  }
  return out;
}

std::vector<double> spectral(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n_out = a.size() + b.size() - 1;
  std::size_t n = 1;
  while (n < n_out) n <<= 1;
  const std::size_t nc = n / 2 + 1;
  double* in = fftw_alloc_real(n);
  fftw_complex* fa = fftw_alloc_complex(nc);
  fftw_complex* fb = fftw_alloc_complex(nc);
  fftw_plan pa, pb, pinv;
  {
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    pa = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, fa, FFTW_ESTIMATE);
    pb = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, fb, FFTW_ESTIMATE);
    pinv = fftw_plan_dft_c2r_1d(static_cast<int>(n), fa, in, FFTW_ESTIMATE);
  }
  std::fill(in, in + n, 0.0);
  std::copy(a.begin(), a.end(), in);
  fftw_execute(pa);
  std::fill(in, in + n, 0.0);
  std::copy(b.begin(), b.end(), in);
  fftw_execute(pb);
  for (std::size_t k = 0; k < nc; ++k) {
    const double re = fa[k][0] * fb[k][0] - fa[k][1] * fb[k][1];
    const double im = fa[k][0] * fb[k][1] + fa[k][1] * fb[k][0];
    fa[k][0] = re;
    fa[k][1] = im;
  }
  fftw_execute(pinv);
  std::vector<double> out(in, in + n_out);
  for (double& v : out) v /= static_cast<double>(n);
  {
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(pa);
    fftw_destroy_plan(pb);
    fftw_destroy_plan(pinv);
  }
  fftw_free(in);
  fftw_free(fa);
  fftw_free(fb);
  return out;
}

SlotPmf assemble(const SlotPmf& p, const SlotPmf& q, std::vector<double> r) {
  if (p.slot_len != q.slot_len) throw ValidationError("convolve_pmf: slot lengths differ");
  SlotPmf out;
  out.first_slot = p.first_slot + q.first_slot;
  out.slot_len = p.slot_len;
  out.offset_s = p.offset_s + q.offset_s;
  out.tail_mass = p.tail_mass + q.tail_mass;
  // Round-off of the spectral path leaves tiny negative values.
  for (double& v : r) v = std::max(v, 0.0);
  out.probs = std::move(r);
  trim_pmf(out);
  return out;
}

void check_support(const SlotPmf& p, const SlotPmf& q) {
  if (p.probs.empty() || q.probs.empty()) throw ValidationError("convolve_pmf: empty pmf");
  if (p.size() + q.size() - 1 > kMaxSupport)
    throw NumericalError("convolve_pmf: support exceeds " + std::to_string(kMaxSupport) + " entries");
}

}  // namespace

std::vector<double> convolve_sequences(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) return {};
  if (std::min(a.size(), b.size()) <= kDirectConvolutionLimit) return direct(a, b);
  return spectral(a, b);
}

SlotPmf convolve_pmf(const SlotPmf& p, const SlotPmf& q) {
  check_support(p, q);
  return assemble(p, q, convolve_sequences(p.probs, q.probs));
}

SlotPmf convolve_pmf_direct(const SlotPmf& p, const SlotPmf& q) {
  check_support(p, q);
  return assemble(p, q, direct(p.probs, q.probs));
}

SlotPmf convolve_pmf_spectral(const SlotPmf& p, const SlotPmf& q) {
  check_support(p, q);
  return assemble(p, q, spectral(p.probs, q.probs));
}

SlotPmf max_order_pmf(const SlotPmf& p, int K) {
  if (K < 1) throw ValidationError("num_users", "max order needs K >= 1");
  if (p.probs.empty()) throw ValidationError("max_order_pmf: empty pmf");
  SlotPmf out = p;
  if (K == 1) return out;
  const std::size_t n = p.probs.size();
  // Survival after each entry, accumulated from the top so small values stay accurate.
  std::vector<double> surv(n);
  double acc = p.tail_mass;
  for (std::size_t i = n; i-- > 0;) {
    surv[i] = acc;
    acc += p.probs[i];
  }
  const double k = static_cast<double>(K);
  double prev_log = -INFINITY;  // log F(first_slot - 1)^K
  for (std::size_t i = 0; i < n; ++i) {
    const double cur_log = surv[i] >= 1.0 ? -INFINITY : k * std::log1p(-surv[i]);
    double q = 0.0;
    if (cur_log > -INFINITY) {
      // F^K - F_prev^K = F^K (1 - e^{prev - cur}); both factors stay finite when F^K underflows.
      q = prev_log == -INFINITY ? std::exp(cur_log) : -std::exp(cur_log) * std::expm1(prev_log - cur_log);
    }
    out.probs[i] = std::max(q, 0.0);
    prev_log = cur_log;
  }
  out.tail_mass = -std::expm1(k * std::log1p(-std::min(p.tail_mass, 1.0)));
  trim_pmf(out);
  return out;
}

}  // namespace fldelay
