#include "fldelay/overall.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <sstream>
#include <vector>

#include <fftw3.h>

#include "fldelay/errors.hpp"
#include "fftw_lock.hpp"

namespace fldelay {

std::int64_t EmpiricalDist::min_value() const {
  if (probs.empty()) throw ValidationError("empty distribution");
  return probs.begin()->first;
}

std::int64_t EmpiricalDist::max_value() const {
  if (probs.empty()) throw ValidationError("empty distribution");
  return probs.rbegin()->first;
}

double EmpiricalDist::mean() const {
  double m = 0.0;
  for (const auto& [n, p] : probs) m += static_cast<double>(n) * p;
  return m;
}

double EmpiricalDist::variance() const {
  const double mu = mean();
  double v = 0.0;
  for (const auto& [n, p] : probs) v += p * (static_cast<double>(n) - mu) * (static_cast<double>(n) - mu);
  return v;
}

void EmpiricalDist::validate(double tol) const {
  if (probs.empty()) throw ValidationError("n_dist", "distribution is empty");
  double total = 0.0;
  for (const auto& [n, p] : probs) {
    if (n < 0) throw ValidationError("n_dist", "values must be nonnegative");
    if (!(p >= 0.0)) throw ValidationError("n_dist", "probabilities must be nonnegative");
    total += p;
  }
  if (std::abs(total - 1.0) > tol) {
    std::ostringstream msg;
    msg << "probabilities sum to " << total << ", normalization gap " << (1.0 - total);
    throw ValidationError("n_dist", msg.str());
  }
}

EmpiricalDist point_mass_dist(std::int64_t n) {
  EmpiricalDist out;
  out.probs[n] = 1.0;
  out.provenance = "synthetic";
  return out;
}

EmpiricalDist parse_n_distribution(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::pair<std::int64_t, double>> rows;
  int line_no = 0;
  bool seen_data = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::replace(line.begin(), line.end(), '\t', ' ');
    std::istringstream fields(line);
    std::string a, b, extra;
    if (!(fields >> a)) continue;
    if (!(fields >> b) || (fields >> extra))
      throw ValidationError("n_dist", "line " + std::to_string(line_no) + ": expected two columns");
    double n = 0.0, w = 0.0;
    try {
      std::size_t ia = 0, ib = 0;
      n = std::stod(a, &ia);
      w = std::stod(b, &ib);
      if (ia != a.size() || ib != b.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      if (!seen_data && rows.empty()) {
        seen_data = true;  // header row
        continue;
      }
      throw ValidationError("n_dist", "line " + std::to_string(line_no) + ": expected numbers");
    }
    seen_data = true;
    if (n < 0 || n != std::floor(n))
      throw ValidationError("n_dist", "line " + std::to_string(line_no) + ": iteration count must be a nonnegative integer");
    if (!(w >= 0.0) || !std::isfinite(w))
      throw ValidationError("n_dist", "line " + std::to_string(line_no) + ": weight must be nonnegative");
    rows.emplace_back(static_cast<std::int64_t>(n), w);
  }
  if (rows.empty()) throw ValidationError("n_dist", "no rows");

  const bool counts = std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.second == std::floor(r.second); });
  double total = 0.0;
  for (const auto& r : rows) total += r.second;
  if (!(total > 0.0)) throw ValidationError("n_dist", "weights sum to zero");

  EmpiricalDist out;
  out.provenance = "file";
  for (const auto& [n, w] : rows) {
    if (out.probs.count(n)) throw ValidationError("n_dist", "duplicate iteration count " + std::to_string(n));
    out.probs[n] = counts ? w / total : w;
  }
  out.validate();
  // Drop zero-weight rows so the support reflects the data.
  std::erase_if(out.probs, [](const auto& kv) { return kv.second == 0.0; });
  return out;
}

EmpiricalDist load_n_distribution(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("n_dist", "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_n_distribution(buf.str());
}

SlotPmf overall_pmf_fixed(const SlotPmf& iteration, std::int64_t n) {
  if (n < 1) throw ValidationError("n", "iteration count must be at least 1");
  SlotPmf result;
  bool have = false;
  SlotPmf base = iteration;
  for (std::int64_t k = n;;) {
    if (k & 1) {
      result = have ? convolve_pmf(result, base) : base;
      have = true;
    }
    k >>= 1;
    if (!k) break;
    base = convolve_pmf(base, base);
  }
  return result;
}

SlotPmf overall_pmf_fixed_naive(const SlotPmf& iteration, std::int64_t n) {
  if (n < 1) throw ValidationError("n", "iteration count must be at least 1");
  SlotPmf result = iteration;
  for (std::int64_t k = 1; k < n; ++k) result = convolve_pmf(result, iteration);
  return result;
}

namespace {

void check_compound_inputs(const SlotPmf& iteration, const EmpiricalDist& n_dist) {
  n_dist.validate();
  if (iteration.offset_s != 0.0)
    throw ValidationError("compute_delay_s", "random round counts need a zero compute delay");
  if (iteration.probs.empty()) throw ValidationError("compound_pmf: empty iteration pmf");
}

double compound_tail(const SlotPmf& iteration, const EmpiricalDist& n_dist) {
  // Sum_n Pr{N = n} (1 - (1 - t)^n): mass that some summand left unenumerated.
  double tail = 0.0;
  const double lt = std::log1p(-std::min(iteration.tail_mass, 1.0));
  for (const auto& [n, p] : n_dist.probs) tail += p * -std::expm1(static_cast<double>(n) * lt);
  return tail;
}

std::complex<double> ipow(std::complex<double> w, std::int64_t n) {
  std::complex<double> r = 1.0;
  while (n > 0) {
    if (n & 1) r *= w;
    w *= w;
    n >>= 1;
  }
  return r;
}

}  // namespace

SlotPmf compound_pmf(const SlotPmf& iteration, const EmpiricalDist& n_dist) {
  check_compound_inputs(iteration, n_dist);
  const std::int64_t last = iteration.last_slot();
  const std::int64_t n_max = n_dist.max_value();
  const std::int64_t n_min = n_dist.min_value();
  const std::int64_t degree = std::max<std::int64_t>(n_max * last, 1);
  const std::int64_t low = n_min * iteration.first_slot;
  if (degree + 1 > static_cast<std::int64_t>(kMaxSupport))
    throw NumericalError("compound_pmf: transform grid exceeds the support cap");

  std::size_t m = 1;
  while (m < static_cast<std::size_t>(degree + 1)) m <<= 1;
  const std::size_t mc = m / 2 + 1;
  double* in = fftw_alloc_real(m);
  fftw_complex* spec = fftw_alloc_complex(mc);
  fftw_plan fwd, inv;
  {
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    fwd = fftw_plan_dft_r2c_1d(static_cast<int>(m), in, spec, FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r_1d(static_cast<int>(m), spec, in, FFTW_ESTIMATE);
  }
  std::fill(in, in + m, 0.0);
  for (std::size_t i = 0; i < iteration.probs.size(); ++i)
    in[static_cast<std::size_t>(iteration.first_slot) + i] = iteration.probs[i];
  fftw_execute(fwd);
  for (std::size_t k = 0; k < mc; ++k) {
    const std::complex<double> w(spec[k][0], spec[k][1]);
    std::complex<double> g = 0.0;
    std::complex<double> power = 1.0;
    std::int64_t at = 0;
    for (const auto& [n, p] : n_dist.probs) {
      power *= ipow(w, n - at);
      at = n;
      g += p * power;
    }
    spec[k][0] = g.real();
    spec[k][1] = g.imag();
  }
  fftw_execute(inv);

  SlotPmf out;
  out.slot_len = iteration.slot_len;
  out.first_slot = low;
  out.probs.assign(in + low, in + degree + 1);
  for (double& v : out.probs) v = std::max(0.0, v / static_cast<double>(m));
  {
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
  }
  fftw_free(in);
  fftw_free(spec);
  out.tail_mass = compound_tail(iteration, n_dist);
  trim_pmf(out);
  return out;
}

SlotPmf compound_pmf_direct(const SlotPmf& iteration, const EmpiricalDist& n_dist) {
  check_compound_inputs(iteration, n_dist);
  const std::int64_t n_max = n_dist.max_value();
  const std::int64_t low = n_dist.min_value() * iteration.first_slot;
  const std::int64_t high = n_max * iteration.last_slot();
  std::vector<double> acc(static_cast<std::size_t>(high - low + 1), 0.0);
  auto add = [&](const SlotPmf& part, double weight) {
    for (std::size_t i = 0; i < part.probs.size(); ++i)
      acc[static_cast<std::size_t>(part.first_slot - low) + i] += weight * part.probs[i];
  };
  if (auto it = n_dist.probs.find(0); it != n_dist.probs.end()) add(point_mass(0, iteration.slot_len), it->second);
  SlotPmf power = iteration;
  for (std::int64_t n = 1; n <= n_max; ++n) {
    if (n > 1) power = convolve_pmf_direct(power, iteration);
    if (auto it = n_dist.probs.find(n); it != n_dist.probs.end()) add(power, it->second);
  }
  SlotPmf out;
  out.slot_len = iteration.slot_len;
  out.first_slot = low;
  out.probs = std::move(acc);
  out.tail_mass = compound_tail(iteration, n_dist);
  trim_pmf(out);
  return out;
}

}  // namespace fldelay
