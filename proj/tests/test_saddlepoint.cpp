#include <doctest.h>

#include <cmath>
#include <initializer_list>

#include "fldelay/config.hpp"
#include "fldelay/errors.hpp"
#include "fldelay/rate_model.hpp"
#include "fldelay/saddlepoint.hpp"
#include "oracles.hpp"

using namespace fldelay;

namespace {

RateDensity uplink(double snr) { return {RateKind::uplink_single, snr, 1}; }

double tail(int d, double c, double snr) { return lr_tail(solve_saddle({d, c, uplink(snr)})); }

}  // namespace

TEST_CASE("saddle point at the mean crossing") {
  const double mean_rate = tilted_moments(uplink(10.0), 0.0).mean;
  const SaddleInfo info = solve_saddle({10, 10.0 * mean_rate, uplink(10.0)});
  CHECK(std::abs(info.s_star) <= 1e-6);
}

TEST_CASE("saddle point side follows the sign of K'(0)") {
  const SystemConfig cfg = reference_config(Model::svm);
  const double c = cfg.uplink_threshold();
  const SaddleInfo small = solve_saddle({5, c, uplink(cfg.snr_ul)});
  const SaddleInfo large = solve_saddle({100, c, uplink(cfg.snr_ul)});
  CHECK(cgf_d1({5, c, uplink(cfg.snr_ul)}, 0.0) > 0.0);
  CHECK((small.s_star < 0.0 || small.saturated > 0));
  CHECK(large.s_star > 0.0);
  const SaddleInfo near = solve_saddle({45, c, uplink(cfg.snr_ul)});
  CHECK(near.s_star < 0.0);
  CHECK(near.saturated == 0);
}

TEST_CASE("d = 0 sentinel") {
  const SaddleInfo info = solve_saddle({0, 3.0, uplink(10.0)});
  CHECK(info.omega == -INFINITY);
  CHECK(info.psi == -INFINITY);
  CHECK(lr_tail(info) == 1.0);
}

TEST_CASE("saddle invariants across the enumerated support") {
  const SystemConfig cfg = reference_config(Model::svm);
  for (SlotFamily f : {SlotFamily::user_uplink, SlotFamily::sync_downlink, SlotFamily::async_downlink}) {
    const SlotPmfBuild b = build_slot_pmf(f, cfg);
    for (std::size_t d = 1; d < b.saddles.size(); ++d) {
      const SaddleInfo& s = b.saddles[d];
      if (s.saturated) continue;
      const double c = family_spec(f, cfg, 1).c;
      CHECK(std::abs(cgf_d1(family_spec(f, cfg, static_cast<int>(d)), s.s_star)) <= 1e-10 * std::max(1.0, c));
      CHECK(s.cgf_at_star <= 1e-12);
      CHECK(s.omega * s.s_star >= 0.0);
      CHECK(s.psi == doctest::Approx(s.s_star * std::sqrt(s.cgf_d2_at_star)));
    }
  }
}

TEST_CASE("far tail is small and decreasing") {
  const SystemConfig cfg = reference_config(Model::svm);
  const double c = cfg.uplink_threshold();
  const double p200 = tail(200, c, cfg.snr_ul);
  CHECK(p200 <= 1e-6);
  CHECK(tail(201, c, cfg.snr_ul) <= p200);
  double prev = 1.0;
  for (int d = 1; d <= 120; ++d) {
    const double p = tail(d, c, cfg.snr_ul);
    CHECK(p <= prev + 1e-12);
    prev = p;
  }
}

TEST_CASE("near-mean branch is continuous with the LR formula") {
  // Move c across the mean crossing and compare the two sides of |s*| = 1e-4.
  const double mean_rate = tilted_moments(uplink(10.0), 0.0).mean;
  const int d = 20;
  double prev_tail = -1.0, prev_s = 0.0;
  for (double dc = -0.02; dc <= 0.02; dc += 0.0005) {
    const SaddleInfo info = solve_saddle({d, d * mean_rate + dc, uplink(10.0)});
    const double p = lr_tail(info);
    if (prev_tail >= 0.0 && (std::abs(prev_s) < kNearMeanTilt) != (std::abs(info.s_star) < kNearMeanTilt)) {
      CHECK(std::abs(p - prev_tail) < 1e-3);  // adjacent grid points differ by about f(0) * 0.0005
    }
    prev_tail = p;
    prev_s = info.s_star;
  }
}

TEST_CASE("LR tail against grid convolution on a reduced payload") {
  SystemConfig cfg = reference_config(Model::svm);
  cfg.payload_nats /= 10.0;
  const double c = cfg.uplink_threshold();
  const std::vector<double> grid = oracle::grid_below_threshold(cfg.snr_ul, c, 12, 2e-3);
  for (int d = 1; d <= 12; ++d) {
    const double lr = tail(d, c, cfg.snr_ul);
    INFO("d = " << d << " lr " << lr << " grid " << grid[d]);
    CHECK(std::abs(lr - grid[d]) <= 3e-2);
    if (grid[d] > 0.05) CHECK(std::abs(lr - grid[d]) <= 0.05 * grid[d]);
  }
}

TEST_CASE("LR tail against grid convolution near the SVM mean crossing") {
  const SystemConfig cfg = reference_config(Model::svm);
  const double c = cfg.uplink_threshold();
  const std::vector<double> grid = oracle::grid_below_threshold(cfg.snr_ul, c, 54, 2e-2);
  for (int d : {46, 48, 50, 52, 54}) {
    const double lr = tail(d, c, cfg.snr_ul);
    INFO("d = " << d << " lr " << lr << " grid " << grid[d]);
    CHECK(std::abs(lr - grid[d]) <= 3e-2);
  }
}

TEST_CASE("slot pmf normalization, monotonicity and clamping") {
  for (Model m : {Model::svm, Model::cnn}) {
    const SystemConfig cfg = reference_config(m);
    for (SlotFamily f : {SlotFamily::user_uplink, SlotFamily::sync_downlink, SlotFamily::async_downlink}) {
      const SlotPmfBuild b = build_slot_pmf(f, cfg);
      CHECK(b.pmf.tail_mass <= cfg.truncation_eps);
      CHECK(std::abs(b.pmf.total_mass() - 1.0) <= 1e-9);
      CHECK_NOTHROW(b.pmf.check());
      for (std::size_t d = 1; d < b.tails.size(); ++d) CHECK(b.tails[d] <= b.tails[d - 1] + 1e-12);
      CHECK(b.clamp_events <= 0.01 * static_cast<double>(b.pmf.size()));
      CHECK(b.pmf.first_slot >= 1);
    }
  }
}

TEST_CASE("larger payload means longer uplink") {
  const SlotPmf svm = slot_pmf(SlotFamily::user_uplink, reference_config(Model::svm));
  const SlotPmf cnn = slot_pmf(SlotFamily::user_uplink, reference_config(Model::cnn));
  CHECK(cnn.mean_seconds() > 10.0 * svm.mean_seconds());
}

TEST_CASE("enumeration cap is an error") {
  SystemConfig cfg = reference_config(Model::svm);
  cfg.payload_nats *= 400.0;  // mean crossing near 2e4 slots
  CHECK_THROWS_AS(slot_pmf(SlotFamily::user_uplink, cfg), NumericalError);
}
