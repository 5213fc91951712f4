#include <doctest.h>

#include <cmath>
#include <initializer_list>

#include "fldelay/errors.hpp"
#include "fldelay/overall.hpp"
#include "fldelay/pmf.hpp"
#include "oracles.hpp"

using namespace fldelay;

namespace {

SlotPmf small_iteration() {
  SlotPmf p;
  p.first_slot = 2;
  p.slot_len = 0.1;
  p.probs = {0.1, 0.4, 0.3, 0.15, 0.05};
  return p;
}

void check_same(const SlotPmf& a, const SlotPmf& b, double tol) {
  const std::int64_t lo = std::min(a.first_slot, b.first_slot);
  const std::int64_t hi = std::max(a.last_slot(), b.last_slot());
  for (std::int64_t d = lo; d <= hi; ++d) {
    INFO("d = " << d);
    CHECK(std::abs(a.prob(d) - b.prob(d)) <= tol);
  }
}

}  // namespace

TEST_CASE("parse round-count distributions") {
  const EmpiricalDist counts = parse_n_distribution("n,count\n3,2\n5,6\n");
  CHECK(counts.probs.at(3) == doctest::Approx(0.25));
  CHECK(counts.probs.at(5) == doctest::Approx(0.75));
  CHECK(counts.provenance == "file");

  const EmpiricalDist single = parse_n_distribution("# one row\n7\t1\n");
  CHECK(single.probs.size() == 1);
  CHECK(single.probs.at(7) == doctest::Approx(1.0));

  const EmpiricalDist probs = parse_n_distribution("1 0.5\n2 0.25\n4 0.25\n");
  CHECK(probs.mean() == doctest::Approx(2.0));
  CHECK(probs.variance() == doctest::Approx(1.5));

  const EmpiricalDist zero_row = parse_n_distribution("1,3\n2,0\n");
  CHECK(zero_row.probs.size() == 1);

  CHECK_THROWS_AS(parse_n_distribution("1,0.5\n2,0.47\n"), ValidationError);
  CHECK_THROWS_AS(parse_n_distribution("1,2\n1,3\n"), ValidationError);
  CHECK_THROWS_AS(parse_n_distribution("1,2\n2,-1\n"), ValidationError);
  CHECK_THROWS_AS(parse_n_distribution("-1,2\n"), ValidationError);
  CHECK_THROWS_AS(parse_n_distribution(""), ValidationError);
}

TEST_CASE("fixed round counts") {
  const SlotPmf it = small_iteration();
  check_same(overall_pmf_fixed(it, 1), it, 1e-15);
  check_same(overall_pmf_fixed(it, 2), convolve_pmf_direct(it, it), 1e-15);
  for (std::int64_t n = 1; n <= 16; ++n) check_same(overall_pmf_fixed(it, n), overall_pmf_fixed_naive(it, n), 1e-10);
  const SlotPmf many = overall_pmf_fixed(it, 1000);
  CHECK(many.mean_slots() == doctest::Approx(1000.0 * it.mean_slots()).epsilon(1e-10));
  CHECK(many.variance_slots() == doctest::Approx(1000.0 * it.variance_slots()).epsilon(1e-8));
}

TEST_CASE("fixed round counts accumulate the compute offset") {
  SlotPmf it = small_iteration();
  it.offset_s = 0.02;
  const SlotPmf three = overall_pmf_fixed(it, 3);
  CHECK(three.offset_s == doctest::Approx(0.06));
  CHECK(three.mean_seconds() == doctest::Approx(3.0 * it.mean_seconds()));
}

TEST_CASE("compound pmf reduces to the fixed cases") {
  const SlotPmf it = small_iteration();
  check_same(compound_pmf(it, point_mass_dist(1)), it, 1e-12);
  check_same(compound_pmf(it, point_mass_dist(2)), convolve_pmf_direct(it, it), 1e-12);
  EmpiricalDist coin;
  coin.probs = {{1, 0.5}, {2, 0.5}};
  const SlotPmf two = convolve_pmf_direct(it, it);
  const SlotPmf mix = compound_pmf(it, coin);
  for (std::int64_t d = 0; d <= two.last_slot(); ++d) CHECK(std::abs(mix.prob(d) - 0.5 * (it.prob(d) + two.prob(d))) <= 1e-12);
}

TEST_CASE("compound pmf obeys Wald's identities") {
  SlotPmf g;
  g.first_slot = 1;
  g.probs = oracle::geometric(0.6, 120);
  g.tail_mass = 0.0;
  double s = 0.0;
  for (double v : g.probs) s += v;
  for (double& v : g.probs) v /= s;
  const EmpiricalDist n = parse_n_distribution("3,1\n5,2\n9,1\n");
  const SlotPmf c = compound_pmf(g, n);
  CHECK(c.mean_slots() == doctest::Approx(n.mean() * g.mean_slots()).epsilon(1e-9));
  const double var = n.mean() * g.variance_slots() + n.variance() * g.mean_slots() * g.mean_slots();
  CHECK(c.variance_slots() == doctest::Approx(var).epsilon(1e-8));
  CHECK(c.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("spectral and direct compound agree") {
  const SlotPmf it = small_iteration();
  const EmpiricalDist n = parse_n_distribution("1,1\n4,3\n10,2\n33,1\n");
  check_same(compound_pmf(it, n), compound_pmf_direct(it, n), 1e-10);
}

TEST_CASE("compound pmf rejects a compute offset") {
  SlotPmf it = small_iteration();
  it.offset_s = 0.01;
  CHECK_THROWS_AS(compound_pmf(it, point_mass_dist(2)), ValidationError);
}
