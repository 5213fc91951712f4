#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "fldelay/delay.hpp"
#include "fldelay/pmf.hpp"

namespace fldelay {

/// Distribution over nonnegative integers, used for the round count N and
/// for Monte Carlo frequency tables.
struct EmpiricalDist {
  std::map<std::int64_t, double> probs;
  std::string provenance;  // file | synthetic | monte-carlo

  std::int64_t min_value() const;
  std::int64_t max_value() const;
  double mean() const;
  double variance() const;
  void validate(double tol = 1e-9) const;
};

EmpiricalDist point_mass_dist(std::int64_t n);

/// Two columns (value, weight) separated by comma, tab or spaces; a leading
/// non-numeric row is taken as a header and '#' starts a comment. Integer
/// weights are counts and get normalized. Other weights are probabilities
/// and must sum to 1 within 1e-9.
EmpiricalDist parse_n_distribution(const std::string& text);
EmpiricalDist load_n_distribution(const std::string& path);

/// n-fold self-convolution by binary exponentiation.
SlotPmf overall_pmf_fixed(const SlotPmf& iteration, std::int64_t n);
SlotPmf overall_pmf_fixed_naive(const SlotPmf& iteration, std::int64_t n);

/// Sum_n Pr{N = n} iteration^{*n}, computed as G_N(G_I(z)) on a transform
/// grid wide enough to hold every coefficient. Requires a zero compute offset,
/// since a random number of offsets does not stay on the slot lattice.
SlotPmf compound_pmf(const SlotPmf& iteration, const EmpiricalDist& n_dist);
/// Same mixture accumulated term by term.
SlotPmf compound_pmf_direct(const SlotPmf& iteration, const EmpiricalDist& n_dist);

}  // namespace fldelay
