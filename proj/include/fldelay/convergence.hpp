#pragma once

#include <cstdint>

namespace fldelay {

// Assumptions on the local losses: alpha-smooth and gamma-strongly convex,
// run with step size xi, local accuracy eta and global accuracy eps0.
struct ConvergenceParams {
  double smoothness = 1.0;        // alpha
  double strong_convexity = 1.0;  // gamma
  double step_size = 0.01;        // xi
  double local_accuracy = 0.01;   // eta
  double global_accuracy = 1e-3;  // eps0

  void validate() const;

  bool operator==(const ConvergenceParams&) const = default;
};

struct IterationBound {
  double u = 0.0;             // (2 alpha^2 / (gamma^2 xi)) ln(1/eps0)
  double real_bound = 0.0;    // u / (1 - eta)
  std::int64_t i0 = 0;        // ceil(real_bound)
};

IterationBound iteration_bound(const ConvergenceParams& params);

}  // namespace fldelay
