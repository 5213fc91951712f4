#include "fldelay/convergence.hpp"

#include <cmath>

#include "fldelay/errors.hpp"

namespace fldelay {

void ConvergenceParams::validate() const {
  auto positive = [](double v, const char* key) {
    if (!std::isfinite(v) || v <= 0.0) throw ValidationError(key, "must be positive and finite");
  };
  positive(smoothness, "smoothness");
  positive(strong_convexity, "strong_convexity");
  positive(step_size, "step_size");
  if (!(local_accuracy > 0.0 && local_accuracy < 1.0))
    throw ValidationError("local_accuracy", "must lie in (0, 1)");
  if (!(global_accuracy > 0.0 && global_accuracy <= 1.0))
    throw ValidationError("global_accuracy", "must lie in (0, 1]");
  if (strong_convexity > smoothness)
    throw ValidationError("strong_convexity", "must not exceed smoothness");
  // Small slack so that xi written as the decimal of gamma/alpha is accepted.
  if (step_size > strong_convexity / smoothness * (1.0 + 1e-12))
    throw ValidationError("step_size", "must not exceed strong_convexity / smoothness");
}

IterationBound iteration_bound(const ConvergenceParams& params) {
  params.validate();
  const double ratio = params.smoothness / params.strong_convexity;
  IterationBound out;
  out.u = 2.0 * ratio * ratio / params.step_size * std::log(1.0 / params.global_accuracy);
  out.real_bound = out.u / (1.0 - params.local_accuracy);
  // The bound reads n >= u / (1 - eta), so the smallest admissible count is the ceiling.
  // Guard against the ceiling of a value that is an integer up to rounding.
  const double nearest = std::round(out.real_bound);
  out.i0 = std::abs(out.real_bound - nearest) <= 1e-9 * std::max(1.0, nearest)
               ? static_cast<std::int64_t>(nearest)
               : static_cast<std::int64_t>(std::ceil(out.real_bound));
  return out;
}

}  // namespace fldelay
