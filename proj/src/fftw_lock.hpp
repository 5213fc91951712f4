#pragma once

#include <mutex>

namespace fldelay::detail {

// FFTW planner calls are not thread-safe; executions are.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace fldelay::detail
