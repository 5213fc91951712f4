#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "fldelay/convergence.hpp"

namespace fldelay {

double db_to_linear(double db);
double linear_to_db(double ratio);
double bits_to_nats(double bits);

/// Physical and protocol parameters in canonical units: Hz, seconds, nats and
/// linear SNR. Construct through load_config() or a preset and then treat as
/// read-only; validate() enforces the invariants.
struct SystemConfig {
  int num_users = 1;
  double bandwidth_ul_hz = 0.0;
  double bandwidth_dl_hz = 0.0;
  double slot_len_s = 0.0;
  double payload_nats = 0.0;
  double snr_ul = 0.0;   // linear
  double snr_dl = 0.0;   // linear
  double compute_delay_s = 0.0;
  double truncation_eps = 1e-9;
  std::optional<ConvergenceParams> convergence;

  void validate() const;

  /// S / (B T0): per-slot threshold of the uplink accumulation.
  double uplink_threshold() const { return payload_nats / (bandwidth_ul_hz * slot_len_s); }
  double downlink_threshold() const { return payload_nats / (bandwidth_dl_hz * slot_len_s); }

  bool operator==(const SystemConfig&) const = default;
};

/// Parses a flat JSON object of named scalars. Keys: num_users,
/// bandwidth_ul_hz, bandwidth_dl_hz, slot_len_s, payload_bits (or
/// payload_nats), snr_ul_db, snr_dl_db, compute_delay_s, truncation_eps and the
/// optional convergence keys smoothness, strong_convexity, step_size,
/// local_accuracy, global_accuracy. Throws ValidationError naming the key.
SystemConfig load_config(std::string_view document);
SystemConfig load_config_file(const std::string& path);

/// Canonical JSON rendering, readable by load_config.
std::string config_to_json(const SystemConfig& config);

/// Stable 64-bit hash of the canonical rendering, as 16 hex digits.
std::string config_fingerprint(const SystemConfig& config);

enum class Model { svm, cnn };

/// Reference system: K = 30, B = 100 kHz, B_dl = 3 MHz, T0 = 2.5 ms,
/// 10 dB / 20 dB SNR and xi = 0.01, eps0 = 1e-3, eta = 0.01, gamma/alpha = 1.
/// Payloads are 32080 (SVM) and 414160 (CNN) nats.
SystemConfig reference_config(Model model);

}  // namespace fldelay
