#include "fldelay/config.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fldelay/errors.hpp"

namespace fldelay {

using nlohmann::json;

double db_to_linear(double db) {
  if (!std::isfinite(db)) throw ValidationError("dB value must be finite");
  return std::pow(10.0, db / 10.0);
}

double linear_to_db(double ratio) {
  if (!std::isfinite(ratio) || ratio <= 0.0) throw ValidationError("linear ratio must be positive");
  return 10.0 * std::log10(ratio);
}

double bits_to_nats(double bits) {
  if (!std::isfinite(bits) || bits < 0.0) throw ValidationError("bit count must be nonnegative");
  return bits * std::log(2.0);
}

void SystemConfig::validate() const {
  auto positive = [](double v, const char* key) {
    if (!std::isfinite(v) || v <= 0.0) throw ValidationError(key, "must be positive and finite");
  };
  if (num_users < 1) throw ValidationError("num_users", "must be at least 1");
  positive(bandwidth_ul_hz, "bandwidth_ul_hz");
  positive(bandwidth_dl_hz, "bandwidth_dl_hz");
  positive(slot_len_s, "slot_len_s");
  positive(payload_nats, "payload");
  positive(snr_ul, "snr_ul_db");
  positive(snr_dl, "snr_dl_db");
  if (!std::isfinite(compute_delay_s) || compute_delay_s < 0.0)
    throw ValidationError("compute_delay_s", "must be nonnegative");
  if (!(truncation_eps > 0.0 && truncation_eps < 1.0))
    throw ValidationError("truncation_eps", "must lie in (0, 1)");
  if (convergence) convergence->validate();
}

namespace {

const std::set<std::string> kKnownKeys = {
    "num_users",       "bandwidth_ul_hz",  "bandwidth_dl_hz", "slot_len_s",
    "payload_bits",    "payload_nats",     "snr_ul_db",       "snr_dl_db",
    "compute_delay_s", "truncation_eps",   "smoothness",      "strong_convexity",
    "step_size",       "local_accuracy",   "global_accuracy"};

const char* const kConvergenceKeys[] = {"smoothness", "strong_convexity", "step_size",
                                        "local_accuracy", "global_accuracy"};

double number(const json& doc, const std::string& key) {
  if (!doc.contains(key)) throw ValidationError(key, "missing required key");
  const json& v = doc.at(key);
  if (!v.is_number()) throw ValidationError(key, "must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ValidationError(key, "must be finite");
  return x;
}

}  // namespace

SystemConfig load_config(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    throw ValidationError("config", std::string("parse error: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("config", "top level must be an object");
  for (const auto& [key, value] : doc.items()) {
    if (!kKnownKeys.count(key)) throw ValidationError(key, "unknown key");
  }

  SystemConfig cfg;
  const double users = number(doc, "num_users");
  if (users != std::floor(users) || users < 1 || users > 1e7)
    throw ValidationError("num_users", "must be a positive integer");
  cfg.num_users = static_cast<int>(users);
  cfg.bandwidth_ul_hz = number(doc, "bandwidth_ul_hz");
  cfg.bandwidth_dl_hz = number(doc, "bandwidth_dl_hz");
  cfg.slot_len_s = number(doc, "slot_len_s");

  const bool has_bits = doc.contains("payload_bits");
  const bool has_nats = doc.contains("payload_nats");
  if (has_bits == has_nats)
    throw ValidationError("payload_bits", "exactly one of payload_bits, payload_nats is required");
  if (has_bits) {
    const double bits = number(doc, "payload_bits");
    if (bits < 0) throw ValidationError("payload_bits", "must be nonnegative");
    cfg.payload_nats = bits_to_nats(bits);
  } else {
    cfg.payload_nats = number(doc, "payload_nats");
  }

  cfg.snr_ul = db_to_linear(number(doc, "snr_ul_db"));
  cfg.snr_dl = db_to_linear(number(doc, "snr_dl_db"));
  if (doc.contains("compute_delay_s")) cfg.compute_delay_s = number(doc, "compute_delay_s");
  if (doc.contains("truncation_eps")) cfg.truncation_eps = number(doc, "truncation_eps");

  int present = 0;
  for (const char* key : kConvergenceKeys) present += doc.contains(key) ? 1 : 0;
  if (present > 0) {
    for (const char* key : kConvergenceKeys)
      if (!doc.contains(key)) throw ValidationError(key, "convergence keys must be given together");
    ConvergenceParams p;
    p.smoothness = number(doc, "smoothness");
    p.strong_convexity = number(doc, "strong_convexity");
    p.step_size = number(doc, "step_size");
    p.local_accuracy = number(doc, "local_accuracy");
    p.global_accuracy = number(doc, "global_accuracy");
    cfg.convergence = p;
  }
  cfg.validate();
  return cfg;
}

SystemConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config", "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return load_config(buf.str());
}

std::string config_to_json(const SystemConfig& cfg) {
  json doc;
  doc["num_users"] = cfg.num_users;
  doc["bandwidth_ul_hz"] = cfg.bandwidth_ul_hz;
  doc["bandwidth_dl_hz"] = cfg.bandwidth_dl_hz;
  doc["slot_len_s"] = cfg.slot_len_s;
  doc["payload_nats"] = cfg.payload_nats;
  doc["snr_ul_db"] = linear_to_db(cfg.snr_ul);
  doc["snr_dl_db"] = linear_to_db(cfg.snr_dl);
  doc["compute_delay_s"] = cfg.compute_delay_s;
  doc["truncation_eps"] = cfg.truncation_eps;
  if (cfg.convergence) {
    doc["smoothness"] = cfg.convergence->smoothness;
    doc["strong_convexity"] = cfg.convergence->strong_convexity;
    doc["step_size"] = cfg.convergence->step_size;
    doc["local_accuracy"] = cfg.convergence->local_accuracy;
    doc["global_accuracy"] = cfg.convergence->global_accuracy;
  }
  return doc.dump(2);
}

std::string config_fingerprint(const SystemConfig& cfg) {
  // FNV-1a over the canonical rendering; keys are emitted sorted.
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : config_to_json(cfg)) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SystemConfig reference_config(Model model) {
  SystemConfig cfg;
  cfg.num_users = 30;
  cfg.bandwidth_ul_hz = 1e5;
  cfg.bandwidth_dl_hz = 3e6;
  cfg.slot_len_s = 2.5e-3;
  cfg.payload_nats = model == Model::svm ? 32080.0 : 414160.0;
  cfg.snr_ul = 10.0;
  cfg.snr_dl = 100.0;
  cfg.truncation_eps = 1e-9;
  ConvergenceParams p;
  p.smoothness = 1.0;
  p.strong_convexity = 1.0;
  p.step_size = 0.01;
  p.local_accuracy = 0.01;
  p.global_accuracy = 1e-3;
  cfg.convergence = p;
  return cfg;
}

}  // namespace fldelay
