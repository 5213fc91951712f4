#include "fldelay/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "fldelay/asymptotics.hpp"
#include "fldelay/config.hpp"
#include "fldelay/delay.hpp"
#include "fldelay/errors.hpp"
#include "fldelay/monte_carlo.hpp"
#include "fldelay/overall.hpp"
#include "fldelay/report.hpp"
#include "fldelay/saddlepoint.hpp"

namespace fldelay {

namespace fs = std::filesystem;

namespace {

SystemConfig require_config(const RunManifest& m) {
  if (m.config_path.empty()) throw ValidationError("config", "--config is required");
  return load_config_file(m.config_path);
}

std::string out_path(const RunManifest& m, const std::string& name) {
  fs::create_directories(m.out_dir);
  return (fs::path(m.out_dir) / name).string();
}

std::int64_t resolve_iterations(const RunManifest& m, const SystemConfig& cfg) {
  if (m.iterations > 0) return m.iterations;
  if (!cfg.convergence)
    throw ValidationError("smoothness", "convergence parameters are required when no round count is given");
  return iteration_bound(*cfg.convergence).i0;
}

// The analytic pmf matching a target name.
SlotPmf analytic_pmf(const std::string& target, Scheme scheme, const SystemConfig& cfg, std::int64_t iterations) {
  if (target == "user_uplink") return user_uplink_pmf(cfg);
  if (target == "system_uplink") return uplink_system_pmf(cfg);
  if (target == "sync_downlink") return sync_downlink_pmf(cfg);
  if (target == "async_downlink") return async_downlink_pmf(cfg);
  if (target == "iteration") return iteration_pmf(cfg, scheme).pmf;
  if (target == "per_user") return per_user_iteration_pmf(cfg, scheme);
  if (target == "overall") return overall_pmf_fixed(iteration_pmf(cfg, scheme).pmf, iterations);
  throw ValidationError("target", "unknown target '" + target + "'");
}

std::string manifest_path(const std::string& samples_path) { return samples_path + ".manifest.json"; }

// Expected TV distance between a pmf and its own n-sample empirical estimate.
double tv_noise_floor(const SlotPmf& p, std::int64_t n) {
  double s = 0.0;
  for (double q : p.probs) s += std::sqrt(2.0 * q * (1.0 - q) / (std::numbers::pi * static_cast<double>(n)));
  return 0.5 * s;
}

SimResult read_samples(const RunManifest& m, const SystemConfig& cfg, Scheme scheme, std::int64_t iterations) {
  std::ifstream mf(manifest_path(m.mc_input));
  if (!mf) throw ValidationError("mc-input", "missing manifest " + manifest_path(m.mc_input));
  nlohmann::json man;
  try {
    mf >> man;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("mc-input", std::string("unreadable manifest: ") + e.what());
  }
  if (man.value("config_fingerprint", "") != config_fingerprint(cfg))
    throw ValidationError("mc-input", "samples were produced with a different configuration");
  if (man.value("target", "") != m.target || man.value("scheme", "") != to_string(scheme))
    throw ValidationError("mc-input", "samples were produced for a different target or scheme");
  if (m.target == "overall" && man.value("iterations", std::int64_t{0}) != iterations)
    throw ValidationError("mc-input", "samples were produced for a different round count");
  std::ifstream in(m.mc_input);
  if (!in) throw ValidationError("mc-input", "cannot open " + m.mc_input);
  SimResult r;
  r.slot_len = cfg.slot_len_s;
  r.offset_s = man.value("offset_s", 0.0);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string d, c;
    std::getline(row, d, ',');
    std::getline(row, c, ',');
    const std::uint64_t count = std::stoull(c);
    r.counts[std::stoll(d)] += count;
    r.trials += static_cast<std::int64_t>(count);
  }
  return r;
}

void write_samples(const std::string& path, const SimResult& r, const SystemConfig& cfg, const RunManifest& m,
                   Scheme scheme, std::int64_t iterations) {
  {
    CsvWriter w(path);
    w.header({"d", "count"});
    for (const auto& [d, c] : r.counts) w.row({std::to_string(d), std::to_string(c)});
  }
  nlohmann::json man;
  man["command"] = "simulate";
  man["config_path"] = m.config_path;
  man["config_fingerprint"] = config_fingerprint(cfg);
  man["target"] = m.target;
  man["scheme"] = to_string(scheme);
  man["seed"] = m.seed;
  man["trials"] = r.trials;
  man["iterations"] = iterations;
  man["offset_s"] = r.offset_s;
  std::ofstream out(manifest_path(path));
  out << man.dump(2) << '\n';
}

SimSpec sim_spec(const RunManifest& m, const SystemConfig& cfg, Scheme scheme, std::int64_t iterations) {
  SimSpec spec;
  spec.config = cfg;
  spec.scheme = scheme;
  spec.trials = m.trials;
  spec.seed = m.seed;
  spec.threads = m.threads;
  spec.target = parse_target(m.target == "overall" && !m.n_dist_path.empty() ? "overall_random" : m.target);
  spec.iterations = iterations;
  if (spec.target == SimTarget::overall_random) spec.n_dist = load_n_distribution(m.n_dist_path);
  return spec;
}

void log_cost(const SimSpec& spec, std::ostream& log) {
  double per_trial = 1.0;
  const double users = spec.config.num_users;
  if (spec.target != SimTarget::user_uplink) per_trial = users;
  if (spec.target == SimTarget::overall_fixed) per_trial *= static_cast<double>(spec.iterations);
  if (spec.target == SimTarget::overall_random) per_trial *= spec.n_dist->mean();
  const double est = per_trial * static_cast<double>(spec.trials);
  log << "simulating " << spec.trials << " trials, about " << format_number(est) << " link draws\n";
}

}  // namespace

int cmd_analyze(const RunManifest& m, std::ostream& log) {
  const SystemConfig cfg = require_config(m);
  const Scheme scheme = parse_scheme(m.scheme);
  const std::int64_t iterations = m.target == "overall" ? resolve_iterations(m, cfg) : 0;
  const SlotPmf pmf = analytic_pmf(m.target, scheme, cfg, iterations);
  const std::string stem = "analyze_" + m.target + "_" + to_string(scheme);
  write_pmf_csv(out_path(m, stem + ".csv"), pmf);
  write_summary_csv(out_path(m, stem + "_summary.csv"), pmf);
  log << m.target << " (" << to_string(scheme) << "): mean " << format_number(pmf.mean_seconds())
      << " s, truncation mass " << format_number(pmf.tail_mass) << '\n';
  return kExitOk;
}

int cmd_simulate(const RunManifest& m, std::ostream& log) {
  const SystemConfig cfg = require_config(m);
  const Scheme scheme = parse_scheme(m.scheme);
  const std::int64_t iterations = m.target == "overall" ? resolve_iterations(m, cfg) : 0;
  const SimSpec spec = sim_spec(m, cfg, scheme, iterations);
  log_cost(spec, log);
  const SimResult r = simulate(spec);
  const std::string path = out_path(m, "samples_" + m.target + "_" + to_string(scheme) + ".csv");
  write_samples(path, r, cfg, m, scheme, iterations);
  const MeanCi ci = mean_ci(r);
  log << "mean " << format_number(ci.mean) << " s +- " << format_number(ci.halfwidth) << " (95%)\n";
  return kExitOk;
}

int cmd_compare(const RunManifest& m, std::ostream& log) {
  const SystemConfig cfg = require_config(m);
  const Scheme scheme = parse_scheme(m.scheme);
  if (m.target == "overall" && !m.n_dist_path.empty())
    throw ValidationError("target", "compare supports a fixed round count only");
  const std::int64_t iterations = m.target == "overall" ? resolve_iterations(m, cfg) : 0;
  const SlotPmf pmf = analytic_pmf(m.target, scheme, cfg, iterations);
  SimResult r;
  if (!m.mc_input.empty()) {
    r = read_samples(m, cfg, scheme, iterations);
  } else {
    const SimSpec spec = sim_spec(m, cfg, scheme, iterations);
    log_cost(spec, log);
    r = simulate(spec);
  }
  const EmpiricalDist emp = r.empirical();
  const double tv = tv_distance(pmf, emp);
  const double noise = tv_noise_floor(pmf, r.trials);

  CsvWriter w(out_path(m, "compare_" + m.target + "_" + to_string(scheme) + ".csv"));
  w.header({"d", "pmf_analytic", "pmf_mc"});
  std::int64_t lo = pmf.first_slot, hi = pmf.last_slot();
  if (!emp.probs.empty()) {
    lo = std::min(lo, emp.min_value());
    hi = std::max(hi, emp.max_value());
  }
  for (std::int64_t d = lo; d <= hi; ++d) {
    const auto it = emp.probs.find(d);
    w.row({std::to_string(d), format_number(pmf.prob(d)), format_number(it == emp.probs.end() ? 0.0 : it->second)});
  }
  const MeanCi ci = mean_ci(r);
  log << "analytic mean " << format_number(pmf.mean_seconds()) << " s, mc mean " << format_number(ci.mean)
      << " s (se " << format_number(ci.std_error) << ")\n";
  std::string verdict;
  int code;
  if (noise >= m.tv_threshold) {
    verdict = "INCONCLUSIVE";
    code = kExitInconclusive;
  } else if (tv <= m.tv_threshold) {
    verdict = "PASS";
    code = kExitOk;
  } else {
    verdict = "FAIL";
    code = kExitVerdictFail;
  }
  log << "verdict " << verdict << " tv " << format_number(tv) << " threshold " << format_number(m.tv_threshold)
      << " noise_floor " << format_number(noise) << " trials " << r.trials << '\n';
  return code;
}

int cmd_asymptotics(const RunManifest& m, std::ostream& log) {
  const SystemConfig cfg = require_config(m);
  const Scheme scheme = parse_scheme(m.scheme);
  const std::int64_t i0 = resolve_iterations(m, cfg);
  const IterationPmf it = iteration_pmf(cfg, scheme);
  const SlotPmf per_user = per_user_iteration_pmf(cfg, scheme);
  const GumbelFit fit = gumbel_fit(per_user, cfg.num_users, scheme);

  {
    CsvWriter w(out_path(m, "gumbel_fit_" + to_string(scheme) + ".csv"));
    w.header({"scheme", "num_users", "a_s", "b_s", "a_slot", "gumbel_mean_s", "iteration_mean_s"});
    w.row({to_string(scheme), std::to_string(cfg.num_users), format_number(fit.a), format_number(fit.b),
           std::to_string(fit.a_slot), format_number(fit.mean()), format_number(it.pmf.mean_seconds())});
  }
  {
    // Double-log overlay: ln(-ln F(y)) of the exact iteration CDF against the Gumbel line.
    CsvWriter w(out_path(m, "evt_overlay_" + to_string(scheme) + ".csv"));
    w.header({"y_s", "cdf_analytic", "cdf_gumbel", "dlog_analytic", "dlog_gumbel"});
    double cdf = 0.0;
    for (std::size_t i = 0; i < it.pmf.probs.size(); ++i) {
      cdf += it.pmf.probs[i];
      const double y = it.pmf.seconds(it.pmf.first_slot + static_cast<std::int64_t>(i));
      const double g = fit.cdf(y);
      const double dla = cdf > 0.0 && cdf < 1.0 ? std::log(-std::log(cdf)) : NAN;
      w.row({format_number(y), format_number(cdf), format_number(g), format_number(dla),
             format_number(-(y - fit.a) / fit.b)});
    }
  }

  const double base = static_cast<double>(i0) * it.pmf.mean_seconds();
  const double tau_min = m.tau_min.value_or(1.01 * base);
  const double tau_max = m.tau_max.value_or(1.2 * base);
  const int steps = std::max(1, m.tau_steps);
  if (!(tau_max >= tau_min)) throw ValidationError("tau-max", "must not be below tau-min");
  int vacuous = 0, truncated = 0;
  {
    CsvWriter w(out_path(m, "tau_sweep_" + to_string(scheme) + ".csv"));
    w.header({"tau_s", "s_star", "rate_value", "log_bound", "bound", "evt_ldt_log_bound", "gumbel_integral_s_star",
              "evt_ldt_log_bound_gumbel_tilt", "gumbel_chernoff_log_bound", "tail_correction"});
    for (int k = 0; k < steps; ++k) {
      const double tau = steps == 1 ? tau_min : tau_min + (tau_max - tau_min) * k / (steps - 1);
      std::vector<std::string> row{format_number(tau)};
      try {
        const TailExponent t = ldt_tail(it.pmf, i0, tau);
        row.push_back(format_number(t.s_star));
        row.push_back(format_number(t.rate_value));
        row.push_back(format_number(t.log_bound));
        row.push_back(format_number(t.bound));
        // Blank cells: the Gumbel integral diverges (s >= 1/b) or tau is below i0 times the Gumbel mean.
        std::string evt, gs, evt_g, gc;
        try {
          evt = format_number(evt_ldt_tail(fit, i0, tau, t.s_star).log_bound);
        } catch (const ValidationError&) {
        }
        try {
          const double s_g = gumbel_integral_tilt(fit, tau / static_cast<double>(i0));
          gs = format_number(s_g);
          evt_g = format_number(evt_ldt_tail(fit, i0, tau, s_g).log_bound);
        } catch (const ValidationError&) {
        }
        try {
          gc = format_number(gumbel_chernoff_tail(fit, i0, tau).log_bound);
        } catch (const ValidationError&) {
        }
        if (t.tail_correction > 1e-3) ++truncated;
        row.insert(row.end(), {evt, gs, evt_g, gc, format_number(t.tail_correction)});
      } catch (const ValidationError& e) {
        ++vacuous;
        row.insert(row.end(), {"", "", "", "", "", "", "", "", ""});
      }
      w.row(row);
    }
  }
  if (vacuous) log << vacuous << " tau values outside (i0 * mean, i0 * max support); rows left blank\n";
  if (truncated)
    log << "warning: at " << truncated
        << " tau values the truncated tail outweighs 1e-3 of the tilted MGF; tighten truncation_eps there\n";

  if (!m.n_dist_path.empty()) {
    const EmpiricalDist nd = load_n_distribution(m.n_dist_path);
    const StochasticOrderReport rep = stochastic_order_check(nd, it.pmf, i0);
    CsvWriter w(out_path(m, "stochastic_order_" + to_string(scheme) + ".csv"));
    w.header({"i0", "max_violation", "truncation_bound", "assumption_breach", "strict_points", "lattice_points"});
    w.row({std::to_string(i0), format_number(rep.max_violation), format_number(rep.truncation_bound),
           rep.assumption_breach ? "true" : "false", std::to_string(rep.strict_points),
           std::to_string(rep.lattice_points)});
    if (rep.assumption_breach) log << "warning: round-count distribution has mass above i0\n";
    log << "stochastic order max violation " << format_number(rep.max_violation) << '\n';
  }
  log << "gumbel a " << format_number(fit.a) << " s, b " << format_number(fit.b) << " s, i0 " << i0 << '\n';
  return kExitOk;
}

int cmd_overall(const RunManifest& m, std::ostream& log) {
  const SystemConfig cfg = require_config(m);
  const Scheme scheme = parse_scheme(m.scheme);
  const IterationPmf it = iteration_pmf(cfg, scheme);
  std::optional<IterationBound> bound;
  if (cfg.convergence) bound = iteration_bound(*cfg.convergence);
  if (bound) {
    CsvWriter w(out_path(m, "i0_report.csv"));
    w.header({"u", "u_over_1_minus_eta", "i0_ceiling", "rounded_down", "note"});
    const auto down = static_cast<std::int64_t>(std::floor(bound->real_bound));
    const std::string note = down == bound->i0 ? "bound is an integer"
                                               : "ceiling used; rounding down would give " + std::to_string(down);
    w.row({format_number(bound->u), format_number(bound->real_bound), std::to_string(bound->i0),
           std::to_string(down), note});
    log << "u/(1-eta) = " << format_number(bound->real_bound) << ", i0 = " << bound->i0 << " (" << note << ")\n";
  }
  SlotPmf out;
  std::string stem;
  if (!m.n_dist_path.empty()) {
    const EmpiricalDist nd = load_n_distribution(m.n_dist_path);
    if (bound && nd.max_value() > bound->i0)
      log << "warning: round-count distribution has mass above i0 = " << bound->i0 << '\n';
    out = compound_pmf(it.pmf, nd);
    stem = "overall_compound_" + to_string(scheme);
  } else {
    if (!bound && m.iterations <= 0)
      throw ValidationError("smoothness", "convergence parameters are required without --n-dist");
    const std::int64_t n = m.iterations > 0 ? m.iterations : bound->i0;
    out = overall_pmf_fixed(it.pmf, n);
    stem = "overall_fixed_" + std::to_string(n) + "_" + to_string(scheme);
  }
  write_pmf_csv(out_path(m, stem + ".csv"), out);
  write_summary_csv(out_path(m, stem + "_summary.csv"), out);
  log << "overall mean " << format_number(out.mean_seconds()) << " s\n";
  return kExitOk;
}

int run_guarded(int (*command)(const RunManifest&, std::ostream&), const RunManifest& m, std::ostream& log,
                std::ostream& err) {
  try {
    return command(m, log);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace fldelay
