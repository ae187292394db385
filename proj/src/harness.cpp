#include "risbeam/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace risbeam {

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::proposed_p1: return "proposed-p1";
    case Scheme::proposed_p2: return "proposed-p2";
    case Scheme::no_ris: return "no-ris";
    case Scheme::manual_comm: return "manual-comm";
    case Scheme::manual_radar: return "manual-radar";
    case Scheme::manual_both: return "manual-both";
    case Scheme::sensing_only: return "sensing-only";
  }
  return "?";
}

std::optional<Scheme> scheme_from_name(const std::string& name) {
  for (Scheme s : {Scheme::proposed_p1, Scheme::proposed_p2, Scheme::no_ris,
                   Scheme::manual_comm, Scheme::manual_radar, Scheme::manual_both,
                   Scheme::sensing_only})
    if (scheme_name(s) == name) return s;
  return std::nullopt;
}

void SweepSpec::validate() const {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (values.empty()) throw std::invalid_argument("sweep needs at least one value");
  if (schemes.empty()) throw std::invalid_argument("sweep needs at least one scheme");
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
  apply_parameter(base, parameter, values.front());  // throws on unknown names
}

ScenarioConfig apply_parameter(const ScenarioConfig& base, const std::string& parameter,
                               double value) {
  ScenarioConfig cfg = base;
  auto as_int = [&] { return static_cast<int>(std::lround(value)); };
  if (parameter == "Gamma_dB") {
    cfg.gamma_req = from_db(value);
  } else if (parameter == "P_t_dBW") {
    cfg.P_t = from_db(value);
  } else if (parameter == "sigma2_dBm") {
    cfg.sigma2 = from_db(value - 30.0);
  } else if (parameter == "N") {
    cfg.N = as_int();
  } else if (parameter == "M") {
    cfg.M = as_int();
  } else if (parameter == "K_d") {
    cfg.K_d = as_int();
  } else if (parameter == "T_d") {
    cfg.T_d = as_int();
  } else if (parameter == "N_rand") {
    cfg.n_rand = as_int();
  } else if (parameter == "epsilon_deg") {
    cfg.epsilon_deg = value;
  } else if (parameter == "rho") {
    cfg.rician_factor = value;
  } else {
    throw std::invalid_argument("unknown sweep parameter: " + parameter);
  }
  cfg.finalize();
  return cfg;
}

namespace {

using nlohmann::json;

}  // namespace

SweepSpec SweepSpec::from_json_text(const std::string& text) {
  json j = json::parse(text);
  SweepSpec spec;
  if (j.contains("base"))
    spec.base = ScenarioConfig::from_json_text(j.at("base").dump());
  else
    spec.base = ScenarioConfig::desk_default();
  if (j.contains("parameter")) spec.parameter = j.at("parameter").get<std::string>();
  if (j.contains("values")) spec.values = j.at("values").get<std::vector<double>>();
  if (j.contains("trials")) spec.trials = j.at("trials").get<int>();
  if (j.contains("schemes")) {
    spec.schemes.clear();
    for (const auto& name : j.at("schemes")) {
      auto s = scheme_from_name(name.get<std::string>());
      if (!s) throw std::invalid_argument("unknown scheme: " + name.get<std::string>());
      spec.schemes.push_back(*s);
    }
  }
  if (j.contains("out_dir")) spec.out_dir = j.at("out_dir").get<std::string>();
  if (j.contains("workers")) spec.workers = j.at("workers").get<int>();
  spec.validate();
  return spec;
}

SweepSpec SweepSpec::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open sweep spec: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

DesignOutcome run_scheme(Scheme s, const ScenarioConfig& config, const ChannelSet& ch,
                         Rng& rng) {
  switch (s) {
    case Scheme::proposed_p1: return run_algorithm1(config, ch, rng);
    case Scheme::proposed_p2: return run_algorithm2(config, ch, rng);
    case Scheme::no_ris: return no_ris_design(config, ch);
    case Scheme::manual_comm:
      return fixed_phase_design(config, ch, manual_comm_profile(config, ch),
                                RisProfile::absent_profile(config.N, RisProfile::Role::radar),
                                true);
    case Scheme::manual_radar:
      return fixed_phase_design(config, ch,
                                RisProfile::absent_profile(config.N, RisProfile::Role::comm),
                                manual_radar_profile(config), false);
    case Scheme::manual_both:
      return fixed_phase_design(config, ch, manual_comm_profile(config, ch),
                                manual_radar_profile(config), true);
    case Scheme::sensing_only: {
      DesignOutcome out;
      double tau = 0;
      out.beamformers = sensing_only_design(config, ch, &tau);
      out.omega_c = RisProfile::absent_profile(config.N, RisProfile::Role::comm);
      out.omega_r = RisProfile::absent_profile(config.N, RisProfile::Role::radar);
      out.termination = Termination::met_target;
      out.objective_kind = ObjectiveKind::pattern_match;
      out.radar_cost = radar_cost(out.beamformers.R, tau, config, false);
      out.worst_illumination =
          illumination(ch, out.omega_r.omega, out.beamformers.R).second;
      out.iterations = 1;
      out.trace.push_back({1, 0, 0, 0, out.radar_cost.L});
      return out;
    }
  }
  throw std::logic_error("unhandled scheme");
}

namespace {

const char* termination_label(Termination t) {
  switch (t) {
    case Termination::met_target: return "met-target";
    case Termination::max_iter: return "max-iter";
    case Termination::infeasible: return "infeasible";
  }
  return "?";
}

}  // namespace

const SummaryRow* SweepResult::find(double value, Scheme s) const {
  for (const auto& row : summary)
    if (row.value == value && row.scheme == s) return &row;
  return nullptr;
}

SweepResult run_sweep(const SweepSpec& spec) {
  spec.validate();
  SweepResult result;
  result.parameter = spec.parameter;

  const int nv = static_cast<int>(spec.values.size());
  const int ns = static_cast<int>(spec.schemes.size());
  const int nt = spec.trials;
  std::vector<TrialRow> rows(static_cast<std::size_t>(nv) * ns * nt);

  // one task per (value, trial): schemes share the channel realization
  const int n_tasks = nv * nt;
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      int task = next.fetch_add(1);
      if (task >= n_tasks) return;
      int vi = task / nt;
      int ti = task % nt;
      auto row_at = [&](int si) -> TrialRow& {
        return rows[(static_cast<std::size_t>(vi) * ns + si) * nt + ti];
      };
      for (int si = 0; si < ns; ++si) {
        TrialRow& row = row_at(si);
        row.value = spec.values[vi];
        row.scheme = spec.schemes[si];
        row.trial = ti;
      }
      try {
        ScenarioConfig cfg = apply_parameter(spec.base, spec.parameter, spec.values[vi]);
        std::uint64_t trial_seed = cfg.seed ^ static_cast<std::uint64_t>(ti);
        Rng channel_rng(trial_seed);
        ChannelSet ch = assemble_scenario(cfg, channel_rng);
        for (int si = 0; si < ns; ++si) {
          TrialRow& row = row_at(si);
          row.seed = trial_seed;
          try {
            Rng rng(Rng::mix(trial_seed, static_cast<std::uint64_t>(si) + 1));
            DesignOutcome out = run_scheme(spec.schemes[si], cfg, ch, rng);
            row.termination = termination_label(out.termination);
            if (out.feasible()) {
              row.ok = true;
              row.fairness = out.fairness_sinr;
              row.min_rate = out.min_rate;
              row.worst_q = out.worst_illumination;
              row.radar_L = out.radar_cost.L;
              row.iterations = out.iterations;
            }
          } catch (const std::exception& e) {
            row.ok = false;
            row.termination = std::string("error: ") + e.what();
          }
        }
      } catch (const std::exception& e) {
        for (int si = 0; si < ns; ++si) {
          TrialRow& row = row_at(si);
          row.ok = false;
          row.termination = std::string("error: ") + e.what();
        }
      }
    }
  };

  int n_workers = std::min(spec.workers, n_tasks);
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  result.rows = std::move(rows);

  for (int vi = 0; vi < nv; ++vi)
    for (int si = 0; si < ns; ++si) {
      SummaryRow s;
      s.value = spec.values[vi];
      s.scheme = spec.schemes[si];
      for (int ti = 0; ti < nt; ++ti) {
        const TrialRow& row =
            result.rows[(static_cast<std::size_t>(vi) * ns + si) * nt + ti];
        if (!row.ok) {
          ++s.failures;
          continue;
        }
        ++s.trials_ok;
        s.mean_fairness += row.fairness;
        s.mean_min_rate += row.min_rate;
        s.mean_worst_q += row.worst_q;
        s.mean_radar_L += row.radar_L;
      }
      if (s.trials_ok == 0)
        throw SweepCellFailure("every trial failed for scheme " + scheme_name(s.scheme) +
                               " at " + spec.parameter + "=" + std::to_string(s.value));
      s.mean_fairness /= s.trials_ok;
      s.mean_min_rate /= s.trials_ok;
      s.mean_worst_q /= s.trials_ok;
      s.mean_radar_L /= s.trials_ok;
      result.summary.push_back(s);
    }
  return result;
}

void write_sweep_csv(const SweepResult& result, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  char buf[512];

  std::ofstream trials(fs::path(dir) / "trials.csv");
  if (!trials) throw std::runtime_error("cannot write trials.csv");
  trials << "parameter,value,scheme,trial,seed,ok,termination,fairness_linear,"
            "min_rate_bps,worst_q_linear,radar_L,iterations\n";
  for (const auto& r : result.rows) {
    std::snprintf(buf, sizeof(buf), "%s,%.17g,%s,%d,%llu,%d,%s,%.17g,%.17g,%.17g,%.17g,%d\n",
                  result.parameter.c_str(), r.value, scheme_name(r.scheme).c_str(),
                  r.trial, static_cast<unsigned long long>(r.seed), r.ok ? 1 : 0,
                  r.termination.c_str(), r.fairness, r.min_rate, r.worst_q, r.radar_L,
                  r.iterations);
    trials << buf;
  }

  std::ofstream summary(fs::path(dir) / "summary.csv");
  if (!summary) throw std::runtime_error("cannot write summary.csv");
  summary << "parameter,value,scheme,trials_ok,failures,mean_fairness_linear,"
             "mean_fairness_dB,mean_min_rate_bps,mean_worst_q_linear,mean_worst_q_dB,"
             "mean_radar_L\n";
  for (const auto& s : result.summary) {
    std::snprintf(buf, sizeof(buf), "%s,%.17g,%s,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  result.parameter.c_str(), s.value, scheme_name(s.scheme).c_str(),
                  s.trials_ok, s.failures, s.mean_fairness, to_db(s.mean_fairness),
                  s.mean_min_rate, s.mean_worst_q, to_db(s.mean_worst_q), s.mean_radar_L);
    summary << buf;
  }
}

void export_patterns(const DesignOutcome& outcome, const ScenarioConfig& config,
                     const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto pat = diagnostic_patterns(outcome.beamformers, config);
  write_trace_csv((fs::path(dir) / "pattern_total.csv").string(), pat.angles_deg,
                  pat.total);
  write_trace_csv((fs::path(dir) / "pattern_radar.csv").string(), pat.angles_deg,
                  pat.radar);
  for (std::size_t k = 0; k < pat.comm.size(); ++k)
    write_trace_csv(
        (fs::path(dir) / ("pattern_comm_" + std::to_string(k) + ".csv")).string(),
        pat.angles_deg, pat.comm[k]);

  auto write_ris_map = [&](const RisProfile& profile, const Position& ris_pos,
                           const std::string& name) {
    if (profile.absent) return;
    Eigen::Vector2d phi_in = ScenarioConfig::direction_cosines(ris_pos, config.dfbs);
    std::ofstream f(fs::path(dir) / name);
    if (!f) throw std::runtime_error("cannot write " + name);
    f << "psi1,psi2,value\n";
    char buf[128];
    const int steps = 41;
    for (int i = 0; i < steps; ++i)
      for (int j = 0; j < steps; ++j) {
        double p1 = -1.0 + 2.0 * i / (steps - 1);
        double p2 = -1.0 + 2.0 * j / (steps - 1);
        double v = ris_pattern(profile.omega, {p1, p2}, phi_in);
        std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.17g\n", p1, p2, v);
        f << buf;
      }
  };
  write_ris_map(outcome.omega_c, config.comm_ris, "pattern_ris_comm.csv");
  write_ris_map(outcome.omega_r, config.radar_ris, "pattern_ris_radar.csv");

  {
    std::ofstream f(fs::path(dir) / "radar_cost.csv");
    f << outcome.radar_cost.csv_header() << '\n' << outcome.radar_cost.csv_row() << '\n';
  }
  {
    std::ofstream f(fs::path(dir) / "trace.csv");
    f << "n,gamma_target,gamma2,gamma3,objective\n";
    char buf[192];
    for (const auto& r : outcome.trace) {
      std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g\n", r.n, r.gamma_target,
                    r.gamma2, r.gamma3, r.objective);
      f << buf;
    }
  }
  if (!outcome.dinkelbach_lambdas.empty()) {
    std::ofstream f(fs::path(dir) / "dinkelbach.csv");
    f << "step,lambda\n";
    char buf[96];
    for (std::size_t i = 0; i < outcome.dinkelbach_lambdas.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", i, outcome.dinkelbach_lambdas[i]);
      f << buf;
    }
  }
}

}  // namespace risbeam
