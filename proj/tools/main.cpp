#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "risbeam/harness.hpp"
#include "risbeam/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;

int cmd_design(const std::string& config_path, bool paper_scale, std::uint64_t seed_override,
               bool has_seed, const std::string& scheme_str, const std::string& out_dir) {
  using namespace risbeam;
  ScenarioConfig cfg;
  if (!config_path.empty())
    cfg = ScenarioConfig::from_json_file(config_path);
  else if (paper_scale)
    cfg = ScenarioConfig::paper_scale();
  else
    cfg = ScenarioConfig::desk_default();
  if (has_seed) cfg.seed = seed_override;

  auto scheme = scheme_from_name(scheme_str);
  if (!scheme) {
    std::cerr << "unknown scheme: " << scheme_str << "\n";
    return kExitError;
  }

  Rng channel_rng(cfg.seed);
  ChannelSet ch = assemble_scenario(cfg, channel_rng);
  Rng rng(Rng::mix(cfg.seed, 1));
  DesignOutcome out = run_scheme(*scheme, cfg, ch, rng);

  std::filesystem::create_directories(out_dir);
  {
    std::ofstream f(std::filesystem::path(out_dir) / "outcome.json");
    f << outcome_to_json(out, cfg) << '\n';
  }
  if (out.feasible()) export_patterns(out, cfg, out_dir);

  std::printf("scheme %s: %s\n", scheme_name(*scheme).c_str(),
              out.termination == Termination::infeasible ? "infeasible" : "done");
  if (out.feasible()) {
    std::printf("  fairness SINR : %.3f dB (target %.3f dB)\n", to_db(out.fairness_sinr),
                to_db(cfg.gamma_req));
    std::printf("  min-rate      : %.4f bps/Hz\n", out.min_rate);
    std::printf("  radar cost L  : %.6g (L1 %.6g, L2 %.6g, tau %.6g)\n", out.radar_cost.L,
                out.radar_cost.L1, out.radar_cost.L2, out.radar_cost.tau);
    std::printf("  worst-case Q  : %.3f dB\n", to_db(out.worst_illumination));
    std::printf("  iterations    : %d\n", out.iterations);
  } else {
    std::printf("  cause: %s\n", out.cause.c_str());
  }
  std::printf("  results in %s\n", out_dir.c_str());
  return out.feasible() ? kExitOk : kExitInfeasible;
}

int cmd_sweep(const std::string& spec_path, bool paper_scale, std::uint64_t seed_override,
              bool has_seed, int workers_override, const std::string& out_override) {
  using namespace risbeam;
  SweepSpec spec;
  if (!spec_path.empty())
    spec = SweepSpec::from_json_file(spec_path);
  else {
    spec.base = paper_scale ? ScenarioConfig::paper_scale() : ScenarioConfig::desk_default();
    if (paper_scale) spec.trials = 100;
  }
  if (has_seed) spec.base.seed = seed_override;
  if (workers_override > 0) spec.workers = workers_override;
  if (!out_override.empty()) spec.out_dir = out_override;

  SweepResult result = run_sweep(spec);
  write_sweep_csv(result, spec.out_dir);

  std::printf("%-12s %-14s %8s %8s %10s %10s %10s\n", spec.parameter.c_str(), "scheme",
              "ok", "fail", "SINR(dB)", "rate", "Q(dB)");
  for (const auto& s : result.summary)
    std::printf("%-12.6g %-14s %8d %8d %10.3f %10.4f %10.3f\n", s.value,
                scheme_name(s.scheme).c_str(), s.trials_ok, s.failures,
                to_db(s.mean_fairness), s.mean_min_rate, to_db(s.mean_worst_q));
  std::printf("tables in %s\n", spec.out_dir.c_str());
  return kExitOk;
}

int cmd_oracle(std::uint64_t seed) {
  auto results = risbeam::verify::run_oracle_suite(seed);
  bool all = true;
  for (const auto& r : results) {
    std::printf("[%s] %s%s%s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(),
                r.detail.empty() ? "" : " — ", r.detail.c_str());
    all = all && r.passed;
  }
  return all ? kExitOk : kExitError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint beamformer and RIS phase design with a Monte-Carlo harness"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", scheme = "proposed-p1";
  std::uint64_t seed = 0;
  bool paper_scale = false;
  int workers = 0;

  auto* design = app.add_subcommand("design", "design one scenario and export traces");
  design->add_option("--config", config_path, "scenario config JSON");
  auto* seed_opt = design->add_option("--seed", seed, "RNG seed override");
  design->add_option("--scheme", scheme, "design scheme to run");
  design->add_option("--out", out_dir, "output directory");
  design->add_flag("--paper-scale", paper_scale, "use the paper-scale defaults");

  std::string spec_path, sweep_out;
  auto* sweep = app.add_subcommand("sweep", "run a Monte-Carlo parameter sweep");
  sweep->add_option("--config", spec_path, "sweep spec JSON");
  auto* sweep_seed = sweep->add_option("--seed", seed, "RNG seed override");
  sweep->add_option("--workers", workers, "concurrent trial workers");
  sweep->add_option("--out", sweep_out, "output directory override");
  sweep->add_flag("--paper-scale", paper_scale, "use the paper-scale defaults");

  std::uint64_t oracle_seed = 1;
  auto* oracle = app.add_subcommand("oracle", "run the brute-force verification suite");
  oracle->add_option("--seed", oracle_seed, "RNG seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (design->parsed())
      return cmd_design(config_path, paper_scale, seed, seed_opt->count() > 0, scheme,
                        out_dir);
    if (sweep->parsed())
      return cmd_sweep(spec_path, paper_scale, seed, sweep_seed->count() > 0, workers,
                       sweep_out);
    if (oracle->parsed()) return cmd_oracle(oracle_seed);
  } catch (const risbeam::SweepCellFailure& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
