#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "risbeam/algorithms.hpp"

namespace risbeam {

/// Raised when every trial of one (value, scheme) cell fails.
struct SweepCellFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Scheme {
  proposed_p1,
  proposed_p2,
  no_ris,
  manual_comm,
  manual_radar,
  manual_both,
  sensing_only,
};

std::string scheme_name(Scheme s);
std::optional<Scheme> scheme_from_name(const std::string& name);

/// Monte-Carlo sweep description: a base scenario, one swept parameter, the
/// schemes to run and the trial count. Trial t draws its channels from
/// seed XOR t; scheme-internal randomization uses a per-scheme substream.
struct SweepSpec {
  ScenarioConfig base;
  std::string parameter = "Gamma_dB";
  std::vector<double> values{2.0, 5.0, 8.0};
  int trials = 10;
  std::vector<Scheme> schemes{Scheme::proposed_p1, Scheme::no_ris};
  std::string out_dir = "out";
  int workers = 1;

  void validate() const;
  static SweepSpec from_json_file(const std::string& path);
  static SweepSpec from_json_text(const std::string& text);
};

/// Applies one swept parameter value to a configuration and re-finalizes.
ScenarioConfig apply_parameter(const ScenarioConfig& base, const std::string& parameter,
                               double value);

struct TrialRow {
  double value = 0;
  Scheme scheme = Scheme::no_ris;
  int trial = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string termination;
  double fairness = 0;  // linear
  double min_rate = 0;
  double worst_q = 0;  // linear
  double radar_L = 0;
  int iterations = 0;
};

struct SummaryRow {
  double value = 0;
  Scheme scheme = Scheme::no_ris;
  int trials_ok = 0;
  int failures = 0;
  double mean_fairness = 0;
  double mean_min_rate = 0;
  double mean_worst_q = 0;
  double mean_radar_L = 0;
};

struct SweepResult {
  std::string parameter;
  std::vector<TrialRow> rows;        // (value, scheme, trial) order
  std::vector<SummaryRow> summary;   // (value, scheme) order
  const SummaryRow* find(double value, Scheme s) const;
};

/// Runs every (value, scheme, trial) cell, concurrently up to spec.workers,
/// merging results in deterministic order. Throws std::runtime_error when
/// every trial of some cell fails.
SweepResult run_sweep(const SweepSpec& spec);

void write_sweep_csv(const SweepResult& result, const std::string& dir);

/// Runs one scheme on one realization.
DesignOutcome run_scheme(Scheme s, const ScenarioConfig& config, const ChannelSet& ch,
                         Rng& rng);

/// Writes beampattern traces (total, radar, per-user) over the angle grid,
/// RIS reflection maps over a direction-cosine grid, the cost breakdown row
/// and the iteration trace.
void export_patterns(const DesignOutcome& outcome, const ScenarioConfig& config,
                     const std::string& dir);

}  // namespace risbeam
