#pragma once

#include <string>
#include <vector>

#include "risbeam/metrics.hpp"
#include "risbeam/subsolvers.hpp"

namespace risbeam {

enum class Termination { met_target, max_iter, infeasible };

enum class ObjectiveKind { pattern_match, illumination };

struct IterationRecord {
  int n = 0;
  double gamma_target = 0;  // SINR requirement used by the beamformer solve
  double gamma2 = 0;        // relaxed fairness-SINR bound after the comm-RIS update
  double gamma3 = 0;        // achieved fairness SINR after randomization
  double objective = 0;     // radar cost L or worst-case illumination Q
};

/// Final design artifacts of one run: beamformers, RIS profiles, achieved
/// metrics and the per-iteration trace.
struct DesignOutcome {
  Termination termination = Termination::infeasible;
  std::string cause;
  ObjectiveKind objective_kind = ObjectiveKind::pattern_match;
  BeamformerSet beamformers;
  RisProfile omega_c;
  RisProfile omega_r;
  double fairness_sinr = 0;   // linear
  double relaxed_bound = 0;   // final Gamma_2 (equals fairness when no RIS update runs)
  double min_rate = 0;        // bps/Hz
  RadarCostBreakdown radar_cost;
  double worst_illumination = 0;  // Q, linear watts
  int iterations = 0;
  bool stalled_bound = false;
  std::vector<IterationRecord> trace;
  std::vector<double> dinkelbach_lambdas;  // lambda steps of the last comm-RIS update

  bool feasible() const { return termination != Termination::infeasible; }
};

/// Alternating design for the comm-RIS setting: beamformer SQP, rank-1
/// construction, sensing factorization, Dinkelbach + randomization update of
/// omega_c, and the SINR-target raise between iterations.
DesignOutcome run_algorithm1(const ScenarioConfig& config, const ChannelSet& ch, Rng& rng);

/// Dual-RIS variant: max-min illumination beamformer step plus the radar-RIS
/// SDP + randomization update each iteration.
DesignOutcome run_algorithm2(const ScenarioConfig& config, const ChannelSet& ch, Rng& rng);

/// Geometric bisection for an infeasible raised SINR target.
double gamma_backtrack(double gamma_lo, double gamma_hi);

/// Phase profile forming equally powerful reflected beams towards the given
/// destination directions for a wave incident from phi_in.
RisProfile manual_ris_phases(const std::vector<Eigen::Vector2d>& destinations,
                             const Eigen::Vector2d& phi_in, int N,
                             RisProfile::Role role);

/// Manual comm-RIS profile towards every user of the realization.
RisProfile manual_comm_profile(const ScenarioConfig& config, const ChannelSet& ch);
/// Manual radar-RIS profile towards every configured target.
RisProfile manual_radar_profile(const ScenarioConfig& config);

/// Pure beampattern matching without users, communication beams or the
/// comm-RIS mask beam. tau_out receives the fitted autoscale when given.
BeamformerSet sensing_only_design(const ScenarioConfig& config, const ChannelSet& ch,
                                  double* tau_out = nullptr);

/// Single SQP solve at the configured SINR target with fixed RIS profiles;
/// the building block of the no-RIS and manual-selection baselines.
DesignOutcome fixed_phase_design(const ScenarioConfig& config, const ChannelSet& ch,
                                 const RisProfile& omega_c, const RisProfile& omega_r,
                                 bool include_ris_beam);

/// Baseline with both RIS absent.
DesignOutcome no_ris_design(const ScenarioConfig& config, const ChannelSet& ch);

/// Result file serialization: scalars, traces and flattened complex
/// matrices (interleaved real/imag, row-major).
std::string outcome_to_json(const DesignOutcome& outcome, const ScenarioConfig& config);

}  // namespace risbeam
