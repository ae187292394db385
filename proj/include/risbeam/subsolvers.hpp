#pragma once

#include <functional>
#include <string>
#include <vector>

#include "risbeam/channels.hpp"
#include "risbeam/conic.hpp"
#include "risbeam/metrics.hpp"
#include "risbeam/rng.hpp"

namespace risbeam {

enum class SolveStatus { optimal, infeasible, numerical_failure };

/// Relaxed beamformer subproblem output: covariance R, per-user matrices
/// C~_k before rank-1 extraction, the autoscale tau (beampattern objective
/// only) and the achieved objective (radar cost L, or the worst-case
/// illumination bound for the max-min variant).
struct BeamformerSolution {
  SolveStatus status = SolveStatus::numerical_failure;
  std::string cause;
  CMat R;
  std::vector<CMat> C_tilde;
  double tau = 0;
  double objective = 0;
};

/// Beampattern-matching SQP with per-user SINR constraints (setting-1
/// beamformer step). `include_ris_beam` selects whether the desired mask
/// carries the comm-RIS beam.
BeamformerSolution solve_beamformer_p1(const ChannelSet& ch, const CVec& omega_c,
                                       double gamma, const ScenarioConfig& config,
                                       bool include_ris_beam, double tol = 1e-7);

/// Max-min target illumination program under the same constraint set
/// (setting-2 beamformer step).
BeamformerSolution solve_beamformer_p2(const ChannelSet& ch, const CVec& omega_c,
                                       const CVec& omega_r, double gamma,
                                       const ScenarioConfig& config, double tol = 1e-7);

/// c_hat = C~ h / sqrt(h^H C~ h). Throws std::domain_error when the
/// quadratic form vanishes (unreachable user).
CVec extract_rank1_comm(const CMat& C_tilde, const CVec& h);

/// Eigenvalue square root of R_hat - sum C_hat_k with negative eigenvalues
/// clipped; columns beyond the numerical rank are zero. Throws
/// std::runtime_error when the residual is indefinite beyond tolerance.
CMat factor_sensing(const CMat& R_hat, const std::vector<CMat>& C_hat);

/// Homogenized quadratic forms of the comm-RIS fractional program:
/// SINR_k(omega) = w^H A_k w / (w^H B_k w + sigma2) with w^H = [omega^T, 1].
struct FractionalSystem {
  std::vector<CMat> A;
  std::vector<CMat> B;
  double sigma2 = 0;
  int N = 0;
  int K() const { return static_cast<int>(A.size()); }
};

FractionalSystem build_fractional_system(const ChannelSet& ch, const CMat& C,
                                         const CMat& S, double sigma2);

/// w = [conj(omega); 1] (comm homogenization, pinned entry last).
CVec homogenize_comm(const CVec& omega_c);
/// u = [1; conj(omega)] (radar homogenization, pinned entry first).
CVec homogenize_radar(const CVec& omega_r);

double fractional_ratio(const FractionalSystem& sys, const CVec& w, int k);
double fractional_worst_ratio(const FractionalSystem& sys, const CVec& w);

struct DinkelbachResult {
  enum class StopReason { inner_value, small_step, regression_guard, iteration_cap };
  SolveStatus status = SolveStatus::numerical_failure;
  CMat W;
  double gamma2 = 0;  // final lambda, the relaxed fairness-SINR bound
  std::vector<double> lambda_trace;
  std::vector<double> inner_value_trace;  // scaled by 1/sigma2
  int iterations = 0;
  StopReason stop_reason = StopReason::iteration_cap;
  double final_step_norm = 0;  // ||W_t - W_{t-1}|| at the stop
};

/// Dinkelbach iteration for the relaxed max-min SINR program over W with
/// unit diagonal. Initialized from the incumbent phase vector so the first
/// lambda equals the incumbent's worst-case SINR.
DinkelbachResult dinkelbach_maximin(const FractionalSystem& sys, const CVec& omega_init,
                                    double tol, int max_iter = 50,
                                    double solver_tol = 1e-7);

struct RandomizeResult {
  CVec omega;
  double score = 0;
  int best_index = -1;  // -1 when the incumbent candidate wins
};

/// Gaussian randomization: draws from N(0, V), derotates by the pinned
/// entry's phase, projects entrywise to unit modulus and keeps the best
/// scoring candidate (first maximum wins; the incumbent, when provided, is
/// candidate 0). The score callback receives the full homogenized vector.
RandomizeResult randomize_phase(const CMat& V, int n_rand, Rng& rng,
                                const std::function<double(const CVec&)>& score,
                                int homog_index, const CVec* incumbent = nullptr);

/// Quadratic forms of the radar-RIS illumination: u^H Q_m u = g_m^H R g_m.
struct RadarRisSystem {
  std::vector<CMat> Q;
  int N = 0;
  int T() const { return static_cast<int>(Q.size()); }
};

RadarRisSystem build_radar_system(const ChannelSet& ch, const CMat& R);
double radar_ris_score(const RadarRisSystem& sys, const CVec& u);

struct RadarRisSdpResult {
  SolveStatus status = SolveStatus::numerical_failure;
  CMat U;
  double objective = 0;
};

/// max min_m Tr(Q_m U) with unit diagonal, the relaxed radar-RIS phase
/// program.
RadarRisSdpResult solve_radar_ris(const RadarRisSystem& sys, double tol = 1e-7);

/// CSV export of Dinkelbach lambda traces.
void write_dinkelbach_trace_csv(const std::string& path, const DinkelbachResult& result);

}  // namespace risbeam
