#pragma once

#include <string>
#include <utility>
#include <vector>

#include "risbeam/channels.hpp"
#include "risbeam/scenario.hpp"
#include "risbeam/types.hpp"

namespace risbeam {

/// Communication beamformers C (columns c_k), sensing beamformer S and the
/// cached transmit covariance R = C C^H + S S^H.
struct BeamformerSet {
  CMat C;  // M x K
  CMat S;  // M x M
  CMat R;  // M x M Hermitian

  static BeamformerSet from_cs(CMat C, CMat S);
  int M() const { return static_cast<int>(S.rows()); }
  int K() const { return static_cast<int>(C.cols()); }
};

struct RadarCostBreakdown {
  double L1 = 0;
  double L2 = 0;
  double L = 0;
  double tau = 0;
  std::string csv_header() const { return "L1,L2,L,tau"; }
  std::string csv_row() const;
};

struct NumericFlags {
  int clamped_denominators = 0;
};

/// SINR of user k. A numerically negative denominator
/// is clamped at sigma2 and counted in `flags` when given.
double sinr(const ChannelSet& ch, const CVec& omega_c, const BeamformerSet& bf,
            int k, double sigma2, NumericFlags* flags = nullptr);

/// Worst-case SINR over users; `argmin` (lowest index on ties) is reported
/// when requested.
double fairness_sinr(const ChannelSet& ch, const CVec& omega_c, const BeamformerSet& bf,
                     double sigma2, int* argmin = nullptr);

double min_rate_from_sinr(double gamma_min);
double min_rate(const ChannelSet& ch, const CVec& omega_c, const BeamformerSet& bf,
                double sigma2);

/// Desired transmit mask: 1 within +-epsilon of any target angle, and of
/// zeta_r when the comm-RIS beam is included.
double desired_pattern(const ScenarioConfig& config, double theta_deg,
                       bool include_ris_beam);

/// Radiated power a^H(theta) R a(theta).
double beampattern(const CMat& R, double theta_deg);

/// (1/L) sum over the grid of |J(theta) - tau d(theta)|^2.
double mismatch_L1(const CMat& R, double tau, const ScenarioConfig& config,
                   bool include_ris_beam);

/// Average squared cross-correlation over distinct angle pairs; zero for
/// fewer than two angles.
double crosscorr_L2(const CMat& R, const std::vector<double>& angles_deg);

/// Weighted radar cost L = w_b L1 + w_c L2. Cross-correlation is taken over
/// the true target angles unless config.l2_over_grid is set.
RadarCostBreakdown radar_cost(const CMat& R, double tau, const ScenarioConfig& config,
                              bool include_ris_beam);

/// Per-target illumination power Tr(R g_m g_m^H) and the worst case Q.
std::pair<RVec, double> illumination(const ChannelSet& ch, const CVec& omega_r,
                                     const CMat& R);

struct DiagnosticPatterns {
  std::vector<double> angles_deg;
  RVec total;               // J(theta)
  RVec radar;               // J_R(theta)
  std::vector<RVec> comm;   // J_C,k(theta) per user
};

DiagnosticPatterns diagnostic_patterns(const BeamformerSet& bf, const ScenarioConfig& config);

/// RIS reflection pattern |r^H(psi) diag(omega) r(phi_in)| for an incident
/// direction phi_in.
double ris_pattern(const CVec& omega, const Eigen::Vector2d& psi,
                   const Eigen::Vector2d& phi_in);

/// Least-squares autoscale tau* = sum(J d)/sum(d^2) over the grid.
double optimal_tau(const CMat& R, const ScenarioConfig& config, bool include_ris_beam);

/// Two-column CSV (angle_deg, value).
void write_trace_csv(const std::string& path, const std::vector<double>& angles_deg,
                     const RVec& values);

}  // namespace risbeam
