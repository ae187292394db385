#include "risbeam/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace risbeam {

BeamformerSet BeamformerSet::from_cs(CMat C, CMat S) {
  BeamformerSet bf;
  bf.R = C * C.adjoint() + S * S.adjoint();
  bf.C = std::move(C);
  bf.S = std::move(S);
  return bf;
}

std::string RadarCostBreakdown::csv_row() const {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g", L1, L2, L, tau);
  return buf;
}

double sinr(const ChannelSet& ch, const CVec& omega_c, const BeamformerSet& bf,
            int k, double sigma2, NumericFlags* flags) {
  if (!(sigma2 > 0)) throw std::domain_error("sigma2 must be positive");
  CVec h = effective_user_channel(ch, omega_c, k);
  double signal = std::norm(cxd(h.adjoint() * bf.C.col(k)));
  double interference = 0;
  for (int j = 0; j < bf.K(); ++j)
    if (j != k) interference += std::norm(cxd(h.adjoint() * bf.C.col(j)));
  interference += (bf.S.adjoint() * h).squaredNorm();
  double denom = interference + sigma2;
  if (denom < sigma2) {
    denom = sigma2;
    if (flags) ++flags->clamped_denominators;
  }
  return signal / denom;
}

double fairness_sinr(const ChannelSet& ch, const CVec& omega_c, const BeamformerSet& bf,
                     double sigma2, int* argmin) {
  const int K = ch.K();
  if (K == 0) throw std::domain_error("fairness SINR undefined for K = 0");
  double best = 0;
  int best_k = 0;
  for (int k = 0; k < K; ++k) {
    double g = sinr(ch, omega_c, bf, k, sigma2);
    if (k == 0 || g < best) {
      best = g;
      best_k = k;
    }
  }
  if (argmin) *argmin = best_k;
  return best;
}

double min_rate_from_sinr(double gamma_min) { return std::log2(1.0 + gamma_min); }

double min_rate(const ChannelSet& ch, const CVec& omega_c, const BeamformerSet& bf,
                double sigma2) {
  return min_rate_from_sinr(fairness_sinr(ch, omega_c, bf, sigma2));
}

double desired_pattern(const ScenarioConfig& config, double theta_deg,
                       bool include_ris_beam) {
  for (double th : config.target_angles_deg)
    if (std::abs(theta_deg - th) <= config.epsilon_deg) return 1.0;
  if (include_ris_beam && std::abs(theta_deg - config.zeta_r_deg) <= config.epsilon_deg)
    return 1.0;
  return 0.0;
}

double beampattern(const CMat& R, double theta_deg) {
  CVec a = ula_response(theta_deg, static_cast<int>(R.rows()));
  return std::real(cxd(a.adjoint() * R * a));
}

double mismatch_L1(const CMat& R, double tau, const ScenarioConfig& config,
                   bool include_ris_beam) {
  const auto& grid = config.grid_deg;
  double acc = 0;
  for (double th : grid) {
    double r = beampattern(R, th) - tau * desired_pattern(config, th, include_ris_beam);
    acc += r * r;
  }
  return acc / static_cast<double>(grid.size());
}

double crosscorr_L2(const CMat& R, const std::vector<double>& angles_deg) {
  const int T = static_cast<int>(angles_deg.size());
  if (T <= 1) return 0.0;
  const int M = static_cast<int>(R.rows());
  std::vector<CVec> steer(T);
  for (int i = 0; i < T; ++i) steer[i] = ula_response(angles_deg[i], M);
  double acc = 0;
  for (int i = 0; i < T - 1; ++i)
    for (int j = i + 1; j < T; ++j)
      acc += std::norm(cxd(steer[i].adjoint() * R * steer[j]));
  return 2.0 * acc / (static_cast<double>(T) * T - T);
}

RadarCostBreakdown radar_cost(const CMat& R, double tau, const ScenarioConfig& config,
                              bool include_ris_beam) {
  RadarCostBreakdown out;
  out.tau = tau;
  out.L1 = mismatch_L1(R, tau, config, include_ris_beam);
  out.L2 = crosscorr_L2(R, config.l2_over_grid ? config.grid_deg : config.target_angles_deg);
  out.L = config.w_b * out.L1 + config.w_c * out.L2;
  return out;
}

std::pair<RVec, double> illumination(const ChannelSet& ch, const CVec& omega_r,
                                     const CMat& R) {
  const int T = ch.T();
  RVec per_target(T);
  double worst = 0;
  for (int m = 0; m < T; ++m) {
    CVec g = effective_target_channel(ch, omega_r, m);
    per_target(m) = std::real(cxd(g.adjoint() * R * g));
    if (m == 0 || per_target(m) < worst) worst = per_target(m);
  }
  return {per_target, worst};
}

DiagnosticPatterns diagnostic_patterns(const BeamformerSet& bf, const ScenarioConfig& config) {
  DiagnosticPatterns out;
  out.angles_deg = config.grid_deg;
  const int L = static_cast<int>(out.angles_deg.size());
  out.total.resize(L);
  out.radar.resize(L);
  out.comm.assign(bf.K(), RVec(L));
  for (int i = 0; i < L; ++i) {
    CVec a = ula_response(out.angles_deg[i], bf.M());
    out.total(i) = std::real(cxd(a.adjoint() * bf.R * a));
    out.radar(i) = (bf.S.adjoint() * a).squaredNorm();
    for (int k = 0; k < bf.K(); ++k)
      out.comm[k](i) = std::norm(cxd(a.adjoint() * bf.C.col(k)));
  }
  return out;
}

double ris_pattern(const CVec& omega, const Eigen::Vector2d& psi,
                   const Eigen::Vector2d& phi_in) {
  const int N = static_cast<int>(omega.size());
  CVec r_out = ura_response(psi, N);
  CVec r_in = ura_response(phi_in, N);
  return std::abs(cxd(r_out.adjoint() * omega.cwiseProduct(r_in)));
}

double optimal_tau(const CMat& R, const ScenarioConfig& config, bool include_ris_beam) {
  double num = 0, den = 0;
  for (double th : config.grid_deg) {
    double d = desired_pattern(config, th, include_ris_beam);
    num += beampattern(R, th) * d;
    den += d * d;
  }
  return den > 0 ? num / den : 0.0;
}

void write_trace_csv(const std::string& path, const std::vector<double>& angles_deg,
                     const RVec& values) {
  if (static_cast<int>(angles_deg.size()) != values.size())
    throw std::invalid_argument("trace length mismatch");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "angle_deg,value\n";
  char buf[96];
  for (int i = 0; i < values.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", angles_deg[i], values(i));
    out << buf;
  }
}

}  // namespace risbeam
