#include "risbeam/channels.hpp"

#include <cmath>
#include <stdexcept>

namespace risbeam {

CVec ula_response(double theta_deg, int M) {
  if (theta_deg < -90.0 || theta_deg > 90.0)
    throw std::domain_error("ULA angle outside [-90, 90] degrees");
  double s = std::sin(deg2rad(theta_deg));
  CVec a(M);
  for (int m = 0; m < M; ++m) a(m) = std::polar(1.0, kPi * m * s);
  return a;
}

CVec ura_response(const Eigen::Vector2d& psi, int N) {
  int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(N))));
  if (side * side != N) throw std::invalid_argument("URA size must be a perfect square");
  CVec r(N);
  int i = 0;
  for (int q = 0; q < side; ++q)
    for (int p = 0; p < side; ++p)
      r(i++) = std::polar(1.0, 0.5 * kPi * (p * psi(0) + q * psi(1)));
  return r;
}

double pathloss_db(LinkClass link, double d_m) {
  if (!(d_m > 0)) throw std::domain_error("pathloss distance must be positive");
  double slope = 22.0;
  switch (link) {
    case LinkClass::radar_ris_target: slope = 25.0; break;
    case LinkClass::dfbs_user: slope = 36.0; break;
    case LinkClass::other: slope = 22.0; break;
  }
  return 30.0 + slope * std::log10(d_m);
}

double pathloss_amplitude(LinkClass link, double d_m) {
  return std::pow(10.0, -pathloss_db(link, d_m) / 20.0);
}

CMat sample_rician(int rows, int cols, double rho, const CMat& los, Rng& rng) {
  if (los.rows() != rows || los.cols() != cols)
    throw std::invalid_argument("LOS matrix shape mismatch");
  if (rho < 0) throw std::invalid_argument("Rician factor must be nonnegative");
  double w_los = std::sqrt(rho / (1.0 + rho));
  double w_nlos = std::sqrt(1.0 / (1.0 + rho));
  return w_los * los + w_nlos * rng.cnormal_matrix(rows, cols);
}

CMat sample_rayleigh(int rows, int cols, Rng& rng) {
  return rng.cnormal_matrix(rows, cols);
}

RisProfile RisProfile::absent_profile(int n, Role role) {
  RisProfile p;
  p.omega = CVec::Zero(n);
  p.role = role;
  p.absent = true;
  return p;
}

RisProfile RisProfile::from_phases(CVec omega, Role role) {
  RisProfile p;
  p.omega = std::move(omega);
  p.role = role;
  p.absent = false;
  return p;
}

bool RisProfile::valid(double tol) const {
  if (absent) return omega.isZero(0.0);
  for (int i = 0; i < omega.size(); ++i)
    if (std::abs(std::abs(omega(i)) - 1.0) > tol) return false;
  return true;
}

namespace {

// LOS of a DFBS -> RIS MIMO link: arrival URA response times departure ULA
// response, rank one, unit-modulus entries.
CMat ris_link_los(const ScenarioConfig& cfg, const Position& ris) {
  Eigen::Vector2d psi_arr = ScenarioConfig::direction_cosines(ris, cfg.dfbs);
  double dep = cfg.bearing_from_dfbs(ris);
  CVec r = ura_response(psi_arr, cfg.N);
  CVec a = ula_response(dep, cfg.M);
  return r * a.adjoint();
}

}  // namespace

ChannelSet assemble_scenario(const ScenarioConfig& config, Rng& rng) {
  if (!config.finalized()) throw std::invalid_argument("config not finalized");
  ChannelSet ch;
  const int M = config.M, N = config.N, K = config.K, T = config.T;

  double d_cris = distance(config.dfbs, config.comm_ris);
  double d_rris = distance(config.dfbs, config.radar_ris);
  if (d_cris <= 0 || d_rris <= 0) throw std::domain_error("RIS coincides with DFBS");

  ch.H_br = pathloss_amplitude(LinkClass::other, d_cris) *
            sample_rician(N, M, config.rician_factor, ris_link_los(config, config.comm_ris), rng);
  ch.G_br = pathloss_amplitude(LinkClass::other, d_rris) *
            sample_rician(N, M, config.rician_factor, ris_link_los(config, config.radar_ris), rng);

  ch.h_bu.resize(K);
  ch.h_ru.resize(K);
  ch.user_positions.resize(K);
  for (int k = 0; k < K; ++k) {
    Position u;
    u.x = rng.uniform(config.user_box_min.x, config.user_box_max.x);
    u.y = rng.uniform(config.user_box_min.y, config.user_box_max.y);
    u.z = config.user_box_min.z;
    ch.user_positions[k] = u;

    double d_du = distance(config.dfbs, u);
    double d_ru = distance(config.comm_ris, u);
    if (d_du <= 0 || d_ru <= 0) throw std::domain_error("degenerate user position");

    CMat ray = sample_rayleigh(M, 1, rng);
    if (k < config.K_d)
      ch.h_bu[k] = pathloss_amplitude(LinkClass::dfbs_user, d_du) * ray.col(0);
    else
      ch.h_bu[k] = CVec::Zero(M);

    CVec los = ura_response(ScenarioConfig::direction_cosines(config.comm_ris, u), N);
    ch.h_ru[k] = pathloss_amplitude(LinkClass::other, d_ru) *
                 sample_rician(N, 1, config.rician_factor, los, rng).col(0);
  }

  ch.g_bt.resize(T);
  ch.g_rt.resize(T);
  ch.alpha_bt.resize(T);
  for (int m = 0; m < T; ++m) {
    Position tp = config.target_position(m);
    double amp_bt = pathloss_amplitude(LinkClass::other, config.target_distance_m);
    ch.alpha_bt[m] = std::polar(amp_bt, 2.0 * kPi * rng.uniform());
    if (m < config.T_d)
      ch.g_bt[m] = std::conj(ch.alpha_bt[m]) * ula_response(config.target_angles_deg[m], M);
    else
      ch.g_bt[m] = CVec::Zero(M);

    double d_rt = distance(config.radar_ris, tp);
    if (d_rt <= 0) throw std::domain_error("target coincides with radar-RIS");
    ch.g_rt[m] = pathloss_amplitude(LinkClass::radar_ris_target, d_rt) *
                 ura_response(ScenarioConfig::direction_cosines(config.radar_ris, tp), N);
  }
  return ch;
}

CVec effective_user_channel(const ChannelSet& ch, const CVec& omega_c, int k) {
  if (k < 0 || k >= ch.K()) throw std::out_of_range("user index");
  return ch.h_bu[k] + ch.H_br.adjoint() * omega_c.conjugate().cwiseProduct(ch.h_ru[k]);
}

CVec effective_user_channel(const ChannelSet& ch, const RisProfile& ris, int k) {
  return effective_user_channel(ch, ris.omega, k);
}

CVec effective_target_channel(const ChannelSet& ch, const CVec& omega_r, int m) {
  if (m < 0 || m >= ch.T()) throw std::out_of_range("target index");
  return ch.g_bt[m] + ch.G_br.adjoint() * omega_r.conjugate().cwiseProduct(ch.g_rt[m]);
}

CVec effective_target_channel(const ChannelSet& ch, const RisProfile& ris, int m) {
  return effective_target_channel(ch, ris.omega, m);
}

}  // namespace risbeam
