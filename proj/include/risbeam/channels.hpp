#pragma once

#include <vector>

#include "risbeam/rng.hpp"
#include "risbeam/scenario.hpp"
#include "risbeam/types.hpp"

namespace risbeam {

/// Half-wavelength ULA response, entry m = exp(j*pi*m*sin(theta)), m = 0..M-1.
CVec ula_response(double theta_deg, int M);

/// Quarter-wavelength URA response for a sqrt(N) x sqrt(N) grid. With
/// psi = (psi1, psi2) direction cosines, the element at grid position (p, q)
/// carries phase (pi/2) * (p*psi1 + q*psi2); p varies fastest in the output.
CVec ura_response(const Eigen::Vector2d& psi, int N);

enum class LinkClass {
  radar_ris_target,  // 30 + 25 log10(d) dB
  dfbs_user,         // 30 + 36 log10(d) dB
  other,             // 30 + 22 log10(d) dB
};

double pathloss_db(LinkClass link, double d_m);
/// Multiplicative amplitude 10^(-PL_dB/20).
double pathloss_amplitude(LinkClass link, double d_m);

/// Rician sample: sqrt(rho/(1+rho)) * los + sqrt(1/(1+rho)) * W with W i.i.d.
/// circular complex normal, unit variance per entry. Pathloss is applied by
/// the caller.
CMat sample_rician(int rows, int cols, double rho, const CMat& los, Rng& rng);

/// i.i.d. circular complex normal entries, unit variance.
CMat sample_rayleigh(int rows, int cols, Rng& rng);

/// Unit-modulus RIS phase profile. `absent` marks the profile that stands in
/// for a missing RIS; only then may omega be the zero vector.
struct RisProfile {
  enum class Role { comm, radar };
  CVec omega;
  Role role = Role::comm;
  bool absent = false;

  static RisProfile absent_profile(int n, Role role);
  static RisProfile from_phases(CVec omega, Role role);
  /// |[omega]_i| = 1 within tol, or all-zero when absent.
  bool valid(double tol = 1e-9) const;
};

/// One realization of every channel in the scenario.
struct ChannelSet {
  CMat H_br;                 // N x M, DFBS -> comm-RIS
  CMat G_br;                 // N x M, DFBS -> radar-RIS
  std::vector<CVec> h_bu;    // per user, M (zero when blocked)
  std::vector<CVec> h_ru;    // per user, N
  std::vector<CVec> g_bt;    // per target, M (zero when blocked)
  std::vector<CVec> g_rt;    // per target, N
  std::vector<cxd> alpha_bt; // per target path gain
  std::vector<Position> user_positions;

  int M() const { return static_cast<int>(H_br.cols()); }
  int N() const { return static_cast<int>(H_br.rows()); }
  int K() const { return static_cast<int>(h_bu.size()); }
  int T() const { return static_cast<int>(g_bt.size()); }
};

/// Draws user positions, samples every fading link and assembles the LOS
/// target channels with pathloss applied. Deterministic given the rng state.
ChannelSet assemble_scenario(const ScenarioConfig& config, Rng& rng);

/// h_k = h_bu,k + H_br^H diag(conj(omega_c)) h_ru,k  (column form of Eq-style
/// row channel h_k^H = h_bu,k^H + h_ru,k^H diag(omega_c) H_br).
CVec effective_user_channel(const ChannelSet& ch, const CVec& omega_c, int k);
CVec effective_user_channel(const ChannelSet& ch, const RisProfile& ris, int k);

/// g_m = g_bt,m + G_br^H diag(conj(omega_r)) g_rt,m.
CVec effective_target_channel(const ChannelSet& ch, const CVec& omega_r, int m);
CVec effective_target_channel(const ChannelSet& ch, const RisProfile& ris, int m);

}  // namespace risbeam
