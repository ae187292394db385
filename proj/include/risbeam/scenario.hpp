#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "risbeam/types.hpp"

namespace risbeam {

struct Position {
  double x = 0, y = 0, z = 0;
};

inline double distance(const Position& a, const Position& b) {
  double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

/// All scalar parameters and geometry of one scenario. Angles are kept in
/// degrees; powers are linear (watts). dB/dBm keys in the config file are
/// converted once at load time.
struct ScenarioConfig {
  int M = 8;    // DFBS antennas
  int N = 16;   // RIS elements (perfect square)
  int K = 2;    // users
  int T = 2;    // targets
  int K_d = 2;  // users with a direct path
  int T_d = 2;  // targets with a direct path

  double P_t = 1.0;                    // total transmit power [W]
  double gamma_req = 3.1622776601684;  // SINR requirement, linear (5 dB)
  double sigma2 = 3.9810717055e-13;    // noise power [W] (-94 dBm)

  std::vector<double> target_angles_deg{-50.0, -10.0};
  double target_distance_m = 5.0;
  double zeta_r_deg = 33.0;  // comm-RIS bearing from the DFBS
  double epsilon_deg = 10.0; // desired-beam half width
  double w_b = 1.0;
  double w_c = 1.0;
  std::vector<double> grid_deg;  // beampattern grid, covers [-90, 90]
  double rician_factor = 10.0;

  Position dfbs{0, 0, 0};
  Position comm_ris{20, 13, 3};
  Position radar_ris{-6, 6, 3};
  Position user_box_min{15, 8, 0};
  Position user_box_max{18, 18, 0};

  int n_rand = 500;        // Gaussian randomization draws
  double tol = 1e-3;       // convergence tolerance (Dinkelbach / outer loop)
  int max_iter = 20;       // outer-loop cap
  std::uint64_t seed = 1;

  bool l2_over_grid = false;  // evaluate cross-correlation over all grid pairs

  /// Checks invariants and snaps target angles and zeta_r onto the grid.
  /// Throws std::invalid_argument on violation. Builds the default 181-point
  /// 1-degree grid when none is set.
  void finalize();

  bool finalized() const { return finalized_; }

  /// Desk-scale defaults (M=8, N=16, K=2, T=2), ready to use.
  static ScenarioConfig desk_default();
  /// Paper-scale parameters (M=16, N=100, K=4).
  static ScenarioConfig paper_scale();

  static ScenarioConfig from_json_file(const std::string& path);
  static ScenarioConfig from_json_text(const std::string& text);
  std::string to_json_text() const;

  // Geometry helpers (valid after finalize()).
  Position target_position(int j) const;
  /// ULA cone angle of a point as seen from the DFBS, degrees.
  double bearing_from_dfbs(const Position& p) const;
  /// Direction cosines of `to` in the local frame of a RIS at `at`
  /// (URA axes are the global x and z axes).
  static Eigen::Vector2d direction_cosines(const Position& at, const Position& to);

 private:
  bool finalized_ = false;
};

}  // namespace risbeam
