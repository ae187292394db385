#include "risbeam/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace risbeam {

namespace {

int isqrt_exact(int n) {
  int r = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
  return (r * r == n) ? r : -1;
}

double snap_to_grid(const std::vector<double>& grid, double angle) {
  double best = grid.front();
  double best_d = std::abs(angle - best);
  for (double g : grid) {
    double d = std::abs(angle - g);
    if (d < best_d) {
      best_d = d;
      best = g;
    }
  }
  return best;
}

}  // namespace

void ScenarioConfig::finalize() {
  if (M < 1 || N < 1 || K < 0 || T < 0) throw std::invalid_argument("M,N >= 1 and K,T >= 0 required");
  if (K_d < 0 || K_d > K) throw std::invalid_argument("0 <= K_d <= K required");
  if (T_d < 0 || T_d > T) throw std::invalid_argument("0 <= T_d <= T required");
  if (!(P_t > 0)) throw std::invalid_argument("P_t must be positive");
  if (!(gamma_req > 0)) throw std::invalid_argument("Gamma must be positive");
  if (!(sigma2 > 0)) throw std::invalid_argument("sigma2 must be positive");
  if (!(epsilon_deg > 0)) throw std::invalid_argument("epsilon must be positive");
  if (w_b < 0 || w_c < 0) throw std::invalid_argument("weights must be nonnegative");
  if (n_rand < 1) throw std::invalid_argument("N_rand must be >= 1");
  if (max_iter < 1) throw std::invalid_argument("MaxIter must be >= 1");
  if (!(tol > 0)) throw std::invalid_argument("Tol must be positive");
  if (isqrt_exact(N) < 0) throw std::invalid_argument("N must be a perfect square (URA)");
  if (static_cast<int>(target_angles_deg.size()) != T)
    throw std::invalid_argument("target_angles_deg must have T entries");
  for (double th : target_angles_deg)
    if (!(th > -90.0 && th < 90.0))
      throw std::invalid_argument("target angles must lie in (-90, 90) degrees");

  if (grid_deg.empty()) {
    grid_deg.resize(181);
    for (int i = 0; i < 181; ++i) grid_deg[i] = -90.0 + i;
  }
  std::sort(grid_deg.begin(), grid_deg.end());
  if (grid_deg.front() > -90.0 || grid_deg.back() < 90.0)
    throw std::invalid_argument("grid must cover [-90, 90] degrees");

  for (double& th : target_angles_deg) th = snap_to_grid(grid_deg, th);
  zeta_r_deg = snap_to_grid(grid_deg, zeta_r_deg);

  finalized_ = true;
}

ScenarioConfig ScenarioConfig::desk_default() {
  ScenarioConfig c;
  c.finalize();
  return c;
}

ScenarioConfig ScenarioConfig::paper_scale() {
  ScenarioConfig c;
  c.M = 16;
  c.N = 100;
  c.K = 4;
  c.K_d = 4;
  c.n_rand = 1000;
  c.finalize();
  return c;
}

Position ScenarioConfig::target_position(int j) const {
  double th = deg2rad(target_angles_deg.at(j));
  return Position{dfbs.x + target_distance_m * std::cos(th),
                  dfbs.y + target_distance_m * std::sin(th), dfbs.z};
}

double ScenarioConfig::bearing_from_dfbs(const Position& p) const {
  double d = distance(dfbs, p);
  if (d <= 0) throw std::domain_error("coincident endpoints");
  return rad2deg(std::asin((p.y - dfbs.y) / d));
}

Eigen::Vector2d ScenarioConfig::direction_cosines(const Position& at, const Position& to) {
  double d = distance(at, to);
  if (d <= 0) throw std::domain_error("coincident endpoints");
  return {(to.x - at.x) / d, (to.z - at.z) / d};
}

namespace {

using nlohmann::json;

Position position_from(const json& a) {
  return Position{a.at(0).get<double>(), a.at(1).get<double>(), a.at(2).get<double>()};
}

json position_to(const Position& p) { return json::array({p.x, p.y, p.z}); }

}  // namespace

ScenarioConfig ScenarioConfig::from_json_text(const std::string& text) {
  json j = json::parse(text);
  ScenarioConfig c;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("M", c.M);
  get("N", c.N);
  get("K", c.K);
  get("T", c.T);
  get("K_d", c.K_d);
  get("T_d", c.T_d);
  if (j.contains("P_t_dBW")) c.P_t = from_db(j.at("P_t_dBW").get<double>());
  if (j.contains("Gamma_dB")) c.gamma_req = from_db(j.at("Gamma_dB").get<double>());
  if (j.contains("sigma2_dBm")) c.sigma2 = from_db(j.at("sigma2_dBm").get<double>() - 30.0);
  get("target_angles_deg", c.target_angles_deg);
  if (j.contains("target_angles_deg")) c.T = static_cast<int>(c.target_angles_deg.size());
  get("T", c.T);
  get("target_distance_m", c.target_distance_m);
  get("zeta_r_deg", c.zeta_r_deg);
  get("epsilon_deg", c.epsilon_deg);
  get("w_b", c.w_b);
  get("w_c", c.w_c);
  get("grid_deg", c.grid_deg);
  get("rho", c.rician_factor);
  if (j.contains("positions")) {
    const json& p = j.at("positions");
    if (p.contains("dfbs")) c.dfbs = position_from(p.at("dfbs"));
    if (p.contains("comm_ris")) c.comm_ris = position_from(p.at("comm_ris"));
    if (p.contains("radar_ris")) c.radar_ris = position_from(p.at("radar_ris"));
    if (p.contains("user_box_min")) c.user_box_min = position_from(p.at("user_box_min"));
    if (p.contains("user_box_max")) c.user_box_max = position_from(p.at("user_box_max"));
  }
  get("N_rand", c.n_rand);
  get("Tol", c.tol);
  get("MaxIter", c.max_iter);
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("l2_over_grid")) c.l2_over_grid = j.at("l2_over_grid").get<bool>();
  c.finalize();
  return c;
}

ScenarioConfig ScenarioConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string ScenarioConfig::to_json_text() const {
  json j;
  j["M"] = M;
  j["N"] = N;
  j["K"] = K;
  j["T"] = T;
  j["K_d"] = K_d;
  j["T_d"] = T_d;
  j["P_t_dBW"] = to_db(P_t);
  j["Gamma_dB"] = to_db(gamma_req);
  j["sigma2_dBm"] = to_db(sigma2) + 30.0;
  j["target_angles_deg"] = target_angles_deg;
  j["target_distance_m"] = target_distance_m;
  j["zeta_r_deg"] = zeta_r_deg;
  j["epsilon_deg"] = epsilon_deg;
  j["w_b"] = w_b;
  j["w_c"] = w_c;
  j["grid_deg"] = grid_deg;
  j["rho"] = rician_factor;
  j["positions"] = {{"dfbs", position_to(dfbs)},
                    {"comm_ris", position_to(comm_ris)},
                    {"radar_ris", position_to(radar_ris)},
                    {"user_box_min", position_to(user_box_min)},
                    {"user_box_max", position_to(user_box_max)}};
  j["N_rand"] = n_rand;
  j["Tol"] = tol;
  j["MaxIter"] = max_iter;
  j["seed"] = seed;
  j["l2_over_grid"] = l2_over_grid;
  return j.dump(2);
}

}  // namespace risbeam
