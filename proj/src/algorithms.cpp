#include "risbeam/algorithms.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <json.hpp>

namespace risbeam {

namespace {

struct Rank1Pipeline {
  BeamformerSet bf;
  double tau = 0;
};

// Rank-1 communication beams plus the factored sensing covariance,
// together reproducing the relaxed R exactly.
Rank1Pipeline rank1_pipeline(const ChannelSet& ch, const CVec& omega_c,
                             const BeamformerSolution& sol) {
  const int M = ch.M();
  const int K = ch.K();
  CMat C(M, K);
  std::vector<CMat> C_hat;
  for (int k = 0; k < K; ++k) {
    CVec h = effective_user_channel(ch, omega_c, k);
    C.col(k) = extract_rank1_comm(sol.C_tilde[k], h);
    C_hat.push_back(C.col(k) * C.col(k).adjoint());
  }
  CMat S = factor_sensing(sol.R, C_hat);
  Rank1Pipeline out;
  out.bf = BeamformerSet::from_cs(std::move(C), std::move(S));
  out.tau = sol.tau;
  return out;
}

struct CommRisUpdate {
  bool ok = false;
  CVec omega;
  double gamma2 = 0;
  double gamma3 = 0;
  std::vector<double> lambda_trace;
};

CommRisUpdate update_comm_ris(const ScenarioConfig& config, const ChannelSet& ch,
                              const BeamformerSet& bf, const CVec& omega_incumbent,
                              Rng& rng) {
  CommRisUpdate out;
  FractionalSystem sys = build_fractional_system(ch, bf.C, bf.S, config.sigma2);
  DinkelbachResult dink = dinkelbach_maximin(sys, omega_incumbent, config.tol);
  if (dink.status != SolveStatus::optimal) return out;

  // score candidates by the true fairness SINR of the de-homogenized phases
  auto score = [&](const CVec& w) {
    CVec omega = w.head(config.N).conjugate();
    return fairness_sinr(ch, omega, bf, config.sigma2);
  };
  RandomizeResult rnd = randomize_phase(dink.W, config.n_rand, rng, score, config.N,
                                        &omega_incumbent);
  out.ok = true;
  out.omega = rnd.omega;
  out.gamma2 = dink.gamma2;
  out.gamma3 = rnd.score;
  out.lambda_trace = dink.lambda_trace;
  return out;
}

using BeamformerStep = std::function<BeamformerSolution(
    const CVec& omega_c, const CVec& omega_r, double gamma)>;

// Common outer loop of both algorithms. `radar_update` is empty for the
// comm-RIS-only setting.
DesignOutcome alternating_design(const ScenarioConfig& config, const ChannelSet& ch,
                                 Rng& rng, ObjectiveKind kind,
                                 const BeamformerStep& solve_beams,
                                 RisProfile omega_c0, RisProfile omega_r0,
                                 bool include_ris_beam) {
  DesignOutcome out;
  out.objective_kind = kind;
  out.omega_c = omega_c0;
  out.omega_r = omega_r0;

  const double gamma_req = config.gamma_req;
  double gamma_n = gamma_req;
  double gamma_lo = 0;  // last SINR target solved successfully
  double prev_gamma2 = 0;
  bool have_iterate = false;

  for (int n = 1; n <= config.max_iter; ++n) {
    BeamformerSolution sol = solve_beams(out.omega_c.omega, out.omega_r.omega, gamma_n);
    if (sol.status != SolveStatus::optimal) {
      if (!have_iterate) {
        out.termination = Termination::infeasible;
        out.cause = sol.cause;
        return out;
      }
      // the raised target overshot; bisect geometrically towards the last
      // solved target, giving up after five attempts
      bool recovered = false;
      double hi = gamma_n;
      for (int attempt = 0; attempt < 5 && !recovered; ++attempt) {
        hi = gamma_backtrack(gamma_lo, hi);
        BeamformerSolution retry = solve_beams(out.omega_c.omega, out.omega_r.omega, hi);
        if (retry.status == SolveStatus::optimal) {
          sol = retry;
          gamma_n = hi;
          recovered = true;
        }
      }
      if (!recovered) {
        out.termination = Termination::max_iter;
        out.cause = "raised SINR target stayed infeasible through backtracking";
        return out;
      }
    }

    Rank1Pipeline pipe = rank1_pipeline(ch, out.omega_c.omega, sol);

    CommRisUpdate comm = update_comm_ris(config, ch, pipe.bf, out.omega_c.omega, rng);
    if (!comm.ok) {
      out.termination = have_iterate ? Termination::max_iter : Termination::infeasible;
      out.cause = "comm-RIS update failed (Dinkelbach solver)";
      return out;
    }

    out.beamformers = pipe.bf;
    out.omega_c = RisProfile::from_phases(comm.omega, RisProfile::Role::comm);
    double tau_report = kind == ObjectiveKind::pattern_match
                            ? pipe.tau
                            : optimal_tau(pipe.bf.R, config, include_ris_beam);
    out.radar_cost = radar_cost(pipe.bf.R, tau_report, config, include_ris_beam);

    double q_iter = 0;
    if (kind == ObjectiveKind::illumination) {
      RadarRisSystem rsys = build_radar_system(ch, pipe.bf.R);
      RadarRisSdpResult rsdp = solve_radar_ris(rsys);
      if (rsdp.status != SolveStatus::optimal) {
        out.termination = Termination::max_iter;
        out.cause = "radar-RIS SDP failed";
        return out;
      }
      auto score = [&](const CVec& u) { return radar_ris_score(rsys, u); };
      RandomizeResult rnd =
          randomize_phase(rsdp.U, config.n_rand, rng, score, 0, &out.omega_r.omega);
      out.omega_r = RisProfile::from_phases(rnd.omega, RisProfile::Role::radar);
      q_iter = rnd.score;
    } else {
      q_iter = illumination(ch, out.omega_r.omega, pipe.bf.R).second;
    }
    out.worst_illumination = q_iter;

    have_iterate = true;
    gamma_lo = gamma_n;
    out.dinkelbach_lambdas = comm.lambda_trace;
    out.fairness_sinr = comm.gamma3;
    out.relaxed_bound = comm.gamma2;
    out.iterations = n;
    out.trace.push_back({n, gamma_n, comm.gamma2, comm.gamma3,
                         kind == ObjectiveKind::pattern_match ? out.radar_cost.L : q_iter});

    if (comm.gamma3 >= gamma_req) {
      out.termination = Termination::met_target;
      break;
    }
    if (n > 1 && std::abs(comm.gamma2 - prev_gamma2) <= config.tol * comm.gamma2) {
      out.stalled_bound = true;
      out.termination = Termination::max_iter;
      out.cause = "relaxed SINR bound stalled below the target";
      break;
    }
    prev_gamma2 = comm.gamma2;
    gamma_n = std::max(gamma_n, comm.gamma2);
    if (n == config.max_iter) out.termination = Termination::max_iter;
  }

  out.min_rate = min_rate_from_sinr(out.fairness_sinr);
  return out;
}

}  // namespace

DesignOutcome run_algorithm1(const ScenarioConfig& config, const ChannelSet& ch, Rng& rng) {
  RisProfile omega_c0 = manual_comm_profile(config, ch);
  RisProfile omega_r0 = RisProfile::absent_profile(config.N, RisProfile::Role::radar);
  auto step = [&](const CVec& omega_c, const CVec&, double gamma) {
    return solve_beamformer_p1(ch, omega_c, gamma, config, true);
  };
  return alternating_design(config, ch, rng, ObjectiveKind::pattern_match, step,
                            omega_c0, omega_r0, true);
}

DesignOutcome run_algorithm2(const ScenarioConfig& config, const ChannelSet& ch, Rng& rng) {
  RisProfile omega_c0 = manual_comm_profile(config, ch);
  RisProfile omega_r0 = manual_radar_profile(config);
  auto step = [&](const CVec& omega_c, const CVec& omega_r, double gamma) {
    return solve_beamformer_p2(ch, omega_c, omega_r, gamma, config);
  };
  return alternating_design(config, ch, rng, ObjectiveKind::illumination, step,
                            omega_c0, omega_r0, false);
}

double gamma_backtrack(double gamma_lo, double gamma_hi) {
  if (!(gamma_lo >= 0) || !(gamma_hi >= 0))
    throw std::invalid_argument("gamma values must be nonnegative");
  return std::sqrt(gamma_lo * gamma_hi);
}

RisProfile manual_ris_phases(const std::vector<Eigen::Vector2d>& destinations,
                             const Eigen::Vector2d& phi_in, int N,
                             RisProfile::Role role) {
  if (destinations.empty())
    return RisProfile::from_phases(CVec::Ones(N), role);  // empty-sum convention
  CVec acc = CVec::Zero(N);
  for (const auto& psi : destinations) acc += ura_response(psi, N);
  CVec r_in = ura_response(phi_in, N);
  CVec omega(N);
  for (int i = 0; i < N; ++i) {
    double mag = std::abs(acc(i));
    cxd dir = mag > 0 ? acc(i) / mag : cxd(1, 0);
    omega(i) = dir * std::conj(r_in(i));
  }
  return RisProfile::from_phases(std::move(omega), role);
}

RisProfile manual_comm_profile(const ScenarioConfig& config, const ChannelSet& ch) {
  std::vector<Eigen::Vector2d> dests;
  for (const auto& u : ch.user_positions)
    dests.push_back(ScenarioConfig::direction_cosines(config.comm_ris, u));
  Eigen::Vector2d phi_in = ScenarioConfig::direction_cosines(config.comm_ris, config.dfbs);
  return manual_ris_phases(dests, phi_in, config.N, RisProfile::Role::comm);
}

RisProfile manual_radar_profile(const ScenarioConfig& config) {
  std::vector<Eigen::Vector2d> dests;
  for (int j = 0; j < config.T; ++j)
    dests.push_back(
        ScenarioConfig::direction_cosines(config.radar_ris, config.target_position(j)));
  Eigen::Vector2d phi_in = ScenarioConfig::direction_cosines(config.radar_ris, config.dfbs);
  return manual_ris_phases(dests, phi_in, config.N, RisProfile::Role::radar);
}

BeamformerSet sensing_only_design(const ScenarioConfig& config, const ChannelSet& ch,
                                  double* tau_out) {
  ChannelSet sensing = ch;
  sensing.h_bu.clear();
  sensing.h_ru.clear();
  sensing.user_positions.clear();
  BeamformerSolution sol = solve_beamformer_p1(sensing, CVec::Zero(config.N),
                                               config.gamma_req, config, false);
  if (sol.status != SolveStatus::optimal)
    throw std::runtime_error("sensing-only design failed: " + sol.cause);
  CMat S = factor_sensing(sol.R, {});
  if (tau_out) *tau_out = sol.tau;
  return BeamformerSet::from_cs(CMat::Zero(config.M, 0), std::move(S));
}

DesignOutcome fixed_phase_design(const ScenarioConfig& config, const ChannelSet& ch,
                                 const RisProfile& omega_c, const RisProfile& omega_r,
                                 bool include_ris_beam) {
  DesignOutcome out;
  out.objective_kind = ObjectiveKind::pattern_match;
  out.omega_c = omega_c;
  out.omega_r = omega_r;

  BeamformerSolution sol = solve_beamformer_p1(ch, omega_c.omega, config.gamma_req,
                                               config, include_ris_beam);
  if (sol.status != SolveStatus::optimal) {
    out.termination = Termination::infeasible;
    out.cause = sol.cause;
    return out;
  }
  Rank1Pipeline pipe = rank1_pipeline(ch, omega_c.omega, sol);
  out.beamformers = pipe.bf;
  out.fairness_sinr = fairness_sinr(ch, omega_c.omega, pipe.bf, config.sigma2);
  out.relaxed_bound = out.fairness_sinr;
  out.min_rate = min_rate_from_sinr(out.fairness_sinr);
  out.radar_cost = radar_cost(pipe.bf.R, pipe.tau, config, include_ris_beam);
  out.worst_illumination = illumination(ch, omega_r.omega, pipe.bf.R).second;
  out.iterations = 1;
  out.trace.push_back({1, config.gamma_req, out.relaxed_bound, out.fairness_sinr,
                       out.radar_cost.L});
  out.termination = out.fairness_sinr >= config.gamma_req * (1.0 - 1e-6)
                        ? Termination::met_target
                        : Termination::max_iter;
  if (out.termination == Termination::max_iter)
    out.cause = "achieved SINR below target beyond solver tolerance";
  return out;
}

DesignOutcome no_ris_design(const ScenarioConfig& config, const ChannelSet& ch) {
  RisProfile none_c = RisProfile::absent_profile(config.N, RisProfile::Role::comm);
  RisProfile none_r = RisProfile::absent_profile(config.N, RisProfile::Role::radar);
  return fixed_phase_design(config, ch, none_c, none_r, false);
}

namespace {

nlohmann::json complex_matrix_to_json(const CMat& m) {
  nlohmann::json flat = nlohmann::json::array();
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) {
      flat.push_back(m(r, c).real());
      flat.push_back(m(r, c).imag());
    }
  nlohmann::json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  j["data"] = std::move(flat);
  return j;
}

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::met_target: return "met-target";
    case Termination::max_iter: return "max-iter";
    case Termination::infeasible: return "infeasible";
  }
  return "?";
}

}  // namespace

std::string outcome_to_json(const DesignOutcome& o, const ScenarioConfig& config) {
  nlohmann::json j;
  j["termination"] = termination_name(o.termination);
  if (!o.cause.empty()) j["cause"] = o.cause;
  j["objective"] = o.objective_kind == ObjectiveKind::pattern_match ? "pattern-match"
                                                                    : "illumination";
  j["gamma_req_dB"] = to_db(config.gamma_req);
  j["fairness_sinr"] = o.fairness_sinr;
  j["fairness_sinr_dB"] = to_db(o.fairness_sinr);
  j["relaxed_bound"] = o.relaxed_bound;
  j["min_rate_bps"] = o.min_rate;
  j["radar_cost"] = {{"L1", o.radar_cost.L1},
                     {"L2", o.radar_cost.L2},
                     {"L", o.radar_cost.L},
                     {"tau", o.radar_cost.tau}};
  j["worst_illumination"] = o.worst_illumination;
  j["worst_illumination_dB"] = to_db(o.worst_illumination);
  j["iterations"] = o.iterations;
  j["stalled_bound"] = o.stalled_bound;
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& r : o.trace)
    trace.push_back({{"n", r.n},
                     {"gamma_target", r.gamma_target},
                     {"gamma2", r.gamma2},
                     {"gamma3", r.gamma3},
                     {"objective", r.objective}});
  j["trace"] = std::move(trace);
  if (o.feasible()) {
    j["C"] = complex_matrix_to_json(o.beamformers.C);
    j["S"] = complex_matrix_to_json(o.beamformers.S);
    j["R"] = complex_matrix_to_json(o.beamformers.R);
    j["omega_c"] = complex_matrix_to_json(o.omega_c.omega);
    j["omega_r"] = complex_matrix_to_json(o.omega_r.omega);
  }
  return j.dump(2);
}

}  // namespace risbeam
