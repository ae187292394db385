#include "risbeam/verify.hpp"

#include <cmath>
#include <cstdio>

namespace risbeam::verify {

namespace {

CVec unit_modulus(Rng& rng, int n) {
  CVec w(n);
  for (int i = 0; i < n; ++i) w(i) = std::polar(1.0, 2 * kPi * rng.uniform());
  return w;
}

template <typename Score>
double sweep_phases(int N, double step_deg, const Score& score) {
  double best = -1e300;
  if (N == 1) {
    for (double a = 0; a < 360.0; a += step_deg) {
      CVec omega(1);
      omega(0) = std::polar(1.0, deg2rad(a));
      best = std::max(best, score(omega));
    }
  } else if (N == 2) {
    for (double a = 0; a < 360.0; a += step_deg)
      for (double b = 0; b < 360.0; b += step_deg) {
        CVec omega(2);
        omega(0) = std::polar(1.0, deg2rad(a));
        omega(1) = std::polar(1.0, deg2rad(b));
        best = std::max(best, score(omega));
      }
  } else {
    throw std::invalid_argument("brute-force sweep supports N <= 2");
  }
  return best;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), f, a, b);
  return buf;
}

}  // namespace

double brute_force_comm_sweep(const FractionalSystem& sys, double step_deg) {
  return sweep_phases(sys.N, step_deg, [&](const CVec& omega) {
    return fractional_worst_ratio(sys, homogenize_comm(omega));
  });
}

double brute_force_radar_sweep(const RadarRisSystem& sys, double step_deg) {
  return sweep_phases(sys.N, step_deg, [&](const CVec& omega) {
    return radar_ris_score(sys, homogenize_radar(omega));
  });
}

std::vector<CheckResult> run_oracle_suite(std::uint64_t seed) {
  std::vector<CheckResult> results;
  Rng rng(seed);

  // lifted-form identities on a desk-scale realization
  {
    ScenarioConfig cfg = ScenarioConfig::desk_default();
    Rng crng(seed);
    ChannelSet ch = assemble_scenario(cfg, crng);
    CMat C = 0.3 * rng.cnormal_matrix(cfg.M, cfg.K);
    CMat S = 0.2 * rng.cnormal_matrix(cfg.M, cfg.M);
    FractionalSystem sys = build_fractional_system(ch, C, S, cfg.sigma2);
    BeamformerSet bf = BeamformerSet::from_cs(C, S);
    double worst = 0;
    for (int t = 0; t < 100; ++t) {
      CVec omega = unit_modulus(rng, cfg.N);
      CVec w = homogenize_comm(omega);
      for (int k = 0; k < cfg.K; ++k) {
        double direct = sinr(ch, omega, bf, k, cfg.sigma2);
        double lifted = fractional_ratio(sys, w, k);
        worst = std::max(worst,
                         std::abs(lifted - direct) / std::max(1.0, std::abs(direct)));
      }
    }
    results.push_back({"fractional ratio identity (100 phase vectors)", worst <= 1e-9,
                       fmt("max relative deviation %.3g (bound %.3g)", worst, 1e-9)});

    CMat B = rng.cnormal_matrix(cfg.M, cfg.M);
    CMat R = (B * B.adjoint()) * (cfg.P_t / cfg.M / 8.0);
    RadarRisSystem rsys = build_radar_system(ch, R);
    double worst_r = 0;
    for (int t = 0; t < 100; ++t) {
      CVec omega = unit_modulus(rng, cfg.N);
      CVec u = homogenize_radar(omega);
      auto [per, q] = illumination(ch, omega, R);
      for (int m = 0; m < cfg.T; ++m) {
        double lifted = std::real(cxd(u.adjoint() * rsys.Q[m] * u));
        worst_r = std::max(worst_r, std::abs(lifted - per(m)) / std::max(per(m), 1e-30));
      }
    }
    results.push_back({"illumination identity (100 phase vectors)", worst_r <= 1e-9,
                       fmt("max relative deviation %.3g (bound %.3g)", worst_r, 1e-9)});
  }

  // Dinkelbach sandwich on N = 1 systems
  {
    bool all_ok = true;
    double worst_gap = 0;
    for (int inst = 0; inst < 5; ++inst) {
      FractionalSystem sys;
      sys.N = 1;
      sys.sigma2 = 1.0;
      for (int k = 0; k < 2; ++k) {
        CVec a = rng.cnormal_vector(2);
        sys.A.push_back(CMat(2.0 * (a * a.adjoint())));
        CMat Bm = rng.cnormal_matrix(2, 2);
        sys.B.push_back(CMat(0.5 * (Bm * Bm.adjoint())));
      }
      CVec omega0(1);
      omega0(0) = 1.0;
      auto dink = dinkelbach_maximin(sys, omega0, 1e-6);
      if (dink.status != SolveStatus::optimal) {
        all_ok = false;
        continue;
      }
      double slack = 1e-5 * (1.0 + dink.gamma2);
      double bf = brute_force_comm_sweep(sys, 0.1);
      Rng draw(Rng::mix(seed, 500 + inst));
      auto rnd = randomize_phase(
          dink.W, 10000, draw,
          [&](const CVec& w) { return fractional_worst_ratio(sys, w); }, sys.N, &omega0);
      bool ok = bf <= dink.gamma2 + slack && rnd.score <= dink.gamma2 + slack &&
                rnd.score >= 0.98 * bf;
      all_ok = all_ok && ok;
      worst_gap = std::max(worst_gap, (bf - rnd.score) / std::max(bf, 1e-30));
    }
    results.push_back({"N=1 Dinkelbach sandwich (5 instances)", all_ok,
                       fmt("largest randomization gap %.3g (2%% allowed); slack %.3g",
                           worst_gap, 1e-5)});
  }

  // N = 2 sandwich at a coarser grid
  {
    bool all_ok = true;
    for (int inst = 0; inst < 2; ++inst) {
      FractionalSystem sys;
      sys.N = 2;
      sys.sigma2 = 1.0;
      for (int k = 0; k < 2; ++k) {
        CVec a = rng.cnormal_vector(3);
        sys.A.push_back(CMat(2.0 * (a * a.adjoint())));
        CMat Bm = rng.cnormal_matrix(3, 3);
        sys.B.push_back(CMat(0.3 * (Bm * Bm.adjoint())));
      }
      CVec omega0 = CVec::Ones(2);
      auto dink = dinkelbach_maximin(sys, omega0, 1e-6);
      if (dink.status != SolveStatus::optimal) {
        all_ok = false;
        continue;
      }
      double bf = brute_force_comm_sweep(sys, 1.0);
      Rng draw(Rng::mix(seed, 700 + inst));
      auto rnd = randomize_phase(
          dink.W, 10000, draw,
          [&](const CVec& w) { return fractional_worst_ratio(sys, w); }, sys.N, &omega0);
      double slack = 1e-5 * (1.0 + dink.gamma2);
      all_ok = all_ok && bf <= dink.gamma2 + slack && rnd.score <= dink.gamma2 + slack;
    }
    results.push_back({"N=2 Dinkelbach sandwich (2 instances)", all_ok, ""});
  }

  // radar-RIS SDP: closed form and brute-force bound
  {
    const int N = 8;
    RadarRisSystem sys;
    sys.N = N;
    CVec q = unit_modulus(rng, N + 1);
    sys.Q = {CMat(q * q.adjoint())};
    auto sol = solve_radar_ris(sys);
    double expect = double(N + 1) * (N + 1);
    bool ok = sol.status == SolveStatus::optimal &&
              std::abs(sol.objective - expect) <= 1e-4 * expect;
    results.push_back({"radar-RIS rank-1 closed form", ok,
                       fmt("objective %.6f vs (N+1)^2 = %.0f", sol.objective, expect)});

    bool bound_ok = true;
    for (int inst = 0; inst < 3; ++inst) {
      RadarRisSystem s1;
      s1.N = 1;
      for (int m = 0; m < 2; ++m) {
        CMat Bm = rng.cnormal_matrix(2, 2);
        s1.Q.push_back(CMat(Bm * Bm.adjoint()));
      }
      auto r = solve_radar_ris(s1);
      if (r.status != SolveStatus::optimal) {
        bound_ok = false;
        continue;
      }
      double bf = brute_force_radar_sweep(s1, 0.1);
      bound_ok = bound_ok && bf <= r.objective * (1 + 1e-6) + 1e-12;
    }
    results.push_back({"radar-RIS relaxation upper-bounds exhaustive search (N=1, T=2)",
                       bound_ok, ""});
  }

  return results;
}

}  // namespace risbeam::verify
