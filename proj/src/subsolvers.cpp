#include "risbeam/subsolvers.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace risbeam {

namespace {

using conic::AffineForm;
using conic::ConicProblem;
using conic::ConicSolution;
using conic::HermExpr;
using conic::Relation;
using conic::ScalarRef;
using conic::VarRef;

SolveStatus map_status(ConicSolution::Status s) {
  switch (s) {
    case ConicSolution::Status::optimal: return SolveStatus::optimal;
    case ConicSolution::Status::infeasible: return SolveStatus::infeasible;
    default: return SolveStatus::numerical_failure;
  }
}

struct SqpCore {
  ConicProblem problem;
  VarRef R;
  std::vector<VarRef> C;
};

// Shared constraint set of both beamformer subproblems: R psd, C_k psd,
// R - sum C_k psd, diag(R) = P_t/M and the rewritten SINR inequalities with
// noise normalized to one.
SqpCore build_core(const std::vector<CVec>& h_scaled, double gamma,
                   const ScenarioConfig& config) {
  SqpCore core;
  const int M = config.M;
  const int K = static_cast<int>(h_scaled.size());
  core.R = core.problem.add_psd_variable("R", M);
  for (int k = 0; k < K; ++k)
    core.C.push_back(core.problem.add_psd_variable("C" + std::to_string(k), M));

  HermExpr residual = HermExpr::of(core.R);
  for (int k = 0; k < K; ++k) residual.add(core.C[k], -1.0);
  core.problem.require_psd(residual);

  for (int i = 0; i < M; ++i) {
    CMat Eii = CMat::Zero(M, M);
    Eii(i, i) = 1;
    AffineForm row;
    row.add_trace(core.R, Eii).add_constant(-config.P_t / M);
    core.problem.add_constraint(std::move(row), Relation::eq);
  }

  for (int k = 0; k < K; ++k) {
    CMat Hk = h_scaled[k] * h_scaled[k].adjoint();
    AffineForm row;
    row.add_trace(core.C[k], (1.0 + 1.0 / gamma) * Hk);
    row.add_trace(core.R, -Hk);
    row.add_constant(-1.0);
    core.problem.add_constraint(std::move(row), Relation::ge);
  }
  return core;
}

BeamformerSolution extract_core(const ConicSolution& sol, const SqpCore& core) {
  BeamformerSolution out;
  out.status = map_status(sol.status);
  if (out.status != SolveStatus::optimal) {
    out.cause = sol.message.empty() ? "solver reported non-optimal status" : sol.message;
    return out;
  }
  out.R = sol.value(core.R);
  for (const auto& c : core.C) out.C_tilde.push_back(sol.value(c));
  return out;
}

}  // namespace

BeamformerSolution solve_beamformer_p1(const ChannelSet& ch, const CVec& omega_c,
                                       double gamma, const ScenarioConfig& config,
                                       bool include_ris_beam, double tol) {
  const int M = config.M;
  const int K = ch.K();
  if (!(gamma > 0)) throw std::invalid_argument("gamma must be positive");

  std::vector<CVec> h(K);
  double sigma = std::sqrt(config.sigma2);
  for (int k = 0; k < K; ++k) {
    h[k] = effective_user_channel(ch, omega_c, k) / sigma;
    if (h[k].norm() == 0.0) {
      BeamformerSolution out;
      out.status = SolveStatus::infeasible;
      out.cause = "user " + std::to_string(k) + " unreachable: zero effective channel";
      return out;
    }
  }

  SqpCore core = build_core(h, gamma, config);
  ScalarRef tau = core.problem.add_scalar("tau");

  std::vector<AffineForm> residuals;
  const int L = static_cast<int>(config.grid_deg.size());
  bool tau_used = false;
  if (config.w_b > 0) {
    double wl = std::sqrt(config.w_b / L);
    for (double th : config.grid_deg) {
      CVec a = ula_response(th, M);
      AffineForm r;
      r.add_trace(core.R, wl * (a * a.adjoint()));
      double d = desired_pattern(config, th, include_ris_beam);
      if (d != 0.0) {
        r.add_scalar(tau, -wl * d);
        tau_used = true;
      }
      residuals.push_back(std::move(r));
    }
  }
  if (!tau_used) {
    // tau plays no role without a mismatch term; pin it to keep the
    // program well posed
    AffineForm pin;
    pin.add_scalar(tau, 1.0);
    core.problem.add_constraint(std::move(pin), Relation::eq);
  }
  const int T = ch.T();
  if (config.w_c > 0 && T >= 2) {
    double wc = std::sqrt(2.0 * config.w_c / (static_cast<double>(T) * T - T));
    for (int i = 0; i < T - 1; ++i)
      for (int j = i + 1; j < T; ++j) {
        CVec ai = ula_response(config.target_angles_deg[i], M);
        CVec aj = ula_response(config.target_angles_deg[j], M);
        CMat X = aj * ai.adjoint();
        CMat K_re = 0.5 * (X + X.adjoint());
        CMat K_im = cxd(0, -0.5) * (X - X.adjoint());
        AffineForm re;
        re.add_trace(core.R, wc * K_re);
        residuals.push_back(std::move(re));
        AffineForm im;
        im.add_trace(core.R, wc * K_im);
        residuals.push_back(std::move(im));
      }
  }
  core.problem.set_least_squares_objective(std::move(residuals));

  ConicSolution sol = core.problem.solve(tol);
  BeamformerSolution out = extract_core(sol, core);
  if (out.status != SolveStatus::optimal) return out;
  out.tau = sol.value(tau);
  out.objective = sol.objective;  // w_b L1 + w_c L2 by construction of the weights
  return out;
}

BeamformerSolution solve_beamformer_p2(const ChannelSet& ch, const CVec& omega_c,
                                       const CVec& omega_r, double gamma,
                                       const ScenarioConfig& config, double tol) {
  const int K = ch.K();
  if (!(gamma > 0)) throw std::invalid_argument("gamma must be positive");

  std::vector<CVec> h(K);
  double sigma = std::sqrt(config.sigma2);
  for (int k = 0; k < K; ++k) {
    h[k] = effective_user_channel(ch, omega_c, k) / sigma;
    if (h[k].norm() == 0.0) {
      BeamformerSolution out;
      out.status = SolveStatus::infeasible;
      out.cause = "user " + std::to_string(k) + " unreachable: zero effective channel";
      return out;
    }
  }

  const int T = ch.T();
  std::vector<CMat> D(T);
  double scale = 0;
  for (int m = 0; m < T; ++m) {
    CVec g = effective_target_channel(ch, omega_r, m);
    D[m] = g * g.adjoint();
    scale = std::max(scale, D[m].norm());
  }
  if (scale <= 0) scale = 1.0;

  SqpCore core = build_core(h, gamma, config);
  std::vector<AffineForm> terms;
  for (int m = 0; m < T; ++m) {
    AffineForm f;
    f.add_trace(core.R, D[m] / scale);
    terms.push_back(std::move(f));
  }
  core.problem.add_maximin_epigraph(terms);

  ConicSolution sol = core.problem.solve(tol);
  BeamformerSolution out = extract_core(sol, core);
  if (out.status != SolveStatus::optimal) return out;
  out.objective = sol.objective * scale;  // worst-case illumination bound
  return out;
}

CVec extract_rank1_comm(const CMat& C_tilde, const CVec& h) {
  cxd quad = h.adjoint() * C_tilde * h;
  double q = quad.real();
  if (!(q > 0)) throw std::domain_error("degenerate user: h^H C h is not positive");
  return (C_tilde * h) / std::sqrt(q);
}

CMat factor_sensing(const CMat& R_hat, const std::vector<CMat>& C_hat) {
  CMat residual = R_hat;
  for (const auto& c : C_hat) residual -= c;
  residual = hermitian_part(residual);
  const int M = static_cast<int>(residual.rows());
  Eigen::SelfAdjointEigenSolver<CMat> es(residual);
  double tr = std::abs(std::real(R_hat.trace()));
  if (es.eigenvalues().minCoeff() < -1e-7 * std::max(tr, 1e-30))
    throw std::runtime_error("sensing residual indefinite beyond tolerance");
  // descending eigenvalues: zero columns land at the end
  CMat S(M, M);
  for (int i = 0; i < M; ++i) {
    double lam = std::max(es.eigenvalues()(M - 1 - i), 0.0);
    S.col(i) = es.eigenvectors().col(M - 1 - i) * std::sqrt(lam);
  }
  return S;
}

FractionalSystem build_fractional_system(const ChannelSet& ch, const CMat& C,
                                         const CMat& S, double sigma2) {
  FractionalSystem sys;
  const int N = ch.N();
  const int K = ch.K();
  const int M = ch.M();
  sys.N = N;
  sys.sigma2 = sigma2;
  sys.A.resize(K);
  sys.B.assign(K, CMat::Zero(N + 1, N + 1));

  auto lifted = [&](int k, const CVec& beam) {
    CVec v(N + 1);
    v.head(N) = ch.h_ru[k].conjugate().cwiseProduct(ch.H_br * beam);
    v(N) = cxd(ch.h_bu[k].adjoint() * beam);
    return v;
  };

  for (int k = 0; k < K; ++k) {
    CVec akk = lifted(k, C.col(k));
    sys.A[k] = akk * akk.adjoint();
    for (int j = 0; j < static_cast<int>(C.cols()); ++j) {
      if (j == k) continue;
      CVec akj = lifted(k, C.col(j));
      sys.B[k] += akj * akj.adjoint();
    }
    for (int m = 0; m < M; ++m) {
      CVec bkm = lifted(k, S.col(m));
      sys.B[k] += bkm * bkm.adjoint();
    }
  }
  return sys;
}

CVec homogenize_comm(const CVec& omega_c) {
  CVec w(omega_c.size() + 1);
  w.head(omega_c.size()) = omega_c.conjugate();
  w(omega_c.size()) = 1.0;
  return w;
}

CVec homogenize_radar(const CVec& omega_r) {
  CVec u(omega_r.size() + 1);
  u(0) = 1.0;
  u.tail(omega_r.size()) = omega_r.conjugate();
  return u;
}

double fractional_ratio(const FractionalSystem& sys, const CVec& w, int k) {
  double num = std::real(cxd(w.adjoint() * sys.A[k] * w));
  double den = std::real(cxd(w.adjoint() * sys.B[k] * w)) + sys.sigma2;
  return num / den;
}

double fractional_worst_ratio(const FractionalSystem& sys, const CVec& w) {
  double worst = 0;
  for (int k = 0; k < sys.K(); ++k) {
    double r = fractional_ratio(sys, w, k);
    if (k == 0 || r < worst) worst = r;
  }
  return worst;
}

DinkelbachResult dinkelbach_maximin(const FractionalSystem& sys, const CVec& omega_init,
                                    double tol, int max_iter, double solver_tol) {
  DinkelbachResult out;
  const int n = sys.N + 1;
  const int K = sys.K();
  if (K == 0) throw std::invalid_argument("fractional system has no users");

  // normalize so the noise term is 1
  double inv_s2 = 1.0 / sys.sigma2;
  std::vector<CMat> A(K), B(K);
  for (int k = 0; k < K; ++k) {
    A[k] = sys.A[k] * inv_s2;
    B[k] = sys.B[k] * inv_s2;
  }

  CVec w0 = homogenize_comm(omega_init);
  CMat W = (w0 * w0.adjoint() + 1e-6 * CMat::Identity(n, n)) / (1.0 + 1e-6);

  auto worst_ratio = [&](const CMat& Wm) {
    double worst = 0;
    for (int k = 0; k < K; ++k) {
      double num = std::real((A[k] * Wm).trace());
      double den = std::real((B[k] * Wm).trace()) + 1.0;
      double r = num / den;
      if (k == 0 || r < worst) worst = r;
    }
    return worst;
  };

  double lambda = worst_ratio(W);
  out.lambda_trace.push_back(lambda);

  for (int iter = 0; iter < max_iter; ++iter) {
    // scale the epigraph terms so the inner optimum is O(1)
    double term_scale = lambda;
    std::vector<CMat> coef(K);
    for (int k = 0; k < K; ++k) {
      coef[k] = A[k] - lambda * B[k];
      term_scale = std::max(term_scale, coef[k].norm());
    }
    if (term_scale <= 0) term_scale = 1.0;

    ConicProblem p;
    VarRef Wv = p.add_psd_variable("W", n);
    for (int i = 0; i < n; ++i) {
      CMat Eii = CMat::Zero(n, n);
      Eii(i, i) = 1;
      AffineForm row;
      row.add_trace(Wv, Eii).add_constant(-1.0);
      p.add_constraint(std::move(row), Relation::eq);
    }
    std::vector<AffineForm> terms;
    for (int k = 0; k < K; ++k) {
      AffineForm f(-lambda / term_scale);
      f.add_trace(Wv, coef[k] / term_scale);
      terms.push_back(std::move(f));
    }
    p.add_maximin_epigraph(terms);
    ConicSolution sol = p.solve(solver_tol);
    if (!sol.ok()) {
      out.status = SolveStatus::numerical_failure;
      out.iterations = iter;
      return out;
    }
    CMat W_new = sol.value(Wv);
    out.inner_value_trace.push_back(sol.objective * term_scale);
    ++out.iterations;

    double lambda_new = worst_ratio(W_new);
    if (lambda_new < lambda) {
      // solver noise would regress the ratio; keep the incumbent iterate
      out.stop_reason = DinkelbachResult::StopReason::regression_guard;
      out.final_step_norm = 0;
      break;
    }
    double dW = (W_new - W).norm();
    W = W_new;
    lambda = lambda_new;
    out.lambda_trace.push_back(lambda);
    out.final_step_norm = dW;
    if (std::abs(out.inner_value_trace.back()) <= 1e-5) {
      out.stop_reason = DinkelbachResult::StopReason::inner_value;
      break;
    }
    if (dW <= tol) {
      out.stop_reason = DinkelbachResult::StopReason::small_step;
      break;
    }
  }

  out.W = W;
  out.gamma2 = lambda;
  out.status = SolveStatus::optimal;
  return out;
}

RandomizeResult randomize_phase(const CMat& V, int n_rand, Rng& rng,
                                const std::function<double(const CVec&)>& score,
                                int homog_index, const CVec* incumbent) {
  const int n = static_cast<int>(V.rows());
  if (n_rand < 1) throw std::invalid_argument("N_rand must be >= 1");

  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(V));
  CMat F = es.eigenvectors();
  double lam_max = std::max(es.eigenvalues().maxCoeff(), 0.0);
  for (int i = 0; i < n; ++i) {
    double lam = es.eigenvalues()(i);
    if (lam < 1e-12 * lam_max) lam = 0.0;  // denoise near-rank-deficient factors
    F.col(i) *= std::sqrt(lam);
  }

  auto extract = [&](const CVec& w) {
    CVec omega(n - 1);
    int j = 0;
    for (int i = 0; i < n; ++i)
      if (i != homog_index) omega(j++) = std::conj(w(i));
    return omega;
  };

  RandomizeResult best;
  bool have_best = false;
  auto consider = [&](const CVec& w, int index) {
    double s = score(w);
    if (!have_best || s > best.score) {
      have_best = true;
      best.score = s;
      best.omega = extract(w);
      best.best_index = index;
    }
  };

  if (incumbent != nullptr) {
    CVec w = homog_index == 0 ? homogenize_radar(*incumbent) : homogenize_comm(*incumbent);
    consider(w, -1);
  }

  for (int i = 0; i < n_rand; ++i) {
    CVec g = F * rng.cnormal_vector(n);
    cxd pivot = g(homog_index);
    if (std::abs(pivot) > 0) g *= std::conj(pivot) / std::abs(pivot);
    CVec w(n);
    for (int j = 0; j < n; ++j) {
      double mag = std::abs(g(j));
      w(j) = mag > 0 ? g(j) / mag : cxd(1, 0);
    }
    w(homog_index) = 1.0;
    consider(w, i);
  }
  return best;
}

RadarRisSystem build_radar_system(const ChannelSet& ch, const CMat& R) {
  RadarRisSystem sys;
  const int N = ch.N();
  const int M = ch.M();
  sys.N = N;
  for (int m = 0; m < ch.T(); ++m) {
    CMat E(N + 1, M);
    E.row(0) = ch.g_bt[m].adjoint();
    E.bottomRows(N) = ch.g_rt[m].conjugate().asDiagonal() * ch.G_br;
    sys.Q.push_back(hermitian_part(E * R * E.adjoint()));
  }
  return sys;
}

double radar_ris_score(const RadarRisSystem& sys, const CVec& u) {
  double worst = 0;
  for (int m = 0; m < sys.T(); ++m) {
    double v = std::real(cxd(u.adjoint() * sys.Q[m] * u));
    if (m == 0 || v < worst) worst = v;
  }
  return worst;
}

RadarRisSdpResult solve_radar_ris(const RadarRisSystem& sys, double tol) {
  RadarRisSdpResult out;
  const int n = sys.N + 1;
  double scale = 0;
  for (const auto& q : sys.Q) scale = std::max(scale, q.norm());
  if (scale <= 0) scale = 1.0;

  ConicProblem p;
  VarRef U = p.add_psd_variable("U", n);
  for (int i = 0; i < n; ++i) {
    CMat Eii = CMat::Zero(n, n);
    Eii(i, i) = 1;
    AffineForm row;
    row.add_trace(U, Eii).add_constant(-1.0);
    p.add_constraint(std::move(row), Relation::eq);
  }
  std::vector<AffineForm> terms;
  for (const auto& q : sys.Q) {
    AffineForm f;
    f.add_trace(U, q / scale);
    terms.push_back(std::move(f));
  }
  p.add_maximin_epigraph(terms);
  ConicSolution sol = p.solve(tol);
  out.status = map_status(sol.status);
  if (out.status != SolveStatus::optimal) return out;
  out.U = sol.value(U);
  out.objective = sol.objective * scale;
  return out;
}

void write_dinkelbach_trace_csv(const std::string& path, const DinkelbachResult& result) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << "step,lambda,inner_value\n";
  char buf[96];
  for (std::size_t i = 0; i < result.lambda_trace.size(); ++i) {
    double inner = i < result.inner_value_trace.size()
                       ? result.inner_value_trace[i]
                       : std::numeric_limits<double>::quiet_NaN();
    if (i < result.inner_value_trace.size()) {
      std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", i, result.lambda_trace[i], inner);
    } else {
      std::snprintf(buf, sizeof(buf), "%zu,%.17g,\n", i, result.lambda_trace[i]);
    }
    f << buf;
  }
}

}  // namespace risbeam
