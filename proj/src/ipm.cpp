#include "risbeam/ipm.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace risbeam::ipm {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

int ConeLayout::cone_dim() const {
  int d = nonneg;
  for (int n : herm) d += n * n;
  for (int q : soc) d += q;
  return d;
}

double ConeLayout::degree() const {
  double d = nonneg + static_cast<double>(soc.size());
  for (int n : herm) d += n;
  return d;
}

RVec svec_c(const CMat& X) {
  const int n = static_cast<int>(X.rows());
  RVec v(n * n);
  for (int i = 0; i < n; ++i) v(i) = X(i, i).real();
  int idx = n;
  const double r2 = std::sqrt(2.0);
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < j; ++i) {
      v(idx++) = r2 * X(i, j).real();
      v(idx++) = r2 * X(i, j).imag();
    }
  return v;
}

CMat smat_c(const RVec& v, int n) {
  CMat X(n, n);
  for (int i = 0; i < n; ++i) X(i, i) = v(i);
  int idx = n;
  const double s2 = 1.0 / std::sqrt(2.0);
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < j; ++i) {
      cxd e(v(idx) * s2, v(idx + 1) * s2);
      idx += 2;
      X(i, j) = e;
      X(j, i) = std::conj(e);
    }
  return X;
}

namespace detail {

namespace {

// Factor a Hermitian positive definite matrix as L L^H; falls back to an
// eigenvalue square root if the iterate has drifted to the cone boundary.
CMat pd_factor(const CMat& X) {
  Eigen::LLT<CMat> llt(X);
  if (llt.info() == Eigen::Success) return CMat(llt.matrixL());
  Eigen::SelfAdjointEigenSolver<CMat> es(X);
  RVec d = es.eigenvalues();
  double floor = std::max(d.maxCoeff(), 1.0) * 1e-15;
  for (int i = 0; i < d.size(); ++i) d(i) = std::sqrt(std::max(d(i), floor));
  return es.eigenvectors() * d.asDiagonal();
}

inline RVec soc_J(const RVec& v) {
  RVec r = -v;
  r(0) = v(0);
  return r;
}

struct BlockWalker {
  const ConeLayout& lay;
  int pos = 0;
  explicit BlockWalker(const ConeLayout& l) : lay(l) {}
};

}  // namespace

bool Scaling::compute(const ConeLayout& lay, const RVec& s, const RVec& z) {
  layout = &lay;
  herm_R.clear();
  herm_Rinv.clear();
  herm_G.clear();
  herm_lambda.clear();
  soc_beta.clear();
  soc_wbar.clear();
  lambda.resize(lay.cone_dim());

  int pos = 0;
  for (int n : lay.herm) {
    CMat S = smat_c(s.segment(pos, n * n), n);
    CMat Z = smat_c(z.segment(pos, n * n), n);
    CMat Ls = pd_factor(S);
    CMat Lz = pd_factor(Z);
    CMat prod = Lz.adjoint() * Ls;
    RVec sig;
    CMat U, V;
    if (n > 16) {
      Eigen::BDCSVD<CMat> svd(prod, Eigen::ComputeFullU | Eigen::ComputeFullV);
      sig = svd.singularValues();
      U = svd.matrixU();
      V = svd.matrixV();
    } else {
      Eigen::JacobiSVD<CMat> svd(prod, Eigen::ComputeFullU | Eigen::ComputeFullV);
      sig = svd.singularValues();
      U = svd.matrixU();
      V = svd.matrixV();
    }
    if (sig.minCoeff() <= 0) return false;
    RVec sig_isqrt(n);
    for (int i = 0; i < n; ++i) sig_isqrt(i) = 1.0 / std::sqrt(sig(i));
    CMat R = Ls * V * sig_isqrt.asDiagonal();
    CMat Rinv = sig_isqrt.asDiagonal() * U.adjoint() * Lz.adjoint();
    herm_R.push_back(R);
    herm_Rinv.push_back(Rinv);
    herm_G.push_back(R * R.adjoint());
    herm_lambda.push_back(sig);
    RVec lam_block = RVec::Zero(n * n);
    lam_block.head(n) = sig;
    lambda.segment(pos, n * n) = lam_block;
    pos += n * n;
  }
  if (lay.nonneg > 0) {
    RVec sv = s.segment(pos, lay.nonneg);
    RVec zv = z.segment(pos, lay.nonneg);
    if (sv.minCoeff() <= 0 || zv.minCoeff() <= 0) return false;
    orth_w = (sv.array() / zv.array()).sqrt();
    lambda.segment(pos, lay.nonneg) = (sv.array() * zv.array()).sqrt();
    pos += lay.nonneg;
  } else {
    orth_w.resize(0);
  }
  for (int q : lay.soc) {
    RVec sv = s.segment(pos, q);
    RVec zv = z.segment(pos, q);
    double a2 = sv(0) * sv(0) - sv.tail(q - 1).squaredNorm();
    double b2 = zv(0) * zv(0) - zv.tail(q - 1).squaredNorm();
    if (a2 <= 0 || b2 <= 0 || sv(0) <= 0 || zv(0) <= 0) return false;
    double a = std::sqrt(a2), bb = std::sqrt(b2);
    RVec sbar = sv / a, zbar = zv / bb;
    double gamma = std::sqrt(0.5 * (1.0 + sbar.dot(zbar)));
    RVec wbar = (sbar + soc_J(zbar)) / (2.0 * gamma);
    // scaling matrix is built from the Jordan square root of wbar
    RVec v(q);
    v(0) = std::sqrt(0.5 * (wbar(0) + 1.0));
    v.tail(q - 1) = wbar.tail(q - 1) / (2.0 * v(0));
    double beta = std::sqrt(a / bb);
    soc_beta.push_back(beta);
    soc_wbar.push_back(v);
    // lambda = W z for this block
    RVec lam = beta * (2.0 * v * v.dot(zv) - soc_J(zv));
    lambda.segment(pos, q) = lam;
    pos += q;
  }
  return true;
}

// W applied to one Hermitian block in svec coordinates. Rows of the
// constraint matrix are mostly sparse (diagonal and coupling rows), where
// the congruence reduces to a few rank-one updates.
RVec Scaling::apply_W_herm_seg(int hb, const Eigen::Ref<const RVec>& seg) const {
  const CMat& R = herm_R[hb];
  const int n = static_cast<int>(R.rows());
  int nnz = 0;
  for (int c = 0; c < seg.size() && nnz <= n; ++c) nnz += (seg(c) != 0.0);
  if (nnz == 0) return RVec::Zero(n * n);
  if (nnz > n) return svec_c(R.adjoint() * smat_c(seg, n) * R);
  CMat P = CMat::Zero(n, n);
  const double inv_r2 = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < n; ++i)
    if (seg(i) != 0.0) P.noalias() += seg(i) * (R.row(i).adjoint() * R.row(i));
  int idx = n;
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < j; ++i) {
      double a = seg(idx), b = seg(idx + 1);
      idx += 2;
      if (a == 0.0 && b == 0.0) continue;
      cxd y(a * inv_r2, b * inv_r2);
      P.noalias() += y * (R.row(i).adjoint() * R.row(j));
      P.noalias() += std::conj(y) * (R.row(j).adjoint() * R.row(i));
    }
  return svec_c(P);
}

RVec Scaling::apply_W(const RVec& v) const {
  const ConeLayout& lay = *layout;
  RVec out(v.size());
  int pos = 0, hb = 0, sb = 0;
  for (int n : lay.herm) {
    out.segment(pos, n * n) = apply_W_herm_seg(hb, v.segment(pos, n * n));
    ++hb;
    pos += n * n;
  }
  if (lay.nonneg > 0) {
    out.segment(pos, lay.nonneg) =
        orth_w.array() * v.segment(pos, lay.nonneg).array();
    pos += lay.nonneg;
  }
  for (int q : lay.soc) {
    RVec vv = v.segment(pos, q);
    out.segment(pos, q) =
        soc_beta[sb] * (2.0 * soc_wbar[sb] * soc_wbar[sb].dot(vv) - soc_J(vv));
    ++sb;
    pos += q;
  }
  return out;
}

RVec Scaling::apply_Wt(const RVec& v) const {
  const ConeLayout& lay = *layout;
  RVec out(v.size());
  int pos = 0, hb = 0;
  for (int n : lay.herm) {
    CMat Y = smat_c(v.segment(pos, n * n), n);
    out.segment(pos, n * n) = svec_c(herm_R[hb] * Y * herm_R[hb].adjoint());
    ++hb;
    pos += n * n;
  }
  // orthant and SOC scalings are symmetric
  if (lay.nonneg > 0) {
    out.segment(pos, lay.nonneg) =
        orth_w.array() * v.segment(pos, lay.nonneg).array();
    pos += lay.nonneg;
  }
  int sb = 0;
  for (int q : lay.soc) {
    RVec vv = v.segment(pos, q);
    out.segment(pos, q) =
        soc_beta[sb] * (2.0 * soc_wbar[sb] * soc_wbar[sb].dot(vv) - soc_J(vv));
    ++sb;
    pos += q;
  }
  return out;
}

RVec Scaling::apply_Winv_t(const RVec& v) const {
  const ConeLayout& lay = *layout;
  RVec out(v.size());
  int pos = 0, hb = 0, sb = 0;
  for (int n : lay.herm) {
    CMat Y = smat_c(v.segment(pos, n * n), n);
    out.segment(pos, n * n) = svec_c(herm_Rinv[hb] * Y * herm_Rinv[hb].adjoint());
    ++hb;
    pos += n * n;
  }
  if (lay.nonneg > 0) {
    out.segment(pos, lay.nonneg) =
        v.segment(pos, lay.nonneg).array() / orth_w.array();
    pos += lay.nonneg;
  }
  for (int q : lay.soc) {
    RVec vv = v.segment(pos, q);
    RVec jw = soc_J(soc_wbar[sb]);
    out.segment(pos, q) = (2.0 * jw * jw.dot(vv) - soc_J(vv)) / soc_beta[sb];
    ++sb;
    pos += q;
  }
  return out;
}

RVec Scaling::apply_H(const RVec& v) const { return apply_Wt(apply_W(v)); }

RVec jordan_product(const ConeLayout& lay, const RVec& u, const RVec& v) {
  RVec out(u.size());
  int pos = 0;
  for (int n : lay.herm) {
    CMat U = smat_c(u.segment(pos, n * n), n);
    CMat V = smat_c(v.segment(pos, n * n), n);
    out.segment(pos, n * n) = svec_c(0.5 * (U * V + V * U));
    pos += n * n;
  }
  if (lay.nonneg > 0) {
    out.segment(pos, lay.nonneg) = u.segment(pos, lay.nonneg).array() *
                                   v.segment(pos, lay.nonneg).array();
    pos += lay.nonneg;
  }
  for (int q : lay.soc) {
    RVec uu = u.segment(pos, q);
    RVec vv = v.segment(pos, q);
    RVec r(q);
    r(0) = uu.dot(vv);
    r.tail(q - 1) = uu(0) * vv.tail(q - 1) + vv(0) * uu.tail(q - 1);
    out.segment(pos, q) = r;
    pos += q;
  }
  return out;
}

RVec jordan_div_lambda(const ConeLayout& lay, const RVec& lambda, const RVec& v) {
  RVec out(v.size());
  int pos = 0;
  for (int n : lay.herm) {
    // lambda block is diagonal, so (Lam U + U Lam)/2 = V inverts entrywise
    RVec lam = lambda.segment(pos, n);
    CMat V = smat_c(v.segment(pos, n * n), n);
    CMat U(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) U(i, j) = V(i, j) * (2.0 / (lam(i) + lam(j)));
    out.segment(pos, n * n) = svec_c(U);
    pos += n * n;
  }
  if (lay.nonneg > 0) {
    out.segment(pos, lay.nonneg) = v.segment(pos, lay.nonneg).array() /
                                   lambda.segment(pos, lay.nonneg).array();
    pos += lay.nonneg;
  }
  for (int q : lay.soc) {
    RVec lam = lambda.segment(pos, q);
    RVec vv = v.segment(pos, q);
    double det = lam(0) * lam(0) - lam.tail(q - 1).squaredNorm();
    RVec r(q);
    r(0) = (lam(0) * vv(0) - lam.tail(q - 1).dot(vv.tail(q - 1))) / det;
    r.tail(q - 1) = (vv.tail(q - 1) - r(0) * lam.tail(q - 1)) / lam(0);
    out.segment(pos, q) = r;
    pos += q;
  }
  return out;
}

RVec cone_identity(const ConeLayout& lay) {
  RVec e = RVec::Zero(lay.cone_dim());
  int pos = 0;
  for (int n : lay.herm) {
    e.segment(pos, n).setOnes();
    pos += n * n;
  }
  if (lay.nonneg > 0) {
    e.segment(pos, lay.nonneg).setOnes();
    pos += lay.nonneg;
  }
  for (int q : lay.soc) {
    e(pos) = 1.0;
    pos += q;
  }
  return e;
}

namespace {

double quad_first_positive_root(double a, double b, double c) {
  // smallest alpha > 0 with a*alpha^2 + b*alpha + c = 0, given c >= 0
  if (std::abs(a) < 1e-300) {
    if (b >= 0) return kInf;
    return -c / b;
  }
  double disc = b * b - 4.0 * a * c;
  if (disc < 0) return a > 0 ? kInf : 0.0;
  double sq = std::sqrt(disc);
  double q = (b >= 0) ? -0.5 * (b + sq) : -0.5 * (b - sq);
  double r1 = q / a;
  double r2 = (q != 0.0) ? c / q : kInf;
  double best = kInf;
  if (r1 > 0) best = std::min(best, r1);
  if (r2 > 0) best = std::min(best, r2);
  return best;
}

}  // namespace

double max_step(const ConeLayout& lay, const RVec& lambda, const RVec& d) {
  double alpha = kInf;
  int pos = 0;
  for (int n : lay.herm) {
    RVec lam = lambda.segment(pos, n);
    CMat D = smat_c(d.segment(pos, n * n), n);
    RVec isq = lam.array().sqrt().inverse();
    CMat Dn = isq.asDiagonal() * D * isq.asDiagonal();
    Eigen::SelfAdjointEigenSolver<CMat> es(Dn, Eigen::EigenvaluesOnly);
    double nu = es.eigenvalues().minCoeff();
    if (nu < 0) alpha = std::min(alpha, -1.0 / nu);
    pos += n * n;
  }
  for (int i = 0; i < lay.nonneg; ++i) {
    double dv = d(pos + i);
    if (dv < 0) alpha = std::min(alpha, -lambda(pos + i) / dv);
  }
  pos += lay.nonneg;
  for (int q : lay.soc) {
    RVec lam = lambda.segment(pos, q);
    RVec dv = d.segment(pos, q);
    double a = dv(0) * dv(0) - dv.tail(q - 1).squaredNorm();
    double b = 2.0 * (lam(0) * dv(0) - lam.tail(q - 1).dot(dv.tail(q - 1)));
    double c = lam(0) * lam(0) - lam.tail(q - 1).squaredNorm();
    alpha = std::min(alpha, quad_first_positive_root(a, b, c));
    if (dv(0) < 0) alpha = std::min(alpha, -lam(0) / dv(0));
    pos += q;
  }
  return alpha;
}

}  // namespace detail

namespace {

using detail::Scaling;

struct Kernel {
  // Factorization of the reduced KKT system for one scaling. Solves
  //   [0  A^T G^T; A 0 0; G 0 -H] (dx, dy, dz) = (qx, qy, qz)
  // with G = -[I 0] (cone coordinate selector), via the Schur complement
  // over (dy, dx_free).
  const RMat* A;
  const ConeLayout* lay;
  const Scaling* sc;
  int m, n, nc, nf;
  Eigen::PartialPivLU<RMat> lu;

  void factor(const RMat& A_, const ConeLayout& lay_, const Scaling& sc_) {
    A = &A_;
    lay = &lay_;
    sc = &sc_;
    m = static_cast<int>(A_.rows());
    n = static_cast<int>(A_.cols());
    nc = lay_.cone_dim();
    nf = lay_.free_vars;
    RMat B(m, nc);
    for (int i = 0; i < m; ++i)
      B.row(i) = sc_.apply_W(A_.row(i).head(nc).transpose()).transpose();
    RMat S_aug(m + nf, m + nf);
    S_aug.topLeftCorner(m, m).noalias() = B * B.transpose();
    if (nf > 0) {
      S_aug.topRightCorner(m, nf) = -A_.rightCols(nf);
      S_aug.bottomLeftCorner(nf, m) = -A_.rightCols(nf).transpose();
      S_aug.bottomRightCorner(nf, nf).setZero();
    }
    double reg = 1e-12 * std::max(1.0, S_aug.topLeftCorner(m, m).diagonal().maxCoeff());
    S_aug.diagonal().array() += reg;
    S_aug.bottomRightCorner(nf, nf).diagonal().array() -= 2.0 * reg;
    lu.compute(S_aug);
  }

  void solve_once(const RVec& qx, const RVec& qy, const RVec& qz, RVec& dx, RVec& dy,
                  RVec& dz) const {
    RVec hq = sc->apply_H(qx.head(nc)) - qz;  // H qx_K - qz
    RVec rhs(m + nf);
    rhs.head(m) = (*A).leftCols(nc) * hq - qy;
    if (nf > 0) rhs.tail(nf) = -qx.tail(nf);
    RVec sol = lu.solve(rhs);
    dy = sol.head(m);
    RVec aty = (*A).transpose() * dy;
    dx.resize(n);
    dx.head(nc) = sc->apply_H(qx.head(nc) - aty.head(nc)) - qz;
    if (nf > 0) dx.tail(nf) = sol.tail(nf);
    dz = aty.head(nc) - qx.head(nc);
  }

  void residual(const RVec& qx, const RVec& qy, const RVec& qz, const RVec& dx,
                const RVec& dy, const RVec& dz, RVec& rx, RVec& ry, RVec& rz) const {
    rx = qx - (*A).transpose() * dy;
    rx.head(nc) += dz;
    ry = qy - (*A) * dx;
    rz = qz + dx.head(nc) + sc->apply_H(dz);
  }

  void solve(const RVec& qx, const RVec& qy, const RVec& qz, RVec& dx, RVec& dy,
             RVec& dz) const {
    solve_once(qx, qy, qz, dx, dy, dz);
    // one round of iterative refinement
    RVec rx, ry, rz, ex, ey, ez;
    residual(qx, qy, qz, dx, dy, dz, rx, ry, rz);
    solve_once(rx, ry, rz, ex, ey, ez);
    dx += ex;
    dy += ey;
    dz += ez;
  }
};

struct Iterate {
  RVec x, y, z, s;
  double tau = 1, kappa = 1;
};

}  // namespace

Result solve(const RMat& A_in, const RVec& b_in, const RVec& c, const ConeLayout& lay,
             const Options& opt) {
  using detail::cone_identity;
  using detail::jordan_div_lambda;
  using detail::jordan_product;
  using detail::max_step;

  const int m = static_cast<int>(A_in.rows());
  const int n = lay.total_dim();
  const int nc = lay.cone_dim();
  if (A_in.cols() != n || b_in.size() != m || c.size() != n)
    throw std::invalid_argument("ipm: dimension mismatch");

  // row equilibration
  RMat A = A_in;
  RVec b = b_in;
  for (int i = 0; i < m; ++i) {
    double s = A.row(i).cwiseAbs().maxCoeff();
    if (s > 0) {
      A.row(i) /= s;
      b(i) /= s;
    }
  }

  Result res;
  RVec e = cone_identity(lay);
  Iterate it;
  it.x = RVec::Zero(n);
  it.x.head(nc) = e;
  it.s = e;
  it.z = e;
  it.y = RVec::Zero(m);

  const double nu = lay.degree() + 1.0;
  const double norm_b = std::max(1.0, b.norm());
  const double norm_c = std::max(1.0, c.norm());

  Scaling sc;
  Kernel kernel;
  double best_score = kInf;
  Result best;
  double mu0 = (it.s.dot(it.z) + it.tau * it.kappa) / nu;
  int stalled = 0;

  for (int iter = 0; iter <= opt.max_iter; ++iter) {
    // residuals of the homogeneous model
    RVec rx = -A.transpose() * it.y - c * it.tau;  // + scatter(z)
    rx.head(nc) += it.z;
    RVec ry = A * it.x - b * it.tau;
    RVec rz = it.s - it.x.head(nc);
    double rt = it.kappa + c.dot(it.x) + b.dot(it.y);

    // scaled convergence metrics
    double inv_tau = 1.0 / it.tau;
    double pres = std::sqrt(ry.squaredNorm() + rz.squaredNorm()) * inv_tau / norm_b;
    double dres = rx.norm() * inv_tau / norm_c;
    double gap = it.s.dot(it.z) * inv_tau * inv_tau;
    double pobj = c.dot(it.x) * inv_tau;
    double dobj = -b.dot(it.y) * inv_tau;
    double relgap = gap / std::max({1.0, std::abs(pobj), std::abs(dobj)});

    double score = std::max({pres, dres, relgap});
    if (score < 0.9 * best_score) {
      stalled = 0;
    } else {
      ++stalled;
    }
    if (score < best_score) {
      best_score = score;
      best.x = it.x * inv_tau;
      best.y = it.y * inv_tau;
      best.z = it.z * inv_tau;
      best.primal_obj = pobj;
      best.dual_obj = dobj;
      best.pres = pres;
      best.dres = dres;
      best.gap = gap;
      best.relgap = relgap;
      best.iterations = iter;
    }

    if (opt.verbose)
      std::printf("ipm %3d: pobj=% .6e pres=%.2e dres=%.2e gap=%.2e tau=%.2e kap=%.2e\n",
                  iter, pobj, pres, dres, relgap, it.tau, it.kappa);

    if (pres <= opt.target_tol && dres <= opt.target_tol &&
        (gap <= opt.target_tol || relgap <= opt.target_tol)) {
      best.status = Status::optimal;
      res = best;
      res.iterations = iter;
      return res;
    }

    // infeasibility certificates (Farkas points of the homogeneous model)
    double by = -b.dot(it.y);
    if (by > 0 && it.tau <= 1e-4 * it.kappa) {
      RVec yh = it.y / by;
      RVec zh = it.z / by;
      RVec cert = A.transpose() * yh;
      cert.head(nc) -= zh;
      double rel = cert.lpNorm<Eigen::Infinity>() /
                   (1.0 + yh.lpNorm<Eigen::Infinity>() + zh.lpNorm<Eigen::Infinity>());
      if (rel <= 1e-7) {
        res.status = Status::primal_infeasible;
        res.y = yh;
        res.z = zh;
        res.iterations = iter;
        res.message = "primal infeasibility certificate found";
        return res;
      }
    }
    double cx = -c.dot(it.x);
    if (cx > 0 && it.tau <= 1e-4 * it.kappa) {
      RVec xh = it.x / cx;
      RVec sh = it.s / cx;
      double viol = (A * xh).lpNorm<Eigen::Infinity>() +
                    (xh.head(nc) - sh).lpNorm<Eigen::Infinity>();
      double rel = viol / (1.0 + xh.lpNorm<Eigen::Infinity>());
      if (rel <= 1e-7) {
        res.status = Status::dual_infeasible;
        res.x = xh;
        res.iterations = iter;
        res.message = "dual infeasibility certificate found (primal unbounded)";
        return res;
      }
    }

    if (iter == opt.max_iter) break;
    if (it.tau < 1e-12 && it.kappa < 1e-12) break;
    double mu_now = (it.s.dot(it.z) + it.tau * it.kappa) / nu;
    if (mu_now <= 1e-16 * mu0) break;  // complementarity exhausted
    if (stalled >= 10) break;

    if (!sc.compute(lay, it.s, it.z)) break;
    kernel.factor(A, lay, sc);

    double mu = (it.s.dot(it.z) + it.tau * it.kappa) / nu;

    RVec dx1, dy1, dz1;
    kernel.solve(-c, b, RVec::Zero(nc), dx1, dy1, dz1);

    auto direction = [&](double sigma, const RVec& d_c, double d_tk, RVec& dx, RVec& dy,
                         RVec& dz, RVec& ds, double& dtau, double& dkap) {
      double om = 1.0 - sigma;
      RVec qx = om * rx;
      RVec qy = -om * ry;
      RVec qz = -om * rz - sc.apply_Wt(d_c);
      RVec dx0, dy0, dz0;
      kernel.solve(qx, qy, qz, dx0, dy0, dz0);
      double denom = (c.dot(dx1) + b.dot(dy1)) - it.kappa / it.tau;
      dtau = (-om * rt - d_tk / it.tau - (c.dot(dx0) + b.dot(dy0))) / denom;
      dx = dx0 + dtau * dx1;
      dy = dy0 + dtau * dy1;
      dz = dz0 + dtau * dz1;
      ds = sc.apply_Wt(d_c - sc.apply_W(dz));
      dkap = (d_tk - it.kappa * dtau) / it.tau;
    };

    // predictor
    RVec dx_a, dy_a, dz_a, ds_a;
    double dtau_a, dkap_a;
    RVec lam_sq = jordan_product(lay, sc.lambda, sc.lambda);
    direction(0.0, -sc.lambda, -it.tau * it.kappa, dx_a, dy_a, dz_a, ds_a, dtau_a, dkap_a);

    RVec dzt_a = sc.apply_W(dz_a);
    RVec dst_a = -sc.lambda - dzt_a;  // W^{-T} ds for the affine direction
    double alpha_a = std::min({max_step(lay, sc.lambda, dst_a),
                               max_step(lay, sc.lambda, dzt_a),
                               dtau_a < 0 ? -it.tau / dtau_a : kInf,
                               dkap_a < 0 ? -it.kappa / dkap_a : kInf});
    alpha_a = std::min(alpha_a, 1.0);
    double gap_now = it.s.dot(it.z) + it.tau * it.kappa;
    double gap_aff = (sc.lambda + alpha_a * dst_a).dot(sc.lambda + alpha_a * dzt_a) +
                     (it.tau + alpha_a * dtau_a) * (it.kappa + alpha_a * dkap_a);
    double sigma = std::pow(std::clamp(gap_aff / gap_now, 0.0, 1.0), 3.0);

    // corrector
    RVec corr = jordan_product(lay, dst_a, dzt_a);
    RVec target = sigma * mu * e - lam_sq - corr;
    RVec d_c = jordan_div_lambda(lay, sc.lambda, target);
    double d_tk = sigma * mu - it.tau * it.kappa - dtau_a * dkap_a;

    RVec dx, dy, dz, ds;
    double dtau, dkap;
    direction(sigma, d_c, d_tk, dx, dy, dz, ds, dtau, dkap);

    RVec dzt = sc.apply_W(dz);
    RVec dst = d_c - dzt;
    double alpha = std::min({max_step(lay, sc.lambda, dst), max_step(lay, sc.lambda, dzt),
                             dtau < 0 ? -it.tau / dtau : kInf,
                             dkap < 0 ? -it.kappa / dkap : kInf});
    alpha = std::min(0.99 * alpha, 1.0);
    if (!std::isfinite(alpha) || alpha <= 1e-10) break;

    it.x += alpha * dx;
    it.y += alpha * dy;
    it.z += alpha * dz;
    it.s += alpha * ds;
    it.tau += alpha * dtau;
    it.kappa += alpha * dkap;
  }

  res = best;
  if (best_score <= opt.tol) {
    res.status = Status::optimal;
    res.message = "converged to requested tolerance";
  } else {
    res.status = Status::numerical_failure;
    res.message = "no convergence within iteration limit";
  }
  return res;
}

}  // namespace risbeam::ipm
