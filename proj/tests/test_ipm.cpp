#include <doctest.h>

#include <cmath>

#include "risbeam/ipm.hpp"
#include "risbeam/rng.hpp"

using namespace risbeam;
using namespace risbeam::ipm;

namespace {

RVec random_interior(const ConeLayout& lay, Rng& rng) {
  RVec v(lay.cone_dim());
  int pos = 0;
  for (int n : lay.herm) {
    CMat B = rng.cnormal_matrix(n, n);
    CMat X = B * B.adjoint() + 0.5 * CMat::Identity(n, n);
    v.segment(pos, n * n) = svec_c(X);
    pos += n * n;
  }
  for (int i = 0; i < lay.nonneg; ++i) v(pos + i) = 0.1 + rng.uniform();
  pos += lay.nonneg;
  for (int q : lay.soc) {
    RVec u(q);
    for (int i = 1; i < q; ++i) u(i) = rng.normal();
    u(0) = u.tail(q - 1).norm() + 0.2 + rng.uniform();
    v.segment(pos, q) = u;
    pos += q;
  }
  return v;
}

}  // namespace

TEST_CASE("svec_c/smat_c round trip and isometry") {
  Rng rng(7);
  CMat B = rng.cnormal_matrix(4, 4);
  CMat X = B + B.adjoint();
  CMat Y0 = rng.cnormal_matrix(4, 4);
  CMat Y = Y0 + Y0.adjoint();
  RVec vx = svec_c(X), vy = svec_c(Y);
  CHECK((smat_c(vx, 4) - X).norm() == doctest::Approx(0).epsilon(1e-14));
  double tr = std::real((X * Y).trace());
  CHECK(vx.dot(vy) == doctest::Approx(tr).epsilon(1e-12));
}

TEST_CASE("NT scaling maps both sides to the same scaled point") {
  ConeLayout lay;
  lay.herm = {3, 2};
  lay.nonneg = 4;
  lay.soc = {3, 5};
  Rng rng(11);
  RVec s = random_interior(lay, rng);
  RVec z = random_interior(lay, rng);
  detail::Scaling sc;
  REQUIRE(sc.compute(lay, s, z));
  RVec lz = sc.apply_W(z);
  RVec ls = sc.apply_Winv_t(s);
  CHECK((lz - sc.lambda).norm() == doctest::Approx(0).epsilon(1e-9));
  CHECK((ls - sc.lambda).norm() == doctest::Approx(0).epsilon(1e-9));
  // H = W^T W agrees with two applications, and Wt is the adjoint of W
  RVec u = random_interior(lay, rng);
  RVec v = random_interior(lay, rng);
  CHECK(sc.apply_W(u).dot(sc.apply_W(v)) ==
        doctest::Approx(u.dot(sc.apply_H(v))).epsilon(1e-10));
  CHECK(sc.apply_W(u).dot(v) == doctest::Approx(u.dot(sc.apply_Wt(v))).epsilon(1e-10));
}

TEST_CASE("jordan division inverts the product at lambda") {
  ConeLayout lay;
  lay.herm = {3};
  lay.nonneg = 2;
  lay.soc = {4};
  Rng rng(13);
  RVec s = random_interior(lay, rng);
  RVec z = random_interior(lay, rng);
  detail::Scaling sc;
  REQUIRE(sc.compute(lay, s, z));
  RVec v = random_interior(lay, rng);
  RVec d = detail::jordan_div_lambda(lay, sc.lambda, v);
  RVec back = detail::jordan_product(lay, sc.lambda, d);
  CHECK((back - v).norm() == doctest::Approx(0).epsilon(1e-9));
}

TEST_CASE("LP: min -x with x <= 1") {
  // x >= 0, slack u >= 0, x + u = 1
  ConeLayout lay;
  lay.nonneg = 2;
  RMat A(1, 2);
  A << 1, 1;
  RVec b(1);
  b << 1;
  RVec c(2);
  c << -1, 0;
  auto r = solve(A, b, c, lay);
  REQUIRE(r.status == Status::optimal);
  CHECK(r.x(0) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(r.primal_obj == doctest::Approx(-1.0).epsilon(1e-7));
}

TEST_CASE("free variables: max t s.t. t <= 1, t <= 2") {
  // minimize -t, rows: t + u1 = 1, t + u2 = 2, u in R+^2, t free
  ConeLayout lay;
  lay.nonneg = 2;
  lay.free_vars = 1;
  RMat A(2, 3);
  A << 1, 0, 1, 0, 1, 1;
  RVec b(2);
  b << 1, 2;
  RVec c(3);
  c << 0, 0, -1;
  auto r = solve(A, b, c, lay);
  REQUIRE(r.status == Status::optimal);
  CHECK(r.x(2) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("SOC projection distance matches closed form") {
  // minimize t s.t. (t, x - p) in SOC, a0.x = b0 -> distance from p to plane
  Rng rng(17);
  const int d = 3;
  RVec p(d), a0(d);
  for (int i = 0; i < d; ++i) {
    p(i) = rng.normal();
    a0(i) = rng.normal();
  }
  double b0 = rng.normal();
  ConeLayout lay;
  lay.soc = {1 + d};
  lay.free_vars = d;
  // rows: r - x = -p  (d rows), a0.x = b0
  RMat A = RMat::Zero(d + 1, 1 + d + d);
  RVec b(d + 1);
  for (int i = 0; i < d; ++i) {
    A(i, 1 + i) = 1;
    A(i, 1 + d + i) = -1;
    b(i) = -p(i);
  }
  A.row(d).tail(d) = a0.transpose();
  b(d) = b0;
  RVec c = RVec::Zero(1 + d + d);
  c(0) = 1;
  auto r = solve(A, b, c, lay);
  REQUIRE(r.status == Status::optimal);
  double expect = std::abs(a0.dot(p) - b0) / a0.norm();
  CHECK(r.primal_obj == doctest::Approx(expect).epsilon(1e-6));
}

TEST_CASE("complex SDP with constructed optimum") {
  // min Tr(C X) s.t. diag(X) = 1, X psd; C = diag(y) + Z with Z psd and
  // Z v = 0 for a unit-modulus v, so the optimum is sum(y) at X = v v^H.
  Rng rng(23);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 3;
    CVec v(n);
    for (int i = 0; i < n; ++i) v(i) = std::polar(1.0, 2 * kPi * rng.uniform());
    CMat Q = rng.cnormal_matrix(n, n - 1);
    for (int c0 = 0; c0 < Q.cols(); ++c0) Q.col(c0) -= v * (v.dot(Q.col(c0))) / double(n);
    CMat Z = Q * Q.adjoint();
    RVec y(n);
    for (int i = 0; i < n; ++i) y(i) = rng.normal();
    CMat C = Z;
    for (int i = 0; i < n; ++i) C(i, i) += y(i);

    ConeLayout lay;
    lay.herm = {n};
    RMat A = RMat::Zero(n, n * n);
    for (int i = 0; i < n; ++i) A(i, i) = 1;
    RVec b = RVec::Ones(n);
    RVec cvec = svec_c(C);
    auto r = solve(A, b, cvec, lay);
    REQUIRE(r.status == Status::optimal);
    CHECK(r.primal_obj == doctest::Approx(y.sum()).epsilon(2e-6));
    CMat X = smat_c(r.x, n);
    Eigen::SelfAdjointEigenSolver<CMat> es(X);
    CHECK(es.eigenvalues().minCoeff() >= -1e-7);
  }
}

TEST_CASE("maximin over PSD block: rank-one objective closed form") {
  // max t s.t. Tr(q q^H U) - t - u0 = 0, diag(U) = 1; optimum (sum |q_i|)^2
  Rng rng(29);
  const int n = 4;
  CVec q = rng.cnormal_vector(n);
  CMat Qm = q * q.adjoint();
  ConeLayout lay;
  lay.herm = {n};
  lay.nonneg = 1;
  lay.free_vars = 1;
  const int nn = n * n;
  RMat A = RMat::Zero(n + 1, nn + 2);
  RVec b(n + 1);
  for (int i = 0; i < n; ++i) {
    A(i, i) = 1;
    b(i) = 1;
  }
  A.row(n).head(nn) = svec_c(Qm).transpose();
  A(n, nn) = -1;      // orthant slack
  A(n, nn + 1) = -1;  // t
  b(n) = 0;
  RVec c = RVec::Zero(nn + 2);
  c(nn + 1) = -1;  // maximize t
  auto r = solve(A, b, c, lay);
  REQUIRE(r.status == Status::optimal);
  double expect = 0;
  for (int i = 0; i < n; ++i) expect += std::abs(q(i));
  expect *= expect;
  CHECK(-r.primal_obj == doctest::Approx(expect).epsilon(1e-5));
}

TEST_CASE("infeasible LP is certified") {
  ConeLayout lay;
  lay.nonneg = 1;
  RMat A(1, 1);
  A << 1;
  RVec b(1);
  b << -1;
  RVec c(1);
  c << 0;
  auto r = solve(A, b, c, lay);
  CHECK(r.status == Status::primal_infeasible);
}

TEST_CASE("infeasible SDP is certified") {
  // diag(X) = 1 (so Tr X = 2) together with Tr(X) = 5
  ConeLayout lay;
  lay.herm = {2};
  RMat A = RMat::Zero(3, 4);
  A(0, 0) = 1;
  A(1, 1) = 1;
  A(2, 0) = 1;
  A(2, 1) = 1;
  RVec b(3);
  b << 1, 1, 5;
  RVec c = RVec::Zero(4);
  c(0) = 1;
  auto r = solve(A, b, c, lay);
  CHECK(r.status == Status::primal_infeasible);
}

TEST_CASE("unbounded problem is flagged dual infeasible") {
  ConeLayout lay;
  lay.nonneg = 1;
  RMat A = RMat::Zero(1, 1);
  RVec b = RVec::Zero(1);
  RVec c(1);
  c << -1;
  auto r = solve(A, b, c, lay);
  CHECK(r.status == Status::dual_infeasible);
}

TEST_CASE("random mixed-cone problems satisfy KKT certificates") {
  Rng rng(31);
  for (int trial = 0; trial < 4; ++trial) {
    ConeLayout lay;
    lay.herm = {3};
    lay.nonneg = 2;
    lay.soc = {3};
    lay.free_vars = 1;
    const int n = lay.total_dim();
    const int m = 5;
    RVec x0(n);
    x0.head(lay.cone_dim()) = random_interior(lay, rng);
    x0(n - 1) = rng.normal();
    RMat A(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = rng.normal();
    RVec b = A * x0;
    RVec w(m);
    for (int i = 0; i < m; ++i) w(i) = rng.normal();
    RVec zint = random_interior(lay, rng);
    RVec c = A.transpose() * w;
    c.head(lay.cone_dim()) += zint;
    auto r = solve(A, b, c, lay);
    REQUIRE(r.status == Status::optimal);
    CHECK(r.pres <= 1e-7);
    CHECK(r.dres <= 1e-7);
    CHECK(r.relgap <= 1e-6);
    CHECK((A * r.x - b).norm() <= 1e-6 * (1 + b.norm()));
  }
}
