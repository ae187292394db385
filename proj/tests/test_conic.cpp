#include <doctest.h>

#include <cmath>
#include <sstream>

#include "risbeam/conic.hpp"
#include "risbeam/rng.hpp"

using namespace risbeam;
using namespace risbeam::conic;

TEST_CASE("hermitian embedding examples") {
  CMat I = CMat::Identity(3, 3);
  CHECK((embed_hermitian(I) - RMat::Identity(6, 6)).norm() == 0.0);

  CMat H(2, 2);
  H << cxd(0, 0), cxd(0, 1), cxd(0, -1), cxd(0, 0);
  RMat E = embed_hermitian(H);
  Eigen::SelfAdjointEigenSolver<RMat> es(E);
  RVec ev = es.eigenvalues();
  CHECK(ev(0) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(ev(1) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(ev(2) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ev(3) == doctest::Approx(1.0).epsilon(1e-12));

  Rng rng(3);
  CMat Hr = rng.cnormal_matrix(3, 3);
  Hr = CMat((Hr + Hr.adjoint()).real().cast<cxd>());  // real symmetric
  RMat Er = embed_hermitian(Hr);
  CHECK((Er.topLeftCorner(3, 3) - Hr.real()).norm() == 0.0);
  CHECK(Er.topRightCorner(3, 3).norm() == 0.0);
  CHECK(Er.bottomLeftCorner(3, 3).norm() == 0.0);
}

TEST_CASE("embedding round trip on a solved block") {
  // solve a small SDP, embed the solution, extract, re-embed
  ConicProblem p;
  VarRef X = p.add_psd_variable("X", 3);
  Rng rng(5);
  CMat B = rng.cnormal_matrix(3, 3);
  CMat C = B + B.adjoint();
  for (int i = 0; i < 3; ++i) {
    CMat Eii = CMat::Zero(3, 3);
    Eii(i, i) = 1;
    AffineForm row;
    row.add_trace(X, Eii).add_constant(-1.0);
    p.add_constraint(std::move(row), Relation::eq);
  }
  AffineForm obj;
  obj.add_trace(X, C);
  p.set_linear_objective(std::move(obj), Sense::minimize);
  auto sol = p.solve();
  REQUIRE(sol.ok());
  RMat E = embed_hermitian(sol.value(X));
  CMat back = extract_hermitian(E);
  CHECK((embed_hermitian(back) - E).norm() <= 1e-8);
  CHECK((back - sol.value(X)).norm() <= 1e-12);
}

TEST_CASE("trace objective with fixed diagonal") {
  ConicProblem p;
  VarRef X = p.add_psd_variable("X", 2);
  for (int i = 0; i < 2; ++i) {
    CMat Eii = CMat::Zero(2, 2);
    Eii(i, i) = 1;
    AffineForm row;
    row.add_trace(X, Eii).add_constant(-1.0);
    p.add_constraint(std::move(row), Relation::eq);
  }
  AffineForm obj;
  obj.add_trace(X, CMat::Identity(2, 2));
  p.set_linear_objective(std::move(obj), Sense::minimize);
  auto sol = p.solve();
  REQUIRE(sol.ok());
  CHECK(sol.objective == doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("maximin epigraph") {
  SUBCASE("single constant-plus-scalar term") {
    ConicProblem p;
    ScalarRef x = p.add_scalar("x");
    AffineForm box1(1.0);
    box1.add_scalar(x, -1.0);  // 1 - x >= 0
    p.add_constraint(std::move(box1), Relation::ge);
    AffineForm term;
    term.add_scalar(x, 1.0);
    p.add_maximin_epigraph({term});
    auto sol = p.solve();
    REQUIRE(sol.ok());
    CHECK(sol.objective == doctest::Approx(1.0).epsilon(1e-7));
  }

  SUBCASE("two equal terms are both active") {
    ConicProblem p;
    ScalarRef x = p.add_scalar("x");
    AffineForm cap(2.0);
    cap.add_scalar(x, -1.0);
    p.add_constraint(std::move(cap), Relation::ge);
    AffineForm t1;
    t1.add_scalar(x, 1.0);
    AffineForm t2;
    t2.add_scalar(x, 1.0);
    ScalarRef t = p.add_maximin_epigraph({t1, t2});
    auto sol = p.solve();
    REQUIRE(sol.ok());
    CHECK(sol.value(t) == doctest::Approx(2.0).epsilon(1e-7));
    CHECK(sol.value(x) == doctest::Approx(2.0).epsilon(1e-7));
  }

  SUBCASE("three random affine terms over a box match vertex enumeration") {
    Rng rng(11);
    for (int trial = 0; trial < 5; ++trial) {
      Eigen::Matrix<double, 3, 2> G;
      RVec g0(3);
      for (int m = 0; m < 3; ++m) {
        G(m, 0) = rng.normal();
        G(m, 1) = rng.normal();
        g0(m) = rng.normal();
      }
      ConicProblem p;
      ScalarRef x1 = p.add_scalar("x1");
      ScalarRef x2 = p.add_scalar("x2");
      for (ScalarRef v : {x1, x2}) {
        AffineForm lo(1.0);
        lo.add_scalar(v, 1.0);  // x >= -1
        p.add_constraint(std::move(lo), Relation::ge);
        AffineForm hi(1.0);
        hi.add_scalar(v, -1.0);  // x <= 1
        p.add_constraint(std::move(hi), Relation::ge);
      }
      std::vector<AffineForm> terms;
      for (int m = 0; m < 3; ++m) {
        AffineForm f(g0(m));
        f.add_scalar(x1, G(m, 0));
        f.add_scalar(x2, G(m, 1));
        terms.push_back(std::move(f));
      }
      p.add_maximin_epigraph(terms);
      auto sol = p.solve();
      REQUIRE(sol.ok());

      // oracle: enumerate basic points of max t s.t. t <= f_m(x), |x_i| <= 1
      // planes in (x1, x2, t): t - f_m = 0 and x_i = +-1
      struct Plane {
        RVec n;  // 3-vector
        double rhs;
      };
      std::vector<Plane> planes;
      for (int m = 0; m < 3; ++m) {
        RVec n(3);
        n << -G(m, 0), -G(m, 1), 1.0;
        planes.push_back({n, g0(m)});
      }
      for (int i = 0; i < 2; ++i)
        for (double sgn : {-1.0, 1.0}) {
          RVec n = RVec::Zero(3);
          n(i) = 1.0;
          planes.push_back({n, sgn});
        }
      double best = -1e300;
      const int P = static_cast<int>(planes.size());
      for (int a = 0; a < P; ++a)
        for (int b2 = a + 1; b2 < P; ++b2)
          for (int c = b2 + 1; c < P; ++c) {
            RMat Mx(3, 3);
            Mx.row(0) = planes[a].n.transpose();
            Mx.row(1) = planes[b2].n.transpose();
            Mx.row(2) = planes[c].n.transpose();
            RVec rhs(3);
            rhs << planes[a].rhs, planes[b2].rhs, planes[c].rhs;
            Eigen::FullPivLU<RMat> lu(Mx);
            if (!lu.isInvertible()) continue;
            RVec pt = lu.solve(rhs);
            bool feas = std::abs(pt(0)) <= 1 + 1e-9 && std::abs(pt(1)) <= 1 + 1e-9;
            for (int m = 0; m < 3 && feas; ++m)
              feas = pt(2) <= G(m, 0) * pt(0) + G(m, 1) * pt(1) + g0(m) + 1e-9;
            if (feas) best = std::max(best, pt(2));
          }
      CHECK(sol.objective == doctest::Approx(best).epsilon(1e-6));
    }
  }
}

TEST_CASE("constructed-optimum SDP cross-check") {
  Rng rng(23);
  for (int trial = 0; trial < 4; ++trial) {
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

    ConicProblem p;
    VarRef X = p.add_psd_variable("X", n);
    for (int i = 0; i < n; ++i) {
      CMat Eii = CMat::Zero(n, n);
      Eii(i, i) = 1;
      AffineForm row;
      row.add_trace(X, Eii).add_constant(-1.0);
      p.add_constraint(std::move(row), Relation::eq);
    }
    AffineForm obj;
    obj.add_trace(X, C);
    p.set_linear_objective(std::move(obj), Sense::minimize);
    auto sol = p.solve();
    REQUIRE(sol.ok());
    CHECK(std::abs(sol.objective - y.sum()) <= 1e-5 * (1.0 + std::abs(y.sum())));
  }
}

TEST_CASE("weak duality sanity for a maximization") {
  Rng rng(31);
  const int n = 4;
  CMat B = rng.cnormal_matrix(n, n);
  CMat A = B + B.adjoint();
  ConicProblem p;
  VarRef X = p.add_psd_variable("X", n);
  for (int i = 0; i < n; ++i) {
    CMat Eii = CMat::Zero(n, n);
    Eii(i, i) = 1;
    AffineForm row;
    row.add_trace(X, Eii).add_constant(-1.0);
    p.add_constraint(std::move(row), Relation::eq);
  }
  AffineForm obj;
  obj.add_trace(X, A);
  p.set_linear_objective(std::move(obj), Sense::maximize);
  auto sol = p.solve();
  REQUIRE(sol.ok());
  Eigen::SelfAdjointEigenSolver<CMat> es(A, Eigen::EigenvaluesOnly);
  double bound = es.eigenvalues().cwiseAbs().maxCoeff() * n;
  CHECK(sol.objective <= bound + 1e-7 * bound);
}

TEST_CASE("infeasible program reports infeasible, not an exception") {
  ConicProblem p;
  VarRef X = p.add_psd_variable("X", 2);
  for (int i = 0; i < 2; ++i) {
    CMat Eii = CMat::Zero(2, 2);
    Eii(i, i) = 1;
    AffineForm row;
    row.add_trace(X, Eii).add_constant(-1.0);
    p.add_constraint(std::move(row), Relation::eq);
  }
  AffineForm tr;
  tr.add_trace(X, CMat::Identity(2, 2)).add_constant(-5.0);
  p.add_constraint(std::move(tr), Relation::eq);
  AffineForm obj;
  obj.add_trace(X, CMat::Identity(2, 2));
  p.set_linear_objective(std::move(obj), Sense::minimize);
  auto sol = p.solve();
  CHECK(sol.status == ConicSolution::Status::infeasible);
}

TEST_CASE("least squares objective equals the summed squares") {
  // minimize (x - 3)^2 + (x + 1)^2 over free x: optimum at x = 1, value 8
  ConicProblem p;
  ScalarRef x = p.add_scalar("x");
  AffineForm r1(-3.0);
  r1.add_scalar(x, 1.0);
  AffineForm r2(1.0);
  r2.add_scalar(x, 1.0);
  ScalarRef t = p.set_least_squares_objective({r1, r2});
  auto sol = p.solve();
  REQUIRE(sol.ok());
  CHECK(sol.value(x) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(sol.objective == doctest::Approx(8.0).epsilon(1e-6));
  CHECK(sol.value(t) == doctest::Approx(std::sqrt(8.0)).epsilon(1e-6));
}

TEST_CASE("problem dump is printable") {
  ConicProblem p;
  VarRef X = p.add_psd_variable("X", 2);
  AffineForm row;
  row.add_trace(X, CMat::Identity(2, 2)).add_constant(-1.0);
  p.add_constraint(std::move(row), Relation::ge);
  AffineForm obj;
  obj.add_trace(X, CMat::Identity(2, 2));
  p.set_linear_objective(std::move(obj), Sense::minimize);
  std::ostringstream os;
  p.dump(os);
  CHECK(os.str().find("psd variables: X(2)") != std::string::npos);
  CHECK(os.str().find("minimize") != std::string::npos);
}

TEST_CASE("dangling scalar is rejected") {
  ConicProblem p;
  VarRef X = p.add_psd_variable("X", 2);
  p.add_scalar("unused");
  AffineForm row;
  row.add_trace(X, CMat::Identity(2, 2)).add_constant(-1.0);
  p.add_constraint(std::move(row), Relation::eq);
  AffineForm obj;
  obj.add_trace(X, CMat::Identity(2, 2));
  p.set_linear_objective(std::move(obj), Sense::minimize);
  CHECK_THROWS_AS(p.solve(), std::invalid_argument);
}
