#include "risbeam/conic.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace risbeam::conic {

AffineForm& AffineForm::add_trace(VarRef v, const CMat& coeff) {
  if (coeff.rows() != v.n || coeff.cols() != v.n)
    throw std::invalid_argument("coefficient shape mismatch");
  auto it = traces_.find(v.id);
  if (it == traces_.end())
    traces_.emplace(v.id, hermitian_part(coeff));
  else
    it->second += hermitian_part(coeff);
  return *this;
}

AffineForm& AffineForm::add_scalar(ScalarRef s, double w) {
  scalars_[s.id] += w;
  return *this;
}

VarRef ConicProblem::add_psd_variable(const std::string& name, int n) {
  if (n < 1) throw std::invalid_argument("PSD variable order must be >= 1");
  VarRef v{static_cast<int>(var_order_.size()), n};
  var_order_.push_back(n);
  var_names_.push_back(name);
  return v;
}

ScalarRef ConicProblem::add_scalar(const std::string& name) {
  ScalarRef s{static_cast<int>(scalar_names_.size())};
  scalar_names_.push_back(name);
  return s;
}

void ConicProblem::add_constraint(AffineForm f, Relation rel) {
  rows_.push_back({std::move(f), rel});
}

void ConicProblem::require_psd(HermExpr e) {
  bool trivial = e.terms.size() == 1 && e.terms[0].second == 1.0 &&
                 (e.constant.size() == 0 || e.constant.isZero(0.0));
  if (trivial) return;  // declared variables already live in the cone
  psd_exprs_.push_back(std::move(e));
}

ScalarRef ConicProblem::add_maximin_epigraph(const std::vector<AffineForm>& terms) {
  if (terms.empty()) throw std::invalid_argument("maximin needs at least one term");
  ScalarRef t = add_scalar("t_maximin");
  for (const AffineForm& f : terms) {
    AffineForm row = f;
    row.add_scalar(t, -1.0);
    add_constraint(std::move(row), Relation::ge);
  }
  AffineForm obj;
  obj.add_scalar(t, 1.0);
  set_linear_objective(std::move(obj), Sense::maximize);
  return t;
}

void ConicProblem::set_linear_objective(AffineForm f, Sense sense) {
  objective_ = std::move(f);
  sense_ = sense;
  has_ls_objective_ = false;
}

ScalarRef ConicProblem::set_least_squares_objective(std::vector<AffineForm> residuals) {
  ls_residuals_ = std::move(residuals);
  has_ls_objective_ = true;
  sense_ = Sense::minimize;
  ScalarRef t = add_scalar("t_lsq");
  ls_epigraph_id_ = t.id;
  return t;
}

namespace {

struct Lowering {
  // x layout: [psd variable blocks][aux psd blocks][orthant][soc][free scalars]
  std::vector<int> var_offset;
  std::vector<int> aux_offset;
  int orth_offset = 0;
  int soc_offset = 0;
  int free_offset = 0;
  ipm::ConeLayout lay;
  RMat A;
  RVec b, c;
};

}  // namespace

ConicSolution ConicProblem::solve(double tol) const {
  Lowering lo;
  int pos = 0;
  for (int n : var_order_) {
    lo.var_offset.push_back(pos);
    lo.lay.herm.push_back(n);
    pos += n * n;
  }
  for (const HermExpr& e : psd_exprs_) {
    int n = e.terms.empty() ? static_cast<int>(e.constant.rows()) : e.terms[0].first.n;
    lo.aux_offset.push_back(pos);
    lo.lay.herm.push_back(n);
    pos += n * n;
  }
  lo.orth_offset = pos;
  int n_ineq = 0;
  for (const auto& r : rows_)
    if (r.rel != Relation::eq) ++n_ineq;
  lo.lay.nonneg = n_ineq;
  pos += n_ineq;
  lo.soc_offset = pos;
  int n_res = 0;
  if (has_ls_objective_) {
    n_res = static_cast<int>(ls_residuals_.size());
    if (n_res > 0) {
      lo.lay.soc.push_back(1 + n_res);
      pos += 1 + n_res;
    }
  }
  lo.free_offset = pos;
  lo.lay.free_vars = num_scalars();
  pos += num_scalars();
  const int n_total = pos;

  // the epigraph scalar mirrors the SOC head through one coupling row
  int n_rows = static_cast<int>(rows_.size()) + n_res + (has_ls_objective_ ? 1 : 0);
  for (const HermExpr& e : psd_exprs_) {
    int n = e.terms.empty() ? static_cast<int>(e.constant.rows()) : e.terms[0].first.n;
    n_rows += n * n;
  }

  lo.A = RMat::Zero(n_rows, n_total);
  lo.b = RVec::Zero(n_rows);
  lo.c = RVec::Zero(n_total);

  auto scatter_form = [&](const AffineForm& f, int row) {
    for (const auto& [vid, coeff] : f.traces()) {
      RVec sv = ipm::svec_c(coeff);
      lo.A.row(row).segment(lo.var_offset[vid], sv.size()) += sv.transpose();
    }
    for (const auto& [sid, w] : f.scalars()) lo.A(row, lo.free_offset + sid) += w;
    lo.b(row) -= f.constant();
  };

  int row = 0;
  int ineq = 0;
  for (const auto& r : rows_) {
    scatter_form(r.form, row);
    if (r.rel == Relation::ge)
      lo.A(row, lo.orth_offset + ineq++) = -1.0;  // f - u = 0
    else if (r.rel == Relation::le)
      lo.A(row, lo.orth_offset + ineq++) = 1.0;  // f + u = 0
    ++row;
  }

  // auxiliary PSD blocks: Y - sum a_i X_i = constant, coordinatewise
  for (std::size_t k = 0; k < psd_exprs_.size(); ++k) {
    const HermExpr& e = psd_exprs_[k];
    int n = e.terms.empty() ? static_cast<int>(e.constant.rows()) : e.terms[0].first.n;
    int nn = n * n;
    RVec cst = e.constant.size() > 0 ? ipm::svec_c(e.constant) : RVec::Zero(nn);
    for (int i = 0; i < nn; ++i) {
      lo.A(row + i, lo.aux_offset[k] + i) = 1.0;
      lo.b(row + i) = cst(i);
    }
    for (const auto& [v, a] : e.terms)
      for (int i = 0; i < nn; ++i) lo.A(row + i, lo.var_offset[v.id] + i) -= a;
    row += nn;
  }

  // least-squares residual coupling: f_i - r_i = 0
  if (has_ls_objective_ && n_res > 0) {
    for (int i = 0; i < n_res; ++i) {
      scatter_form(ls_residuals_[i], row);
      lo.A(row, lo.soc_offset + 1 + i) = -1.0;
      ++row;
    }
  }
  if (has_ls_objective_) {
    lo.A(row, lo.free_offset + ls_epigraph_id_) = 1.0;
    if (n_res > 0) lo.A(row, lo.soc_offset) = -1.0;
    ++row;
  }

  // every free scalar must be pinned by some row; a dangling column would
  // make the KKT system singular
  for (int s = 0; s < num_scalars(); ++s) {
    if (lo.A.col(lo.free_offset + s).isZero(0.0))
      throw std::invalid_argument("scalar variable '" + scalar_names_[s] +
                                  "' appears in no constraint");
  }

  double obj_sign = (sense_ == Sense::maximize) ? -1.0 : 1.0;
  if (has_ls_objective_) {
    if (n_res > 0) lo.c(lo.soc_offset) = 1.0;
  } else {
    for (const auto& [vid, coeff] : objective_.traces()) {
      RVec sv = ipm::svec_c(coeff);
      lo.c.segment(lo.var_offset[vid], sv.size()) += obj_sign * sv;
    }
    for (const auto& [sid, w] : objective_.scalars())
      lo.c(lo.free_offset + sid) += obj_sign * w;
  }

  ipm::Options opt;
  opt.tol = tol;
  auto r = ipm::solve(lo.A, lo.b, lo.c, lo.lay, opt);

  ConicSolution sol;
  sol.iterations = r.iterations;
  sol.message = r.message;
  sol.primal_residual = r.pres;
  sol.dual_residual = r.dres;
  switch (r.status) {
    case ipm::Status::optimal: sol.status = ConicSolution::Status::optimal; break;
    case ipm::Status::primal_infeasible: sol.status = ConicSolution::Status::infeasible; break;
    default: sol.status = ConicSolution::Status::numerical_failure; break;
  }
  if (sol.status != ConicSolution::Status::optimal) return sol;

  sol.psd_values.resize(var_order_.size());
  for (std::size_t v = 0; v < var_order_.size(); ++v) {
    int n = var_order_[v];
    sol.psd_values[v] = ipm::smat_c(r.x.segment(lo.var_offset[v], n * n), n);
    Eigen::SelfAdjointEigenSolver<CMat> es(sol.psd_values[v], Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-7 * n) {
      sol.status = ConicSolution::Status::numerical_failure;
      sol.message = "PSD feasibility post-check failed for " + var_names_[v];
      return sol;
    }
  }
  sol.scalar_values.assign(num_scalars(), 0.0);
  for (int s = 0; s < num_scalars(); ++s) sol.scalar_values[s] = r.x(lo.free_offset + s);
  if (has_ls_objective_) {
    double t = n_res > 0 ? r.x(lo.soc_offset) : 0.0;
    sol.scalar_values[ls_epigraph_id_] = t;
    sol.objective = t * t;  // sum of squared residuals
  } else {
    double val = objective_.constant();
    for (const auto& [vid, coeff] : objective_.traces())
      val += std::real((coeff * sol.psd_values[vid]).trace());
    for (const auto& [sid, w] : objective_.scalars()) val += w * sol.scalar_values[sid];
    sol.objective = val;
  }
  return sol;
}

ConicSolution solve(const ConicProblem& p, double tol) { return p.solve(tol); }

void ConicProblem::dump(std::ostream& os) const {
  os << "conic problem\n";
  os << "psd variables:";
  for (std::size_t i = 0; i < var_order_.size(); ++i)
    os << ' ' << var_names_[i] << '(' << var_order_[i] << ')';
  os << "\nscalars:";
  for (const auto& s : scalar_names_) os << ' ' << s;
  os << "\nobjective: " << (sense_ == Sense::maximize ? "maximize" : "minimize");
  if (has_ls_objective_) os << " sum-of-squares of " << ls_residuals_.size() << " residuals";
  os << '\n';
  auto print_form = [&](const AffineForm& f) {
    for (const auto& [vid, coeff] : f.traces())
      os << " + Tr(A*" << var_names_[vid] << ") |A|=" << coeff.norm();
    for (const auto& [sid, w] : f.scalars()) os << " + " << w << '*' << scalar_names_[sid];
    if (f.constant() != 0) os << " + " << f.constant();
  };
  for (const auto& r : rows_) {
    os << "row";
    print_form(r.form);
    os << (r.rel == Relation::eq ? " == 0" : (r.rel == Relation::ge ? " >= 0" : " <= 0"))
       << '\n';
  }
  for (const auto& e : psd_exprs_) {
    os << "psd:";
    for (const auto& [v, a] : e.terms) os << ' ' << a << '*' << var_names_[v.id];
    os << " + const in PSD cone\n";
  }
}

RMat embed_hermitian(const CMat& H) {
  const int n = static_cast<int>(H.rows());
  if (H.cols() != n) throw std::invalid_argument("embed_hermitian needs a square matrix");
  RMat E(2 * n, 2 * n);
  E.topLeftCorner(n, n) = H.real();
  E.bottomRightCorner(n, n) = H.real();
  E.topRightCorner(n, n) = -H.imag();
  E.bottomLeftCorner(n, n) = H.imag();
  return E;
}

CMat extract_hermitian(const RMat& E) {
  const int n = static_cast<int>(E.rows()) / 2;
  RMat re = 0.5 * (E.topLeftCorner(n, n) + E.bottomRightCorner(n, n));
  RMat im = 0.5 * (E.bottomLeftCorner(n, n) - E.topRightCorner(n, n));
  CMat H = re.cast<cxd>() + cxd(0, 1) * im.cast<cxd>();
  return hermitian_part(H);
}

}  // namespace risbeam::conic
