#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "risbeam/ipm.hpp"
#include "risbeam/types.hpp"

namespace risbeam::conic {

struct VarRef {
  int id = -1;
  int n = 0;
};

struct ScalarRef {
  int id = -1;
};

/// Real-valued affine functional: sum_i Tr(coeff_i X_i) + sum_j w_j s_j + c0,
/// with every coefficient matrix Hermitian.
class AffineForm {
 public:
  AffineForm() = default;
  explicit AffineForm(double constant) : constant_(constant) {}

  AffineForm& add_trace(VarRef v, const CMat& coeff);
  AffineForm& add_scalar(ScalarRef s, double w);
  AffineForm& add_constant(double c) {
    constant_ += c;
    return *this;
  }

  const std::map<int, CMat>& traces() const { return traces_; }
  const std::map<int, double>& scalars() const { return scalars_; }
  double constant() const { return constant_; }

 private:
  std::map<int, CMat> traces_;
  std::map<int, double> scalars_;
  double constant_ = 0;
};

enum class Relation { eq, ge, le };  // form (relation) 0
enum class Sense { minimize, maximize };

/// Hermitian-valued affine expression sum_i a_i X_i + constant.
struct HermExpr {
  std::vector<std::pair<VarRef, double>> terms;
  CMat constant;  // empty means zero

  static HermExpr of(VarRef v, double a = 1.0) {
    HermExpr e;
    e.terms.push_back({v, a});
    return e;
  }
  HermExpr& add(VarRef v, double a) {
    terms.push_back({v, a});
    return *this;
  }
};

struct ConicSolution {
  enum class Status { optimal, infeasible, numerical_failure };
  Status status = Status::numerical_failure;
  double objective = 0;  // in the declared sense
  double primal_residual = 0;
  double dual_residual = 0;
  int iterations = 0;
  std::string message;
  std::vector<CMat> psd_values;
  std::vector<double> scalar_values;

  bool ok() const { return status == Status::optimal; }
  const CMat& value(VarRef v) const { return psd_values.at(v.id); }
  double value(ScalarRef s) const { return scalar_values.at(s.id); }
};

/// Builder for the convex program shapes used by the solvers: PSD variables
/// with linear trace constraints, a linear or max-min objective, or a
/// quadratic objective routed through a single second-order cone.
class ConicProblem {
 public:
  VarRef add_psd_variable(const std::string& name, int n);
  ScalarRef add_scalar(const std::string& name);

  void add_constraint(AffineForm f, Relation rel);
  /// Constrains a Hermitian affine expression to the PSD cone. A bare
  /// variable is already conic; anything else introduces an auxiliary block
  /// tied by equality rows.
  void require_psd(HermExpr e);

  /// max t subject to term_m >= t; adds the rows and sets the objective.
  ScalarRef add_maximin_epigraph(const std::vector<AffineForm>& terms);

  void set_linear_objective(AffineForm f, Sense sense);
  /// minimize sum of squares of the residual forms via one second-order
  /// cone; the returned scalar carries the residual norm at the optimum.
  ScalarRef set_least_squares_objective(std::vector<AffineForm> residuals);

  ConicSolution solve(double tol = 1e-7) const;
  void dump(std::ostream& os) const;

  int num_psd_variables() const { return static_cast<int>(var_order_.size()); }
  int num_scalars() const { return static_cast<int>(scalar_names_.size()); }

 private:
  struct Row {
    AffineForm form;
    Relation rel;
  };
  std::vector<int> var_order_;  // n per variable id
  std::vector<std::string> var_names_;
  std::vector<std::string> scalar_names_;
  std::vector<Row> rows_;
  std::vector<HermExpr> psd_exprs_;  // non-trivial PSD constraints
  AffineForm objective_;
  Sense sense_ = Sense::minimize;
  std::vector<AffineForm> ls_residuals_;
  bool has_ls_objective_ = false;
  int ls_epigraph_id_ = -1;
};

ConicSolution solve(const ConicProblem& p, double tol = 1e-7);

/// [[Re H, -Im H], [Im H, Re H]]; H is PSD iff the embedding is PSD.
RMat embed_hermitian(const CMat& H);
/// Hermitian part recovered from a real embedding.
CMat extract_hermitian(const RMat& E);

}  // namespace risbeam::conic
