#pragma once

#include <string>
#include <vector>

#include "risbeam/types.hpp"

namespace risbeam::ipm {

/// Cone product underlying a standard-form problem
///   minimize c.x   subject to  A x = b,  x in K,
/// laid out as: complex Hermitian PSD blocks (n^2 real coordinates each),
/// then a nonnegative orthant, then second-order cones, then free variables.
struct ConeLayout {
  std::vector<int> herm;
  int nonneg = 0;
  std::vector<int> soc;
  int free_vars = 0;

  int cone_dim() const;
  int total_dim() const { return cone_dim() + free_vars; }
  /// Barrier degree: sum of block orders, orthant size, one per SOC.
  double degree() const;
};

struct Options {
  double tol = 1e-7;         // accepted KKT residual / relative gap
  double target_tol = 1e-9;  // keep iterating toward this while progressing
  int max_iter = 100;
  bool verbose = false;
};

enum class Status { optimal, primal_infeasible, dual_infeasible, numerical_failure };

struct Result {
  Status status = Status::numerical_failure;
  RVec x;  // tau-scaled primal point (when optimal)
  RVec y;
  RVec z;
  double primal_obj = 0;
  double dual_obj = 0;
  double pres = 0, dres = 0, gap = 0, relgap = 0;
  int iterations = 0;
  std::string message;
};

Result solve(const RMat& A, const RVec& b, const RVec& c, const ConeLayout& layout,
             const Options& opt = {});

/// Real coordinates of a complex Hermitian matrix: n diagonal entries, then
/// sqrt(2)*(Re, Im) of each upper off-diagonal scanned column-major. The map
/// is an isometry for the trace inner product.
RVec svec_c(const CMat& X);
CMat smat_c(const RVec& v, int n);

namespace detail {

/// Nesterov-Todd scaling of one interior pair (s, z), exposed for testing.
struct Scaling {
  const ConeLayout* layout = nullptr;
  std::vector<CMat> herm_R, herm_Rinv, herm_G;
  std::vector<RVec> herm_lambda;
  RVec orth_w;
  std::vector<double> soc_beta;
  std::vector<RVec> soc_wbar;
  RVec lambda;  // scaled point, cone_dim coordinates

  bool compute(const ConeLayout& layout, const RVec& s, const RVec& z);
  RVec apply_W(const RVec& v) const;      // z-side scaling
  RVec apply_Wt(const RVec& v) const;     // adjoint
  RVec apply_Winv_t(const RVec& v) const; // s-side scaling (W^{-T})
  RVec apply_H(const RVec& v) const;      // W^T W
  RVec apply_W_herm_seg(int hb, const Eigen::Ref<const RVec>& seg) const;
};

RVec jordan_product(const ConeLayout& layout, const RVec& u, const RVec& v);
RVec jordan_div_lambda(const ConeLayout& layout, const RVec& lambda, const RVec& v);
RVec cone_identity(const ConeLayout& layout);
/// Largest step a with lambda + a*d staying in the cone (may be +inf).
double max_step(const ConeLayout& layout, const RVec& lambda, const RVec& d);

}  // namespace detail

}  // namespace risbeam::ipm
