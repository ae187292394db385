#pragma once

#include <complex>
#include <Eigen/Dense>

namespace risbeam {

using cxd = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Power ratio to decibels, floored at -400 dB so exports never carry -inf.
inline double to_db(double linear) {
  return 10.0 * std::log10(std::max(linear, 1e-40));
}
inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

/// Hermitian part of a square complex matrix.
inline CMat hermitian_part(const CMat& x) { return 0.5 * (x + x.adjoint()); }

}  // namespace risbeam
