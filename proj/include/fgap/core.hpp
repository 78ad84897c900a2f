#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace fgap {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;
using IVector = Eigen::VectorXi;
using IMatrix = Eigen::MatrixXi;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Curve data violates the reality/distinctness conditions.
class CurveError : public Error {
 public:
  using Error::Error;
};

/// A path passes too close to a branch point, or does not close on the curve.
class PathError : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature or refinement failed to converge.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Homology basis construction produced inconsistent data.
class BasisError : public Error {
 public:
  using Error::Error;
};

/// Theta argument outside the region declared by its context.
class ThetaDomainError : public Error {
 public:
  using Error::Error;
};

/// Theta values underflow along a path: the data sits on (or next to) the theta divisor.
class SingularDataError : public Error {
 public:
  using Error::Error;
};

/// Phase tracking failed (refinement limit, non-integer winding).
class TrackingError : public Error {
 public:
  using Error::Error;
};

/// Divisor does not satisfy the reality pattern (or matches more than one symbol).
class AdmissibilityError : public Error {
 public:
  using Error::Error;
};

}  // namespace fgap
