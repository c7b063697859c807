#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace effop {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

// Scalar field a computation runs over. Every operator carries a field tag and
// mixing tags in one expression is an error; promoted() is the explicit
// escape hatch from real to complex.
enum class ScalarField { real, cplx };

inline const char* to_string(ScalarField f) {
  return f == ScalarField::real ? "real" : "complex";
}

// Default relative tolerance for approximate identities (Frobenius norms,
// relative to scale) unless an operation takes an explicit tol.
inline constexpr double kDefaultTol = 1e-9;

// Invertibility gate: a block counts as invertible when its smallest singular
// value exceeds kInvertRtol times its largest.
inline constexpr double kInvertRtol = 1e-10;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dimension or block-structure mismatch.
struct ShapeError : Error {
  using Error::Error;
};

// Real/complex field mismatch between operands.
struct FieldError : Error {
  using Error::Error;
};

// Input fails a structural precondition (not a projection, not PSD, ...).
struct ValidationError : Error {
  using Error::Error;
};

// A block that must be inverted is numerically singular. Carries the
// estimated condition number sigma_max / sigma_min.
struct SingularBlockError : Error {
  SingularBlockError(const std::string& what, double cond)
      : Error(what), condition(cond) {}
  double condition;
};

}  // namespace effop
