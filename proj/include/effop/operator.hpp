#pragma once

// Dense operators between finite-dimensional inner-product spaces over R or C,
// plus the pieces of operator algebra everything else builds on: adjoints,
// self-adjoint parts, Loewner comparison, Schur complements, coercivity
// probes, and orthonormal range bases of projections.

#include <optional>
#include <vector>

#include "effop/types.hpp"

namespace effop {

// Ordered split of a space into consecutive blocks; sizes must sum to the
// dimension of whatever gets partitioned.
struct BlockPartition {
  std::vector<Index> sizes;

  static BlockPartition two(Index n0, Index n1) { return {{n0, n1}}; }
  Index blocks() const { return static_cast<Index>(sizes.size()); }
  Index total() const;
  Index offset(Index b) const;
};

class Operator {
 public:
  Operator() : m_(0, 0), field_(ScalarField::real) {}
  // Validates that a real-field operator has no imaginary parts.
  Operator(Matrix entries, ScalarField field);

  static Operator from_real(const RealMatrix& m);
  static Operator identity(Index n, ScalarField f);
  static Operator zero(Index rows, Index cols, ScalarField f);

  Index rows() const { return m_.rows(); }
  Index cols() const { return m_.cols(); }
  bool is_square() const { return m_.rows() == m_.cols(); }
  ScalarField field() const { return field_; }
  const Matrix& mat() const { return m_; }
  Complex operator()(Index i, Index j) const { return m_(i, j); }

  // Same entries, complex field tag.
  Operator promoted() const { return Operator(m_, ScalarField::cplx); }

  friend Operator operator+(const Operator& a, const Operator& b);
  friend Operator operator-(const Operator& a, const Operator& b);
  friend Operator operator*(const Operator& a, const Operator& b);
  // Scalar multiplication promotes a real operator when the scalar has a
  // nonzero imaginary part.
  friend Operator operator*(Complex s, const Operator& a);
  friend Operator operator-(const Operator& a);

 private:
  Matrix m_;
  ScalarField field_;
};

// Conjugate transpose.
Operator adjoint(const Operator& a);

// Self-adjoint part (A + A*)/2 of a square operator.
Operator re_part(const Operator& a);

// A00 - A01 A11^{-1} A10 for a square operator split into two diagonal
// blocks. Throws SingularBlockError when the (1,1) block fails the
// singular-value gate; the error carries the estimated condition number.
Operator schur_complement(const Operator& a, const BlockPartition& split);

// Loewner order test: true iff min eig(B - A) >= -tol * (1 + ||B - A||_F).
// Both operands must be self-adjoint up to the symmetrization tolerance.
bool loewner_leq(const Operator& a, const Operator& b, double tol = kDefaultTol);

// Coercivity probe for the hypothesis Re(lambda L) >= delta I with |lambda|=1:
// scans angle_samples angles theta uniformly over [0, 2pi) and returns the
// first theta whose rotated self-adjoint part has min eigenvalue >= delta.
// A grid search is sufficient but not necessary: absence of a hit does not
// prove the hypothesis fails (pencils get an exact test in multiphase).
std::optional<double> check_lm(const Operator& l, double delta,
                               int angle_samples = 360);

// Column isometry B with B*B = I and BB* = P for an orthogonal projection P.
// Columns come from the spectral decomposition of P, keeping eigenvalues
// above 1/2, ordered by descending eigenvalue then by index of the
// largest-magnitude entry, with the phase fixed so that entry is real
// positive; output is reproducible for a given input.
Operator orthonormal_basis(const Operator& p, double tol = kDefaultTol);

// Full inverse through the same singular-value gate as schur_complement.
Operator inverse(const Operator& a);

double frobenius(const Operator& a);

// ||x - y||_F / ||y||_F, with 0/0 = 0 and finite/0 = inf.
double relative_residual(const Matrix& x, const Matrix& y);

namespace detail {

struct SymEig {
  Eigen::VectorXd values;  // ascending
  Matrix vectors;
};

// Eigendecomposition of a matrix assumed self-adjoint; the real-field path
// stays in real arithmetic so real inputs produce exactly real factors.
SymEig sym_eig(const Matrix& m, ScalarField f);
Eigen::VectorXd sym_eigenvalues(const Matrix& m, ScalarField f);

struct SvdGate {
  double sigma_min = 1.0;
  double sigma_max = 1.0;
  bool ok(double rtol) const {
    return sigma_max > 0.0 && sigma_min > rtol * sigma_max;
  }
  double cond() const;
};

SvdGate singular_range(const Matrix& m, ScalarField f);

// SVD-backed solve of a x = rhs gated on the singular-value ratio; throws
// SingularBlockError naming `what` when the gate fails.
Matrix gated_solve(const Matrix& a, const Matrix& rhs, ScalarField f,
                   double rtol, const std::string& what);

bool is_hermitian(const Matrix& m, double tol);

}  // namespace detail

}  // namespace effop
