#pragma once

// The abstract Z-problem: given the average field E0 in U, find (J0, E, J) in
// U x E x J with J0 + J = L(E0 + E). A triple decomposition H = U + E + J is
// carried as three column isometries; solutions and effective operators are
// computed in subspace coordinates so Schur complements stay small and
// conditioning stays visible.

#include <array>
#include <optional>

#include "effop/operator.hpp"

namespace effop {

class TripleDecomposition {
 public:
  // Bases are column isometries onto U, E, J; validation checks orthonormality
  // of each basis, mutual orthogonality, and that the column counts sum to
  // the space dimension (which forces completeness).
  TripleDecomposition(Operator basis_u, Operator basis_e, Operator basis_j,
                      double tol = kDefaultTol);

  static TripleDecomposition from_projections(const Operator& g0,
                                              const Operator& g1,
                                              const Operator& g2,
                                              double tol = kDefaultTol);

  Index dim() const { return basis_[0].rows(); }
  ScalarField field() const { return basis_[0].field(); }
  Index subdim(int i) const { return basis_[i].cols(); }
  const Operator& basis(int i) const { return basis_[i]; }

  // Orthogonal projection basis(i) basis(i)^*; assembled on demand (the dense
  // matrix is quadratic in dim and rarely needed).
  Operator gamma(int i) const;

  Vector lift(int i, const Vector& coords) const;
  Vector project(int i, const Vector& full) const;

  // Same space with the roles of E and J exchanged (dual problems).
  TripleDecomposition with_swapped_ej() const;
  TripleDecomposition promoted() const;

  bool same_decomposition(const TripleDecomposition& other,
                          double tol = 1e-12) const;

 private:
  std::array<Operator, 3> basis_;
};

struct ZProblem {
  TripleDecomposition space;
  Operator op;  // acts on the decomposed space

  ZProblem(TripleDecomposition space_, Operator op_);
};

// Solution triple in subspace coordinates (U, E, J respectively).
struct ZSolution {
  Vector j0;
  Vector e;
  Vector j;
};

// Solvability hypotheses, ordered weakest to strongest; the report always
// satisfies h2 => h1 => h0. lm holds the accepted probe angle when the
// coercivity grid search finds one.
struct HypothesisReport {
  bool h0 = false;
  bool h1 = false;
  bool h2 = false;
  std::optional<double> lm;
};

// 3x3 grid of compressions L_ij = basis_i^* L basis_j.
class Blocks3 {
 public:
  const Operator& operator()(int i, int j) const { return block_[3 * i + j]; }
  Operator& operator()(int i, int j) { return block_[3 * i + j]; }

 private:
  std::array<Operator, 9> block_;
};

Blocks3 blocks(const ZProblem& p);

HypothesisReport check_hypotheses(const ZProblem& p, double delta = kDefaultTol,
                                  int angle_samples = 360);

// Unique solution under (H0): J0 = L*E0, E = -L11^{-1} L10 E0,
// J = L20 E0 + L21 E.
ZSolution solve(const ZProblem& p, const Vector& e0);

// L* = L00 - L01 L11^{-1} L10, the Schur complement of the compression of L
// to U + E.
Operator effective_operator(const ZProblem& p);

// (H, U, J, E, L^{-1}). Requires invertible L.
ZProblem dual(const ZProblem& p);

// Relative residual of (L^{-1})_{*'} = (L*)^{-1}. Caller contract: the
// coercivity hypothesis holds for L (invertibility is what gets checked;
// the grid probe is sufficient but not necessary, so it is not used as a
// gate here).
double duality_check(const ZProblem& p);

// (E0+E, L(E0+E)) for e0, e given in subspace coordinates; real up to
// rounding when (H1) holds.
Complex dirichlet_energy(const ZProblem& p, const Vector& e0, const Vector& e);

struct ThomsonBounds {
  Operator lower;  // [(L^{-1})_00]^{-1}
  Operator upper;  // L00
};

// Requires (H2); the returned operators satisfy 0 <= lower <= L* <= upper.
ThomsonBounds thomson_bounds(const ZProblem& p);

// Checks that R is skew-unitary (R* = R^{-1} = -R) and maps U into U, E into
// J and J into E; throws a ValidationError naming the violated condition.
void validate_kdm_rotation(const TripleDecomposition& space, const Operator& r,
                           double tol = kDefaultTol);

// R [(R^{-1} L^{-1} R)_*]^{-1} R^{-1} compressed to U; equals
// effective_operator(p) whenever the structural conditions on R hold.
Operator kdm_conjugate(const ZProblem& p, const Operator& r);

struct MonotonicityConcavity {
  std::optional<bool> monotone;  // empty when L and M are Loewner-incomparable
  bool concave = false;
};

// Both problems must share one decomposition and satisfy (H2).
MonotonicityConcavity monotonicity_concavity_check(const ZProblem& pl,
                                                   const ZProblem& pm, double t,
                                                   double tol = kDefaultTol);

}  // namespace effop
