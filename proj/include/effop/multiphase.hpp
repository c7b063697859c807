#pragma once

// Z(n)-subspace collections and the operator pencil L(z) = z_1 L_1 + ... +
// z_n L_n: the effective map on the admissible domain D, abstract Wiener
// bounds, multiphase duality, and both directions of the correspondence
// between effective operators and Schur complements of normalized positive
// semidefinite pencils.

#include <initializer_list>
#include <optional>
#include <vector>

#include "effop/zproblem.hpp"

namespace effop {

struct PencilPoint {
  std::vector<Complex> z;

  PencilPoint() = default;
  PencilPoint(std::initializer_list<Complex> init) : z(init) {}
  explicit PencilPoint(std::vector<Complex> v) : z(std::move(v)) {}
  static PencilPoint reals(const std::vector<double>& v);

  Index size() const { return static_cast<Index>(z.size()); }
  Complex operator[](Index i) const { return z[static_cast<std::size_t>(i)]; }

  PencilPoint componentwise_inverse() const;
  PencilPoint scaled(Complex lambda) const;
  bool all_real() const;
  bool all_positive() const;  // real with strictly positive parts
};

// A rotated open half-plane containing every component of z:
// Re(e^{i angle} z_i) >= margin * |z_i| with margin > 0. This is the exact
// membership test for the domain D (all components of z fit in a common open
// half-plane) and doubles as a coercivity witness for the pencil L(z).
struct HalfPlaneWitness {
  double angle;
  double margin;
};

std::optional<HalfPlaneWitness> half_plane_witness(const PencilPoint& z);

// Exact, not grid-based: sorts the component arguments and accepts iff the
// maximal cyclic angular gap strictly exceeds pi (D is open, boundary points
// are rejected) and no component vanishes.
bool in_domain_D(const PencilPoint& z);

class SubspaceCollection {
 public:
  SubspaceCollection(TripleDecomposition space, std::vector<Operator> lambdas,
                     double tol = kDefaultTol);

  const TripleDecomposition& space() const { return space_; }
  Index n_phases() const { return static_cast<Index>(lambdas_.size()); }
  const Operator& lambda(Index i) const {
    return lambdas_[static_cast<std::size_t>(i)];
  }

 private:
  TripleDecomposition space_;
  std::vector<Operator> lambdas_;
};

// L(z) = sum_i z_i Lambda_i; the result is complex-field as soon as any
// component of z has a nonzero imaginary part.
Operator pencil_at(const SubspaceCollection& c, const PencilPoint& z);

// Effective operator of the Z-problem (H, U, E, J, L(z)) for z in D, in the
// coordinates of the U-basis.
Operator effective_map(const SubspaceCollection& c, const PencilPoint& z);

class NormalizedPencil {
 public:
  // Coefficients must be self-adjoint PSD and sum to the identity on the
  // split space H0 + H1. Violations name the offending coefficient.
  NormalizedPencil(std::vector<Operator> coeffs, BlockPartition split,
                   double tol = kDefaultTol);

  Index n_phases() const { return static_cast<Index>(coeffs_.size()); }
  Index dim() const { return coeffs_[0].rows(); }
  Index dim_h0() const { return split_.sizes[0]; }
  Index dim_h1() const { return split_.sizes[1]; }
  const BlockPartition& split() const { return split_; }
  const Operator& coeff(Index i) const {
    return coeffs_[static_cast<std::size_t>(i)];
  }
  ScalarField field() const { return coeffs_[0].field(); }

  // Raw pencil value A(z) = sum_i z_i A_i.
  Matrix at(const PencilPoint& z) const;

 private:
  std::vector<Operator> coeffs_;
  BlockPartition split_;
};

// Compression of the collection to U + E: A_i = [B0 B1]^* Lambda_i [B0 B1],
// split (dim U, dim E). Satisfies schur_of_pencil(result, z) =
// effective_map(c, z) on all of D.
NormalizedPencil bess_pencil(const SubspaceCollection& c);

struct PencilSchur {
  Operator value;
  double solve_residual;  // relative residual of the A11(z) block solve
};

// f(z) = A00(z) - A01(z) A11(z)^{-1} A10(z); A11(z) is invertible on D and a
// numerical failure signals z effectively outside D or a degenerate pencil.
PencilSchur schur_of_pencil_detailed(const NormalizedPencil& p,
                                     const PencilPoint& z);
Operator schur_of_pencil(const NormalizedPencil& p, const PencilPoint& z);

struct RealizeOptions {
  // Use the literal-proof factor V_i = A_i^{1/2} (dilation dimension
  // n * (dim H0 + dim H1)) instead of minimal rank factorizations.
  bool full_square_root = false;
};

struct Realization {
  SubspaceCollection collection;
  Operator t;  // unitary from H0 onto U-coordinates
  Operator v;  // stacked isometry, kept as a construction artifact for audit
  std::vector<Index> phase_ranks;

  Index dilation_dim() const { return collection.space().dim(); }
};

// Builds rank factorizations A_i = V_i^* V_i, stacks them into an isometry V
// and returns the subspace collection on the dilation space together with the
// unitary T; for all z in D, schur_of_pencil(p, z) = T^* effective_map(...) T.
Realization realize(const NormalizedPencil& p, const RealizeOptions& opts = {});

struct WienerBounds {
  Operator lower;  // (sum_i z_i^{-1} G0 Lambda_i G0|_U)^{-1}
  Operator upper;  // sum_i z_i G0 Lambda_i G0|_U
};

// Requires all z_i real and strictly positive; then
// lower <= effective_map(c, z) <= upper in the Loewner order.
WienerBounds wiener_bounds(const SubspaceCollection& c, const PencilPoint& z);

// Relative residual of L*(z) = R [L*(z^{-1})]^{-1} R^{-1} on U, where R must
// be skew-unitary, respect the triple decomposition as in the duality setup
// and preserve every phase subspace. Structural failures name the condition.
double multiphase_kdm(const SubspaceCollection& c, const Operator& r,
                      const PencilPoint& z);

// Loewner comparison L*(z) <= L*(w) for componentwise 0 < z_i <= w_i.
bool multiphase_monotone(const SubspaceCollection& c, const PencilPoint& z,
                         const PencilPoint& w, double tol = kDefaultTol);

}  // namespace effop
