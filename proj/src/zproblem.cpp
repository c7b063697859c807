#include "effop/zproblem.hpp"

#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace effop {

namespace {

const char* subspace_name(int i) {
  switch (i) {
    case 0: return "U";
    case 1: return "E";
    default: return "J";
  }
}

Matrix stack_ue(const TripleDecomposition& sp) {
  Matrix bue(sp.dim(), sp.subdim(0) + sp.subdim(1));
  bue << sp.basis(0).mat(), sp.basis(1).mat();
  return bue;
}

bool satisfies_h2(const ZProblem& p, double tol) {
  const Matrix& l = p.op.mat();
  if (!detail::is_hermitian(l, tol)) return false;
  if (l.rows() > 0) {
    Matrix h = 0.5 * (l + l.adjoint());
    if (detail::sym_eigenvalues(h, p.op.field()).minCoeff() <
        -tol * (1.0 + l.norm()))
      return false;
  }
  return detail::singular_range(l, p.op.field()).ok(kInvertRtol);
}

}  // namespace

TripleDecomposition::TripleDecomposition(Operator basis_u, Operator basis_e,
                                         Operator basis_j, double tol)
    : basis_{std::move(basis_u), std::move(basis_e), std::move(basis_j)} {
  const Index dim = basis_[0].rows();
  const ScalarField f = basis_[0].field();
  Index total = 0;
  for (const auto& b : basis_) {
    if (b.rows() != dim)
      throw ShapeError("triple decomposition: bases act on different spaces");
    if (b.field() != f)
      throw FieldError("triple decomposition: mixed scalar fields");
    total += b.cols();
  }
  if (total != dim)
    throw ValidationError(
        "triple decomposition: subspace dimensions do not sum to the space "
        "dimension");
  const double scale = 1.0 + std::sqrt(static_cast<double>(dim));
  for (int i = 0; i < 3; ++i) {
    const Matrix& bi = basis_[i].mat();
    Matrix gram = bi.adjoint() * bi;
    if ((gram - Matrix::Identity(gram.rows(), gram.cols())).norm() >
        tol * scale)
      throw ValidationError(std::string("triple decomposition: basis of ") +
                            subspace_name(i) + " is not an isometry");
    for (int j = i + 1; j < 3; ++j) {
      if ((bi.adjoint() * basis_[j].mat()).norm() > tol * scale)
        throw ValidationError(std::string("triple decomposition: ") +
                              subspace_name(i) + " and " + subspace_name(j) +
                              " are not orthogonal");
    }
  }
}

TripleDecomposition TripleDecomposition::from_projections(const Operator& g0,
                                                          const Operator& g1,
                                                          const Operator& g2,
                                                          double tol) {
  const Index dim = g0.rows();
  const std::array<const Operator*, 3> g{&g0, &g1, &g2};
  const double scale = 1.0 + std::sqrt(static_cast<double>(dim));
  Matrix sum = Matrix::Zero(dim, dim);
  for (int i = 0; i < 3; ++i) {
    if (g[i]->rows() != dim || g[i]->cols() != dim)
      throw ShapeError("triple decomposition: projections must be square and "
                       "equally sized");
    sum += g[i]->mat();
    for (int j = i + 1; j < 3; ++j) {
      if ((g[i]->mat() * g[j]->mat()).norm() > tol * scale)
        throw ValidationError(std::string("triple decomposition: projections "
                                          "onto ") +
                              subspace_name(i) + " and " + subspace_name(j) +
                              " are not orthogonal");
    }
  }
  if ((sum - Matrix::Identity(dim, dim)).norm() > tol * scale)
    throw ValidationError(
        "triple decomposition: projections do not sum to the identity");
  return TripleDecomposition(orthonormal_basis(g0, tol),
                             orthonormal_basis(g1, tol),
                             orthonormal_basis(g2, tol), tol);
}

Operator TripleDecomposition::gamma(int i) const {
  const Matrix& b = basis_[i].mat();
  return Operator(b * b.adjoint(), field());
}

Vector TripleDecomposition::lift(int i, const Vector& coords) const {
  if (coords.size() != subdim(i))
    throw ShapeError("lift: coordinate vector has wrong dimension");
  return basis_[i].mat() * coords;
}

Vector TripleDecomposition::project(int i, const Vector& full) const {
  if (full.size() != dim())
    throw ShapeError("project: vector has wrong dimension");
  return basis_[i].mat().adjoint() * full;
}

TripleDecomposition TripleDecomposition::with_swapped_ej() const {
  return TripleDecomposition(basis_[0], basis_[2], basis_[1]);
}

TripleDecomposition TripleDecomposition::promoted() const {
  return TripleDecomposition(basis_[0].promoted(), basis_[1].promoted(),
                             basis_[2].promoted());
}

bool TripleDecomposition::same_decomposition(const TripleDecomposition& other,
                                             double tol) const {
  if (dim() != other.dim() || field() != other.field()) return false;
  for (int i = 0; i < 3; ++i) {
    if (subdim(i) != other.subdim(i)) return false;
    if ((basis_[i].mat() - other.basis_[i].mat()).norm() >
        tol * (1.0 + basis_[i].mat().norm()))
      return false;
  }
  return true;
}

ZProblem::ZProblem(TripleDecomposition space_, Operator op_)
    : space(std::move(space_)), op(std::move(op_)) {
  if (!op.is_square() || op.rows() != space.dim())
    throw ShapeError("z-problem: operator does not act on the decomposed "
                     "space");
  if (op.field() != space.field())
    throw FieldError("z-problem: operator and decomposition use different "
                     "scalar fields");
}

Blocks3 blocks(const ZProblem& p) {
  Blocks3 out;
  const ScalarField f = p.op.field();
  std::array<Matrix, 3> lb;
  for (int j = 0; j < 3; ++j) lb[j] = p.op.mat() * p.space.basis(j).mat();
  for (int i = 0; i < 3; ++i) {
    const Matrix bi_adj = p.space.basis(i).mat().adjoint();
    for (int j = 0; j < 3; ++j) out(i, j) = Operator(bi_adj * lb[j], f);
  }
  return out;
}

HypothesisReport check_hypotheses(const ZProblem& p, double delta,
                                  int angle_samples) {
  HypothesisReport r;
  const Matrix& l = p.op.mat();
  const ScalarField f = p.op.field();
  const double tol = kDefaultTol;

  const Matrix l11 =
      p.space.basis(1).mat().adjoint() * l * p.space.basis(1).mat();
  const bool h0 = detail::singular_range(l11, f).ok(kInvertRtol);

  const bool self_adjoint = detail::is_hermitian(l, tol);
  bool l11_psd = true;
  if (l11.rows() > 0) {
    Matrix h = 0.5 * (l11 + l11.adjoint());
    l11_psd = detail::sym_eigenvalues(h, f).minCoeff() >=
              -tol * (1.0 + l11.norm());
  }
  const bool h1 = self_adjoint && l11_psd && h0;

  bool l_psd = self_adjoint;
  if (l_psd && l.rows() > 0) {
    Matrix h = 0.5 * (l + l.adjoint());
    l_psd = detail::sym_eigenvalues(h, f).minCoeff() >= -tol * (1.0 + l.norm());
  }
  const bool h2 =
      self_adjoint && l_psd && detail::singular_range(l, f).ok(kInvertRtol);

  // The paper's implication chain is enforced structurally so it holds on
  // every input, including borderline numerical gates.
  r.h2 = h2;
  r.h1 = h1 || r.h2;
  r.h0 = h0 || r.h1;
  r.lm = check_lm(p.op, delta, angle_samples);
  return r;
}

ZSolution solve(const ZProblem& p, const Vector& e0) {
  if (e0.size() != p.space.subdim(0))
    throw ShapeError("solve: E0 has wrong dimension");
  const ScalarField f = p.op.field();
  const Matrix b0 = p.space.basis(0).mat();
  const Matrix b1 = p.space.basis(1).mat();
  const Matrix b2 = p.space.basis(2).mat();
  const Matrix l_b0_e0 = p.op.mat() * (b0 * e0);
  const Matrix l11 = b1.adjoint() * (p.op.mat() * b1);
  Matrix e;
  try {
    e = -detail::gated_solve(l11, Matrix(b1.adjoint() * l_b0_e0), f,
                             kInvertRtol, "solve: L11");
  } catch (const SingularBlockError& ex) {
    throw SingularBlockError("solve: L11 not invertible ((H0) fails)",
                             ex.condition);
  }
  const Matrix l_b1_e = p.op.mat() * (b1 * e);
  ZSolution s;
  s.e = e.col(0);
  s.j0 = b0.adjoint() * (l_b0_e0 + l_b1_e);
  s.j = b2.adjoint() * (l_b0_e0 + l_b1_e);
  return s;
}

Operator effective_operator(const ZProblem& p) {
  const Matrix bue = stack_ue(p.space);
  Matrix comp = bue.adjoint() * p.op.mat() * bue;
  try {
    return schur_complement(
        Operator(std::move(comp), p.op.field()),
        BlockPartition::two(p.space.subdim(0), p.space.subdim(1)));
  } catch (const SingularBlockError& ex) {
    throw SingularBlockError(
        "effective_operator: L11 not invertible ((H0) fails)", ex.condition);
  }
}

ZProblem dual(const ZProblem& p) {
  return ZProblem(p.space.with_swapped_ej(), inverse(p.op));
}

double duality_check(const ZProblem& p) {
  Operator lstar = effective_operator(p);
  Operator lstar_inv = inverse(lstar);
  Operator dual_eff = effective_operator(dual(p));
  return relative_residual(dual_eff.mat(), lstar_inv.mat());
}

Complex dirichlet_energy(const ZProblem& p, const Vector& e0,
                         const Vector& e) {
  if (e0.size() != p.space.subdim(0) || e.size() != p.space.subdim(1))
    throw ShapeError("dirichlet_energy: coordinate dimensions do not match "
                     "the decomposition");
  Vector x = p.space.basis(0).mat() * e0 + p.space.basis(1).mat() * e;
  return (x.adjoint() * (p.op.mat() * x)).value();
}

ThomsonBounds thomson_bounds(const ZProblem& p) {
  if (!satisfies_h2(p, kDefaultTol))
    throw ValidationError(
        "thomson_bounds: (H2) fails (need L self-adjoint, positive "
        "semidefinite and invertible)");
  const ScalarField f = p.op.field();
  const Matrix b0 = p.space.basis(0).mat();
  Operator linv = inverse(p.op);
  Matrix linv00 = b0.adjoint() * linv.mat() * b0;
  Matrix lower = detail::gated_solve(
      linv00, Matrix(Matrix::Identity(b0.cols(), b0.cols())), f, kInvertRtol,
      "thomson_bounds: (L^{-1})_00");
  return {Operator(std::move(lower), f),
          Operator(b0.adjoint() * p.op.mat() * b0, f)};
}

void validate_kdm_rotation(const TripleDecomposition& space, const Operator& r,
                           double tol) {
  if (!r.is_square() || r.rows() != space.dim())
    throw ShapeError("kdm rotation: R does not act on the decomposed space");
  const Matrix& rm = r.mat();
  const double scale = 1.0 + rm.norm();
  if ((rm * rm.adjoint() - Matrix::Identity(rm.rows(), rm.rows())).norm() >
      tol * scale)
    throw ValidationError("kdm rotation: R is not unitary (R* != R^{-1})");
  if ((rm.adjoint() + rm).norm() > tol * scale)
    throw ValidationError("kdm rotation: R is not skew (R* != -R)");

  auto check_maps = [&](int from, int into, const char* what) {
    const Matrix rb = rm * space.basis(from).mat();
    const Matrix bt = space.basis(into).mat();
    const double res = (rb - bt * (bt.adjoint() * rb)).norm();
    if (res > tol * (1.0 + rb.norm())) throw ValidationError(what);
  };
  check_maps(0, 0, "kdm rotation: R does not map U into U");
  check_maps(1, 2, "kdm rotation: R does not map E into J");
  check_maps(2, 1, "kdm rotation: R does not map J into E");
}

Operator kdm_conjugate(const ZProblem& p, const Operator& r) {
  if (r.field() != p.op.field())
    throw FieldError("kdm_conjugate: R and L use different scalar fields");
  validate_kdm_rotation(p.space, r);
  const ScalarField f = p.op.field();
  const Matrix& rm = r.mat();
  // R^{-1} L^{-1} R with R^{-1} = R*.
  Matrix conj_inv = rm.adjoint() * detail::gated_solve(p.op.mat(), rm, f,
                                                       kInvertRtol,
                                                       "kdm_conjugate: L");
  Operator meff =
      effective_operator(ZProblem(p.space, Operator(std::move(conj_inv), f)));
  Matrix meff_inv = detail::gated_solve(
      meff.mat(), Matrix(Matrix::Identity(meff.rows(), meff.rows())), f,
      kInvertRtol, "kdm_conjugate: (R^{-1}L^{-1}R)_*");
  const Matrix b0 = p.space.basis(0).mat();
  Matrix ru = b0.adjoint() * rm * b0;  // unitary on U since RU = U
  return Operator(ru * meff_inv * ru.adjoint(), f);
}

MonotonicityConcavity monotonicity_concavity_check(const ZProblem& pl,
                                                   const ZProblem& pm,
                                                   double t, double tol) {
  if (!pl.space.same_decomposition(pm.space))
    throw ValidationError(
        "monotonicity_concavity_check: problems use different decompositions");
  if (!(t >= 0.0 && t <= 1.0))
    throw ValidationError("monotonicity_concavity_check: t must lie in [0,1]");
  if (!satisfies_h2(pl, tol) || !satisfies_h2(pm, tol))
    throw ValidationError(
        "monotonicity_concavity_check: (H2) fails for an input operator");

  Operator ls = effective_operator(pl);
  Operator ms = effective_operator(pm);

  MonotonicityConcavity out;
  if (loewner_leq(pl.op, pm.op, tol))
    out.monotone = loewner_leq(ls, ms, tol);
  else if (loewner_leq(pm.op, pl.op, tol))
    out.monotone = loewner_leq(ms, ls, tol);

  Operator blend = Complex(t) * pl.op + Complex(1.0 - t) * pm.op;
  Operator blend_eff = effective_operator(ZProblem(pl.space, blend));
  Operator combo = Complex(t) * ls + Complex(1.0 - t) * ms;
  out.concave = loewner_leq(combo, blend_eff, tol);
  return out;
}

}  // namespace effop
