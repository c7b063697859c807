#include "effop/multiphase.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <utility>

#include <Eigen/Dense>

namespace effop {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  return a;
}

ScalarField point_field(const SubspaceCollection& c, const PencilPoint& z) {
  if (c.space().field() == ScalarField::cplx || !z.all_real())
    return ScalarField::cplx;
  return ScalarField::real;
}

}  // namespace

PencilPoint PencilPoint::reals(const std::vector<double>& v) {
  PencilPoint p;
  p.z.reserve(v.size());
  for (double x : v) p.z.emplace_back(x, 0.0);
  return p;
}

PencilPoint PencilPoint::componentwise_inverse() const {
  PencilPoint out;
  out.z.reserve(z.size());
  for (const Complex& zi : z) {
    if (std::abs(zi) == 0.0)
      throw ValidationError("pencil point: cannot invert a zero component");
    out.z.push_back(1.0 / zi);
  }
  return out;
}

PencilPoint PencilPoint::scaled(Complex lambda) const {
  PencilPoint out;
  out.z.reserve(z.size());
  for (const Complex& zi : z) out.z.push_back(lambda * zi);
  return out;
}

bool PencilPoint::all_real() const {
  for (const Complex& zi : z)
    if (zi.imag() != 0.0) return false;
  return true;
}

bool PencilPoint::all_positive() const {
  for (const Complex& zi : z)
    if (zi.imag() != 0.0 || zi.real() <= 0.0) return false;
  return !z.empty();
}

std::optional<HalfPlaneWitness> half_plane_witness(const PencilPoint& z) {
  const std::size_t n = z.z.size();
  if (n == 0) return std::nullopt;
  std::vector<double> args;
  args.reserve(n);
  for (const Complex& zi : z.z) {
    if (std::abs(zi) == 0.0) return std::nullopt;
    args.push_back(wrap_angle(std::arg(zi)));
  }
  std::sort(args.begin(), args.end());

  // Maximal cyclic gap between consecutive arguments; membership in D is
  // exactly "gap > pi" (strict, D is open).
  double max_gap = kTwoPi - (args.back() - args.front());
  std::size_t after = n - 1;  // gap sits after this sorted index
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double gap = args[i + 1] - args[i];
    if (gap > max_gap) {
      max_gap = gap;
      after = i;
    }
  }
  if (!(max_gap > std::numbers::pi)) return std::nullopt;

  const double width = kTwoPi - max_gap;  // occupied arc, < pi
  const double start = args[(after + 1) % n];
  const double center = start + 0.5 * width;
  return HalfPlaneWitness{wrap_angle(-center), std::cos(0.5 * width)};
}

bool in_domain_D(const PencilPoint& z) {
  return half_plane_witness(z).has_value();
}

SubspaceCollection::SubspaceCollection(TripleDecomposition space,
                                       std::vector<Operator> lambdas,
                                       double tol)
    : space_(std::move(space)), lambdas_(std::move(lambdas)) {
  if (lambdas_.empty())
    throw ValidationError("subspace collection: need at least one phase");
  const Index dim = space_.dim();
  const ScalarField f = space_.field();
  const double scale = 1.0 + std::sqrt(static_cast<double>(dim));
  Matrix sum = Matrix::Zero(dim, dim);
  for (std::size_t i = 0; i < lambdas_.size(); ++i) {
    const Operator& li = lambdas_[i];
    if (!li.is_square() || li.rows() != dim)
      throw ShapeError("subspace collection: phase projection " +
                       std::to_string(i + 1) + " has wrong dimensions");
    if (li.field() != f)
      throw FieldError("subspace collection: phase projection " +
                       std::to_string(i + 1) + " uses a different field");
    const Matrix& m = li.mat();
    if ((m - m.adjoint()).norm() > tol * (1.0 + m.norm()) ||
        (m * m - m).norm() > tol * (1.0 + m.norm()))
      throw ValidationError("subspace collection: phase projection " +
                            std::to_string(i + 1) +
                            " is not an orthogonal projection");
    for (std::size_t j = i + 1; j < lambdas_.size(); ++j) {
      if ((m * lambdas_[j].mat()).norm() > tol * scale)
        throw ValidationError("subspace collection: phase subspaces " +
                              std::to_string(i + 1) + " and " +
                              std::to_string(j + 1) + " are not orthogonal");
    }
    sum += m;
  }
  if ((sum - Matrix::Identity(dim, dim)).norm() > tol * scale)
    throw ValidationError(
        "subspace collection: phase projections do not resolve the identity");
}

Operator pencil_at(const SubspaceCollection& c, const PencilPoint& z) {
  if (z.size() != c.n_phases())
    throw ShapeError("pencil_at: z length does not match the phase count");
  const Index dim = c.space().dim();
  Matrix acc = Matrix::Zero(dim, dim);
  for (Index i = 0; i < z.size(); ++i) acc += z[i] * c.lambda(i).mat();
  return Operator(std::move(acc), point_field(c, z));
}

Operator effective_map(const SubspaceCollection& c, const PencilPoint& z) {
  if (!in_domain_D(z))
    throw ValidationError(
        "effective_map: z is outside the admissible domain D");
  Operator l = pencil_at(c, z);
  if (l.field() == ScalarField::cplx &&
      c.space().field() == ScalarField::real)
    return effective_operator(ZProblem(c.space().promoted(), std::move(l)));
  return effective_operator(ZProblem(c.space(), std::move(l)));
}

NormalizedPencil::NormalizedPencil(std::vector<Operator> coeffs,
                                   BlockPartition split, double tol)
    : coeffs_(std::move(coeffs)), split_(std::move(split)) {
  if (split_.blocks() != 2)
    throw ShapeError("normalized pencil: split must have exactly two blocks");
  if (coeffs_.empty())
    throw ValidationError("normalized pencil: need at least one coefficient");
  const Index dim = split_.total();
  const ScalarField f = coeffs_[0].field();
  Matrix sum = Matrix::Zero(dim, dim);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    const Operator& a = coeffs_[i];
    if (!a.is_square() || a.rows() != dim)
      throw ShapeError("normalized pencil: coefficient " +
                       std::to_string(i + 1) +
                       " does not match the split dimension");
    if (a.field() != f)
      throw FieldError("normalized pencil: coefficient " +
                       std::to_string(i + 1) + " uses a different field");
    const Matrix& m = a.mat();
    const double scale = 1.0 + m.norm();
    if ((m - m.adjoint()).norm() > tol * scale)
      throw ValidationError("normalized pencil: coefficient " +
                            std::to_string(i + 1) + " is not self-adjoint");
    if (m.rows() > 0) {
      Matrix h = 0.5 * (m + m.adjoint());
      const double lo = detail::sym_eigenvalues(h, f).minCoeff();
      if (lo < -tol * scale) {
        std::ostringstream oss;
        oss << "normalized pencil: coefficient " << (i + 1)
            << " is not positive semidefinite (min eigenvalue " << lo << ")";
        throw ValidationError(oss.str());
      }
    }
    sum += m;
  }
  if ((sum - Matrix::Identity(dim, dim)).norm() >
      tol * (1.0 + std::sqrt(static_cast<double>(dim))))
    throw ValidationError(
        "normalized pencil: coefficients do not sum to the identity");
}

Matrix NormalizedPencil::at(const PencilPoint& z) const {
  if (z.size() != n_phases())
    throw ShapeError("pencil: z length does not match the coefficient count");
  Matrix acc = Matrix::Zero(dim(), dim());
  for (Index i = 0; i < z.size(); ++i) acc += z[i] * coeff(i).mat();
  return acc;
}

NormalizedPencil bess_pencil(const SubspaceCollection& c) {
  const TripleDecomposition& sp = c.space();
  Matrix bue(sp.dim(), sp.subdim(0) + sp.subdim(1));
  bue << sp.basis(0).mat(), sp.basis(1).mat();
  std::vector<Operator> coeffs;
  coeffs.reserve(static_cast<std::size_t>(c.n_phases()));
  for (Index i = 0; i < c.n_phases(); ++i)
    coeffs.emplace_back(Matrix(bue.adjoint() * c.lambda(i).mat() * bue),
                        sp.field());
  return NormalizedPencil(std::move(coeffs),
                          BlockPartition::two(sp.subdim(0), sp.subdim(1)));
}

PencilSchur schur_of_pencil_detailed(const NormalizedPencil& p,
                                     const PencilPoint& z) {
  if (!in_domain_D(z))
    throw ValidationError(
        "schur_of_pencil: z is outside the admissible domain D");
  const ScalarField f =
      (p.field() == ScalarField::cplx || !z.all_real()) ? ScalarField::cplx
                                                        : ScalarField::real;
  const Matrix a = p.at(z);
  const Index n0 = p.dim_h0();
  const Index n1 = p.dim_h1();
  if (n1 == 0)
    return {Operator(a.topLeftCorner(n0, n0), f), 0.0};
  const Matrix a11 = a.bottomRightCorner(n1, n1);
  const Matrix a10 = a.bottomLeftCorner(n1, n0);
  Matrix x;
  try {
    x = detail::gated_solve(a11, a10, f, kInvertRtol,
                            "schur_of_pencil: A11(z)");
  } catch (const SingularBlockError& ex) {
    throw SingularBlockError(
        "schur_of_pencil: A11(z) numerically singular (z effectively outside "
        "D or degenerate pencil)",
        ex.condition);
  }
  const double res = relative_residual(a11 * x, a10);
  return {Operator(a.topLeftCorner(n0, n0) - a.topRightCorner(n0, n1) * x, f),
          res};
}

Operator schur_of_pencil(const NormalizedPencil& p, const PencilPoint& z) {
  return schur_of_pencil_detailed(p, z).value;
}

Realization realize(const NormalizedPencil& p, const RealizeOptions& opts) {
  const Index dim = p.dim();
  const Index n = p.n_phases();
  const ScalarField f = p.field();
  const double eps = std::numeric_limits<double>::epsilon();

  std::vector<Matrix> factors;
  std::vector<Index> ranks;
  factors.reserve(static_cast<std::size_t>(n));
  ranks.reserve(static_cast<std::size_t>(n));
  Index total = 0;
  for (Index i = 0; i < n; ++i) {
    const Matrix& a = p.coeff(i).mat();
    auto eig = detail::sym_eig(0.5 * (a + a.adjoint()), f);
    if (opts.full_square_root) {
      Eigen::VectorXd clipped = eig.values.cwiseMax(0.0);
      Matrix v = eig.vectors *
                 clipped.cwiseSqrt().asDiagonal().toDenseMatrix().cast<Complex>() *
                 eig.vectors.adjoint();
      factors.push_back(std::move(v));
      ranks.push_back(dim);
      total += dim;
      continue;
    }
    const double amax =
        eig.values.size() ? eig.values.cwiseAbs().maxCoeff() : 0.0;
    const double thresh =
        static_cast<double>(n) * static_cast<double>(dim) * eps * amax;
    std::vector<Index> kept;
    for (Index k = eig.values.size() - 1; k >= 0; --k)  // descending
      if (eig.values(k) > thresh) kept.push_back(k);
    Matrix v(static_cast<Index>(kept.size()), dim);
    for (std::size_t r = 0; r < kept.size(); ++r)
      v.row(static_cast<Index>(r)) =
          std::sqrt(eig.values(kept[r])) * eig.vectors.col(kept[r]).adjoint();
    total += static_cast<Index>(kept.size());
    ranks.push_back(static_cast<Index>(kept.size()));
    factors.push_back(std::move(v));
  }

  Matrix vstack(total, dim);
  {
    Index off = 0;
    for (const Matrix& vi : factors) {
      vstack.middleRows(off, vi.rows()) = vi;
      off += vi.rows();
    }
  }

  const Index h0 = p.dim_h0();
  const Index h1 = p.dim_h1();
  const Matrix viso0 = vstack.leftCols(h0);
  const Matrix viso1 = vstack.rightCols(h1);

  // Projection validation below tolerates the pencil's own normalization
  // error, which enters the constructed projections linearly.
  const double tol_r = 1e-7;
  Operator b0 = orthonormal_basis(Operator(viso0 * viso0.adjoint(), f), tol_r);
  Operator b1 = orthonormal_basis(Operator(viso1 * viso1.adjoint(), f), tol_r);
  Matrix g2 = Matrix::Identity(total, total) - vstack * vstack.adjoint();
  Operator b2 = orthonormal_basis(Operator(std::move(g2), f), tol_r);
  if (b0.cols() != h0 || b1.cols() != h1)
    throw ValidationError(
        "realize: stacked factors do not form an isometry (pencil violates "
        "normalization)");

  std::vector<Operator> lambdas;
  lambdas.reserve(static_cast<std::size_t>(n));
  {
    Index off = 0;
    for (Index i = 0; i < n; ++i) {
      Matrix li = Matrix::Zero(total, total);
      li.diagonal().segment(off, ranks[static_cast<std::size_t>(i)])
          .setOnes();
      lambdas.emplace_back(std::move(li), f);
      off += ranks[static_cast<std::size_t>(i)];
    }
  }

  Matrix t = b0.mat().adjoint() * viso0;
  return Realization{
      SubspaceCollection(TripleDecomposition(b0, b1, b2, tol_r),
                         std::move(lambdas), tol_r),
      Operator(std::move(t), f), Operator(std::move(vstack), f),
      std::move(ranks)};
}

WienerBounds wiener_bounds(const SubspaceCollection& c, const PencilPoint& z) {
  if (z.size() != c.n_phases())
    throw ShapeError("wiener_bounds: z length does not match the phase count");
  if (!z.all_positive())
    throw ValidationError(
        "wiener_bounds: all components of z must be real and positive");
  const ScalarField f = c.space().field();
  const Matrix b0 = c.space().basis(0).mat();
  const Index u = b0.cols();
  Matrix lower_acc = Matrix::Zero(u, u);
  Matrix upper_acc = Matrix::Zero(u, u);
  for (Index i = 0; i < c.n_phases(); ++i) {
    const Matrix comp = b0.adjoint() * c.lambda(i).mat() * b0;
    upper_acc += z[i].real() * comp;
    lower_acc += (1.0 / z[i].real()) * comp;
  }
  Matrix lower = detail::gated_solve(lower_acc, Matrix(Matrix::Identity(u, u)),
                                     f, kInvertRtol,
                                     "wiener_bounds: harmonic-mean compression");
  return {Operator(std::move(lower), f), Operator(std::move(upper_acc), f)};
}

double multiphase_kdm(const SubspaceCollection& c, const Operator& r,
                      const PencilPoint& z) {
  if (!in_domain_D(z))
    throw ValidationError("multiphase_kdm: z is outside the admissible "
                          "domain D");
  validate_kdm_rotation(c.space(), r);
  for (Index i = 0; i < c.n_phases(); ++i) {
    const Matrix rl = r.mat() * c.lambda(i).mat();
    const double res = (rl - c.lambda(i).mat() * rl).norm();
    if (res > kDefaultTol * (1.0 + rl.norm()))
      throw ValidationError("multiphase_kdm: R does not preserve phase "
                            "subspace " +
                            std::to_string(i + 1));
  }
  Operator lstar = effective_map(c, z);
  Operator lstar_at_inv = effective_map(c, z.componentwise_inverse());
  const ScalarField f = lstar.field();
  Matrix inv = detail::gated_solve(
      lstar_at_inv.mat(),
      Matrix(Matrix::Identity(lstar_at_inv.rows(), lstar_at_inv.rows())), f,
      kInvertRtol, "multiphase_kdm: L*(z^{-1})");
  const Matrix b0 = c.space().basis(0).mat();
  const Matrix ru = b0.adjoint() * r.mat() * b0;
  return relative_residual(ru * inv * ru.adjoint(), lstar.mat());
}

bool multiphase_monotone(const SubspaceCollection& c, const PencilPoint& z,
                         const PencilPoint& w, double tol) {
  if (z.size() != w.size() || z.size() != c.n_phases())
    throw ShapeError("multiphase_monotone: point lengths do not match the "
                     "phase count");
  for (Index i = 0; i < z.size(); ++i) {
    if (z[i].imag() != 0.0 || w[i].imag() != 0.0 || z[i].real() <= 0.0 ||
        w[i].real() < z[i].real())
      throw ValidationError(
          "multiphase_monotone: need componentwise 0 < z_i <= w_i on the "
          "reals");
  }
  return loewner_leq(effective_map(c, z), effective_map(c, w), tol);
}

}  // namespace effop
