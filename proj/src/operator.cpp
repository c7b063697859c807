#include "effop/operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

namespace effop {

Index BlockPartition::total() const {
  Index t = 0;
  for (Index s : sizes) {
    if (s < 0) throw ShapeError("block partition: sizes must be non-negative");
    t += s;
  }
  return t;
}

Index BlockPartition::offset(Index b) const {
  Index off = 0;
  for (Index i = 0; i < b && i < blocks(); ++i) off += sizes[i];
  return off;
}

namespace {

bool imag_is_zero(const Matrix& m) {
  return m.size() == 0 || m.imag().cwiseAbs().maxCoeff() == 0.0;
}

ScalarField require_same_field(const Operator& a, const Operator& b,
                               const char* what) {
  if (a.field() != b.field())
    throw FieldError(std::string(what) + ": mixed real/complex operands");
  return a.field();
}

}  // namespace

Operator::Operator(Matrix entries, ScalarField field)
    : m_(std::move(entries)), field_(field) {
  if (field_ == ScalarField::real && !imag_is_zero(m_))
    throw FieldError("real-field operator has nonzero imaginary entries");
}

Operator Operator::from_real(const RealMatrix& m) {
  return Operator(m.cast<Complex>(), ScalarField::real);
}

Operator Operator::identity(Index n, ScalarField f) {
  return Operator(Matrix::Identity(n, n), f);
}

Operator Operator::zero(Index rows, Index cols, ScalarField f) {
  return Operator(Matrix::Zero(rows, cols), f);
}

Operator operator+(const Operator& a, const Operator& b) {
  ScalarField f = require_same_field(a, b, "operator+");
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError("operator+: dimension mismatch");
  return Operator(a.m_ + b.m_, f);
}

Operator operator-(const Operator& a, const Operator& b) {
  ScalarField f = require_same_field(a, b, "operator-");
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError("operator-: dimension mismatch");
  return Operator(a.m_ - b.m_, f);
}

Operator operator*(const Operator& a, const Operator& b) {
  ScalarField f = require_same_field(a, b, "operator*");
  if (a.cols() != b.rows()) throw ShapeError("operator*: dimension mismatch");
  return Operator(a.m_ * b.m_, f);
}

Operator operator*(Complex s, const Operator& a) {
  ScalarField f = (a.field() == ScalarField::cplx || s.imag() != 0.0)
                      ? ScalarField::cplx
                      : ScalarField::real;
  return Operator(s * a.m_, f);
}

Operator operator-(const Operator& a) { return Complex(-1.0) * a; }

Operator adjoint(const Operator& a) {
  return Operator(a.mat().adjoint(), a.field());
}

Operator re_part(const Operator& a) {
  if (!a.is_square()) throw ShapeError("re_part: operator must be square");
  return Operator(0.5 * (a.mat() + a.mat().adjoint()), a.field());
}

Operator schur_complement(const Operator& a, const BlockPartition& split) {
  if (!a.is_square())
    throw ShapeError("schur_complement: operator must be square");
  if (split.blocks() != 2)
    throw ShapeError("schur_complement: need a 2-block partition");
  if (split.total() != a.rows())
    throw ShapeError("schur_complement: partition does not cover the space");
  const Index n0 = split.sizes[0];
  const Index n1 = split.sizes[1];
  const Matrix& m = a.mat();
  Matrix a00 = m.topLeftCorner(n0, n0);
  if (n1 == 0) return Operator(std::move(a00), a.field());
  Matrix x = detail::gated_solve(m.bottomRightCorner(n1, n1),
                                 m.bottomLeftCorner(n1, n0), a.field(),
                                 kInvertRtol, "schur_complement: block (1,1)");
  return Operator(a00 - m.topRightCorner(n0, n1) * x, a.field());
}

bool loewner_leq(const Operator& a, const Operator& b, double tol) {
  ScalarField f = require_same_field(a, b, "loewner_leq");
  if (!a.is_square() || a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError("loewner_leq: operators must be square with equal dims");
  const double sym_tol = std::max(tol, 1e-12);
  if (!detail::is_hermitian(a.mat(), sym_tol))
    throw ValidationError("loewner_leq: first operand is not self-adjoint");
  if (!detail::is_hermitian(b.mat(), sym_tol))
    throw ValidationError("loewner_leq: second operand is not self-adjoint");
  if (a.rows() == 0) return true;
  Matrix diff = b.mat() - a.mat();
  Matrix h = 0.5 * (diff + diff.adjoint());
  double lo = detail::sym_eigenvalues(h, f).minCoeff();
  return lo >= -tol * (1.0 + h.norm());
}

std::optional<double> check_lm(const Operator& l, double delta,
                               int angle_samples) {
  if (!l.is_square()) throw ShapeError("check_lm: operator must be square");
  if (angle_samples < 4)
    throw ValidationError("check_lm: need at least 4 angle samples");
  const Matrix& m = l.mat();
  const Matrix madj = m.adjoint();
  for (int j = 0; j < angle_samples; ++j) {
    const double theta = 2.0 * std::numbers::pi * j / angle_samples;
    if (m.rows() == 0) return theta;
    const Complex lam = std::polar(1.0, theta);
    Matrix h = 0.5 * (lam * m + std::conj(lam) * madj);
    if (detail::sym_eigenvalues(h, ScalarField::cplx).minCoeff() >= delta)
      return theta;
  }
  return std::nullopt;
}

Operator orthonormal_basis(const Operator& p, double tol) {
  if (!p.is_square())
    throw ShapeError("orthonormal_basis: projection must be square");
  const Matrix& m = p.mat();
  const double scale = 1.0 + m.norm();
  if ((m - m.adjoint()).norm() > tol * scale)
    throw ValidationError("orthonormal_basis: input is not self-adjoint");
  if ((m * m - m).norm() > tol * scale)
    throw ValidationError("orthonormal_basis: input is not idempotent");
  if (m.rows() == 0) return Operator(Matrix(0, 0), p.field());

  auto eig = detail::sym_eig(0.5 * (m + m.adjoint()), p.field());
  struct Col {
    double value;
    Index argmax;
    Index src;
  };
  std::vector<Col> kept;
  for (Index i = 0; i < eig.values.size(); ++i) {
    if (eig.values(i) > 0.5) {
      Index am = 0;
      eig.vectors.col(i).cwiseAbs().maxCoeff(&am);
      kept.push_back({eig.values(i), am, i});
    }
  }
  std::stable_sort(kept.begin(), kept.end(), [](const Col& a, const Col& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.argmax < b.argmax;
  });
  Matrix basis(m.rows(), static_cast<Index>(kept.size()));
  for (std::size_t c = 0; c < kept.size(); ++c) {
    Vector v = eig.vectors.col(kept[c].src);
    const Complex pivot = v(kept[c].argmax);
    if (std::abs(pivot) > 0.0) v *= std::conj(pivot) / std::abs(pivot);
    basis.col(static_cast<Index>(c)) = v;
  }
  return Operator(std::move(basis), p.field());
}

Operator inverse(const Operator& a) {
  if (!a.is_square()) throw ShapeError("inverse: operator must be square");
  Matrix id = Matrix::Identity(a.rows(), a.rows());
  return Operator(detail::gated_solve(a.mat(), id, a.field(), kInvertRtol,
                                      "inverse: operator"),
                  a.field());
}

double frobenius(const Operator& a) { return a.mat().norm(); }

double relative_residual(const Matrix& x, const Matrix& y) {
  const double denom = y.norm();
  const double num = (x - y).norm();
  if (denom == 0.0)
    return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return num / denom;
}

namespace detail {

double SvdGate::cond() const {
  if (sigma_min == 0.0) return std::numeric_limits<double>::infinity();
  return sigma_max / sigma_min;
}

SymEig sym_eig(const Matrix& m, ScalarField f) {
  if (f == ScalarField::real) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(m.real());
    if (es.info() != Eigen::Success)
      throw Error("sym_eig: eigendecomposition failed");
    return {es.eigenvalues(), es.eigenvectors().cast<Complex>()};
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success)
    throw Error("sym_eig: eigendecomposition failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

Eigen::VectorXd sym_eigenvalues(const Matrix& m, ScalarField f) {
  if (m.rows() == 0) return Eigen::VectorXd(0);
  if (f == ScalarField::real) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(m.real(),
                                                 Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
      throw Error("sym_eigenvalues: eigendecomposition failed");
    return es.eigenvalues();
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw Error("sym_eigenvalues: eigendecomposition failed");
  return es.eigenvalues();
}

SvdGate singular_range(const Matrix& m, ScalarField f) {
  if (m.rows() == 0 || m.cols() == 0) return {1.0, 1.0};
  Eigen::VectorXd sv;
  if (f == ScalarField::real)
    sv = Eigen::BDCSVD<RealMatrix>(m.real()).singularValues();
  else
    sv = Eigen::BDCSVD<Matrix>(m).singularValues();
  return {sv(sv.size() - 1), sv(0)};
}

namespace {

[[noreturn]] void throw_singular(const std::string& what, double cond) {
  std::ostringstream oss;
  oss << what << " not invertible (estimated condition " << cond << ")";
  throw SingularBlockError(oss.str(), cond);
}

}  // namespace

Matrix gated_solve(const Matrix& a, const Matrix& rhs, ScalarField f,
                   double rtol, const std::string& what) {
  if (a.rows() != a.cols())
    throw ShapeError("gated_solve: matrix must be square");
  if (a.rows() != rhs.rows())
    throw ShapeError("gated_solve: right-hand side dimension mismatch");
  if (a.rows() == 0) return Matrix(0, rhs.cols());
  if (f == ScalarField::real) {
    Eigen::BDCSVD<RealMatrix> svd(a.real(),
                                  Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    SvdGate gate{sv(sv.size() - 1), sv(0)};
    if (!gate.ok(rtol)) throw_singular(what, gate.cond());
    RealMatrix x = svd.solve(RealMatrix(rhs.real()));
    return x.cast<Complex>();
  }
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  SvdGate gate{sv(sv.size() - 1), sv(0)};
  if (!gate.ok(rtol)) throw_singular(what, gate.cond());
  return svd.solve(rhs);
}

bool is_hermitian(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).norm() <= tol * (1.0 + m.norm());
}

}  // namespace detail

}  // namespace effop
