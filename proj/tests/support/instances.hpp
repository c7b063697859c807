#pragma once

// Seeded random instances shared by the unit and acceptance suites.
// Decompositions come from QR of seeded random matrices with the dimension
// split drawn uniformly; PSD operators are G*G + 1e-3 I to keep condition
// numbers tame. All seeds live here so every run is reproducible.

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "effop/conductivity.hpp"
#include "effop/multiphase.hpp"
#include "effop/zproblem.hpp"

namespace testsupport {

using effop::Complex;
using effop::Index;
using effop::Matrix;
using effop::Operator;
using effop::PencilPoint;
using effop::ScalarField;
using effop::Vector;

// Seed manifest.
inline constexpr std::uint64_t kSeedSchurOracle = 0xEFF00001;
inline constexpr std::uint64_t kSeedDuality = 0xEFF00002;
inline constexpr std::uint64_t kSeedVariational = 0xEFF00003;
inline constexpr std::uint64_t kSeedMonotone = 0xEFF00004;
inline constexpr std::uint64_t kSeedProp1 = 0xEFF00005;
inline constexpr std::uint64_t kSeedRoundTrip = 0xEFF00006;
inline constexpr std::uint64_t kSeedWiener = 0xEFF00007;
inline constexpr std::uint64_t kSeedHomogeneity = 0xEFF00008;
inline constexpr std::uint64_t kSeedGeometry = 0xEFF00009;
inline constexpr std::uint64_t kSeedUnit = 0xEFF0000A;

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline Index uniform_index(Rng& rng, Index lo, Index hi) {
  return lo + static_cast<Index>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

inline Matrix random_matrix(Rng& rng, Index rows, Index cols, ScalarField f) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j)
      m(i, j) = f == ScalarField::real ? Complex(g(rng), 0.0)
                                       : Complex(g(rng), g(rng));
  return m;
}

inline Vector random_vector(Rng& rng, Index n, ScalarField f) {
  return random_matrix(rng, n, 1, f).col(0);
}

inline Matrix random_unitary(Rng& rng, Index n, ScalarField f) {
  Matrix g = random_matrix(rng, n, n, f);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  // Fix column phases so the factorization is unique-ish.
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index i = 0; i < n; ++i) {
    Complex d = r(i, i);
    if (std::abs(d) > 0) q.col(i) *= d / std::abs(d);
  }
  return q;
}

// G*G + eps I with the default eps from the test manifest.
inline Operator random_psd(Rng& rng, Index n, ScalarField f,
                           double eps = 1e-3) {
  Matrix g = random_matrix(rng, n, n, f);
  Matrix m = g.adjoint() * g + eps * Matrix::Identity(n, n);
  m = 0.5 * (m + m.adjoint());
  return Operator(m, f);
}

// Random triple decomposition of a dim-dimensional space with subspace
// dimensions (u, e, j); u, e >= 1, j >= 0 drawn uniformly when unspecified.
inline effop::TripleDecomposition random_decomposition(Rng& rng, Index dim,
                                                       ScalarField f,
                                                       Index u = -1,
                                                       Index e = -1) {
  if (u < 0) u = uniform_index(rng, 1, dim - 1);
  if (e < 0) e = uniform_index(rng, 1, dim - u);
  const Index j = dim - u - e;
  Matrix q = random_unitary(rng, dim, f);
  return effop::TripleDecomposition(Operator(q.leftCols(u), f),
                                    Operator(q.middleCols(u, e), f),
                                    Operator(q.rightCols(j), f));
}

inline effop::ZProblem random_h2_problem(Rng& rng, Index dim, ScalarField f) {
  return effop::ZProblem(random_decomposition(rng, dim, f),
                         random_psd(rng, dim, f));
}

// (H0)-only instance: a generic operator, resampled until the E-block passes
// the invertibility gate with some margin.
inline effop::ZProblem random_h0_problem(Rng& rng, Index dim, ScalarField f) {
  auto space = random_decomposition(rng, dim, f);
  for (;;) {
    Operator l(random_matrix(rng, dim, dim, f), f);
    const Matrix l11 = space.basis(1).mat().adjoint() * l.mat() *
                       space.basis(1).mat();
    auto gate = effop::detail::singular_range(l11, f);
    if (gate.sigma_min > 1e-6 * gate.sigma_max)
      return effop::ZProblem(std::move(space), std::move(l));
  }
}

// Random orthogonal Z(n)-subspace collection on a dim-dimensional space.
inline effop::SubspaceCollection random_collection(Rng& rng, Index dim,
                                                   Index n_phases,
                                                   ScalarField f) {
  auto space = random_decomposition(rng, dim, f);
  Matrix w = random_unitary(rng, dim, f);
  // Split the columns of w into n groups, every phase non-empty.
  std::vector<Index> sizes(static_cast<std::size_t>(n_phases), 1);
  for (Index extra = dim - n_phases; extra > 0; --extra)
    sizes[static_cast<std::size_t>(rng() %
                                   static_cast<std::uint64_t>(n_phases))] += 1;
  std::vector<Operator> lambdas;
  Index off = 0;
  for (Index i = 0; i < n_phases; ++i) {
    Matrix wi = w.middleCols(off, sizes[static_cast<std::size_t>(i)]);
    lambdas.emplace_back(Matrix(wi * wi.adjoint()), f);
    off += sizes[static_cast<std::size_t>(i)];
  }
  return effop::SubspaceCollection(std::move(space), std::move(lambdas));
}

// Random point of the admissible domain D: a rotated tuple of upper
// half-plane points.
inline PencilPoint random_domain_point(Rng& rng, Index n) {
  const double theta = uniform(rng, 0.0, 2.0 * 3.141592653589793);
  const Complex rot = std::polar(1.0, theta);
  PencilPoint z;
  z.z.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i)
    z.z.push_back(rot * Complex(uniform(rng, -1.0, 1.0),
                                uniform(rng, 0.2, 2.0)));
  return z;
}

inline PencilPoint random_positive_point(Rng& rng, Index n, double lo = 0.5,
                                         double hi = 4.0) {
  PencilPoint z;
  for (Index i = 0; i < n; ++i) z.z.emplace_back(uniform(rng, lo, hi), 0.0);
  return z;
}

// Normalized pencil with prescribed coefficient ranks: factors C_i of the
// requested rank are normalized by S^{-1/2}, S = sum C_i^* C_i, so the
// coefficients stay PSD with the same ranks and sum to the identity. The
// ranks must sum to at least h0 + h1 for S to be invertible.
inline effop::NormalizedPencil random_pencil(Rng& rng, Index h0, Index h1,
                                             const std::vector<Index>& ranks,
                                             ScalarField f) {
  const Index dim = h0 + h1;
  std::vector<Matrix> gram;
  Matrix s = Matrix::Zero(dim, dim);
  for (Index r : ranks) {
    Matrix c = random_matrix(rng, r, dim, f);
    Matrix g = c.adjoint() * c;
    g = 0.5 * (g + g.adjoint());
    s += g;
    gram.push_back(std::move(g));
  }
  auto eig = effop::detail::sym_eig(s, f);
  if (eig.values.minCoeff() <= 0.0)
    throw std::runtime_error("random_pencil: ranks do not cover the space");
  Matrix isqrt = eig.vectors *
                 eig.values.cwiseSqrt().cwiseInverse().asDiagonal().toDenseMatrix().cast<Complex>() *
                 eig.vectors.adjoint();
  std::vector<Operator> coeffs;
  for (auto& g : gram) {
    Matrix a = isqrt * g * isqrt;
    a = 0.5 * (a + a.adjoint());
    coeffs.emplace_back(std::move(a), f);
  }
  return effop::NormalizedPencil(std::move(coeffs),
                                 effop::BlockPartition::two(h0, h1));
}

}  // namespace testsupport
