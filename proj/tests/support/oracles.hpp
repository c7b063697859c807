#pragma once

// Independent oracles used to freeze expected values. These deliberately
// avoid the Schur-complement code paths they check: the Z-problem is solved
// as one dense full-space linear system in the unknown triple (J0, E, J).

#include <Eigen/Dense>

#include "effop/zproblem.hpp"

namespace testsupport {

// Solve J0 + J = L(E0 + E) for (j0, e, j) in subspace coordinates by direct
// elimination of the square system [B0 | -L B1 | B2] x = L B0 e0.
inline effop::ZSolution full_space_solve(const effop::ZProblem& p,
                                         const effop::Vector& e0) {
  using effop::Index;
  using effop::Matrix;
  using effop::Vector;
  const auto& sp = p.space;
  const Index u = sp.subdim(0), e = sp.subdim(1), j = sp.subdim(2);
  Matrix k(sp.dim(), sp.dim());
  k << sp.basis(0).mat(), -(p.op.mat() * sp.basis(1).mat()),
      sp.basis(2).mat();
  Vector rhs = p.op.mat() * (sp.basis(0).mat() * e0);
  Vector x = k.colPivHouseholderQr().solve(rhs);
  effop::ZSolution s;
  s.j0 = x.segment(0, u);
  s.e = x.segment(u, e);
  s.j = x.segment(u + e, j);
  return s;
}

}  // namespace testsupport
