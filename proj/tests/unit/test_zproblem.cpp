#include <doctest.h>

#include <cmath>

#include "effop/zproblem.hpp"
#include "support/instances.hpp"
#include "support/oracles.hpp"

using namespace effop;
using testsupport::Rng;

namespace {

// H = K^3 with U, E, J the coordinate axes and L = [[2,1,0],[1,3,0],[0,0,5]].
ZProblem axis_problem() {
  Matrix id = Matrix::Identity(3, 3);
  TripleDecomposition sp(Operator(id.col(0), ScalarField::real),
                         Operator(id.col(1), ScalarField::real),
                         Operator(id.col(2), ScalarField::real));
  RealMatrix l(3, 3);
  l << 2, 1, 0, 1, 3, 0, 0, 0, 5;
  return ZProblem(sp, Operator::from_real(l));
}

Vector scalar_vec(double x) {
  Vector v(1);
  v << Complex(x);
  return v;
}

}  // namespace

TEST_CASE("blocks read off compressions and reassemble") {
  ZProblem p = axis_problem();
  Blocks3 b = blocks(p);
  CHECK(std::abs(b(0, 0)(0, 0) - Complex(2.0)) == 0.0);
  CHECK(std::abs(b(0, 1)(0, 0) - Complex(1.0)) == 0.0);
  CHECK(std::abs(b(1, 1)(0, 0) - Complex(3.0)) == 0.0);
  CHECK(std::abs(b(2, 2)(0, 0) - Complex(5.0)) == 0.0);
  CHECK(std::abs(b(0, 2)(0, 0)) == 0.0);
  CHECK(std::abs(b(2, 1)(0, 0)) == 0.0);

  // identity decomposes into identity blocks
  ZProblem pid(p.space, Operator::identity(3, ScalarField::real));
  Blocks3 bi = blocks(pid);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(std::abs(bi(i, j)(0, 0) - (i == j ? Complex(1) : Complex(0))) ==
            0.0);

  // reassembly recovers L on a random instance
  Rng rng(testsupport::kSeedUnit + 10);
  ZProblem q = testsupport::random_h0_problem(rng, 9, ScalarField::cplx);
  Blocks3 bq = blocks(q);
  Matrix re = Matrix::Zero(9, 9);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      re += q.space.basis(i).mat() * bq(i, j).mat() *
            q.space.basis(j).mat().adjoint();
  CHECK(relative_residual(re, q.op.mat()) < 1e-13);

  // blocks is total even when the E-block is singular
  RealMatrix sing = RealMatrix::Zero(3, 3);
  sing(0, 0) = 1;
  sing(2, 2) = 1;
  Blocks3 bs = blocks(ZProblem(p.space, Operator::from_real(sing)));
  CHECK(std::abs(bs(1, 1)(0, 0)) == 0.0);
}

TEST_CASE("check_hypotheses and the implication chain") {
  ZProblem p = axis_problem();
  HypothesisReport r = check_hypotheses(p);
  CHECK(r.h0);
  CHECK(r.h1);
  CHECK(r.h2);  // eigenvalues (5 +- sqrt 5)/2 and 5, all positive
  REQUIRE(r.lm.has_value());
  CHECK(*r.lm == 0.0);

  ZProblem pid(p.space, Operator::identity(3, ScalarField::real));
  HypothesisReport ri = check_hypotheses(pid, 0.5);
  CHECK(ri.h0);
  CHECK(ri.h2);
  CHECK(ri.lm.has_value());

  RealMatrix d = RealMatrix::Zero(3, 3);
  d(0, 0) = 1;
  d(2, 2) = 1;  // L11 = 0 on the E axis
  HypothesisReport rd =
      check_hypotheses(ZProblem(p.space, Operator::from_real(d)));
  CHECK(!rd.h0);
  CHECK(!rd.h1);
  CHECK(!rd.h2);

  // chain on random instances, including non-self-adjoint ones
  Rng rng(testsupport::kSeedUnit + 11);
  for (int rep = 0; rep < 10; ++rep) {
    ZProblem q = testsupport::random_h0_problem(rng, 8, ScalarField::cplx);
    HypothesisReport h = check_hypotheses(q, 1e-9, 16);
    CHECK((!h.h2 || h.h1));
    CHECK((!h.h1 || h.h0));
  }
}

TEST_CASE("solve: closed-form example and uniqueness") {
  ZProblem p = axis_problem();
  ZSolution s = solve(p, scalar_vec(1.0));
  CHECK(std::abs(s.j0(0) - Complex(5.0 / 3.0)) < 1e-15);
  CHECK(std::abs(s.e(0) - Complex(-1.0 / 3.0)) < 1e-15);
  CHECK(std::abs(s.j(0)) < 1e-15);

  // L = I: J0 = E0, E = 0, J = 0
  ZProblem pid(p.space, Operator::identity(3, ScalarField::real));
  ZSolution si = solve(pid, scalar_vec(2.5));
  CHECK(std::abs(si.j0(0) - Complex(2.5)) < 1e-15);
  CHECK(std::abs(si.e(0)) == 0.0);

  // E0 = 0 gives the zero triple
  ZSolution sz = solve(p, scalar_vec(0.0));
  CHECK(sz.j0.norm() == 0.0);
  CHECK(sz.e.norm() == 0.0);
  CHECK(sz.j.norm() == 0.0);

  // residual invariant in full space + agreement with the dense oracle
  Rng rng(testsupport::kSeedUnit + 12);
  for (int rep = 0; rep < 10; ++rep) {
    ZProblem q = testsupport::random_h0_problem(rng, 12, ScalarField::cplx);
    Vector e0 =
        testsupport::random_vector(rng, q.space.subdim(0), ScalarField::cplx);
    ZSolution sq = solve(q, e0);
    Vector lhs = q.space.lift(0, sq.j0) + q.space.lift(2, sq.j);
    Vector rhs = q.op.mat() * (q.space.lift(0, e0) + q.space.lift(1, sq.e));
    CHECK((lhs - rhs).norm() <= 1e-9 * q.op.mat().norm() * (1.0 + e0.norm()));

    ZSolution oracle = testsupport::full_space_solve(q, e0);
    CHECK((sq.j0 - oracle.j0).norm() < 1e-8 * (1.0 + oracle.j0.norm()));
    CHECK((sq.e - oracle.e).norm() < 1e-8 * (1.0 + oracle.e.norm()));
    CHECK((sq.j - oracle.j).norm() < 1e-8 * (1.0 + oracle.j.norm()));

    // solving twice is deterministic; perturbing E breaks the E-row equation
    ZSolution sq2 = solve(q, e0);
    CHECK((sq.e - sq2.e).norm() == 0.0);
    Blocks3 bq = blocks(q);
    Vector row = bq(1, 0).mat() * e0 + bq(1, 1).mat() * sq.e;
    CHECK(row.norm() < 1e-9 * (1.0 + q.op.mat().norm()));
    Vector delta =
        testsupport::random_vector(rng, sq.e.size(), ScalarField::cplx);
    Vector row_bad = bq(1, 0).mat() * e0 + bq(1, 1).mat() * (sq.e + delta);
    CHECK(row_bad.norm() > 1e-6);
  }

  // (H0) failure names L11
  RealMatrix d = RealMatrix::Zero(3, 3);
  d(0, 0) = 1;
  CHECK_THROWS_AS(
      solve(ZProblem(p.space, Operator::from_real(d)), scalar_vec(1.0)),
      SingularBlockError);
}

TEST_CASE("effective_operator") {
  ZProblem p = axis_problem();
  Operator eff = effective_operator(p);
  CHECK(eff.rows() == 1);
  CHECK(std::abs(eff(0, 0) - Complex(5.0 / 3.0)) < 1e-15);

  // L = c I has effective operator c I_U
  ZProblem pc(p.space,
              Complex(3.25) * Operator::identity(3, ScalarField::real));
  CHECK(std::abs(effective_operator(pc)(0, 0) - Complex(3.25)) < 1e-15);

  // block-diagonal L: L* = L00
  RealMatrix bd(3, 3);
  bd << 4, 0, 0, 0, 2, 0, 0, 0, 9;
  CHECK(std::abs(
            effective_operator(ZProblem(p.space, Operator::from_real(bd)))(0, 0) -
            Complex(4.0)) < 1e-15);

  // J0 = L* E0 across solves; self-adjoint under (H1)
  Rng rng(testsupport::kSeedUnit + 13);
  for (int rep = 0; rep < 10; ++rep) {
    ZProblem q = testsupport::random_h2_problem(rng, 14, ScalarField::cplx);
    Operator qe = effective_operator(q);
    CHECK((qe.mat() - qe.mat().adjoint()).norm() <
          1e-10 * (1.0 + qe.mat().norm()));
    Vector e0 =
        testsupport::random_vector(rng, q.space.subdim(0), ScalarField::cplx);
    ZSolution s = solve(q, e0);
    CHECK((qe.mat() * e0 - s.j0).norm() < 1e-9 * (1.0 + s.j0.norm()));
  }
}

TEST_CASE("dual problem and duality formula") {
  ZProblem p = axis_problem();
  ZProblem d = dual(p);
  RealMatrix linv(3, 3);
  linv << 0.6, -0.2, 0, -0.2, 0.4, 0, 0, 0, 0.2;
  CHECK(relative_residual(d.op.mat(), linv.cast<Complex>()) < 1e-14);
  CHECK(d.space.subdim(1) == 1);
  CHECK((d.space.basis(1).mat() - p.space.basis(2).mat()).norm() == 0.0);

  // dual effective operator is [3/5] = (5/3)^{-1}
  Operator de = effective_operator(d);
  CHECK(std::abs(de(0, 0) - Complex(0.6)) < 1e-14);
  CHECK(duality_check(p) < 1e-12);

  // involution: dual(dual(p)) restores L and the subspace order
  ZProblem dd = dual(d);
  CHECK(relative_residual(dd.op.mat(), p.op.mat()) < 1e-13);
  CHECK(dd.space.same_decomposition(p.space));

  // L = I is self-dual
  ZProblem pid(p.space, Operator::identity(3, ScalarField::real));
  CHECK(duality_check(pid) < 1e-15);

  // property: duality residual small on random (H2) instances
  Rng rng(testsupport::kSeedUnit + 14);
  for (int rep = 0; rep < 10; ++rep) {
    ZProblem q = testsupport::random_h2_problem(
        rng, testsupport::uniform_index(rng, 4, 30), ScalarField::cplx);
    CHECK(duality_check(q) <= 1e-8);
  }

  // singular L is rejected
  RealMatrix z = RealMatrix::Zero(3, 3);
  CHECK_THROWS_AS(dual(ZProblem(p.space, Operator::from_real(z))),
                  SingularBlockError);
}

TEST_CASE("dirichlet energy and minimization") {
  ZProblem p = axis_problem();
  CHECK(std::abs(dirichlet_energy(p, scalar_vec(1.0), scalar_vec(-1.0 / 3.0)) -
                 Complex(5.0 / 3.0)) < 1e-15);
  CHECK(std::abs(dirichlet_energy(p, scalar_vec(0.0), scalar_vec(0.0))) == 0.0);
  CHECK(std::abs(dirichlet_energy(p, scalar_vec(1.0), scalar_vec(0.0)) -
                 Complex(2.0)) < 1e-15);

  Rng rng(testsupport::kSeedVariational);
  for (int rep = 0; rep < 5; ++rep) {
    ZProblem q = testsupport::random_h2_problem(rng, 12, ScalarField::cplx);
    Vector e0 =
        testsupport::random_vector(rng, q.space.subdim(0), ScalarField::cplx);
    ZSolution s = solve(q, e0);
    const double emin = dirichlet_energy(q, e0, s.e).real();
    Operator eff = effective_operator(q);
    const double quad = (e0.adjoint() * (eff.mat() * e0)).value().real();
    CHECK(std::abs(emin - quad) <= 1e-9 * (1.0 + std::abs(quad)));
    for (int k = 0; k < 20; ++k) {
      Vector other =
          s.e + testsupport::random_vector(rng, s.e.size(), ScalarField::cplx);
      CHECK(emin <= dirichlet_energy(q, e0, other).real() + 1e-10);
    }
  }
}

TEST_CASE("thomson bounds and minimization") {
  ZProblem p = axis_problem();
  ThomsonBounds tb = thomson_bounds(p);
  CHECK(std::abs(tb.lower(0, 0) - Complex(5.0 / 3.0)) < 1e-14);
  CHECK(std::abs(tb.upper(0, 0) - Complex(2.0)) < 1e-14);

  // L = c I collapses the bounds
  ZProblem pc(p.space,
              Complex(2.0) * Operator::identity(3, ScalarField::real));
  ThomsonBounds tc = thomson_bounds(pc);
  CHECK(std::abs(tc.lower(0, 0) - Complex(2.0)) < 1e-14);
  CHECK(std::abs(tc.upper(0, 0) - Complex(2.0)) < 1e-14);

  Rng rng(testsupport::kSeedVariational + 1);
  for (int rep = 0; rep < 8; ++rep) {
    ZProblem q = testsupport::random_h2_problem(
        rng, testsupport::uniform_index(rng, 4, 24), ScalarField::cplx);
    ThomsonBounds t = thomson_bounds(q);
    Operator eff = effective_operator(q);
    Operator zero = Operator::zero(eff.rows(), eff.rows(), ScalarField::cplx);
    CHECK(loewner_leq(zero, t.lower, 1e-9));
    CHECK(loewner_leq(t.lower, eff, 1e-9));
    CHECK(loewner_leq(eff, t.upper, 1e-9));

    // Thomson minimum: (J0, L*^{-1} J0) <= (J0+J', L^{-1}(J0+J'))
    Vector j0 =
        testsupport::random_vector(rng, q.space.subdim(0), ScalarField::cplx);
    Operator effinv = inverse(eff);
    const double thomson = (j0.adjoint() * (effinv.mat() * j0)).value().real();
    Operator linv = inverse(q.op);
    ZProblem qd(q.space.with_swapped_ej(), linv);
    ZSolution sd = solve(qd, j0);
    for (int k = 0; k < 10; ++k) {
      Vector jp =
          sd.e + testsupport::random_vector(rng, sd.e.size(), ScalarField::cplx);
      Vector full = q.space.lift(0, j0) + q.space.lift(2, jp);
      const double energy =
          (full.adjoint() * (linv.mat() * full)).value().real();
      CHECK(thomson <= energy + 1e-9 * (1.0 + std::abs(energy)));
    }
  }

  // (H2) failure rejected
  RealMatrix indef(3, 3);
  indef << 1, 0, 0, 0, -1, 0, 0, 0, 1;
  CHECK_THROWS_AS(
      thomson_bounds(ZProblem(p.space, Operator::from_real(indef))),
      ValidationError);
}

TEST_CASE("kdm conjugation identity") {
  // R = B0 (iI) B0^* + B2 S B1^* - B1 S^* B2^* is skew-unitary and maps
  // U -> U, E -> J, J -> E on a decomposition with dim E = dim J.
  Rng rng(testsupport::kSeedUnit + 15);
  const Index u = 2, e = 3;
  const Index dim = u + 2 * e;
  auto sp =
      testsupport::random_decomposition(rng, dim, ScalarField::cplx, u, e);
  Matrix s = testsupport::random_unitary(rng, e, ScalarField::cplx);
  const Matrix b0 = sp.basis(0).mat();
  const Matrix b1 = sp.basis(1).mat();
  const Matrix b2 = sp.basis(2).mat();
  Matrix r = Complex(0, 1) * (b0 * b0.adjoint()) + b2 * s * b1.adjoint() -
             b1 * s.adjoint() * b2.adjoint();
  Operator rot(r, ScalarField::cplx);

  for (int rep = 0; rep < 5; ++rep) {
    ZProblem q(sp, testsupport::random_psd(rng, dim, ScalarField::cplx));
    Operator eff = effective_operator(q);
    Operator conj = kdm_conjugate(q, rot);
    CHECK(relative_residual(conj.mat(), eff.mat()) <= 1e-8);
  }

  ZProblem q(sp, testsupport::random_psd(rng, dim, ScalarField::cplx));
  Operator not_skew = Operator::identity(dim, ScalarField::cplx);
  CHECK_THROWS_WITH_AS(kdm_conjugate(q, not_skew),
                       "kdm rotation: R is not skew (R* != -R)",
                       ValidationError);

  // skew-unitary but preserving E instead of exchanging it with J
  Matrix bad = Complex(0, 1) *
               (b0 * b0.adjoint() + b1 * b1.adjoint() + b2 * b2.adjoint());
  CHECK_THROWS_WITH_AS(kdm_conjugate(q, Operator(bad, ScalarField::cplx)),
                       "kdm rotation: R does not map E into J",
                       ValidationError);
}

TEST_CASE("monotonicity and concavity") {
  Rng rng(testsupport::kSeedMonotone);
  const Index dim = 12;
  auto sp = testsupport::random_decomposition(rng, dim, ScalarField::cplx);

  ZProblem pl(sp, Operator::identity(dim, ScalarField::cplx));
  ZProblem pm(sp, Complex(2.0) * Operator::identity(dim, ScalarField::cplx));
  auto mc = monotonicity_concavity_check(pl, pm, 0.5);
  REQUIRE(mc.monotone.has_value());
  CHECK(*mc.monotone);
  CHECK(mc.concave);

  // t = 0 and t = 1 are trivially concave (equality)
  CHECK(monotonicity_concavity_check(pl, pm, 0.0).concave);
  CHECK(monotonicity_concavity_check(pl, pm, 1.0).concave);

  // random ordered pairs: M = L + H*H
  for (int rep = 0; rep < 8; ++rep) {
    Operator l = testsupport::random_psd(rng, dim, ScalarField::cplx);
    Matrix h = testsupport::random_matrix(rng, dim, dim, ScalarField::cplx);
    Matrix gap = h.adjoint() * h;
    Operator m(Matrix(l.mat() + 0.5 * (gap + gap.adjoint())),
               ScalarField::cplx);
    auto r = monotonicity_concavity_check(ZProblem(sp, l), ZProblem(sp, m),
                                          testsupport::uniform(rng, 0.0, 1.0));
    REQUIRE(r.monotone.has_value());
    CHECK(*r.monotone);
    CHECK(r.concave);
  }

  // incomparable pair reports NA but still checks concavity
  RealMatrix da = RealMatrix::Identity(dim, dim);
  RealMatrix db = RealMatrix::Identity(dim, dim);
  da(0, 0) = 3.0;
  db(1, 1) = 3.0;
  auto rn = monotonicity_concavity_check(
      ZProblem(sp, Operator::from_real(da).promoted()),
      ZProblem(sp, Operator::from_real(db).promoted()), 0.5);
  CHECK(!rn.monotone.has_value());
  CHECK(rn.concave);

  // mismatched decompositions are rejected
  auto sp2 = testsupport::random_decomposition(rng, dim, ScalarField::cplx);
  CHECK_THROWS_AS(
      monotonicity_concavity_check(
          ZProblem(sp, Operator::identity(dim, ScalarField::cplx)),
          ZProblem(sp2, Operator::identity(dim, ScalarField::cplx)), 0.5),
      ValidationError);
}
