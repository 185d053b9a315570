#include "doctest.h"

#include "qcalab/algebra.hpp"

using namespace qcalab;

namespace {

const Mat I2 = Mat::Identity(2, 2);

}  // namespace

TEST_CASE("closure dimensions") {
  const Region r({0, 1}, true);
  const std::vector<int> dims{2, 2};
  // X, Z on the first qubit generate M_2 (x) I
  CHECK(algebra_closure(r, dims, {kron(pauli('X'), I2), kron(pauli('Z'), I2)}).dim() == 4);
  // XX and ZZ commute: span{I, XX, ZZ, YY}
  const OperatorAlgebra zz = algebra_closure(r, dims, {kron(pauli('X'), pauli('X')), kron(pauli('Z'), pauli('Z'))});
  CHECK(zz.dim() == 4);
  CHECK(zz.structure().center_dim == 4);
  // Z alone: diagonal algebra of dimension 2
  CHECK(algebra_closure(r, dims, {kron(pauli('Z'), I2)}).dim() == 2);
}

TEST_CASE("Wedderburn data of M_2 (x) I_2 and of a direct sum") {
  const Region r({0, 1}, true);
  const OperatorAlgebra a = algebra_closure(r, {2, 2}, {kron(I2, pauli('X')), kron(I2, pauli('Z'))});
  const Wedderburn& w = a.structure();
  REQUIRE(w.factors.size() == 1);
  CHECK(w.factors[0].k == 2);
  CHECK(w.factors[0].m == 2);
  CHECK(w.factors[0].unit_residual() < 1e-10);
  // block diagonal M_1 (+) M_3 inside M_4
  Mat p = Mat::Zero(4, 4);
  p(0, 0) = 1;
  Rng rng(1);
  Mat g = random_complex(4, 4, rng);
  g.row(0).setZero();
  g.col(0).setZero();
  const OperatorAlgebra b = algebra_closure(r, {2, 2}, {p, g, Mat(g.adjoint())});
  CHECK(b.dim() == 10);
  CHECK(b.structure().factors.size() == 2);
}

TEST_CASE("relative commutant of a factor") {
  const Region r({0, 1}, true);
  const OperatorAlgebra a = algebra_closure(r, {2, 2}, {kron(pauli('X'), I2), kron(pauli('Z'), I2)});
  const Factor c = commutant_factor(a.structure().factors[0]);
  CHECK(c.k == 2);
  for (const Mat& e : c.units) CHECK((e - kron(Mat(Mat::Identity(2, 2)), Mat(e.block(0, 0, 2, 2)))).norm() < 1e-10);
}

TEST_CASE("inner unitary of a conjugation") {
  Rng rng(2);
  const Mat u0 = haar_unitary(4, rng);
  const Factor f = full_factor(4);
  const Mat u = inner_unitary_of_automorphism(f, [&](const Mat& a) { return Mat(u0.adjoint() * a * u0); });
  CHECK(phase_distance(u, u0) < 1e-10);
  // transpose is not multiplicative
  CHECK_THROWS_AS(inner_unitary_of_automorphism(f, [](const Mat& a) { return Mat(a.transpose()); }), Error);
}

TEST_CASE("factor isomorphism carries matrix units") {
  Rng rng(3);
  const Factor s = full_factor(3);
  const Mat v = haar_unitary(3, rng);
  Factor t = s;
  for (Mat& e : t.units) e = v * e * v.adjoint();
  const AlgebraIso iso = factor_iso(s, t);
  CHECK(iso.residual < 1e-10);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK((iso.unitary_witness * s.unit(i, j) * iso.unitary_witness.adjoint() - t.unit(i, j)).norm() < 1e-10);
}

TEST_CASE("near inclusion of a rotated algebra") {
  const ChainSpec c = ChainSpec::uniform(2, 2, Boundary::Open);
  const Region r({0, 1}, true);
  const double t = 0.01;
  const Mat w = exp_i_hermitian(kron(pauli('X'), pauli('X')), t);
  const OperatorAlgebra a = algebra_closure(r, {2, 2}, {w * kron(pauli('Z'), I2) * w.adjoint(), kron(pauli('X'), I2)});
  // Z rotates into Z cos 2t + (Y X) sin 2t; basis elements sit at most 2 sin 2t away
  const double eps = near_inclusion_eps(c, a, Region({0}));
  CHECK(eps > 0.25 * std::sin(2 * t));
  CHECK(eps <= 2.0 * std::sin(2 * t));
  CHECK(near_inclusion_eps(c, a, Region({0, 1})) < 1e-12);
}

TEST_CASE("closure ignores rounding residue of vanishing generators") {
  Rng rng(31);
  Mat noise = random_complex(4, 4, rng) * 1e-17;
  const Mat x = kron(pauli('X'), Mat::Identity(2, 2)), z = kron(pauli('Z'), Mat::Identity(2, 2));
  const OperatorAlgebra a = algebra_closure(Region({0, 1}), {2, 2}, {x, z, noise});
  CHECK(a.dim() == 4);
}
