#include "doctest.h"

#include <cmath>

#include "qcalab/qca.hpp"
#include "qcalab/stability.hpp"

using namespace qcalab;

TEST_CASE("conjugation distance of a phase gate") {
  // ||ad_u - ad_v|| is the diameter of the smallest disk around spec(v u^dag)
  Mat v = Mat::Identity(2, 2);
  v(1, 1) = std::polar(1.0, 0.2);
  CHECK(conjugation_distance(Mat::Identity(2, 2), v) == doctest::Approx(std::abs(1.0 - std::polar(1.0, 0.2))));
  CHECK(conjugation_distance(v, cplx(0.0, 1.0) * v) < 1e-14);
}

TEST_CASE("enclosing circle") {
  const auto [c, r] = enclosing_circle({cplx(0, 0), cplx(2, 0), cplx(1, 0.1)});
  CHECK(std::abs(c - cplx(1, 0)) < 1e-12);
  CHECK(r == doctest::Approx(1.0));
  const auto [c3, r3] = enclosing_circle({cplx(1, 0), cplx(-0.5, std::sqrt(3) / 2), cplx(-0.5, -std::sqrt(3) / 2)});
  CHECK(std::abs(c3) < 1e-12);
  CHECK(r3 == doctest::Approx(1.0));
}

TEST_CASE("make_inner on random near-inclusions") {
  Rng rng(1);
  for (int k = 0; k < 15; ++k) {
    const StabilityTrial t = make_inner_trial(rng);
    CHECK(t.eps <= 0.3);
    CHECK(t.residual <= 1e-8);
    CHECK(t.dist_identity <= std::sqrt(2.0) * t.eps + 1e-12);
  }
}

TEST_CASE("rotate_into on random near-inclusions, both routes") {
  Rng rng(2);
  for (int k = 0; k < 10; ++k) {
    const StabilityTrial t = rotate_into_trial(rng);
    CHECK(t.eps <= 1.0 / 64.0);
    CHECK(t.residual <= 1e-8);
    CHECK(t.dist_identity <= 12.0 * t.eps + 1e-12);
  }
  // matrix-unit lifting agrees with the dilation on one instance
  const ChainSpec c = ChainSpec::uniform(3, 2, Boundary::Open);
  const Mat e = exp_i_hermitian(kron(kron(pauli('X'), Mat(Mat::Identity(2, 2))), pauli('X')), 0.003);
  std::vector<Mat> g;
  for (char p : {'X', 'Z'}) g.push_back(e * kron(kron(pauli(p), Mat(Mat::Identity(2, 2))), Mat(Mat::Identity(2, 2))) * e.adjoint());
  const OperatorAlgebra A = algebra_closure(Region({0, 1, 2}, true), {2, 2, 2}, g);
  RotateOptions lift;
  lift.force_lifting = true;
  const RotateResult r1 = rotate_into(c, A, Region({0, 1}));
  const RotateResult r2 = rotate_into(c, A, Region({0, 1}), lift);
  CHECK(r1.dilation);
  CHECK_FALSE(r2.dilation);
  CHECK(r1.inclusion_residual < 1e-8);
  CHECK(r2.inclusion_residual < 1e-8);
  CHECK(r2.dist_identity <= 12.0 * r2.eps_in);
}

TEST_CASE("rotate_into refuses large near-inclusions") {
  const ChainSpec c = ChainSpec::uniform(2, 2, Boundary::Open);
  const Mat h = exp_i_hermitian(kron(pauli('X'), pauli('X')), 0.5);
  const OperatorAlgebra A =
      algebra_closure(Region({0, 1}, true), {2, 2}, {Mat(h * kron(pauli('Z'), Mat(Mat::Identity(2, 2))) * h.adjoint())});
  CHECK_THROWS_AS(rotate_into(c, A, Region({0})), Error);
}

TEST_CASE("make_inner refuses eps >= 1") {
  const OperatorAlgebra A = OperatorAlgebra::full(ChainSpec::uniform(1, 2, Boundary::Open), Region({0}, true));
  const Mat x = pauli('X');
  const NearHomomorphism h = NearHomomorphism::make({A}, {[x](const Mat& m) { return Mat(x * m * x); }});
  try {
    make_inner(h);
    FAIL("expected EpsilonTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EpsilonTooLarge);
  }
}

TEST_CASE("restricted distance brackets the exact value") {
  const ChainSpec c = ChainSpec::uniform(4, 2);
  Rng rng(3);
  const Mat u1 = random_two_layer_circuit(c, rng).unitary();
  // a local phase on site 1 changes the map only near site 1
  const Mat z = exp_i_hermitian(kernels::embed(pauli('Z'), SplitIndex({2, 2, 2, 2}, {1})), 0.05);
  const Mat u2 = u1 * z;
  const RestrictedDistance all = restricted_distance(c, u1, u2, Region::all(c));
  const double exact = conjugation_distance(u1, u2);
  CHECK(all.lower <= exact + 1e-9);
  CHECK(all.upper >= exact - 1e-9);
  CHECK(all.lower >= 0.5 * exact);
  const RestrictedDistance none = restricted_distance(c, u1, u1, Region({0}));
  CHECK(none.upper < 1e-12);
}

TEST_CASE("commutator lemma suites") {
  const LemmaSuite s = commutator_lemma_suite(7, 300);
  CHECK(s.powers_violations == 0);
  CHECK(s.polar_violations == 0);
  CHECK(s.powers_max_ratio <= 1.0);
}
