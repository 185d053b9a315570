#include "doctest.h"

#include <cmath>

#include "qcalab/alpu.hpp"
#include "qcalab/qca.hpp"

using namespace qcalab;

namespace {

ChainOperator single(const ChainSpec& c, int s, char p) { return make_op(c, Region({s}), pauli(p)); }

}  // namespace

TEST_CASE("field evolution rotates X towards Y") {
  const ChainSpec c = ChainSpec::uniform(3, 2);
  const double h = 0.7;
  for (double t : {0.0, 0.3, 1.1}) {
    const Automorphism a = evolve(field_model(c, h), t);
    const ChainOperator y = a.apply(single(c, 1, 'X'));
    const Mat expect = std::cos(2 * h * t) * pauli('X') - std::sin(2 * h * t) * pauli('Y');
    CHECK(op_distance(c, y, make_op(c, Region({1}), expect)) < 1e-12);
  }
}

TEST_CASE("schedules run in order and stop at t") {
  const ChainSpec c = ChainSpec::uniform(2, 2, Boundary::Open);
  HamiltonianModel m;
  m.chain = c;
  m.terms.push_back(make_term(c, {0}, pauli('Z')));
  m.terms.push_back(make_term(c, {0}, pauli('X')));
  m.schedule = {Segment{0.4, {0}}, Segment{0.6, {1}}};
  const Mat z = make_op(c, Region({0}), pauli('Z')).m, x = make_op(c, Region({0}), pauli('X')).m;
  const Mat u1 = exp_i_hermitian(kron(z, Mat::Identity(2, 2)), -0.4);
  const Mat u2 = exp_i_hermitian(kron(x, Mat::Identity(2, 2)), -0.6);
  CHECK(phase_distance(evolve(m, 1.0).unitary(), u2 * u1) < 1e-12);
  CHECK(phase_distance(evolve(m, 0.4).unitary(), u1) < 1e-12);
  const Mat u2h = exp_i_hermitian(kron(x, Mat::Identity(2, 2)), -0.1);
  CHECK(phase_distance(evolve(m, 0.5).unitary(), u2h * u1) < 1e-12);
  CHECK(evolve(m, 1.0).has_circuit());
}

TEST_CASE("overlapping terms evolve densely") {
  const ChainSpec c = ChainSpec::uniform(4, 2);
  const HamiltonianModel h = heisenberg_model(c, 1.0, 0.2);
  const Automorphism a = evolve(h, 0.3);
  CHECK(phase_distance(a.unitary(), exp_i_hermitian(h.dense(), -0.3)) < 1e-10);
  CHECK(evolve(h, 0.0).unitary().isIdentity(1e-14));
}

TEST_CASE("tails of exact maps") {
  const ChainSpec c = ChainSpec::uniform(8, 2);
  const TailProfile sh = measure_tails(shift_qca(c, 1), 3);
  CHECK(sh.certified_radius == 1);
  CHECK(sh.f_hat[0] == doctest::Approx(1.0).epsilon(1e-9));
  for (int r = 1; r <= 3; ++r) CHECK(sh.f_hat[r] == 0.0);

  Rng rng(21);
  const Automorphism q = random_two_layer_circuit(c, rng);
  for (TailMethod m : {TailMethod::RegionDistance, TailMethod::CommutatorSup}) {
    const TailProfile tp = measure_tails(q, 4, m);
    for (int r = 0; r < 4; ++r) CHECK(tp.f_hat[r] >= tp.f_hat[r + 1]);
    CHECK(tp.f_hat[2] == 0.0);
    CHECK(tp.f_hat[0] > 0.0);
  }
}

TEST_CASE("tails of a short exponential-decay evolution are small and decreasing") {
  const ChainSpec c = ChainSpec::uniform(8, 2);
  const Automorphism a = evolve(expdecay_model(c, 1.0, 0.5, 3, 0.3), 0.2);
  const TailProfile tp = measure_tails(a, 3);
  CHECK(tp.certified_radius == -1);
  CHECK(tp.f_hat[0] < 1.0);
  CHECK(tp.f_hat[3] < tp.f_hat[1]);
}

TEST_CASE("tail formula closed forms") {
  auto spike = [](double x) { return x == 1.0 ? 1.0 : 0.0; };
  CHECK(lr_tail_formula(spike, 0) == doctest::Approx(4.0));
  CHECK(lr_tail_formula(spike, 1) == 0.0);

  for (int r : {0, 2, 5}) {
    const double q = std::exp(-1.0);
    const double expect = 4.0 * std::exp(-(r + 1.0)) / ((1 - q) * (1 - q));
    CHECK(lr_tail_formula([](double x) { return std::exp(-x); }, r) == doctest::Approx(expect).epsilon(1e-10));
  }
  const double zeta = 4.0 * (std::riemann_zeta(3.0) - std::riemann_zeta(4.0));
  const DecayFn p4 = [](double x) { return std::pow(1.0 + x, -4.0); };
  CHECK(lr_tail_formula(p4, 0) == doctest::Approx(zeta).epsilon(1e-9));
  double prev = 1e300;
  for (int r = 0; r < 8; ++r) {
    const double v = lr_tail_formula(p4, r);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("tail formula rejects divergent profiles") {
  try {
    lr_tail_formula([](double x) { return 1.0 / (1.0 + x); }, 0);
    FAIL("expected Divergent");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Divergent);
  }
  CHECK_THROWS_AS(lr_tail_formula([](double) { return 1.0; }, 0), Error);
}

TEST_CASE("reproducing property of decay profiles") {
  const ChainSpec c = ChainSpec::uniform(64, 2);
  const ReproducingReport pl = reproducing_check([](double x) { return std::pow(1.0 + x, -2.0); }, c, 2.0);
  CHECK(pl.expected);
  CHECK(pl.reproducing);
  CHECK(pl.C > 1.0);

  const ReproducingReport ex = reproducing_check([](double x) { return std::exp(-x); }, c);
  CHECK_FALSE(ex.first_ok);
  CHECK(ex.failure_separation >= 2);
  CHECK_FALSE(ex.reproducing);

  const ReproducingReport one = reproducing_check([](double) { return 1.0; }, c);
  CHECK(one.first_ok);
  CHECK_FALSE(one.uniform_ok);
  CHECK(one.row_sum == doctest::Approx(64.0));
}

TEST_CASE("single-site commutators bound interval commutators") {
  const ChainSpec c = ChainSpec::uniform(6, 2);
  Rng rng(22);
  const Automorphism q = random_two_layer_circuit(c, rng);
  const RMat G = single_site_commutators(q);
  CHECK(G.rows() == 6);
  CHECK(G.maxCoeff() <= 2.0 + 1e-9);
  // far sites do not talk through a radius-2 circuit
  CHECK(G(0, 3) == 0.0);
  const SetBoundReport sb = single_site_to_sets(q, G, 30, 5);
  CHECK(sb.samples == 30);
  CHECK(sb.violations == 0);
  const RMat Gs = single_site_commutators(shift_qca(c, 1));
  CHECK(std::max(Gs(1, 0), Gs(1, 2)) == doctest::Approx(2.0));
}

TEST_CASE("patch localization of exact and perturbed circuits") {
  const ChainSpec c = ChainSpec::uniform(6, 2);
  Rng rng(3);
  const Automorphism q = circuit_qca(c, {random_pair_layer(c, 0, rng)});
  const LocalizeReport exact = localize_patch(Automorphism::from_unitary(c, q.unitary()), 0);
  CHECK(exact.eps_initial < 1e-10);
  CHECK(exact.converged);
  CHECK(exact.distance < 1e-10);

  Mat K = random_hermitian(4, rng);
  K /= op_norm(K);
  std::vector<Gate> pl;
  for (int p = 1; p < 6; p += 2) {
    std::vector<int> s{p, (p + 1) % 6};
    std::sort(s.begin(), s.end());
    pl.push_back(Gate{s, exp_i_hermitian(K, 0.002)});
  }
  const Automorphism w = Automorphism::from_circuit(Circuit{c, {Step{Step::Kind::Layer, {}, pl}}});
  const Automorphism a = Automorphism::from_unitary(c, compose(q, w).unitary());
  const LocalizeReport rep = localize_patch(a, 0);
  CHECK(rep.eps_initial > 0.0);
  CHECK(rep.converged);
  CHECK(rep.final_residual <= 1e-8);
  CHECK(rep.distance <= 36.0 * rep.eps_initial + 1e-12);
}

TEST_CASE("patch localization refuses large errors") {
  const ChainSpec c = ChainSpec::uniform(6, 2);
  Rng rng(4);
  // staggered the other way round, B pairs spread over six sites
  const Automorphism q2 = circuit_qca(c, {random_pair_layer(c, 1, rng), random_pair_layer(c, 0, rng)});
  const Automorphism q = Automorphism::from_unitary(c, q2.unitary());
  try {
    localize_patch(q, 0);
    FAIL("expected EpsilonTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EpsilonTooLarge);
  }
}

TEST_CASE("synthesis reproduces circuits") {
  const ChainSpec c = ChainSpec::uniform(8, 2);
  const Synthesis id = synthesize_hamiltonian(Automorphism::identity(c).with_locality(Locality::exact(1)));
  CHECK(id.model.terms.empty());
  CHECK(id.residual < 1e-12);

  Rng rng(5);
  const Automorphism q = random_two_layer_circuit(c, rng);
  const Synthesis s = synthesize_hamiltonian(q);
  CHECK(s.residual <= 1e-8);
  CHECK(s.model.schedule.size() == 2);
  for (const TermLog& t : s.terms) {
    CHECK(t.diameter <= 3);
    CHECK(t.norm <= 2 * M_PI + 1e-9);
  }
  CHECK(s.model.total_duration() == doctest::Approx(1.0));

  try {
    synthesize_hamiltonian(shift_qca(c, 1));
    FAIL("expected NonzeroIndex");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonzeroIndex);
  }
}

TEST_CASE("approximating an exact circuit keeps it") {
  const ChainSpec c = ChainSpec::uniform(6, 2);
  Rng rng(6);
  const Automorphism q = circuit_qca(c, {random_pair_layer(c, 0, rng)});
  const ApproxResult r = qca_approximate(Automorphism::from_unitary(c, q.unitary()), 1);
  CHECK(r.dist_upper < 1e-7);
  CHECK(r.dist_lower <= r.dist_upper + 1e-12);
  CHECK(r.index.rounded == 0.0);
  CHECK(r.gram_gap > 0.25);
}

TEST_CASE("Jordan-Wigner translation") {
  SUBCASE("two modes") {
    const JwReport r = jw_translation_demo(2, {});
    CHECK(r.single_particle_residual < 1e-12);
    CHECK(r.fock_residual < 1e-12);
    CHECK(r.coeff[1] == doctest::Approx(M_PI / 2));
    CHECK_FALSE(r.slow_decay);
  }
  SUBCASE("eight modes") {
    const JwReport r = jw_translation_demo(8, {});
    CHECK(r.single_particle_residual < 1e-10);
    CHECK(r.fock_residual < 1e-10);
    CHECK(r.coeff_ok);
    CHECK(r.tails.empty());
  }
  CHECK_THROWS_AS(jw_translation_demo(11), Error);
  const Mat h = jw_hopping(5);
  CHECK((h - h.adjoint()).norm() < 1e-14);
  CHECK(std::abs(h(0, 0)) < 1e-12);
}
