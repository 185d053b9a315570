#include "doctest.h"

#include <cmath>

#include "qcalab/choi.hpp"
#include "qcalab/hamiltonian.hpp"
#include "qcalab/qca.hpp"

using namespace qcalab;

namespace {

const double kLog2 = std::log(2.0);

}  // namespace

TEST_CASE("identity gives Bell pairs between a site and its copy") {
  const ChainSpec c = ChainSpec::uniform(2, 2, Boundary::Open);
  const ChoiState s = choi_state(Automorphism::identity(c));
  CHECK(s.psi.norm() == doctest::Approx(1.0));
  // sites 0, 1 and copies 2, 3
  CHECK(mutual_information(s, Region({0}), Region({2}), Entropy::VonNeumann) == doctest::Approx(2 * kLog2));
  CHECK(mutual_information(s, Region({0}), Region({3}), Entropy::VonNeumann) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(mutual_information(s, Region({0}), Region({2}), Entropy::Renyi2) == doctest::Approx(2 * kLog2));
  const Mat rho = reduced_state(s, Region({0}));
  CHECK((rho - 0.5 * Mat::Identity(2, 2)).norm() < 1e-12);
}

TEST_CASE("a single-site unitary keeps the pairing") {
  const ChainSpec c = ChainSpec::uniform(1, 2, Boundary::Open);
  const Automorphism x = Automorphism::from_unitary(c, pauli('X'));
  const ChoiState s = choi_state(x);
  // (X (x) I)|Phi> is again maximally entangled
  CHECK(mutual_information(s, Region({0}), Region({1}), Entropy::VonNeumann) == doctest::Approx(2 * kLog2));
  CHECK(std::abs(s.psi(1)) == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(std::abs(s.psi(0)) < 1e-14);
}

TEST_CASE("entropy values") {
  Mat rho = Mat::Zero(4, 4);
  rho.diagonal() << 0.5, 0.25, 0.25, 0.0;
  CHECK(entropy(rho, Entropy::VonNeumann) == doctest::Approx(1.5 * kLog2));
  CHECK(entropy(rho, Entropy::Renyi2) == doctest::Approx(-std::log(0.375)));
  CHECK(entropy(Mat::Identity(1, 1), Entropy::VonNeumann) == doctest::Approx(0.0));
}

TEST_CASE("complementary regions of the pure Choi state have equal entropy") {
  const ChainSpec c = ChainSpec::uniform(4, 2);
  Rng rng(11);
  const ChoiState s = choi_state(random_two_layer_circuit(c, rng));
  for (const Region& A : {Region({0, 5}), Region({1, 2, 6}), Region({3})}) {
    Region B;
    for (int x = 0; x < 8; ++x)
      if (!A.contains(x)) B = B.unite(Region({x}));
    CHECK(entropy(reduced_state(s, A), Entropy::VonNeumann) ==
          doctest::Approx(entropy(reduced_state(s, B), Entropy::VonNeumann)).epsilon(1e-10));
    CHECK(reduced_state(s, A).trace().real() == doctest::Approx(1.0));
  }
}

TEST_CASE("shift index from mutual information") {
  const ChainSpec c = ChainSpec::uniform(8, 2);
  for (int k : {1, -1}) {
    const Automorphism s = shift_qca(c, k);
    for (int cut = 0; cut < 8; cut += 3) {
      for (Entropy e : {Entropy::VonNeumann, Entropy::Renyi2}) {
        const MiIndex mi = index_mi(s, cut, 2, e);
        CHECK(mi.certified);
        CHECK(mi.value.raw == doctest::Approx(k * kLog2).epsilon(1e-10));
      }
      CHECK(index_entropy_diff(s, cut, 2) == doctest::Approx(k * kLog2).epsilon(1e-10));
    }
  }
  // one of the two neighbor copies carries the full pair
  const ChoiState st = choi_state(shift_qca(c, 1));
  const double a = mutual_information(st, Region({3}), Region({8 + 2}), Entropy::VonNeumann);
  const double b = mutual_information(st, Region({3}), Region({8 + 4}), Entropy::VonNeumann);
  CHECK(std::max(a, b) == doctest::Approx(2 * kLog2));
  CHECK(std::min(a, b) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("qutrit shift") {
  const Automorphism s = shift_qca(ChainSpec::uniform(5, 3), 1);
  CHECK(index_mi(s, 2, 2).value.raw == doctest::Approx(std::log(3.0)).epsilon(1e-10));
}

TEST_CASE("circuits: both entropies give zero") {
  const ChainSpec c = ChainSpec::uniform(8, 2);
  Rng rng(12);
  for (int k = 0; k < 3; ++k) {
    const Automorphism q = random_two_layer_circuit(c, rng);
    for (Entropy e : {Entropy::VonNeumann, Entropy::Renyi2}) {
      const MiIndex mi = index_mi(q, 4, 2, e);
      CHECK(std::abs(mi.value.raw) < 1e-9);
      CHECK(mi.i_primed_left == doctest::Approx(mi.i_primed_right).epsilon(1e-9));
    }
  }
}

TEST_CASE("windows must not overlap around the ring") {
  const Automorphism s = shift_qca(ChainSpec::uniform(8, 2), 1);
  for (int w : {0, 4, 5}) {
    try {
      index_mi(s, 0, w);
      FAIL("expected WindowTooLarge");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::WindowTooLarge);
    }
  }
  CHECK_NOTHROW(index_mi(s, 0, 3));
}

TEST_CASE("continuity: identical maps and small perturbations") {
  const ChainSpec c = ChainSpec::uniform(8, 2);
  Rng rng(13);
  const Automorphism q = random_two_layer_circuit(c, rng);
  const ContinuityReport same = mi_continuity_experiment(q, q, 4, 2);
  CHECK(same.trace_distance < 1e-10);
  CHECK(same.delta_index < 1e-10);
  CHECK(same.ok);

  Mat K = random_hermitian(4, rng);
  K /= op_norm(K);
  std::vector<Gate> layer;
  for (int p = 0; p < 8; p += 2) layer.push_back(Gate{{p, p + 1}, exp_i_hermitian(K, 0.01)});
  const Automorphism w = circuit_qca(c, {layer});
  const Automorphism q2 = Automorphism::from_unitary(c, compose(q, w).unitary());
  const ContinuityReport rep = mi_continuity_experiment(q, q2, 4, 2);
  CHECK(rep.eps_lower <= rep.eps_upper + 1e-12);
  CHECK(rep.eps_upper > 0);
  CHECK(rep.ok);
}

TEST_CASE("short Heisenberg evolution has index zero") {
  const ChainSpec c = ChainSpec::uniform(10, 2);
  const Automorphism a = evolve(heisenberg_model(c, 1.0, 0.0), 0.2);
  for (int w : {3, 4}) {
    const MiIndex mi = index_mi(a, 5, w);
    CHECK_FALSE(mi.certified);
    CHECK(mi.value.rounded == 0.0);
    CHECK(std::abs(mi.value.raw) < 0.02);
  }
}
