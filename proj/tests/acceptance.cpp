// One line per acceptance criterion: PASS/FAIL, measured numbers, time.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "qcalab/alpu.hpp"
#include "qcalab/choi.hpp"
#include "qcalab/qca.hpp"
#include "qcalab/stability.hpp"

using namespace qcalab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// certified QCA index by all four methods
struct FourWay {
  double dim, vn, r2, ed;
};

FourWay four_way(const Automorphism& a, int window) {
  const int cut = a.chain().num_sites / 2;
  return {index_dimension(a).value.raw, index_mi(a, cut, window, Entropy::VonNeumann).value.raw,
          index_mi(a, cut, window, Entropy::Renyi2).value.raw, index_entropy_diff(a, cut, window)};
}

// Shifts and one- or two-layer circuits; `short_range` keeps the radius at 1.
Automorphism random_combo_part(const ChainSpec& c, Rng& rng, bool short_range) {
  std::uniform_int_distribution<int> pick(0, short_range ? 2 : 3);
  switch (pick(rng)) {
    case 0:
      return shift_qca(c, 1);
    case 1:
      return shift_qca(c, -1);
    case 2:
      return circuit_qca(c, {random_pair_layer(c, static_cast<int>(rng() % 2), rng)});
    default:
      return random_two_layer_circuit(c, rng);
  }
}

Outcome c1_shift_index() {
  struct Case {
    int d, k, sites;
  };
  double worst = 0.0, slowest = 0.0;
  for (const Case cs : {Case{2, 1, 8}, Case{2, -1, 8}, Case{2, 2, 16}, Case{3, 1, 8}}) {
    const auto t0 = std::chrono::steady_clock::now();
    const Automorphism s = shift_qca(ChainSpec::uniform(cs.sites, cs.d), cs.k);
    const FourWay f = four_way(s, std::abs(cs.k));
    const double want = cs.k * std::log(cs.d);
    for (double v : {f.dim, f.vn, f.r2, f.ed}) worst = std::max(worst, std::abs(v - want));
    slowest = std::max(slowest, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return {worst <= 1e-8 && slowest <= 30.0, fmt("max |error| %.2e", worst) + fmt(", slowest case %.1f s", slowest)};
}

Outcome c2_circuit_zero() {
  const ChainSpec c = ChainSpec::uniform(8, 2);
  Rng rng(202);
  double worst = 0.0;
  int nonzero = 0;
  for (int k = 0; k < 25; ++k) {
    const DimensionIndex di = index_dimension(random_two_layer_circuit(c, rng));
    worst = std::max(worst, std::abs(di.value.raw));
    if (di.value.rounded != 0.0) ++nonzero;
  }
  return {worst <= 1e-8 && nonzero == 0, fmt("25 circuits, max |raw| %.2e", worst)};
}

Outcome c3_additivity() {
  const ChainSpec c = ChainSpec::uniform(8, 2);
  Rng rng(303);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    // composition: radius-1 parts keep the product nearest-neighbor after blocking by 2
    const Automorphism a = random_combo_part(c, rng, true), b = random_combo_part(c, rng, true);
    const double ia = index_dimension(a).value.raw, ib = index_dimension(b).value.raw;
    const double comp = index_dimension(compose(a, b).with_locality(Locality::exact(2))).value.raw;
    const Automorphism x = random_combo_part(c, rng, false), y = random_combo_part(c, rng, false);
    const double ten = index_dimension(tensor(x, y)).value.raw;
    const double ix = index_dimension(x).value.raw, iy = index_dimension(y).value.raw;
    worst = std::max({worst, std::abs(comp - ia - ib), std::abs(ten - ix - iy)});
  }
  return {worst <= 1e-8, fmt("50 combinations, max deviation %.2e", worst)};
}

Outcome c4_formula_agreement() {
  std::vector<std::pair<Automorphism, int>> corpus;
  const ChainSpec q8 = ChainSpec::uniform(8, 2);
  Rng rng(404);
  for (int k : {1, -1}) corpus.emplace_back(shift_qca(q8, k), 1);
  corpus.emplace_back(shift_qca(ChainSpec::uniform(16, 2), 2), 2);
  corpus.emplace_back(shift_qca(ChainSpec::uniform(8, 3), 1), 1);
  corpus.emplace_back(shift_qca(ChainSpec::uniform(6, 3), -1), 1);
  corpus.emplace_back(Automorphism::identity(q8).with_locality(Locality::exact(0)), 1);
  for (int k = 0; k < 4; ++k) corpus.emplace_back(random_two_layer_circuit(q8, rng), 2);
  corpus.emplace_back(compose(shift_qca(q8, 1), circuit_qca(q8, {random_pair_layer(q8, 1, rng)})).with_locality(Locality::exact(2)), 2);
  double mi_vs_dim = 0.0, r2_vs_vn = 0.0;
  for (const auto& [a, w] : corpus) {
    const FourWay f = four_way(a, w);
    mi_vs_dim = std::max(mi_vs_dim, std::abs(f.vn - f.dim));
    r2_vs_vn = std::max(r2_vs_vn, std::abs(f.r2 - f.vn));
  }
  return {mi_vs_dim <= 1e-7 && r2_vs_vn <= 1e-7,
          std::to_string(corpus.size()) + " maps, |MI - dim| " + fmt("%.2e", mi_vs_dim) +
              fmt(", |R2 - vN| %.2e", r2_vs_vn)};
}

Outcome c5_robustness() {
  const Automorphism s = shift_qca(ChainSpec::uniform(8, 2), 1);
  std::vector<double> strengths;
  for (int k = 1; k <= 20; ++k) strengths.push_back(0.000025 * k);
  double max_eps = 0.0, max_ratio = 0.0;
  int bad = 0;
  const double l2 = std::log(2.0);
  for (const RobustnessPoint& p : robustness_experiment(s, strengths, 505)) {
    max_eps = std::max(max_eps, p.eps_hat);
    if (p.eps_hat > 0) max_ratio = std::max(max_ratio, p.witness_norm / p.eps_hat);
    if (p.eps_hat > 0.004 || !p.unchanged || std::abs(p.index.rounded - l2) > 1e-12 || !p.witness_ok) ++bad;
  }
  return {bad == 0, "20 instances, max eps " + fmt("%.2e", max_eps) + fmt(", max ||u-I||/eps %.2f", max_ratio) +
                        ", failures " + std::to_string(bad)};
}

// Shared by criteria 6 and 10.
double g_rounding_value = std::nan("");

Outcome c6_rounding() {
  const ChainSpec c = ChainSpec::uniform(10, 2);
  double worst_flat = 0.0, worst_raw = 0.0;
  bool all_zero = true;
  for (double t : {0.1, 0.2, 0.3}) {
    const Automorphism a = evolve(heisenberg_model(c, 1.0, 0.0), t);
    double lo = 1e300, hi = -1e300;
    for (int w : {3, 4}) {
      const MiIndex mi = index_mi(a, 5, w);
      lo = std::min(lo, mi.value.raw);
      hi = std::max(hi, mi.value.raw);
      worst_raw = std::max(worst_raw, std::abs(mi.value.raw));
      if (mi.value.rounded != 0.0) all_zero = false;
    }
    worst_flat = std::max(worst_flat, hi - lo);
  }
  if (all_zero) g_rounding_value = 0.0;
  return {all_zero && worst_flat <= 0.02,
          "t in {0.1, 0.2, 0.3}, windows 3-4, plateau spread " + fmt("%.2e", worst_flat) + fmt(", max |raw| %.2e", worst_raw)};
}

Outcome c7_stability() {
  Rng rng(707);
  int inner_bad = 0, rot_bad = 0;
  double inner_res = 0.0, rot_res = 0.0, inner_ratio = 0.0, rot_ratio = 0.0;
  for (int k = 0; k < 100; ++k) {
    const StabilityTrial t = make_inner_trial(rng, 0.3);
    if (!t.ok) ++inner_bad;
    inner_res = std::max(inner_res, t.residual);
    if (t.eps > 0) inner_ratio = std::max(inner_ratio, t.dist_identity / t.eps);
  }
  for (int k = 0; k < 50; ++k) {
    const StabilityTrial t = rotate_into_trial(rng, 1.0 / 64.0);
    if (!t.ok) ++rot_bad;
    rot_res = std::max(rot_res, t.residual);
    if (t.eps > 0) rot_ratio = std::max(rot_ratio, t.dist_identity / t.eps);
  }
  return {inner_bad == 0 && rot_bad == 0,
          "make_inner 100: res " + fmt("%.1e", inner_res) + fmt(", max ||I-u||/eps %.3f", inner_ratio) +
              "; rotate_into 50: res " + fmt("%.1e", rot_res) + fmt(", max ||I-u||/eps %.3f", rot_ratio)};
}

Outcome c8_lemmas() {
  const LemmaSuite ls = commutator_lemma_suite(808, 1000);
  return {ls.draws == 1000 && ls.powers_violations == 0 && ls.polar_violations == 0,
          "1000 draws each, violations " + std::to_string(ls.powers_violations) + "/" +
              std::to_string(ls.polar_violations) + fmt(", max ratios %.3f", ls.powers_max_ratio) +
              fmt(" / %.3f", ls.polar_max_ratio)};
}

Outcome c9_round_trips() {
  const ChainSpec c = ChainSpec::uniform(8, 2);
  Rng rng(909);
  double dec = 0.0;
  for (int k = 0; k < 20; ++k) dec = std::max(dec, decompose_index_zero(random_two_layer_circuit(c, rng)).residual);
  double syn = 0.0;
  for (int k = 0; k < 2; ++k) syn = std::max(syn, synthesize_hamiltonian(random_two_layer_circuit(c, rng)).residual);
  bool refused = false;
  try {
    synthesize_hamiltonian(shift_qca(c, 1));
  } catch (const Error& e) {
    refused = e.code() == ErrorCode::NonzeroIndex;
  }
  return {dec <= 1e-7 && syn <= 1e-6 && refused, "decompose x20 residual " + fmt("%.2e", dec) +
                                                      fmt(", synthesize residual %.2e", syn) +
                                                      (refused ? ", shift refused" : ", shift NOT refused")};
}

Outcome c10_approximation() {
  const ChainSpec c = ChainSpec::uniform(8, 2);
  const Automorphism a = evolve(expdecay_model(c, 1.0, 0.5, 3, 0.3), 0.05);
  const ApproxSweep sw = approximation_sweep(a, {1, 2, 4});
  std::string d;
  for (const ApproxResult& r : sw.rows) d += "j=" + std::to_string(r.j) + fmt(": %.2e ", r.dist_upper);
  const bool matches = sw.stabilized && !std::isnan(g_rounding_value) && sw.stabilized_index == g_rounding_value;
  return {sw.decreasing && matches, d + (sw.stabilized ? fmt("index %.3f", sw.stabilized_index) : "not stabilized")};
}

Outcome c11_lieb_robinson() {
  const DecayFn F = [](double x) { return std::pow(1.0 + x, -4.0); };
  const double v = lr_tail_formula(F, 0);
  // brute-force partial sums over n + m <= 20000 plus the analytic tail
  double partial = 0.0;
  const int K = 20000;
  for (int k = K; k >= 0; --k) partial += (k + 1.0) * F(k + 1.0);
  partial = 4.0 * partial;
  const double zeta = 4.0 * (std::riemann_zeta(3.0) - std::riemann_zeta(4.0));
  const double err = std::max(std::abs(v - zeta), std::abs(v - partial) - 4.0 / K);
  const ChainSpec ring = ChainSpec::uniform(64, 2);
  const ReproducingReport pl = reproducing_check([](double x) { return std::pow(1.0 + x, -2.0); }, ring, 2.0);
  const ReproducingReport ex = reproducing_check([](double x) { return std::exp(-x); }, ring);
  return {err <= 1e-8 && pl.reproducing && !ex.first_ok,
          fmt("value %.12f", v) + fmt(", |error| %.1e", std::abs(v - zeta)) +
              (pl.reproducing ? ", power law passes" : ", power law fails") +
              (ex.first_ok ? ", exponential passes" : ", exponential fails at s=" + std::to_string(ex.failure_separation))};
}

Outcome c12_jw() {
  const JwReport r = jw_translation_demo(8, {});
  return {r.single_particle_residual <= 1e-12 && r.fock_residual <= 1e-8 && r.coeff_ok,
          "single particle " + fmt("%.1e", r.single_particle_residual) + fmt(", Fock %.1e", r.fock_residual) +
              fmt(", r|h_r| in [%.3f,", r.coeff_ratio_min) + fmt(" %.3f]", r.coeff_ratio_max)};
}

Outcome c13_blending() {
  const ChainSpec c = ChainSpec::uniform(8, 2);
  Rng rng(1313);
  double worst = 0.0;
  const Automorphism s = shift_qca(c, 1);
  const std::vector<std::pair<Automorphism, Automorphism>> pairs{
      {s.with_locality(Locality::exact(2)),
       compose(s, circuit_qca(c, {random_pair_layer(c, 0, rng)})).with_locality(Locality::exact(2))},
      {random_two_layer_circuit(c, rng), random_two_layer_circuit(c, rng)},
  };
  for (const auto& [a, b] : pairs) worst = std::max(worst, blend(a, b, 2).left_agreement);
  bool mismatch = false;
  try {
    blend(s, Automorphism::identity(c).with_locality(Locality::exact(1)), 2);
  } catch (const Error& e) {
    mismatch = e.code() == ErrorCode::IndexMismatch;
  }
  return {worst <= 1e-8 && mismatch,
          fmt("exterior agreement %.2e", worst) + (mismatch ? ", IndexMismatch for (shift, identity)" : ", mismatch NOT raised")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"shift index, four methods", c1_shift_index},
      {"random circuits have index zero", c2_circuit_zero},
      {"index additivity", c3_additivity},
      {"index formulas agree", c4_formula_agreement},
      {"robustness under perturbation", c5_robustness},
      {"rounding recovers the index", c6_rounding},
      {"stability constructions", c7_stability},
      {"commutator inequality suites", c8_lemmas},
      {"decomposition and synthesis round trips", c9_round_trips},
      {"QCA approximation sweep", c10_approximation},
      {"Lieb-Robinson tail machinery", c11_lieb_robinson},
      {"Jordan-Wigner translation", c12_jw},
      {"blending", c13_blending},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::printf("%s %2zu %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria pass\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
