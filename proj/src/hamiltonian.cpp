#include "qcalab/hamiltonian.hpp"

#include <algorithm>
#include <cmath>

#include "qcalab/linalg.hpp"

namespace qcalab {

void HamiltonianModel::validate() const {
  chain.validate();
  for (const Term& t : terms) {
    if (!t.op.support.is_interval && t.op.support.size() > 1)
      throw Error(ErrorCode::InvalidArgument, "term support is not an interval");
    if ((t.op.m - t.op.m.adjoint()).norm() > 1e-10) throw Error(ErrorCode::InvalidArgument, "term is not Hermitian");
  }
  for (const Segment& s : schedule) {
    if (s.duration < 0) throw Error(ErrorCode::InvalidArgument, "negative segment duration");
    for (int k : s.terms)
      if (k < 0 || k >= static_cast<int>(terms.size()))
        throw Error(ErrorCode::InvalidArgument, "segment refers to a missing term");
  }
}

Mat HamiltonianModel::dense(const std::vector<int>* subset) const {
  chain.require_dense();
  const Region all = Region::all(chain);
  const auto D = static_cast<Eigen::Index>(chain.total_dim());
  Mat h = Mat::Zero(D, D);
  auto add_term = [&](int k) { h += embed(chain, terms[static_cast<std::size_t>(k)].op, all).m; };
  if (subset) {
    for (int k : *subset) add_term(k);
  } else {
    for (int k = 0; k < static_cast<int>(terms.size()); ++k) add_term(k);
  }
  return h;
}

double HamiltonianModel::total_duration() const {
  double s = 0.0;
  for (const Segment& g : schedule) s += g.duration;
  return s;
}

namespace {

bool disjoint_terms(const HamiltonianModel& h, const Segment& s) {
  std::vector<int> seen;
  for (int k : s.terms)
    for (int x : h.terms[static_cast<std::size_t>(k)].op.support.sites) {
      if (std::find(seen.begin(), seen.end(), x) != seen.end()) return false;
      seen.push_back(x);
    }
  return true;
}

}  // namespace

Automorphism evolve(const HamiltonianModel& h, double t) {
  h.validate();
  const ChainSpec& c = h.chain;
  if (t == 0.0 || h.terms.empty()) return Automorphism::identity(c);

  // (duration, segment) pieces actually run
  std::vector<std::pair<double, const Segment*>> pieces;
  Segment everything;
  if (h.schedule.empty()) {
    for (int k = 0; k < static_cast<int>(h.terms.size()); ++k) everything.terms.push_back(k);
    pieces.emplace_back(t, &everything);
  } else {
    double left = t;
    for (const Segment& s : h.schedule) {
      if (left <= 0) break;
      const double tau = std::min(left, s.duration);
      pieces.emplace_back(tau, &s);
      left -= tau;
    }
  }

  const bool as_circuit = !h.schedule.empty() && std::all_of(pieces.begin(), pieces.end(), [&](const auto& p) {
    return disjoint_terms(h, *p.second);
  });
  if (as_circuit) {
    // U = U_m ... U_1 with U_1 the first segment; circuit steps read U = S_1 S_2 ...
    Circuit circ{c, {}};
    for (auto it = pieces.rbegin(); it != pieces.rend(); ++it) {
      Step st;
      st.kind = Step::Kind::Layer;
      for (int k : it->second->terms) {
        const ChainOperator& op = h.terms[static_cast<std::size_t>(k)].op;
        st.gates.push_back(Gate{op.support.sites, exp_i_hermitian(op.m, -it->first)});
      }
      if (!st.gates.empty()) circ.steps.push_back(std::move(st));
    }
    if (circ.steps.empty()) return Automorphism::identity(c);
    return Automorphism::from_circuit(std::move(circ));
  }

  c.require_dense();
  const auto D = static_cast<Eigen::Index>(c.total_dim());
  Mat u = Mat::Identity(D, D);
  for (const auto& [tau, seg] : pieces) u = exp_i_hermitian(h.dense(&seg->terms), -tau) * u;
  if (!is_unitary(u, 1e-10)) throw Error(ErrorCode::NumericalFailure, "evolution lost unitarity");
  return Automorphism::from_unitary(c, u);
}

Term make_term(const ChainSpec& c, const std::vector<int>& sites, const Mat& h) {
  Term t{make_op_ordered(c, sites, h)};
  t.op.support.is_interval = true;
  return t;
}

namespace {

void require_qubits(const ChainSpec& c) {
  for (int d : c.local_dims)
    if (d != 2) throw Error(ErrorCode::InvalidArgument, "model needs qubit sites");
}

Mat string_op(char end, int len) {
  Mat m = pauli(end);
  for (int k = 1; k < len; ++k) m = kron(m, pauli('Z'));
  return kron(m, pauli(end));
}

std::vector<int> run_of_sites(const ChainSpec& c, int n, int len) {
  std::vector<int> s;
  for (int k = 0; k < len; ++k) s.push_back(c.wrap(n + k));
  return s;
}

}  // namespace

HamiltonianModel heisenberg_model(const ChainSpec& c, double J, double g) {
  require_qubits(c);
  HamiltonianModel h{c, {}, {}};
  const int bonds = c.boundary == Boundary::Periodic ? c.num_sites : c.num_sites - 1;
  const Mat xx = kron(pauli('X'), pauli('X')) + kron(pauli('Y'), pauli('Y')) + kron(pauli('Z'), pauli('Z'));
  for (int n = 0; n < bonds; ++n) h.terms.push_back(make_term(c, run_of_sites(c, n, 2), J * xx));
  if (g != 0.0)
    for (int n = 0; n < c.num_sites; ++n) h.terms.push_back(make_term(c, {n}, g * pauli('Z')));
  return h;
}

HamiltonianModel expdecay_model(const ChainSpec& c, double J, double xi, int range, double g) {
  require_qubits(c);
  if (xi <= 0 || range < 1) throw Error(ErrorCode::InvalidArgument, "decay length and range must be positive");
  const int N = c.num_sites;
  const bool ring = c.boundary == Boundary::Periodic;
  range = std::min(range, ring ? (N - 1) / 2 : N - 1);
  HamiltonianModel h{c, {}, {}};
  for (int r = 1; r <= range; ++r)
    for (int n = 0; n < N; ++n) {
      if (!ring && n + r >= N) break;
      const double w = J * std::exp(-r / xi);
      h.terms.push_back(make_term(c, run_of_sites(c, n, r + 1), w * (string_op('X', r) + string_op('Y', r))));
    }
  if (g != 0.0)
    for (int n = 0; n < N; ++n) h.terms.push_back(make_term(c, {n}, g * pauli('Z')));
  return h;
}

HamiltonianModel field_model(const ChainSpec& c, double hz) {
  require_qubits(c);
  HamiltonianModel h{c, {}, {}};
  for (int n = 0; n < c.num_sites; ++n) h.terms.push_back(make_term(c, {n}, hz * pauli('Z')));
  return h;
}

}  // namespace qcalab
