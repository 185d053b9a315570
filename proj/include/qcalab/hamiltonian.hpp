#pragma once

#include <vector>

#include "qcalab/automorphism.hpp"

namespace qcalab {

// Hermitian term on an interval of the chain.
struct Term {
  ChainOperator op;
};

// Runs the listed terms (indices into `terms`) for `duration`.
struct Segment {
  double duration = 0.0;
  std::vector<int> terms;
};

struct HamiltonianModel {
  ChainSpec chain;
  std::vector<Term> terms;
  std::vector<Segment> schedule;  // empty: all terms for the whole time

  void validate() const;  // Hermitian to 1e-10, interval supports
  // Sum of the chosen terms (all if null) on the full chain.
  Mat dense(const std::vector<int>* subset = nullptr) const;
  double total_duration() const;
};

// alpha(x) = e^{iHt} x e^{-iHt}. With a schedule, segments run in order and
// the evolution stops after time t. A segment whose terms are disjoint
// becomes one circuit layer; otherwise the whole evolution is dense.
Automorphism evolve(const HamiltonianModel& h, double t);

// Term builders. Sites in `sites` are listed in chain order.
Term make_term(const ChainSpec& c, const std::vector<int>& sites, const Mat& h);

// J (XX + YY + ZZ) on neighbors plus a field g Z on every site (qubits).
HamiltonianModel heisenberg_model(const ChainSpec& c, double J, double g);
// sum_{n, 1 <= r <= range} J e^{-r/xi} (X_n Z...Z X_{n+r} + Y_n Z...Z Y_{n+r}) + g Z_n
HamiltonianModel expdecay_model(const ChainSpec& c, double J, double xi, int range, double g);
// h Z on every site.
HamiltonianModel field_model(const ChainSpec& c, double h);

}  // namespace qcalab
