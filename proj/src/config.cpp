#include "qcalab/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "qcalab/alpu.hpp"
#include "qcalab/qca.hpp"

namespace qcalab {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

template <class T>
void read(const ojson& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("field '") + key + "': " + e.what());
  }
}

void reject_unknown(const ojson& j, const std::vector<std::string>& known, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      bad("unknown field '" + it.key() + "' in " + where);
}

const std::vector<std::string> kExperiments{"index", "tails", "approximate", "synthesize", "stability", "jw-demo"};

}  // namespace

ojson tolerances_json(const Tolerances& t) {
  ojson j;
  j["unitarity"] = t.unitarity;
  j["eig_clamp"] = t.eig_clamp;
  j["rank_rel"] = t.rank_rel;
  j["residual"] = t.residual;
  j["entropy_floor"] = t.entropy_floor;
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const ojson& j) {
  if (!j.is_object()) bad("config must be a JSON object");
  reject_unknown(j, {"experiment", "seed", "chain", "model", "sweep", "tolerances", "output"}, "config");
  ExperimentConfig c;
  read(j, "experiment", c.experiment);
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) bad("seed must be a non-negative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  read(j, "output", c.output);
  if (j.contains("chain")) {
    const ojson& s = j["chain"];
    if (!s.is_object()) bad("chain must be an object");
    reject_unknown(s, {"sites", "local_dim", "boundary", "max_dim"}, "chain");
    read(s, "sites", c.chain.sites);
    read(s, "local_dim", c.chain.local_dim);
    read(s, "boundary", c.chain.boundary);
    read(s, "max_dim", c.chain.max_dim);
  }
  if (j.contains("model")) {
    const ojson& s = j["model"];
    if (!s.is_object()) bad("model must be an object");
    reject_unknown(s, {"kind", "k", "circuit", "hamiltonian", "J", "field", "xi", "range", "t"}, "model");
    read(s, "kind", c.model.kind);
    read(s, "k", c.model.k);
    read(s, "circuit", c.model.circuit);
    read(s, "hamiltonian", c.model.hamiltonian);
    read(s, "J", c.model.J);
    read(s, "field", c.model.field);
    read(s, "xi", c.model.xi);
    read(s, "range", c.model.range);
    read(s, "t", c.model.t);
  }
  if (j.contains("sweep")) {
    const ojson& s = j["sweep"];
    if (!s.is_object()) bad("sweep must be an object");
    reject_unknown(s, {"windows", "cuts", "r_max", "method", "max_len", "blockings", "draws", "trials", "N", "s_values"},
                   "sweep");
    read(s, "windows", c.sweep.windows);
    read(s, "cuts", c.sweep.cuts);
    read(s, "r_max", c.sweep.r_max);
    read(s, "method", c.sweep.method);
    read(s, "max_len", c.sweep.max_len);
    read(s, "blockings", c.sweep.blockings);
    read(s, "draws", c.sweep.draws);
    read(s, "trials", c.sweep.trials);
    read(s, "N", c.sweep.N);
    read(s, "s_values", c.sweep.s_values);
  }
  if (j.contains("tolerances")) {
    const ojson& s = j["tolerances"];
    if (!s.is_object()) bad("tolerances must be an object");
    reject_unknown(s, {"unitarity", "eig_clamp", "rank_rel", "residual", "entropy_floor"}, "tolerances");
    read(s, "unitarity", c.tolerances.unitarity);
    read(s, "eig_clamp", c.tolerances.eig_clamp);
    read(s, "rank_rel", c.tolerances.rank_rel);
    read(s, "residual", c.tolerances.residual);
    read(s, "entropy_floor", c.tolerances.entropy_floor);
  }

  if (std::find(kExperiments.begin(), kExperiments.end(), c.experiment) == kExperiments.end())
    bad("unknown experiment '" + c.experiment + "'");
  if (c.chain.sites < 1 || c.chain.local_dim < 2) bad("chain needs sites >= 1 and local_dim >= 2");
  if (c.chain.boundary != "periodic" && c.chain.boundary != "open") bad("boundary must be 'periodic' or 'open'");
  const std::vector<std::string> kinds{"identity", "shift", "circuit", "hamiltonian", "jw"};
  if (std::find(kinds.begin(), kinds.end(), c.model.kind) == kinds.end())
    bad("unknown model kind '" + c.model.kind + "'");
  if (c.model.circuit != "random" && c.model.circuit != "swap") bad("circuit must be 'random' or 'swap'");
  if (c.model.hamiltonian != "heisenberg" && c.model.hamiltonian != "expdecay" && c.model.hamiltonian != "field")
    bad("hamiltonian must be 'heisenberg', 'expdecay' or 'field'");
  if (c.sweep.method != "region_distance" && c.sweep.method != "commutator_sup")
    bad("method must be 'region_distance' or 'commutator_sup'");
  if (c.randomized() && !c.seed) bad("experiment '" + c.experiment + "' is randomized and needs a seed");
  return c;
}

bool ExperimentConfig::randomized() const {
  return experiment == "stability" || (model.kind == "circuit" && model.circuit == "random") ||
         experiment == "approximate";
}

ojson ExperimentConfig::to_json() const {
  ojson j;
  j["experiment"] = experiment;
  if (seed) j["seed"] = *seed;
  j["chain"] = {{"sites", chain.sites},
                {"local_dim", chain.local_dim},
                {"boundary", chain.boundary},
                {"max_dim", chain.max_dim}};
  j["model"] = {{"kind", model.kind},   {"k", model.k},   {"circuit", model.circuit}, {"hamiltonian", model.hamiltonian},
                {"J", model.J},         {"field", model.field}, {"xi", model.xi}, {"range", model.range},
                {"t", model.t}};
  j["sweep"] = {{"windows", sweep.windows}, {"cuts", sweep.cuts},       {"r_max", sweep.r_max},
                {"method", sweep.method},   {"max_len", sweep.max_len}, {"blockings", sweep.blockings},
                {"draws", sweep.draws},     {"trials", sweep.trials},   {"N", sweep.N},
                {"s_values", sweep.s_values}};
  j["tolerances"] = tolerances_json(tolerances);
  j["output"] = output;
  return j;
}

ChainSpec ExperimentConfig::chain_spec() const {
  ChainSpec c = ChainSpec::uniform(chain.sites, chain.local_dim,
                                   chain.boundary == "open" ? Boundary::Open : Boundary::Periodic);
  c.max_dim = chain.max_dim;
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open config '" + path + "'");
  ojson j;
  try {
    j = ojson::parse(in);
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("cannot parse config: ") + e.what());
  }
  return ExperimentConfig::from_json(j);
}

HamiltonianModel build_hamiltonian(const ExperimentConfig& cfg) {
  const ChainSpec c = cfg.chain_spec();
  const ModelConfig& m = cfg.model;
  if (m.hamiltonian == "heisenberg") return heisenberg_model(c, m.J, m.field);
  if (m.hamiltonian == "expdecay") return expdecay_model(c, m.J, m.xi, m.range, m.field);
  return field_model(c, m.field);
}

Automorphism build_model(const ExperimentConfig& cfg) {
  const ChainSpec c = cfg.chain_spec();
  const ModelConfig& m = cfg.model;
  if (m.kind == "identity") return Automorphism::identity(c).with_locality(Locality::exact(0));
  if (m.kind == "shift") return shift_qca(c, m.k);
  if (m.kind == "circuit") {
    if (m.circuit == "random") {
      Rng rng(cfg.seed.value_or(0));
      return random_two_layer_circuit(c, rng);
    }
    std::vector<std::vector<Gate>> layers(2);
    const Mat sw = [] {
      Mat s = Mat::Zero(4, 4);
      s(0, 0) = s(3, 3) = s(1, 2) = s(2, 1) = 1.0;
      return s;
    }();
    if (c.local_dims[0] != 2) bad("swap circuit needs qubits");
    for (int off = 0; off < 2; ++off)
      for (int p = off; p + 1 < c.num_sites + off; p += 2) {
        if (c.boundary == Boundary::Open && p + 1 >= c.num_sites) break;
        std::vector<int> s{p % c.num_sites, (p + 1) % c.num_sites};
        // ascending sites; SWAP is symmetric so the order does not matter
        std::sort(s.begin(), s.end());
        layers[off].push_back(Gate{s, sw});
      }
    return circuit_qca(c, layers);
  }
  if (m.kind == "jw") {
    if (c.local_dims[0] != 2 || c.boundary != Boundary::Periodic) bad("jw model needs a qubit ring");
    c.require_dense();
    return Automorphism::from_unitary(c, exp_i_hermitian(jw_fock_hamiltonian(c.num_sites), -m.t));
  }
  return evolve(build_hamiltonian(cfg), m.t);
}

}  // namespace qcalab
