#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "qcalab/automorphism.hpp"
#include "qcalab/hamiltonian.hpp"

namespace qcalab {

using ojson = nlohmann::ordered_json;

struct ChainConfig {
  int sites = 8;
  int local_dim = 2;
  std::string boundary = "periodic";
  std::size_t max_dim = std::size_t{1} << 12;
};

// kind: identity | shift | circuit | hamiltonian | jw
struct ModelConfig {
  std::string kind = "identity";
  int k = 1;                         // shift
  std::string circuit = "random";    // random | swap
  std::string hamiltonian = "heisenberg";  // heisenberg | expdecay | field
  double J = 1.0;
  double field = 0.0;
  double xi = 0.5;
  int range = 3;
  double t = 0.2;
};

struct SweepConfig {
  std::vector<int> windows;    // index: window plateau
  std::vector<int> cuts;       // index: per-cut spread
  int r_max = 3;               // tails
  std::string method = "region_distance";
  int max_len = 1;
  std::vector<int> blockings{1, 2, 4};  // approximate
  int draws = 1000;            // stability
  int trials = 20;
  int N = 8;                   // jw-demo
  std::vector<double> s_values{0.25, 0.5, 0.75};
};

struct ExperimentConfig {
  std::string experiment;
  std::optional<std::uint64_t> seed;
  ChainConfig chain;
  ModelConfig model;
  SweepConfig sweep;
  Tolerances tolerances;
  std::string output;

  static ExperimentConfig from_json(const ojson& j);  // throws ConfigError
  ojson to_json() const;
  ChainSpec chain_spec() const;
  bool randomized() const;
};

ExperimentConfig load_config(const std::string& path);
ojson tolerances_json(const Tolerances& t);

// Builds the map described by the model section.
Automorphism build_model(const ExperimentConfig& cfg);
HamiltonianModel build_hamiltonian(const ExperimentConfig& cfg);

}  // namespace qcalab
