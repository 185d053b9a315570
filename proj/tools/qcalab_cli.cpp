#include <iostream>

#include "CLI11.hpp"
#include "qcalab/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"qcalab: index, locality and stability experiments for 1D quantum cellular automata"};
  app.require_subcommand(1);
  qcalab::CliOptions opt;
  std::uint64_t seed = 0;
  std::string out;
  std::size_t max_dim = 0;
  double tol = 0.0;
  for (const char* name : {"index", "tails", "approximate", "synthesize", "stability", "jw-demo"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", opt.config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "seed for randomized experiments");
    sub->add_option("--out", out, "output path");
    sub->add_option("--max-dim", max_dim, "cap on full-chain operator dimension")->check(CLI::PositiveNumber);
    sub->add_option("--tolerance", tol, "residual tolerance")->check(CLI::PositiveNumber);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : qcalab::kExitConfig;
  }
  CLI::App* sub = app.get_subcommands().front();
  opt.command = sub->get_name();
  if (sub->count("--seed")) opt.seed = seed;
  if (sub->count("--out")) opt.out = out;
  if (sub->count("--max-dim")) opt.max_dim = max_dim;
  if (sub->count("--tolerance")) opt.tolerance = tol;
  return qcalab::run_cli(opt, std::cout, std::cerr);
}
