#include "qcalab/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "qcalab/alpu.hpp"
#include "qcalab/choi.hpp"
#include "qcalab/qca.hpp"
#include "qcalab/stability.hpp"

namespace qcalab {

int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::ConfigError:
    case ErrorCode::InvalidArgument:
    case ErrorCode::SpecMismatch:
    case ErrorCode::OpenChainUnsupported:
    case ErrorCode::WindowTooLarge:
      return kExitConfig;
    case ErrorCode::DimensionCap:
      return kExitDimension;
    case ErrorCode::NonzeroIndex:
      return kExitNonzeroIndex;
    default:
      return kExitNumerical;
  }
}

ExperimentConfig resolve_config(const CliOptions& opt) {
  ExperimentConfig cfg = load_config(opt.config_path);
  if (cfg.experiment != opt.command)
    throw Error(ErrorCode::ConfigError,
                "config describes experiment '" + cfg.experiment + "' but the command is '" + opt.command + "'");
  if (opt.seed) cfg.seed = opt.seed;
  if (opt.out) cfg.output = *opt.out;
  if (opt.max_dim) cfg.chain.max_dim = *opt.max_dim;
  if (opt.tolerance) {
    if (!(*opt.tolerance > 0)) throw Error(ErrorCode::ConfigError, "tolerance must be positive");
    cfg.tolerances.residual = *opt.tolerance;
  }
  return cfg;
}

ojson index_json(const IndexValue& v) {
  ojson j;
  j["raw"] = v.raw;
  j["rounded"] = v.rounded;
  ojson lat = ojson::array();
  for (const auto& [p, k] : v.lattice) lat.push_back({{"prime", p}, {"coefficient", k}});
  j["lattice"] = lat;
  j["residual"] = v.residual;
  return j;
}

namespace {

ojson header(const ExperimentConfig& cfg) {
  ojson j;
  j["version"] = kVersion;
  j["experiment"] = cfg.experiment;
  j["config"] = cfg.to_json();
  j["tolerances"] = tolerances_json(cfg.tolerances);
  j["warnings"] = ojson::array();
  return j;
}

int default_window(const Automorphism& a) {
  const ChainSpec& c = a.chain();
  int w = a.locality().kind == LocalityKind::ExactRadius ? std::max(1, a.locality().radius) : 3;
  const int cap = c.boundary == Boundary::Periodic ? (c.num_sites - 1) / 2 : c.num_sites / 2;
  return std::min(w, cap);
}

ojson tail_json(const TailProfile& tp) {
  ojson rows = ojson::array();
  for (std::size_t k = 0; k < tp.r.size(); ++k) rows.push_back({{"r", tp.r[k]}, {"f_hat", tp.f_hat[k]}, {"raw", tp.raw[k]}});
  return {{"method", tail_method_name(tp.method)}, {"certified_radius", tp.certified_radius}, {"profile", rows}};
}

// least squares of log f_hat = log C - mu r over the positive entries with r >= 1
std::pair<double, double> fit_decay(const TailProfile& tp) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t k = 0; k < tp.r.size(); ++k) {
    if (tp.r[k] < 1 || !(tp.f_hat[k] > 0)) continue;
    const double x = tp.r[k], y = std::log(tp.f_hat[k]);
    sx += x, sy += y, sxx += x * x, sxy += x * y, ++n;
  }
  if (n < 2) return {n ? std::exp(sy) : 0.0, std::numeric_limits<double>::infinity()};
  const double mu = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {std::exp((sy + mu * sx) / n), mu};
}

}  // namespace

CommandOutput cmd_index(const ExperimentConfig& cfg) {
  CommandOutput out;
  ojson rep = header(cfg);
  const Automorphism a = build_model(cfg);
  const ChainSpec& c = a.chain();
  const int w = default_window(a);
  const int cut = c.num_sites / 2;
  const bool certified = a.locality().kind == LocalityKind::ExactRadius;

  ojson methods;
  if (certified) {
    const DimensionIndex di = index_dimension(a);
    ojson d = index_json(di.value);
    d["per_block_spread"] = di.spread;
    d["block"] = di.block;
    methods["dimension"] = d;
    for (const std::string& s : di.warnings) rep["warnings"].push_back(s);
  } else {
    methods["dimension"] = nullptr;
    rep["warnings"].push_back("no certified radius: the dimension method is skipped and windows are surrogates");
  }
  if (c.boundary == Boundary::Periodic && c.num_sites < 8 * (certified ? std::max(1, a.locality().radius) : 1))
    rep["warnings"].push_back("short ring: windowed index is a surrogate for the ring index");
  methods["mi_von_neumann"] = index_json(index_mi(a, cut, w, Entropy::VonNeumann).value);
  methods["mi_renyi2"] = index_json(index_mi(a, cut, w, Entropy::Renyi2).value);
  {
    const double ed = index_entropy_diff(a, cut, w);
    methods["entropy_diff"] = index_json(round_index(ed, c.primes()));
  }
  rep["window"] = w;
  rep["cut"] = cut;
  rep["methods"] = methods;

  std::vector<int> cuts = cfg.sweep.cuts;
  if (cuts.empty())
    for (int s = 0; s < c.num_sites; ++s)
      if (c.boundary == Boundary::Periodic || (s - w >= 0 && s + w <= c.num_sites)) cuts.push_back(s);
  ojson per_cut = ojson::array();
  double lo = 1e300, hi = -1e300;
  for (int s : cuts) {
    const double raw = index_mi(a, s, w).value.raw;
    lo = std::min(lo, raw), hi = std::max(hi, raw);
    per_cut.push_back({{"cut", s}, {"raw", raw}});
  }
  rep["per_cut"] = per_cut;
  rep["per_cut_spread"] = cuts.empty() ? 0.0 : hi - lo;

  std::vector<int> windows = cfg.sweep.windows;
  const int wmax = c.boundary == Boundary::Periodic ? (c.num_sites - 1) / 2 : c.num_sites / 2;
  if (windows.empty())
    for (int k = 1; k <= wmax; ++k) windows.push_back(k);
  ojson plateau = ojson::array();
  double plo = 1e300, phi = -1e300;
  for (int k : windows) {
    const IndexValue v = index_mi(a, cut, k).value;
    const double r2 = index_mi(a, cut, k, Entropy::Renyi2).value.raw;
    plateau.push_back({{"window", k}, {"raw_von_neumann", v.raw}, {"raw_renyi2", r2}, {"rounded", v.rounded}});
    if (k >= 3 || k >= wmax) plo = std::min(plo, v.raw), phi = std::max(phi, v.raw);
  }
  rep["window_plateau"] = plateau;
  rep["plateau_spread"] = phi >= plo ? phi - plo : 0.0;
  out.report = std::move(rep);
  return out;
}

CommandOutput cmd_tails(const ExperimentConfig& cfg) {
  CommandOutput out;
  ojson rep = header(cfg);
  const Automorphism a = build_model(cfg);
  const TailMethod m = cfg.sweep.method == "commutator_sup" ? TailMethod::CommutatorSup : TailMethod::RegionDistance;
  const TailProfile tp = measure_tails(a, cfg.sweep.r_max, m, cfg.sweep.max_len);
  rep["tails"] = tail_json(tp);
  const auto [C, mu] = fit_decay(tp);
  rep["fit"] = {{"form", "f(r) <= C exp(-mu r)"}, {"C", C}, {"mu", std::isfinite(mu) ? ojson(mu) : ojson(nullptr)}};
  const bool slow = std::isfinite(mu) && mu < 1.0 && tp.f_hat.back() > 1e-3;
  rep["slow_decay"] = slow;
  if (slow) rep["warnings"].push_back("slow tail decay: profile does not fall off exponentially");
  std::ostringstream csv;
  csv << std::setprecision(17) << "r,f_hat,raw,method\n";
  for (std::size_t k = 0; k < tp.r.size(); ++k)
    csv << tp.r[k] << ',' << tp.f_hat[k] << ',' << tp.raw[k] << ',' << tail_method_name(tp.method) << '\n';
  out.csv = csv.str();
  out.report = std::move(rep);
  return out;
}

CommandOutput cmd_approximate(const ExperimentConfig& cfg) {
  CommandOutput out;
  ojson rep = header(cfg);
  const Automorphism a = build_model(cfg);
  const ApproxSweep sw = approximation_sweep(a, cfg.sweep.blockings, *cfg.seed);
  ojson rows = ojson::array();
  for (const ApproxResult& r : sw.rows)
    rows.push_back({{"j", r.j},
                    {"distance_lower", r.dist_lower},
                    {"distance_upper", r.dist_upper},
                    {"index", index_json(r.index)},
                    {"note", r.note}});
  rep["table"] = rows;
  rep["decreasing"] = sw.decreasing;
  rep["stabilized"] = sw.stabilized;
  rep["stabilized_index"] = sw.stabilized ? ojson(sw.stabilized_index) : ojson(nullptr);
  const ChainSpec& c = a.chain();
  const IndexValue direct = index_mi(a, c.num_sites / 2, default_window(a)).value;
  rep["index_mi"] = index_json(direct);
  rep["matches_index_mi"] = sw.stabilized && std::abs(sw.stabilized_index - direct.rounded) < 1e-9;
  out.report = std::move(rep);
  return out;
}

namespace {

ojson matrix_json(const Mat& m) {
  ojson re = ojson::array(), im = ojson::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ojson rr = ojson::array(), ri = ojson::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) rr.push_back(m(i, k).real()), ri.push_back(m(i, k).imag());
    re.push_back(rr), im.push_back(ri);
  }
  return {{"re", re}, {"im", im}};
}

}  // namespace

CommandOutput cmd_synthesize(const ExperimentConfig& cfg) {
  CommandOutput out;
  ojson rep = header(cfg);
  const Automorphism a = build_model(cfg);
  const Synthesis syn = synthesize_hamiltonian(a, cfg.seed.value_or(23));
  ojson terms = ojson::array();
  for (std::size_t k = 0; k < syn.model.terms.size(); ++k) {
    const ChainOperator& op = syn.model.terms[k].op;
    terms.push_back({{"id", k},
                     {"segment", syn.terms[k].segment},
                     {"sites", op.support.sites},
                     {"diameter", syn.terms[k].diameter},
                     {"norm", syn.terms[k].norm},
                     {"matrix", matrix_json(op.m)}});
  }
  ojson sched = ojson::array();
  for (const Segment& s : syn.model.schedule) sched.push_back({{"duration", s.duration}, {"terms", s.terms}});
  rep["model"] = {{"sites", syn.model.chain.num_sites}, {"local_dims", syn.model.chain.local_dims},
                  {"terms", terms}, {"schedule", sched}};
  rep["endpoint_residual"] = syn.residual;
  rep["within_tolerance"] = syn.residual <= std::max(cfg.tolerances.residual, 1e-6);
  rep["phase_retries"] = syn.phase_retries;
  out.report = std::move(rep);
  return out;
}

CommandOutput cmd_stability(const ExperimentConfig& cfg) {
  CommandOutput out;
  ojson rep = header(cfg);
  const std::uint64_t seed = *cfg.seed;
  const LemmaSuite ls = commutator_lemma_suite(seed, cfg.sweep.draws);
  rep["lemmas"] = {{"draws", ls.draws},
                   {"powers_violations", ls.powers_violations},
                   {"powers_max_ratio", ls.powers_max_ratio},
                   {"polar_violations", ls.polar_violations},
                   {"polar_max_ratio", ls.polar_max_ratio}};
  auto trials = [&](bool inner) {
    Rng rng(seed + (inner ? 1 : 2));
    ojson pts = ojson::array();
    int fails = 0;
    double max_ratio = 0.0, max_res = 0.0;
    for (int k = 0; k < cfg.sweep.trials; ++k) {
      const StabilityTrial t = inner ? make_inner_trial(rng) : rotate_into_trial(rng);
      fails += t.ok ? 0 : 1;
      if (t.bound > 0) max_ratio = std::max(max_ratio, t.dist_identity / t.bound);
      max_res = std::max(max_res, t.residual);
      pts.push_back({{"eps", t.eps}, {"dist_identity", t.dist_identity}, {"bound", t.bound}});
    }
    return ojson{{"trials", cfg.sweep.trials}, {"failures", fails}, {"max_slack_ratio", max_ratio},
                 {"max_residual", max_res}, {"points", pts}};
  };
  rep["make_inner"] = trials(true);
  rep["rotate_into"] = trials(false);
  // a flip is far from the inclusion: the construction must refuse it
  {
    const Region r({0}, true);
    const OperatorAlgebra A = OperatorAlgebra::full(ChainSpec::uniform(1, 2, Boundary::Open), r);
    const Mat x = pauli('X');
    ojson e;
    try {
      make_inner(NearHomomorphism::make({A}, {[x](const Mat& m) { return Mat(x * m * x); }}));
      e = {{"error", nullptr}};
    } catch (const Error& err) {
      e = {{"error", error_name(err.code())}, {"message", err.what()}};
    }
    rep["large_epsilon_case"] = e;
  }
  out.report = std::move(rep);
  return out;
}

CommandOutput cmd_jw_demo(const ExperimentConfig& cfg) {
  CommandOutput out;
  ojson rep = header(cfg);
  const JwReport jw = jw_translation_demo(cfg.sweep.N, cfg.sweep.s_values);
  rep["N"] = jw.N;
  rep["single_particle_residual"] = jw.single_particle_residual;
  rep["fock_residual"] = jw.fock_residual;
  rep["sector"] = jw.sector_note;
  rep["coefficients"] = jw.coeff;
  rep["r_times_coefficient"] = {{"min", jw.coeff_ratio_min}, {"max", jw.coeff_ratio_max}, {"within_factor_2", jw.coeff_ok}};
  ojson tails = ojson::array();
  for (std::size_t k = 0; k < jw.s_values.size(); ++k)
    tails.push_back({{"s", jw.s_values[k]}, {"translation", tail_json(jw.tails[k])},
                     {"exp_decay_reference", tail_json(jw.reference_tails[k])}});
  rep["tails"] = tails;
  rep["slow_decay"] = jw.slow_decay;
  out.report = std::move(rep);
  return out;
}

CommandOutput run_command(const ExperimentConfig& cfg) {
  if (cfg.experiment == "index") return cmd_index(cfg);
  if (cfg.experiment == "tails") return cmd_tails(cfg);
  if (cfg.experiment == "approximate") return cmd_approximate(cfg);
  if (cfg.experiment == "synthesize") return cmd_synthesize(cfg);
  if (cfg.experiment == "stability") return cmd_stability(cfg);
  if (cfg.experiment == "jw-demo") return cmd_jw_demo(cfg);
  throw Error(ErrorCode::ConfigError, "unknown experiment '" + cfg.experiment + "'");
}

namespace {

void write_file(const std::string& path, const std::string& data) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::ConfigError, "cannot write '" + path + "'");
  f << data;
}

}  // namespace

int run_cli(const CliOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    const ExperimentConfig cfg = resolve_config(opt);
    const CommandOutput res = run_command(cfg);
    const std::string json = res.report.dump(2) + "\n";
    if (cfg.output.empty()) {
      out << json;
      if (!res.csv.empty()) out << res.csv;
    } else if (!res.csv.empty()) {
      write_file(cfg.output, res.csv);
      write_file(cfg.output + ".json", json);
    } else {
      write_file(cfg.output, json);
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace qcalab
