// Command-line front end: every module is exposed as a subcommand with
// reproducible, machine-readable JSON/CSV output. Exit codes: 0 success,
// 2 argument error, 3 non-convergence, 4 domain escape.

#include <CLI11.hpp>
#include <json.hpp>

#include <complex>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qdyn/errors.hpp"
#include "qdyn/julia_moments.hpp"
#include "qdyn/julia_sampler.hpp"
#include "qdyn/orbit_core.hpp"
#include "qdyn/perm_unitary.hpp"
#include "qdyn/quad_family.hpp"
#include "qdyn/rational_poly.hpp"
#include "qdyn/rng.hpp"
#include "qdyn/systems.hpp"
#include "qdyn/transfer_spectral.hpp"
#include "qdyn/version.hpp"

using json = nlohmann::ordered_json;
using namespace qdyn;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitArgument = 2;
constexpr int kExitNonConvergence = 3;
constexpr int kExitDomainEscape = 4;

std::string g_command_line;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json make_meta(std::optional<std::uint64_t> seed, json tolerances) {
  json meta;
  meta["tool"] = kToolName;
  meta["version"] = kVersion;
  meta["command"] = g_command_line;
  if (seed)
    meta["seed"] = *seed;
  else
    meta["seed"] = nullptr;
  meta["tolerances"] = std::move(tolerances);
  return meta;
}

void write_text(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << "\n";
    return;
  }
  std::ofstream os(out_path, std::ios::binary);
  if (!os) throw argument_error("cannot open output file: " + out_path);
  os << text;
}

void write_json(const json& doc, const std::string& out_path) {
  write_text(doc.dump(2), out_path);
}

// "# key: value" comment header carrying the run metadata, then the rows
std::string csv_with_meta(const json& meta, const std::string& body) {
  std::ostringstream os;
  os << "# tool: " << meta["tool"].get<std::string>() << " "
     << meta["version"].get<std::string>() << "\n";
  os << "# command: " << meta["command"].get<std::string>() << "\n";
  if (meta["seed"].is_null())
    os << "# seed: none\n";
  else
    os << "# seed: " << meta["seed"].get<std::uint64_t>() << "\n";
  os << "# tolerances: " << meta["tolerances"].dump() << "\n";
  os << body;
  return os.str();
}

std::uint64_t entropy_seed() {
  std::random_device rd;
  std::uint64_t hi = rd(), lo = rd();
  return (hi << 32) ^ lo;
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> given) {
  if (given) return *given;
  std::uint64_t s = entropy_seed();
  std::cerr << "seed: " << s << "\n";
  return s;
}

json complex_json(std::complex<double> z) {
  return json{{"re", z.real()}, {"im", z.imag()}};
}

json state_json(double x) { return json(x); }
json state_json(std::size_t x) { return json(x); }
json state_json(std::complex<double> z) { return complex_json(z); }

std::string state_csv(double x) { return fmt17(x); }
std::string state_csv(std::size_t x) { return std::to_string(x); }
std::string state_csv(std::complex<double> z) {
  return fmt17(z.real()) + "," + fmt17(z.imag());
}

std::complex<double> parse_complex(const std::string& text) {
  auto comma = text.find(',');
  if (comma == std::string::npos) return {std::stod(text), 0.0};
  return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
}

json read_input_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw argument_error("cannot open input file: " + path);
  json doc;
  try {
    is >> doc;
  } catch (const json::parse_error& e) {
    throw argument_error(std::string("invalid JSON input: ") + e.what());
  }
  return doc;
}

std::vector<std::size_t> json_index_array(const json& doc, const std::string& key,
                                          bool required) {
  if (!doc.contains(key)) {
    if (required) throw argument_error("input JSON lacks \"" + key + "\"");
    return {};
  }
  std::vector<std::size_t> out;
  for (const auto& v : doc[key]) {
    long long x = v.get<long long>();
    if (x < 0) throw argument_error("\"" + key + "\" entries must be nonnegative");
    out.push_back(static_cast<std::size_t>(x));
  }
  return out;
}

std::vector<double> json_real_array(const json& doc, const std::string& key,
                                    std::size_t expected, double fill) {
  if (!doc.contains(key)) return std::vector<double>(expected, fill);
  std::vector<double> out;
  for (const auto& v : doc[key]) out.push_back(v.get<double>());
  if (out.size() != expected)
    throw argument_error("\"" + key + "\" length mismatch");
  return out;
}

// ---------------------------------------------------------------------
// shared flag bundles

struct CommonOut {
  std::string format = "json";
  std::string out_path;

  void attach(CLI::App* cmd) {
    cmd->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    cmd->add_option("--out", out_path, "output file (default stdout)");
  }
};

struct SystemChoice {
  std::string system = "quad";
  double alpha = 1.0;
  double gamma = 0.6180339887498949;  // rotation fraction of the full turn

  void attach(CLI::App* cmd, bool allow_squaring = true) {
    auto names = allow_squaring
                     ? std::vector<std::string>{"quad", "squaring", "rotation"}
                     : std::vector<std::string>{"quad", "rotation"};
    cmd->add_option("--system", system, "dynamical system")
        ->check(CLI::IsMember(names))
        ->capture_default_str();
    cmd->add_option("--alpha", alpha, "quadratic family parameter")
        ->capture_default_str();
    cmd->add_option("--gamma", gamma, "rotation fraction (angle = 2*pi*gamma)")
        ->capture_default_str();
  }

  void validate_quad_alpha() const {
    if (system == "quad" && !(alpha > 0.0 && alpha <= 2.0))
      throw argument_error("--alpha must be in (0, 2] for the quad system");
  }
};

// ---------------------------------------------------------------------
// subcommand handlers

struct OrbitArgs {
  SystemChoice sys;
  CommonOut out;
  std::string u = "0";
  std::size_t n = 10;
};

int run_orbit(const OrbitArgs& args) {
  args.sys.validate_quad_alpha();
  json meta = make_meta(std::nullopt, json::object());
  auto emit = [&](const auto& system, auto u0) {
    auto rec = iterate(system, u0, args.n);
    if (args.out.format == "json") {
      json doc;
      doc["meta"] = meta;
      doc["system"] = system_name(system);
      json states = json::array();
      for (const auto& s : rec.states) states.push_back(state_json(s));
      doc["states"] = states;
      write_json(doc, args.out.out_path);
    } else {
      std::ostringstream body;
      body << (rec.states.size() && state_csv(rec.states[0]).find(',') !=
                                        std::string::npos
                   ? "n,re,im\n"
                   : "n,x\n");
      for (std::size_t i = 0; i < rec.states.size(); ++i)
        body << i << "," << state_csv(rec.states[i]) << "\n";
      write_text(csv_with_meta(meta, body.str()), args.out.out_path);
    }
  };
  if (args.sys.system == "quad")
    emit(QuadMapSystem{args.sys.alpha}, std::stod(args.u));
  else if (args.sys.system == "squaring")
    emit(SquaringMapSystem{}, parse_complex(args.u));
  else
    emit(CircleRotationSystem{2.0 * std::numbers::pi * args.sys.gamma},
         CircleRotationSystem::wrap(std::stod(args.u)));
  return kExitOk;
}

struct OmegaArgs {
  SystemChoice sys;
  CommonOut out;
  std::string u = "0.3";
  std::size_t burn_in = 1000;
  std::size_t tail = 1000;
  double tol = 1e-6;
  double minimality_eps = 0.0;       // 0: skip probe
  std::size_t minimality_steps = 0;  // 0: defaults to tail
  double link_radius = 0.0;          // 0: skip probe
};

int run_omega(const OmegaArgs& args) {
  args.sys.validate_quad_alpha();
  json meta = make_meta(std::nullopt, json{{"tol", args.tol}});
  auto emit = [&](const auto& system, auto u0) {
    auto est = omega_estimate(system, u0, args.burn_in, args.tail, args.tol);
    json doc;
    doc["meta"] = meta;
    doc["system"] = est.source;
    doc["burn_in"] = est.burn_in;
    doc["tail"] = est.tail;
    doc["tol"] = est.tol;
    json reps = json::array();
    for (const auto& r : est.representatives) reps.push_back(state_json(r));
    doc["representatives"] = reps;
    if (args.minimality_eps > 0.0) {
      auto probe = minimality_probe(
          system, est, args.minimality_eps,
          args.minimality_steps ? args.minimality_steps : args.tail);
      doc["minimality"] = json{{"eps", args.minimality_eps},
                               {"pass", probe.pass}};
    }
    if (args.link_radius > 0.0)
      doc["components"] = connectivity_probe(system, est, args.link_radius);
    if (args.out.format == "json") {
      write_json(doc, args.out.out_path);
    } else {
      std::ostringstream body;
      bool complex_states =
          !est.representatives.empty() &&
          state_csv(est.representatives[0]).find(',') != std::string::npos;
      body << (complex_states ? "re,im\n" : "x\n");
      for (const auto& r : est.representatives) body << state_csv(r) << "\n";
      write_text(csv_with_meta(meta, body.str()), args.out.out_path);
    }
  };
  if (args.sys.system == "quad")
    emit(QuadMapSystem{args.sys.alpha}, std::stod(args.u));
  else if (args.sys.system == "squaring")
    emit(SquaringMapSystem{}, parse_complex(args.u));
  else
    emit(CircleRotationSystem{2.0 * std::numbers::pi * args.sys.gamma},
         CircleRotationSystem::wrap(std::stod(args.u)));
  return kExitOk;
}

struct ClassifyArgs {
  double alpha = 1.0;
  CommonOut out;
};

int run_classify(const ClassifyArgs& args) {
  if (!(args.alpha > 0.0 && args.alpha < 2.0))
    throw argument_error("--alpha must be in (0, 2) for classify");
  auto rep = quad::classify(args.alpha);
  json doc;
  doc["meta"] = make_meta(std::nullopt, json::object());
  doc["alpha"] = rep.alpha;
  doc["regime"] = quad::regime_name(rep.regime);
  doc["x_star"] = rep.x_star;
  doc["fixed_multiplier"] = rep.fixed_mult;
  if (rep.cycle) {
    doc["x1"] = rep.cycle->first;
    doc["x2"] = rep.cycle->second;
    doc["cycle_multiplier"] = *rep.cycle_mult;
  }
  write_json(doc, args.out.out_path);
  return kExitOk;
}

struct CriticalOrbitArgs {
  double alpha = 1.0;
  std::size_t n = 10;
  CommonOut out;
};

int run_critical_orbit(const CriticalOrbitArgs& args) {
  if (!(args.alpha > 0.0 && args.alpha <= 2.0))
    throw argument_error("--alpha must be in (0, 2] for critical-orbit");
  auto xi = quad::critical_orbit(args.alpha, args.n);
  json meta = make_meta(std::nullopt, json::object());
  if (args.out.format == "json") {
    json doc;
    doc["meta"] = meta;
    doc["alpha"] = args.alpha;
    doc["xi"] = xi;
    write_json(doc, args.out.out_path);
  } else {
    std::ostringstream body;
    body << "n,xi\n";
    for (std::size_t i = 0; i < xi.size(); ++i)
      body << i << "," << fmt17(xi[i]) << "\n";
    write_text(csv_with_meta(meta, body.str()), args.out.out_path);
  }
  return kExitOk;
}

struct BcStatArgs {
  double alpha = 2.0;
  std::size_t n = 100;
  CommonOut out;
};

int run_bc_stat(const BcStatArgs& args) {
  if (!(args.alpha > 0.0 && args.alpha <= 2.0))
    throw argument_error("--alpha must be in (0, 2] for bc-stat");
  auto bc = quad::bc_statistic(args.alpha, args.n);
  json meta = make_meta(std::nullopt, json::object());
  if (args.out.format == "json") {
    json doc;
    doc["meta"] = meta;
    doc["alpha"] = args.alpha;
    doc["n"] = bc.n;
    if (bc.degenerate_index)
      doc["degenerate_index"] = *bc.degenerate_index;
    else
      doc["degenerate_index"] = nullptr;
    json rows = json::array();
    for (std::size_t m = 1; m <= bc.n; ++m)
      rows.push_back(json{{"m", m},
                          {"log_deriv", bc.log_deriv[m - 1]},
                          {"threshold", bc.threshold[m - 1]},
                          {"pass", static_cast<bool>(bc.flags[m - 1])}});
    doc["rows"] = rows;
    write_json(doc, args.out.out_path);
  } else {
    std::ostringstream body;
    body << "m,log_deriv,threshold,pass\n";
    for (std::size_t m = 1; m <= bc.n; ++m)
      body << m << "," << fmt17(bc.log_deriv[m - 1]) << ","
           << fmt17(bc.threshold[m - 1]) << "," << (bc.flags[m - 1] ? 1 : 0)
           << "\n";
    write_text(csv_with_meta(meta, body.str()), args.out.out_path);
  }
  return kExitOk;
}

struct MomentsArgs {
  int kmax = 10;
  std::string alpha = "2";
  CommonOut out;
};

int run_moments(const MomentsArgs& args) {
  if (args.kmax < 0) throw argument_error("--kmax must be >= 0");
  BigRat alpha = parse_rational(args.alpha);
  if (alpha == 0) throw argument_error("--alpha must be nonzero");
  auto table = moments::moment_table(args.kmax);
  json meta = make_meta(std::nullopt, json::object());
  if (args.out.format == "csv") {
    write_text(csv_with_meta(meta, moments::moment_table_csv(table, alpha)),
               args.out.out_path);
  } else {
    json doc;
    doc["meta"] = meta;
    doc["alpha"] = fraction_string(alpha);
    json rows = json::array();
    for (int k = 0; k <= table.k_max(); ++k) {
      json coeffs = json::array();
      for (const auto& c : table.lambda(k).coeffs())
        coeffs.push_back(fraction_string(c));
      rows.push_back(json{{"k", k},
                          {"coeffs", coeffs},
                          {"lambda", fraction_string(table.at(alpha, k))}});
    }
    doc["moments"] = rows;
    write_json(doc, args.out.out_path);
  }
  return kExitOk;
}

struct PhiArgs {
  int kmax = 10;
  int check_nmax = -1;  // -1: same as kmax
  CommonOut out;
};

int run_phi(const PhiArgs& args) {
  if (args.kmax < 0) throw argument_error("--kmax must be >= 0");
  auto phis = moments::phi_table(args.kmax);
  int nmax = args.check_nmax >= 0 ? args.check_nmax : args.kmax;
  if (nmax > args.kmax) throw argument_error("--check-nmax exceeds --kmax");
  auto identity = moments::phi_identity_check(phis, nmax);
  json doc;
  doc["meta"] = make_meta(std::nullopt, json::object());
  json rows = json::array();
  for (int k = 0; k <= args.kmax; ++k) {
    json coeffs = json::array();
    for (const auto& c : phis[static_cast<std::size_t>(k)].coeffs())
      coeffs.push_back(fraction_string(c));
    rows.push_back(json{{"k", k}, {"coeffs", coeffs}});
  }
  doc["phi"] = rows;
  doc["identity_checked_to"] = nmax;
  doc["identity_pass"] = identity.pass;
  if (!identity.pass) doc["identity_failing_n"] = identity.failing_n;
  write_json(doc, args.out.out_path);
  return kExitOk;
}

struct StieltjesArgs {
  std::string alpha = "2";
  double z = 2.0;
  double tol = 1e-12;
  int term_cap = 400;
  CommonOut out;
};

int run_stieltjes(const StieltjesArgs& args) {
  BigRat alpha = parse_rational(args.alpha);
  auto sv = moments::stieltjes(alpha, args.z, args.tol, args.term_cap);
  json doc;
  doc["meta"] = make_meta(std::nullopt,
                          json{{"tol", args.tol}, {"term_cap", args.term_cap}});
  doc["alpha"] = fraction_string(alpha);
  doc["z"] = args.z;
  doc["value"] = sv.value.real();
  doc["terms_used"] = sv.terms_used;
  doc["last_term"] = sv.last_term;
  doc["converged"] = sv.converged;
  doc["note"] = "last_term is a heuristic error proxy, not a rigorous bound";
  write_json(doc, args.out.out_path);
  return sv.converged ? kExitOk : kExitNonConvergence;
}

struct FourierArgs {
  std::string alpha = "2";
  double z = 1.0;
  int nmax = 30;
  CommonOut out;
};

int run_fourier(const FourierArgs& args) {
  BigRat alpha = parse_rational(args.alpha);
  auto pair = moments::fourier(alpha, args.z, args.nmax);
  json doc;
  doc["meta"] = make_meta(std::nullopt, json{{"n_max", args.nmax}});
  doc["alpha"] = fraction_string(alpha);
  doc["z"] = args.z;
  doc["moment_series"] = complex_json(pair.moment_series.value);
  doc["shifted_series"] = complex_json(pair.shifted_series.value);
  doc["discrepancy"] = pair.discrepancy;
  doc["tail_bound"] = pair.tail_bound;
  write_json(doc, args.out.out_path);
  return kExitOk;
}

struct SampleArgs {
  double alpha = 2.0;
  std::size_t count = 100000;
  std::size_t burn_in = 100;
  std::optional<std::uint64_t> seed;
  std::string meta_path;
  CommonOut out;
};

int run_sample(const SampleArgs& args) {
  std::uint64_t seed = resolve_seed(args.seed);
  auto cloud = sampler::sample(args.alpha, args.count, args.burn_in, seed);
  json meta = make_meta(seed, json::object());
  json cloud_meta{{"alpha", cloud.alpha},
                  {"seed", cloud.seed},
                  {"burn_in", cloud.burn_in},
                  {"count", cloud.count},
                  {"generator", cloud.generator},
                  {"support_bound", sampler::support_bound(cloud)}};
  if (!args.meta_path.empty()) {
    json doc;
    doc["meta"] = meta;
    doc["cloud"] = cloud_meta;
    write_json(doc, args.meta_path);
  }
  if (args.out.format == "csv") {
    std::ostringstream body;
    body << "re,im\n";
    for (const auto& z : cloud.points)
      body << fmt17(z.real()) << "," << fmt17(z.imag()) << "\n";
    json m = meta;
    m["tolerances"] = cloud_meta;
    write_text(csv_with_meta(m, body.str()), args.out.out_path);
  } else {
    json doc;
    doc["meta"] = meta;
    doc["cloud"] = cloud_meta;
    json pts = json::array();
    for (const auto& z : cloud.points)
      pts.push_back(json::array({z.real(), z.imag()}));
    doc["points"] = pts;
    write_json(doc, args.out.out_path);
  }
  return kExitOk;
}

struct RealCertArgs {
  double alpha = 1.9;
  std::size_t cap = 10000;
  bool exact = false;
  std::string alpha_exact;  // rational string for --exact
  CommonOut out;
};

int run_real_cert(const RealCertArgs& args) {
  auto cert = sampler::realness_certificate(args.alpha, args.cap);
  json doc;
  doc["meta"] = make_meta(std::nullopt, json{{"cap", args.cap}});
  doc["alpha"] = args.alpha;
  doc["verdict"] = sampler::cert_verdict_name(cert.verdict);
  if (cert.failure_index)
    doc["failure_index"] = *cert.failure_index;
  else
    doc["failure_index"] = nullptr;
  json chain = json::array();
  for (std::size_t i = 0; i < cert.chain.size() && i < 64; ++i)
    chain.push_back(cert.chain[i]);
  doc["chain"] = chain;
  doc["annotations"] =
      json{{"exact_step_condition", "b stays positive iff alpha*b^2 > 1"},
           {"first_step_positive_iff", "alpha*(alpha-1)^2 > 1"},
           {"rounded_literature_thresholds", json::array({"7/4", "15/8"})}};
  if (args.exact) {
    BigRat alpha = args.alpha_exact.empty() ? parse_rational(std::to_string(args.alpha))
                                            : parse_rational(args.alpha_exact);
    auto ex = sampler::realness_certificate_exact(alpha, args.cap);
    json exact;
    exact["alpha"] = fraction_string(alpha);
    exact["verdict"] = sampler::cert_verdict_name(ex.verdict);
    if (ex.failure_index)
      exact["failure_index"] = *ex.failure_index;
    else
      exact["failure_index"] = nullptr;
    json echain = json::array();
    for (std::size_t i = 0; i < ex.chain.size() && i < 16; ++i)
      echain.push_back(fraction_string(ex.chain[i]));
    exact["chain"] = echain;
    doc["exact"] = exact;
  }
  write_json(doc, args.out.out_path);
  return kExitOk;
}

struct PermArgs {
  std::string input;
  double t = 0.3;
  double s = 0.7;
  int nmax = 6;
  int trials = 10;
  std::optional<std::uint64_t> seed;
  CommonOut out;
};

int run_perm_spectral(const PermArgs& args) {
  json in = read_input_json(args.input);
  auto image = json_index_array(in, "image", true);
  auto p = perm::decompose(image);
  std::vector<std::size_t> subset = json_index_array(in, "subset", false);
  if (subset.empty() && p.size > 0) subset.push_back(0);
  std::uint64_t seed = resolve_seed(args.seed);

  auto chi = perm::indicator(p.size, subset);
  auto nu = perm::spectral_measure(p, chi, chi);
  auto law = perm::group_law_check(p, args.t, args.s, args.trials, 1e-12, seed);

  json doc;
  doc["meta"] = make_meta(seed, json{{"group_law_tol", 1e-12}});
  doc["size"] = p.size;
  json cycles = json::array();
  for (const auto& cyc : p.cycles) cycles.push_back(cyc);
  doc["cycles"] = cycles;
  doc["subset"] = subset;
  json atoms = json::array();
  for (const auto& atom : nu.atoms)
    atoms.push_back(json{{"turn_fraction", std::to_string(atom.angle_num) + "/" +
                                               std::to_string(atom.angle_den)},
                         {"theta", atom.theta_mod},
                         {"transform_theta", atom.theta},
                         {"weight_re", atom.weight.real()},
                         {"weight_im", atom.weight.imag()}});
  doc["atoms"] = atoms;
  json autoc = json::array();
  for (int n = -args.nmax; n <= args.nmax; ++n)
    autoc.push_back(json{
        {"n", n},
        {"value", fraction_string(perm::autocorrelation(p, subset, n))}});
  doc["autocorrelation"] = autoc;
  doc["group_law"] = json{{"t", args.t},
                          {"s", args.s},
                          {"trials", args.trials},
                          {"pass", law.pass},
                          {"worst_group", law.worst_group},
                          {"worst_unitarity", law.worst_unitarity},
                          {"worst_indicator", law.worst_indicator}};
  write_json(doc, args.out.out_path);
  return kExitOk;
}

struct TransferPotentialArgs {
  std::string input;
  double tol = 1e-11;
  std::size_t ncap = 300000;
  CommonOut out;
};

int run_transfer_potential(const TransferPotentialArgs& args) {
  json in = read_input_json(args.input);
  auto map = json_index_array(in, "map", true);
  auto sys = transfer::FiniteSystem::from_map(map);
  auto c = json_real_array(in, "c", sys.size, 0.0);
  auto a = json_real_array(in, "a", sys.size, 0.0);
  auto op = transfer::build(sys, c);
  auto pv = transfer::spectral_potential(op, a, args.tol, args.ncap);
  json doc;
  doc["meta"] = make_meta(std::nullopt,
                          json{{"tol", args.tol}, {"n_cap", args.ncap}});
  doc["value"] = pv.value;
  doc["iterations"] = pv.iterations;
  doc["residual"] = pv.residual;
  doc["converged"] = pv.converged;
  write_json(doc, args.out.out_path);
  return pv.converged ? kExitOk : kExitNonConvergence;
}

struct TransferPropsArgs {
  std::string input;
  int trials = 20;
  double tol = 1e-6;
  std::optional<std::uint64_t> seed;
  CommonOut out;
};

int run_transfer_props(const TransferPropsArgs& args) {
  json in = read_input_json(args.input);
  auto map = json_index_array(in, "map", true);
  auto sys = transfer::FiniteSystem::from_map(map);
  auto c = json_real_array(in, "c", sys.size, 0.0);
  auto op = transfer::build(sys, c);
  std::uint64_t seed = resolve_seed(args.seed);
  auto rep = transfer::property_suite(op, args.trials, args.tol, seed);
  json doc;
  doc["meta"] = make_meta(seed, json{{"tol", args.tol}});
  doc["trials"] = args.trials;
  doc["all_pass"] = rep.all_pass;
  json checks = json::array();
  for (const auto& c2 : rep.checks) {
    json entry{{"name", c2.name}, {"pass", c2.pass}, {"worst", c2.worst}};
    if (c2.witness) {
      entry["witness"] = json{{"a", c2.witness->a},
                              {"b", c2.witness->b},
                              {"t", c2.witness->t}};
    }
    checks.push_back(entry);
  }
  doc["checks"] = checks;
  write_json(doc, args.out.out_path);
  return kExitOk;
}

struct Theorem4Args {
  std::string input;
  int trials = 20;
  double tol = 1e-6;
  std::optional<std::uint64_t> seed;
  CommonOut out;
};

int run_theorem4(const Theorem4Args& args) {
  json in = read_input_json(args.input);
  auto map = json_index_array(in, "map", true);
  auto sys = transfer::FiniteSystem::from_map(map);
  auto c = json_real_array(in, "c", sys.size, 0.0);
  auto op = transfer::build(sys, c);
  std::uint64_t seed = resolve_seed(args.seed);
  auto res = transfer::theorem4_check(op, args.trials, args.tol, seed);
  json doc;
  doc["meta"] = make_meta(seed, json{{"tol", args.tol}});
  doc["pass"] = res.pass;
  doc["worst"] = res.worst;
  doc["cycle"] = res.cycle;
  write_json(doc, args.out.out_path);
  return kExitOk;
}

struct BirkhoffArgs {
  SystemChoice sys;
  std::string f = "cos";
  double u = 0.0;
  std::size_t n = 1000000;
  CommonOut out;
};

int run_birkhoff(const BirkhoffArgs& args) {
  args.sys.validate_quad_alpha();
  double avg = 0.0;
  auto apply = [&](const auto& system, double u0) {
    if (args.f == "cos")
      return birkhoff_average(system, [](double x) { return std::cos(x); }, u0,
                              args.n);
    if (args.f == "sin")
      return birkhoff_average(system, [](double x) { return std::sin(x); }, u0,
                              args.n);
    if (args.f == "one")
      return birkhoff_average(system, [](double) { return 1.0; }, u0, args.n);
    return birkhoff_average(system, [](double x) { return x; }, u0, args.n);
  };
  if (args.sys.system == "quad")
    avg = apply(QuadMapSystem{args.sys.alpha}, args.u);
  else
    avg = apply(CircleRotationSystem{2.0 * std::numbers::pi * args.sys.gamma},
                CircleRotationSystem::wrap(args.u));
  json doc;
  doc["meta"] = make_meta(std::nullopt, json::object());
  doc["f"] = args.f;
  doc["n"] = args.n;
  doc["average"] = avg;
  write_json(doc, args.out.out_path);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  std::ostringstream cmd;
  for (int i = 0; i < argc; ++i) {
    if (i) cmd << " ";
    cmd << argv[i];
  }
  g_command_line = cmd.str();

  CLI::App app{"computational dynamics of the quadratic family 1 - alpha*z^2"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolName) + " " + kVersion);

  OrbitArgs orbit_args;
  auto* orbit_cmd = app.add_subcommand("orbit", "iterate a dynamical system");
  orbit_args.sys.attach(orbit_cmd);
  orbit_args.out.attach(orbit_cmd);
  orbit_cmd->add_option("--u", orbit_args.u, "initial state (re or re,im)")
      ->capture_default_str();
  orbit_cmd->add_option("--n", orbit_args.n, "iteration count")
      ->capture_default_str();

  OmegaArgs omega_args;
  auto* omega_cmd = app.add_subcommand("omega", "estimate an omega-limit set");
  omega_args.sys.attach(omega_cmd);
  omega_args.out.attach(omega_cmd);
  omega_cmd->add_option("--u", omega_args.u, "initial state")->capture_default_str();
  omega_cmd->add_option("--burn-in", omega_args.burn_in, "discarded iterates")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  omega_cmd->add_option("--tail", omega_args.tail, "clustered iterates")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  omega_cmd->add_option("--tol", omega_args.tol, "cluster radius")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  omega_cmd->add_option("--minimality-eps", omega_args.minimality_eps,
                        "run the minimality probe at this eps");
  omega_cmd->add_option("--minimality-steps", omega_args.minimality_steps,
                        "orbit length for the minimality probe");
  omega_cmd->add_option("--link-radius", omega_args.link_radius,
                        "run the connectivity probe at this radius");

  ClassifyArgs classify_args;
  auto* classify_cmd =
      app.add_subcommand("classify", "attracting-regime classifier");
  classify_args.out.attach(classify_cmd);
  classify_cmd->add_option("--alpha", classify_args.alpha, "parameter in (0,2)")
      ->required();

  CriticalOrbitArgs crit_args;
  auto* crit_cmd = app.add_subcommand("critical-orbit", "orbit of the critical point");
  crit_args.out.attach(crit_cmd);
  crit_cmd->add_option("--alpha", crit_args.alpha, "parameter in (0,2]")->required();
  crit_cmd->add_option("--n", crit_args.n, "iteration count")->capture_default_str();

  BcStatArgs bc_args;
  auto* bc_cmd =
      app.add_subcommand("bc-stat", "derivative growth along the orbit of 1");
  bc_args.out.attach(bc_cmd);
  bc_cmd->add_option("--alpha", bc_args.alpha, "parameter in (0,2]")->required();
  bc_cmd->add_option("--n", bc_args.n, "iterate count")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  MomentsArgs moments_args;
  auto* moments_cmd =
      app.add_subcommand("moments", "exact balanced-measure moments");
  moments_args.out.attach(moments_cmd);
  moments_cmd->add_option("--kmax", moments_args.kmax, "table size")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  moments_cmd
      ->add_option("--alpha", moments_args.alpha, "evaluation point (rational)")
      ->capture_default_str();

  PhiArgs phi_args;
  auto* phi_cmd = app.add_subcommand("phi", "companion polynomials and identity");
  phi_args.out.attach(phi_cmd);
  phi_cmd->add_option("--kmax", phi_args.kmax, "table size")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  phi_cmd->add_option("--check-nmax", phi_args.check_nmax,
                      "verify the binomial identity up to n");

  StieltjesArgs st_args;
  auto* st_cmd =
      app.add_subcommand("stieltjes", "moment generating series of the resolvent");
  st_args.out.attach(st_cmd);
  st_cmd->add_option("--alpha", st_args.alpha, "parameter (rational)")
      ->capture_default_str();
  st_cmd->add_option("--z", st_args.z, "evaluation point")->required();
  st_cmd->add_option("--tol", st_args.tol, "last-term stopping tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  st_cmd->add_option("--term-cap", st_args.term_cap, "maximum series terms")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  FourierArgs fourier_args;
  auto* fourier_cmd =
      app.add_subcommand("fourier", "characteristic function, both series");
  fourier_args.out.attach(fourier_cmd);
  fourier_cmd->add_option("--alpha", fourier_args.alpha, "parameter (rational)")
      ->capture_default_str();
  fourier_cmd->add_option("--z", fourier_args.z, "evaluation point")
      ->capture_default_str();
  fourier_cmd->add_option("--nmax", fourier_args.nmax, "series terms")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();

  SampleArgs sample_args;
  auto* sample_cmd =
      app.add_subcommand("sample-julia", "balanced-measure sampling cloud");
  sample_args.out.attach(sample_cmd);
  sample_cmd->add_option("--alpha", sample_args.alpha, "parameter in (0,2]")
      ->required();
  sample_cmd->add_option("--count", sample_args.count, "retained samples")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sample_cmd->add_option("--burn-in", sample_args.burn_in, "discarded samples")
      ->capture_default_str();
  sample_cmd->add_option("--seed", sample_args.seed,
                         "RNG seed (drawn from entropy when omitted)");
  sample_cmd->add_option("--meta", sample_args.meta_path,
                         "write cloud metadata JSON to this path");

  RealCertArgs cert_args;
  auto* cert_cmd =
      app.add_subcommand("real-cert", "certificate that the Julia set is not real");
  cert_args.out.attach(cert_cmd);
  cert_cmd->add_option("--alpha", cert_args.alpha, "parameter in (0,2]")
      ->required();
  cert_cmd->add_option("--cap", cert_args.cap, "chain length cap")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cert_cmd->add_flag("--exact", cert_args.exact, "also run the exact rational chain");
  cert_cmd->add_option("--alpha-exact", cert_args.alpha_exact,
                       "rational alpha for the exact chain (e.g. 19/10)");

  PermArgs perm_args;
  auto* perm_cmd = app.add_subcommand(
      "perm-spectral", "spectral measures of a permutation unitary group");
  perm_args.out.attach(perm_cmd);
  perm_cmd->add_option("--input", perm_args.input,
                       "JSON file with \"image\" (and optional \"subset\")")
      ->required();
  perm_cmd->add_option("--t", perm_args.t, "group-law exponent t")
      ->capture_default_str();
  perm_cmd->add_option("--s", perm_args.s, "group-law exponent s")
      ->capture_default_str();
  perm_cmd->add_option("--nmax", perm_args.nmax, "autocorrelation range")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  perm_cmd->add_option("--trials", perm_args.trials, "group-law trials")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  perm_cmd->add_option("--seed", perm_args.seed, "RNG seed");

  TransferPotentialArgs tp_args;
  auto* tp_cmd = app.add_subcommand("transfer-potential",
                                    "spectral potential by power iteration");
  tp_args.out.attach(tp_cmd);
  tp_cmd->add_option("--input", tp_args.input,
                     "JSON file with \"map\", \"c\", optional \"a\"")
      ->required();
  tp_cmd->add_option("--tol", tp_args.tol, "convergence tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  tp_cmd->add_option("--ncap", tp_args.ncap, "iteration cap")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  TransferPropsArgs props_args;
  auto* props_cmd =
      app.add_subcommand("transfer-props", "spectral potential property report");
  props_args.out.attach(props_cmd);
  props_cmd->add_option("--input", props_args.input, "system JSON file")
      ->required();
  props_cmd->add_option("--trials", props_args.trials, "random trials")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  props_cmd->add_option("--tol", props_args.tol, "property tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  props_cmd->add_option("--seed", props_args.seed, "RNG seed");

  Theorem4Args t4_args;
  auto* t4_cmd = app.add_subcommand(
      "theorem4", "potential splitting on a uniquely ergodic system");
  t4_args.out.attach(t4_cmd);
  t4_cmd->add_option("--input", t4_args.input, "system JSON file")->required();
  t4_cmd->add_option("--trials", t4_args.trials, "random trials")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  t4_cmd->add_option("--tol", t4_args.tol, "identity tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  t4_cmd->add_option("--seed", t4_args.seed, "RNG seed");

  BirkhoffArgs birkhoff_args;
  auto* birkhoff_cmd = app.add_subcommand("birkhoff", "orbit average of f");
  birkhoff_args.sys.attach(birkhoff_cmd, /*allow_squaring=*/false);
  birkhoff_args.out.attach(birkhoff_cmd);
  birkhoff_cmd->add_option("--f", birkhoff_args.f, "observable")
      ->check(CLI::IsMember({"cos", "sin", "one", "identity"}))
      ->capture_default_str();
  birkhoff_cmd->add_option("--u", birkhoff_args.u, "initial state")
      ->capture_default_str();
  birkhoff_cmd->add_option("--n", birkhoff_args.n, "iteration count")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    std::cerr << e.what() << "\n";
    return kExitArgument;
  }

  try {
    if (orbit_cmd->parsed()) return run_orbit(orbit_args);
    if (omega_cmd->parsed()) return run_omega(omega_args);
    if (classify_cmd->parsed()) return run_classify(classify_args);
    if (crit_cmd->parsed()) return run_critical_orbit(crit_args);
    if (bc_cmd->parsed()) return run_bc_stat(bc_args);
    if (moments_cmd->parsed()) return run_moments(moments_args);
    if (phi_cmd->parsed()) return run_phi(phi_args);
    if (st_cmd->parsed()) return run_stieltjes(st_args);
    if (fourier_cmd->parsed()) return run_fourier(fourier_args);
    if (sample_cmd->parsed()) return run_sample(sample_args);
    if (cert_cmd->parsed()) return run_real_cert(cert_args);
    if (perm_cmd->parsed()) return run_perm_spectral(perm_args);
    if (tp_cmd->parsed()) return run_transfer_potential(tp_args);
    if (props_cmd->parsed()) return run_transfer_props(props_args);
    if (t4_cmd->parsed()) return run_theorem4(t4_args);
    if (birkhoff_cmd->parsed()) return run_birkhoff(birkhoff_args);
  } catch (const domain_escape_error& e) {
    std::cerr << "domain escape: " << e.what() << " (first offending index "
              << e.index() << ")\n";
    return kExitDomainEscape;
  } catch (const argument_error& e) {
    std::cerr << "argument error: " << e.what() << "\n";
    return kExitArgument;
  } catch (const precondition_error& e) {
    std::cerr << "precondition error: " << e.what() << "\n";
    return kExitArgument;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitArgument;
}
