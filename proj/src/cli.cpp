#include "polyprog/cli.hpp"

#include "polyprog/acceptance.hpp"
#include "polyprog/common.hpp"
#include "polyprog/convex.hpp"
#include "polyprog/cutoff.hpp"
#include "polyprog/cyclicfn.hpp"
#include "polyprog/gowers.hpp"
#include "polyprog/localfactors.hpp"
#include "polyprog/modpoly.hpp"
#include "polyprog/multipoly.hpp"
#include "polyprog/pet.hpp"
#include "polyprog/primetable.hpp"
#include "polyprog/progressions.hpp"
#include "polyprog/sieve.hpp"
#include "polyprog/structure.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

namespace polyprog {
namespace {

// ---------------------------------------------------------------------------
// Parameter access on the resolved configuration
// ---------------------------------------------------------------------------

std::string get_str(const RunConfig& cfg, const std::string& key) {
  const auto it = cfg.params.find(key);
  if (it == cfg.params.end())
    throw PreconditionError("missing parameter: " + key);
  return it->second;
}

std::int64_t get_i64(const RunConfig& cfg, const std::string& key) {
  const std::string raw = get_str(cfg, key);
  try {
    std::size_t pos = 0;
    const std::int64_t v = std::stoll(raw, &pos);
    if (pos != raw.size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    throw PreconditionError("parameter " + key + " is not an integer: '" +
                            raw + "'");
  }
}

double get_f64(const RunConfig& cfg, const std::string& key) {
  const std::string raw = get_str(cfg, key);
  try {
    std::size_t pos = 0;
    const double v = std::stod(raw, &pos);
    if (pos != raw.size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    throw PreconditionError("parameter " + key + " is not a number: '" + raw +
                            "'");
  }
}

bool get_bool(const RunConfig& cfg, const std::string& key) {
  const std::string raw = get_str(cfg, key);
  if (raw == "1" || raw == "true" || raw == "yes" || raw == "on") return true;
  if (raw == "0" || raw == "false" || raw == "no" || raw == "off")
    return false;
  throw PreconditionError("parameter " + key + " is not a boolean: '" + raw +
                          "'");
}

std::vector<std::string> split_list(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string piece;
  std::istringstream in(text);
  while (std::getline(in, piece, sep)) {
    const auto b = piece.find_first_not_of(" \t");
    const auto e = piece.find_last_not_of(" \t");
    if (b == std::string::npos) continue;
    out.push_back(piece.substr(b, e - b + 1));
  }
  return out;
}

// Parses a semicolon-separated family over a shared auto-grown ring.
std::vector<MultiPoly> parse_family_shared(const std::string& text,
                                           std::vector<std::string>& names) {
  std::vector<MultiPoly> polys;
  for (const auto& piece : split_list(text, ';'))
    polys.push_back(parse_poly_auto(piece, names));
  const int nv = static_cast<int>(names.size());
  for (auto& P : polys) {
    if (P.nvars() == nv) continue;
    std::vector<int> idmap(static_cast<std::size_t>(P.nvars()));
    std::iota(idmap.begin(), idmap.end(), 0);
    P = P.remap(nv, idmap);
  }
  return polys;
}

// Univariate family in m ("a; b; c" or a file in one-per-line form).
std::vector<MultiPoly> parse_m_family(const std::string& semicolons) {
  std::string text = semicolons;
  std::replace(text.begin(), text.end(), ';', '\n');
  return parse_poly_family(text);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::int64_t primorial_below(int w) {
  std::int64_t W = 1;
  for (int p = 2; p < w; ++p) {
    bool prime = p >= 2;
    for (int q = 2; q * q <= p; ++q)
      if (p % q == 0) {
        prime = false;
        break;
      }
    if (prime) W *= p;
  }
  return W;
}

std::string class_name(PrimeClass c) {
  switch (c) {
    case PrimeClass::Good:
      return "good";
    case PrimeClass::Bad:
      return "bad";
    case PrimeClass::Terrible:
      return "terrible";
  }
  return "unknown";
}

// Shared sieve setup used by nu-stats, decompose and correlation: reads
// N (input size), w, M, R (0 = N_cyclic^(1/4)), H and chi from the config.
struct SieveSetup {
  SieveParams params;
  PrimeTable table;
  CutoffChi chi = CutoffChi::tent();
};

SieveSetup make_sieve_setup(const RunConfig& cfg) {
  const std::int64_t n_input = get_i64(cfg, "N");
  const int w = static_cast<int>(get_i64(cfg, "w"));
  const double M = get_f64(cfg, "M");
  double R = get_f64(cfg, "R");
  const double H = get_f64(cfg, "H");
  if (n_input <= 0) throw PreconditionError("N must be positive");
  const std::int64_t W = primorial_below(w);
  if (R <= 0)
    R = std::pow(static_cast<double>(n_input / (2 * W)), 0.25);
  const std::string chi_name = get_str(cfg, "chi");
  SieveSetup s{SieveParams{},
               PrimeTable(static_cast<std::uint64_t>(n_input + W + 64)),
               CutoffChi::tent()};
  if (chi_name == "tent")
    s.chi = CutoffChi::tent();
  else if (chi_name == "plateau")
    s.chi = CutoffChi::smooth_plateau();
  else
    throw PreconditionError("chi must be 'tent' or 'plateau', got '" +
                            chi_name + "'");
  s.params =
      derive_params_direct(n_input, w, M, R, H, PrimeSet::all_primes(), s.table);
  return s;
}

GowersSpec spec_from_config(const RunConfig& cfg, std::int64_t Wval) {
  GowersSpec spec;
  spec.d = static_cast<int>(get_i64(cfg, "d"));
  spec.t = static_cast<int>(get_i64(cfg, "t"));
  spec.H = get_i64(cfg, "spec-h");
  spec.sqrtM = get_i64(cfg, "sqrtm");
  spec.Wval = Wval;
  std::vector<std::string> names;
  for (int i = 1; i <= spec.t; ++i) names.push_back("h" + std::to_string(i));
  names.push_back("W");
  for (const auto& piece : split_list(get_str(cfg, "Q"), ';'))
    spec.Q.push_back(parse_poly(piece, names));
  if (static_cast<int>(spec.Q.size()) != spec.d)
    throw PreconditionError("Q must list exactly d = " +
                            std::to_string(spec.d) + " step polynomials");
  spec.validate();
  return spec;
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

int cmd_localfactor(const RunConfig& cfg, Report& rep) {
  std::vector<std::string> names;
  const std::vector<MultiPoly> polys =
      parse_family_shared(get_str(cfg, "poly"), names);
  if (polys.empty()) throw PreconditionError("poly parses to an empty family");
  const std::int64_t p = get_i64(cfg, "p");
  const Rat cp = local_factor(polys, p);
  const Rat cbar = complementary_factor(polys, p);
  const ClassifyResult cls = classify_prime(polys, p);
  rep.add_text("family", get_str(cfg, "poly"),
               "variables: " + std::to_string(names.size()));
  rep.add_text("local_factor", format_rat(cp),
               "density of common zeros over F_p, exact");
  rep.add_text("complementary_factor", format_rat(cbar),
               "density of points where no member vanishes, exact");
  rep.add_text("classification", class_name(cls.cls),
               std::string("pairwise_coprime=") +
                   (cls.pairwise_coprime ? "1" : "0") + " jointly_coprime=" +
                   (cls.jointly_coprime ? "1" : "0"));
  rep.add_text("crude_upper_bound", format_rat(local_factor_crude_bound(polys, p)),
               "structural bound on the local factor (no enumeration)");
  if (polys.size() <= 4) {
    const std::vector<Rat> sub = local_factor_all_subsets(polys, p);
    for (std::size_t mask = 1; mask < sub.size(); ++mask)
      rep.add_text("subset_factor_mask" + std::to_string(mask),
                   format_rat(sub[mask]),
                   "members required to vanish, bitmask over the family");
  }
  return 0;
}

int cmd_classify_primes(const RunConfig& cfg, Report& rep) {
  std::vector<std::string> names;
  const std::vector<MultiPoly> polys =
      parse_family_shared(get_str(cfg, "polys"), names);
  if (polys.empty())
    throw PreconditionError("polys parses to an empty family");
  const std::int64_t pmin = get_i64(cfg, "pmin");
  const std::int64_t pmax = get_i64(cfg, "pmax");
  const bool keep_good = get_bool(cfg, "keep-good");
  const auto scan = classify_primes_in_range(polys, pmin, pmax, keep_good);
  std::int64_t bad = 0, terrible = 0, good = 0;
  for (const auto& row : scan) {
    switch (row.result.cls) {
      case PrimeClass::Good:
        ++good;
        break;
      case PrimeClass::Bad:
        ++bad;
        break;
      case PrimeClass::Terrible:
        ++terrible;
        break;
    }
    rep.add_text("p_" + std::to_string(row.p), class_name(row.result.cls),
                 std::string("pairwise_coprime=") +
                     (row.result.pairwise_coprime ? "1" : "0") +
                     " jointly_coprime=" +
                     (row.result.jointly_coprime ? "1" : "0"));
  }
  rep.add_int("bad_primes", bad, "primes classified bad in the scan range");
  rep.add_int("terrible_primes", terrible,
              "primes where some member vanishes identically");
  if (keep_good) rep.add_int("good_primes", good, "remaining scanned primes");
  return 0;
}

int cmd_nu_stats(const RunConfig& cfg, Report& rep) {
  const SieveSetup s = make_sieve_setup(cfg);
  const CyclicFn nu_fn = nu(s.params, s.chi, s.table);
  const CyclicFn f = prime_weight_f(s.params, PrimeSet::all_primes(), s.table);
  std::int64_t violations = 0;
  double max_nu = 0;
  for (std::size_t i = 0; i < nu_fn.v.size(); ++i) {
    if (f.v[i] > nu_fn.v[i]) ++violations;
    max_nu = std::max(max_nu, nu_fn.v[i]);
  }
  rep.add_int("W", s.params.W, "product of primes below w");
  rep.add_int("b", s.params.b, "residue class of the W-trick");
  rep.add_int("N_cyclic", s.params.N, "points of the cyclic group");
  rep.add_value("R", s.params.R, "sieve truncation scale");
  rep.add_value("M", s.params.M, "coarse scale");
  rep.add_value("H", s.params.H, "fine scale");
  rep.add_text("chi", s.chi.name(), "cutoff shape");
  rep.add_checked("mean_nu", nu_fn.mean(), 1.0, 0.35,
                  "average of the majorant (generous desk-scale band)");
  rep.add_checked("mean_nu_model", nu_model_mean(s.params, s.chi, s.table),
                  nu_fn.mean(), 0.02, "diagonal-free divisor-sum model");
  rep.add_value("mean_f", f.mean(), "average of the prime weight");
  rep.add_value("max_nu", max_nu, "largest majorant value");
  rep.add_int("domination_violations", violations,
              "points with f > nu (must be 0)");
  rep.add_checked("derivative_energy", s.chi.derivative_energy(), 1.0, 1e-6,
                  "normalization of the cutoff");
  for (const auto& warn : s.params.hierarchy_warnings)
    rep.add_text("hierarchy_warning", warn, "scale ordering advisory");
  return violations == 0 ? 0 : 1;
}

int cmd_gowers_norm(const RunConfig& cfg, Report& rep, std::ostream& err) {
  const std::int64_t N = get_i64(cfg, "N");
  const std::int64_t budget = get_i64(cfg, "budget");
  GowersSpec spec = spec_from_config(cfg, get_i64(cfg, "Wval"));
  CyclicFn f(N);
  const std::string fn = get_str(cfg, "fn");
  if (fn == "random") {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (auto& x : f.v) x = u01(rng);
  } else if (fn == "constant") {
    for (auto& x : f.v) x = 1.0;
  } else {
    throw PreconditionError("fn must be 'random' or 'constant', got '" + fn +
                            "'");
  }
  rep.add_int("N", N, "cyclic group size");
  rep.add_text("fn", fn, "test function");
  if (cfg.mode == "exact") {
    const AvgGowersResult ar = avg_local_gowers_exact(f, spec, budget);
    const CyclicFn Df = dual_function(f, spec, budget);
    double inner = 0;
    for (std::size_t i = 0; i < f.v.size(); ++i) inner += f.v[i] * Df.v[i];
    inner /= static_cast<double>(N);
    rep.add_value("norm", ar.norm, "averaged local Gowers norm (exact)");
    rep.add_value("norm_pow", ar.norm_pow, "2^d power before the root");
    rep.add_int("h_tuples", ar.samples, "fine-shift tuples enumerated");
    rep.add_checked("dual_identity", inner, ar.norm_pow,
                    1e-9 * std::max(1.0, std::abs(ar.norm_pow)),
                    "int f * dual(f) must equal norm_pow");
    if (std::abs(inner - ar.norm_pow) >
        1e-9 * std::max(1.0, std::abs(ar.norm_pow))) {
      err << "dual identity violated\n";
      return 1;
    }
  } else {
    const AvgGowersResult ar = avg_local_gowers(f, spec, budget, cfg.seed);
    rep.add_value("norm", ar.norm, ar.exact ? "exact (within budget)"
                                            : "sampled Monte Carlo estimate");
    rep.add_value("norm_pow", ar.norm_pow, "2^d power before the root");
    rep.add_value("std_error", ar.std_error, "standard error of norm_pow");
    rep.add_int("samples", ar.samples, "draws or tuples evaluated");
  }
  return 0;
}

int cmd_pet_linearize(const RunConfig& cfg, Report& rep, std::ostream& out) {
  const std::string file = get_str(cfg, "family-file");
  std::vector<MultiPoly> fam;
  std::string family_text;
  if (!file.empty()) {
    family_text = read_text_file(file);
    fam = parse_poly_family(family_text);
  } else {
    family_text = get_str(cfg, "polys");
    fam = parse_m_family(family_text);
  }
  const bool w_symbolic = get_bool(cfg, "w-symbolic");
  const PolySystem sys = make_system(fam, w_symbolic);
  const LinearizedResult res = linearize(sys);

  std::ostringstream trace;
  trace << "family: " << family_text << "\n";
  trace << "w_symbolic: " << (w_symbolic ? 1 : 0) << "\n";
  trace << "initial system:\n" << sys.describe() << "\n";
  PolySystem current = sys;
  for (std::size_t i = 0; i < res.steps.size(); ++i) {
    const LinearizeStep& st = res.steps[i];
    trace << "step " << (i + 1) << ": target=" << st.target
          << " reference=" << st.reference
          << " translation=" << st.translation_str
          << " weight=" << st.weight_before.str() << "->"
          << st.weight_after.str() << " fresh=h" << st.fine_var_lo << ",h"
          << st.fine_var_hi << " duplicates=[";
    for (std::size_t j = 0; j < st.duplicates.size(); ++j)
      trace << (j ? " " : "") << st.duplicates[j].first << "->"
            << st.duplicates[j].second;
    trace << "]\n";
    current = vdc_step(current, st.target);
    current = translate(current, current.node(current.distinguished).R);
    trace << "system after step " << (i + 1)
          << " (normalized to the distinguished node):\n"
          << current.describe() << "\n";
  }
  trace << "final system (normalized to the distinguished node):\n"
        << res.final_system.describe() << "\n";
  const std::vector<std::string> names = res.final_system.var_names();
  for (std::size_t i = 0; i < res.linear_ids.size(); ++i) {
    trace << "b[" << res.linear_ids[i] << "] = " << res.b[i].str(names)
          << "\n";
    trace << "c[" << res.linear_ids[i] << "] = " << res.c[i].str(names)
          << "\n";
  }
  std::vector<std::string> gnames;
  for (int i = 1; i <= res.final_system.D; ++i)
    gnames.push_back("h" + std::to_string(i));
  gnames.push_back("W");
  trace << "gowers spec: d=" << res.gowers_spec.d
        << " t=" << res.gowers_spec.t << "\n";
  for (std::size_t i = 0; i < res.gowers_spec.Q.size(); ++i)
    trace << "Q[" << (i + 1) << "] = " << res.gowers_spec.Q[i].str(gnames)
          << "\n";
  std::vector<std::string> q0names = gnames;
  for (std::size_t i = 1; i <= res.linear_ids.size(); ++i)
    q0names.push_back("m" + std::to_string(i));
  trace << "Q0 = " << res.Q0.str(q0names) << "\n";

  out << trace.str();
  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    const std::string path = cfg.out_dir + "/" + cfg.command + ".trace.txt";
    std::ofstream f_out(path, std::ios::binary);
    if (!f_out) throw PreconditionError("cannot write " + path);
    f_out << trace.str();
  }

  rep.add_int("steps", static_cast<std::int64_t>(res.steps.size()),
              "van der Corput steps until linear");
  rep.add_int("fine_variables", res.final_system.D,
              "fine shift variables introduced");
  rep.add_int("linear_nodes",
              static_cast<std::int64_t>(res.linear_ids.size()),
              "active linear nodes besides the distinguished one");
  rep.add_int("inactive_nodes",
              static_cast<std::int64_t>(res.nonlinear_ids.size()),
              "nodes retired during the induction");
  rep.add_int("final_nodes",
              static_cast<std::int64_t>(res.final_system.nodes.size()),
              "total nodes in the final system");
  for (std::size_t i = 0; i < res.linear_ids.size(); ++i)
    rep.add_text("b_" + std::to_string(res.linear_ids[i]),
                 res.b[i].str(names), "coarse coefficient of the node");
  return 0;
}

int cmd_decompose(const RunConfig& cfg, Report& rep) {
  const SieveSetup s = make_sieve_setup(cfg);
  const CyclicFn nu_fn = nu(s.params, s.chi, s.table);
  const GowersSpec spec = spec_from_config(cfg, s.params.W);
  const double eta4 = get_f64(cfg, "eta4");
  const double eta5 = get_f64(cfg, "eta5");
  const DecompositionResult dr =
      knvn_decompose(nu_fn, nu_fn, spec, eta4, eta5, cfg.seed);

  rep.add_int("N_cyclic", s.params.N, "points of the cyclic group");
  rep.add_int("iterations", dr.iterations, "factor extensions performed");
  rep.add_int("iteration_cap", dr.cap, "hard bound 4/((1/64) eta4^2) + 1");
  rep.add_value("sigma", dr.sigma,
                "max(exceptional mass, off-set conditional deviation)");
  rep.add_value("sigma_mass", dr.sigma_mass, "int over Omega of (nu+1)");
  rep.add_value("sigma_deviation", dr.sigma_dev,
                "sup off Omega of |E(nu-1|Y)|");
  rep.add_value("energy", dr.energy, "energy of E(g|Y) off Omega");
  rep.add_checked("final_correlation", dr.final_correlation, 0.0, eta4,
                  "int g_u * dual(g_u) at termination");
  rep.add_value("mass_g", dr.mass_g, "int g");
  rep.add_value("mass_structured", dr.mass_structured, "int g_s");
  rep.add_value("mass_uniform", dr.mass_uniform, "int g_u");
  rep.add_int("atoms", dr.state.factor.atom_count, "atoms of the final factor");
  rep.add_int("omega_points",
              static_cast<std::int64_t>(std::count(dr.omega.begin(),
                                                   dr.omega.end(),
                                                   std::uint8_t(1))),
              "points of the exceptional set");
  rep.add_int("exceptional_points", dr.exceptional_points,
              "points where g_s + g_u != g exactly");
  rep.add_value("exceptional_mass", dr.exceptional_mass,
                "their mass under nu+1");
  rep.add_int("badset_points", dr.global_badset_points,
              "dual-range truncation set of the majorant");

  const std::string trace_path = get_str(cfg, "trace");
  if (!trace_path.empty()) {
    std::ofstream f_out(trace_path, std::ios::binary);
    if (!f_out) throw PreconditionError("cannot write " + trace_path);
    f_out << trace_csv(dr.trace);
    rep.add_text("trace_file", trace_path, "per-iteration CSV trace");
  }
  rep.add_int("trace_rows", static_cast<std::int64_t>(dr.trace.size()),
              "iteration records, including the terminal one");
  return 0;
}

int cmd_count_progressions(const RunConfig& cfg, Report& rep) {
  ProgressionSpec spec;
  spec.polys = parse_m_family(get_str(cfg, "polys"));
  spec.N = get_i64(cfg, "N");
  spec.M = get_i64(cfg, "M");
  spec.validate();
  const std::int64_t P0 = get_i64(cfg, "P0");
  const std::int64_t witness_cap = get_i64(cfg, "witnesses");

  std::int64_t max_shift = 0;
  for (const auto& P : spec.polys)
    for (std::int64_t m = 1; m <= spec.M; ++m) {
      const Int v = P.eval({Int(m)});
      if (v > 0) {
        if (v > Int(std::int64_t(1) << 40))
          throw PreconditionError("shifts too large for a prime table");
        max_shift = std::max(max_shift, static_cast<std::int64_t>(v));
      }
    }
  const std::uint64_t limit = static_cast<std::uint64_t>(
      std::max(spec.N + max_shift + 1, P0 + 1));
  const PrimeTable table(limit);

  const CountResult res = count_progressions(spec, table, witness_cap);
  const SingularSeries ss = singular_series(spec, P0, table);

  rep.add_int("count", res.count,
              "pairs (x, m) with every x + P_i(m) prime");
  rep.add_int("min_shift", res.min_shift, "smallest shift P_i(m)");
  rep.add_int("max_shift", res.max_shift, "largest shift P_i(m)");
  rep.add_value("gamma_hat", ss.gamma_hat,
                "local-density product over p <= " + std::to_string(ss.P0));
  if (ss.obstructed)
    rep.add_int("obstruction_p", ss.obstruction_p,
                "prime with vanishing complementary factor");
  rep.add_value("predicted", ss.predicted,
                "heuristic gamma_hat * N * M / log(N)^k");
  ReportRow ratio_row;
  ratio_row.quantity = "ratio";
  ratio_row.prediction = "1";
  ratio_row.tolerance = "";
  if (ss.predicted > 0) {
    ratio_row.value =
        format_sig(static_cast<double>(res.count) / ss.predicted);
    ratio_row.note = "observed over predicted; heuristic diagnostic only";
  } else {
    ratio_row.value = "inf";
    ratio_row.note = "prediction is 0 (local obstruction); ratio undefined";
  }
  rep.add_row(ratio_row);
  for (std::size_t i = 0; i < res.witnesses.size(); ++i) {
    std::ostringstream w;
    w << "x=" << res.witnesses[i].x << " m=" << res.witnesses[i].m
      << " values=";
    for (std::size_t j = 0; j < res.witnesses[i].values.size(); ++j)
      w << (j ? "," : "") << res.witnesses[i].values[j];
    rep.add_text("witness_" + std::to_string(i + 1), w.str(),
                 "progression instance in (m, x) order");
  }
  return 0;
}

int cmd_correlation(const RunConfig& cfg, Report& rep) {
  const SieveSetup s = make_sieve_setup(cfg);
  const CyclicFn nu_fn = nu(s.params, s.chi, s.table);
  std::vector<std::string> names;
  const std::vector<MultiPoly> Q =
      parse_family_shared(get_str(cfg, "polys"), names);
  if (Q.empty()) throw PreconditionError("polys parses to an empty family");

  std::vector<double> lo, hi;
  for (const auto& piece : split_list(get_str(cfg, "box"), ';')) {
    const auto parts = split_list(piece, ',');
    if (parts.size() != 2)
      throw PreconditionError("box entries must be 'lo,hi': '" + piece + "'");
    lo.push_back(std::stod(parts[0]));
    hi.push_back(std::stod(parts[1]));
  }
  const int dim = Q.front().nvars();
  if (static_cast<int>(lo.size()) != dim)
    throw PreconditionError("box dimension " + std::to_string(lo.size()) +
                            " does not match the " + std::to_string(dim) +
                            " shift variables");
  const ConvexBody body = ConvexBody::box(lo, hi);
  const std::int64_t scan = get_i64(cfg, "prime-scan");

  std::optional<std::pair<std::int64_t, std::int64_t>> window;
  const std::string window_text = get_str(cfg, "window");
  if (!window_text.empty()) {
    const auto parts = split_list(window_text, ',');
    if (parts.size() != 2)
      throw PreconditionError("window must be 'lo,hi'");
    window = std::make_pair(std::stoll(parts[0]), std::stoll(parts[1]));
  }

  const PolyformResult pr =
      polyform_average(nu_fn, s.params, Q, body, window, scan);
  rep.add_checked("average", pr.average, pr.prediction, pr.prediction_band,
                  "nu-product average over the box; band from bad primes");
  rep.add_value("prediction_band", pr.prediction_band,
                "EXP of the bad-prime reciprocal sum");
  rep.add_value("bad_prime_reciprocal_sum", pr.bad_prime_reciprocal_sum,
                "sum of 1/p over bad and terrible primes in the scan");
  std::ostringstream bp;
  for (std::size_t i = 0; i < pr.bad_primes.size() && i < 16; ++i)
    bp << (i ? "," : "") << pr.bad_primes[i];
  rep.add_text("bad_primes", bp.str(), "first bad primes in the scan range");
  std::ostringstream tp;
  for (std::size_t i = 0; i < pr.terrible_primes.size() && i < 16; ++i)
    tp << (i ? "," : "") << pr.terrible_primes[i];
  rep.add_text("terrible_primes", tp.str(), "primes killing the product");
  rep.add_int("window_lo", pr.window_lo, "inclusive x-range start");
  rep.add_int("window_hi", pr.window_hi, "inclusive x-range end");
  rep.add_int("lattice_points", pr.lattice_points, "shift tuples averaged");
  return 0;
}

int cmd_verify(const RunConfig& cfg, Report& rep, std::ostream& out) {
  std::string data = get_str(cfg, "data");
  if (data.empty()) {
    const char* env = std::getenv("POLYPROG_DATA_DIR");
    data = env != nullptr ? env : "data";
  }
  const std::vector<CriterionResult> results = run_acceptance(cfg.seed, data);
  bool all_pass = true;
  int passed = 0;
  for (const auto& cr : results) {
    out << criterion_line(cr) << "\n";
    all_pass = all_pass && cr.pass;
    passed += cr.pass ? 1 : 0;
    for (const auto& row : cr.rows) rep.add_row(row);
  }
  ReportRow summary;
  summary.quantity = "criteria_passed";
  summary.value = std::to_string(passed);
  summary.prediction = std::to_string(results.size());
  summary.tolerance = "0";
  summary.note = "criteria of the verification battery that passed";
  rep.add_row(summary);
  out << passed << "/" << results.size() << " criteria passed\n";
  return all_pass ? 0 : 1;
}

}  // namespace

std::map<std::string, std::string> command_defaults(const std::string& command) {
  if (command == "localfactor")
    return {{"poly", "x^2 + 1"}, {"p", "5"}};
  if (command == "classify-primes")
    return {{"polys", "x^2 + 1"},
            {"pmin", "2"},
            {"pmax", "50"},
            {"keep-good", "0"}};
  if (command == "nu-stats")
    return {{"N", "600000"}, {"w", "5"},   {"M", "16"},
            {"R", "0"},      {"H", "4"},   {"chi", "tent"}};
  if (command == "gowers-norm")
    return {{"N", "64"},     {"d", "2"},      {"t", "1"},
            {"spec-h", "3"}, {"sqrtm", "3"},  {"Wval", "1"},
            {"Q", "h1; W"},  {"fn", "random"}, {"budget", "500000000"}};
  if (command == "pet-linearize")
    return {{"polys", "0; m; m^2"}, {"family-file", ""}, {"w-symbolic", "1"}};
  if (command == "decompose")
    return {{"N", "24576"},  {"w", "5"},     {"M", "16"},
            {"R", "0"},      {"H", "4"},     {"chi", "tent"},
            {"eta4", "0.05"}, {"eta5", "0.001"}, {"d", "2"},
            {"t", "1"},      {"spec-h", "4"}, {"sqrtm", "4"},
            {"Q", "h1; W"},  {"trace", ""}};
  if (command == "count-progressions")
    return {{"polys", "0; m"},
            {"N", "100000"},
            {"M", "100"},
            {"P0", "1000"},
            {"witnesses", "5"}};
  if (command == "correlation")
    return {{"polys", "h1; 2*h1"}, {"box", "0.5,12.5"}, {"N", "600000"},
            {"w", "5"},            {"M", "16"},         {"R", "0"},
            {"H", "4"},            {"chi", "tent"},     {"prime-scan", "100000"},
            {"window", ""}};
  if (command == "verify") return {{"data", ""}};
  return {};
}

int run_command(const RunConfig& config, std::ostream& out, std::ostream& err) {
  RunConfig resolved = config;
  resolved.params = command_defaults(config.command);
  for (const auto& [k, v] : config.params) resolved.params[k] = v;
  if (resolved.mode != "exact" && resolved.mode != "sampled") {
    err << "usage error: mode must be 'exact' or 'sampled'\n";
    return 2;
  }
  Report rep(resolved);
  int code = 0;
  try {
    if (resolved.command == "localfactor")
      code = cmd_localfactor(resolved, rep);
    else if (resolved.command == "classify-primes")
      code = cmd_classify_primes(resolved, rep);
    else if (resolved.command == "nu-stats")
      code = cmd_nu_stats(resolved, rep);
    else if (resolved.command == "gowers-norm")
      code = cmd_gowers_norm(resolved, rep, err);
    else if (resolved.command == "pet-linearize")
      code = cmd_pet_linearize(resolved, rep, out);
    else if (resolved.command == "decompose")
      code = cmd_decompose(resolved, rep);
    else if (resolved.command == "count-progressions")
      code = cmd_count_progressions(resolved, rep);
    else if (resolved.command == "correlation")
      code = cmd_correlation(resolved, rep);
    else if (resolved.command == "verify")
      code = cmd_verify(resolved, rep, out);
    else {
      err << "usage error: unknown command '" << resolved.command
          << "'; available: localfactor, classify-primes, nu-stats, "
             "gowers-norm, pet-linearize, decompose, count-progressions, "
             "correlation, verify\n";
      return 2;
    }
  } catch (const PreconditionError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const InvariantError& e) {
    err << "invariant violated: " << e.what() << "\n" << e.trace();
    return 1;
  } catch (const BudgetError& e) {
    err << "budget exhausted: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  if (resolved.command != "verify" && resolved.command != "pet-linearize")
    out << rep.csv();
  if (!resolved.out_dir.empty()) {
    const auto written =
        rep.write_files(resolved.out_dir + "/" + resolved.command);
    for (const auto& path : written) out << "wrote " << path << "\n";
  }
  return code;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"polyprog: exact arithmetic for polynomial progressions in "
               "the primes"};
  app.require_subcommand(0, 1);

  std::string config_path, out_dir, mode = "exact";
  std::uint64_t seed = 0;
  app.add_option("--config", config_path,
                 "flat key=value parameter file ('#' comments)");
  app.add_option("--seed", seed, "64-bit seed for all randomized pieces");
  app.add_option("--out", out_dir, "directory for CSV/JSON report files");
  app.add_option("--mode", mode, "exact|sampled evaluation mode")
      ->check(CLI::IsMember({"exact", "sampled"}));

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"localfactor", "exact local densities of a polynomial family at p"},
      {"classify-primes", "good/bad/terrible classification over a range"},
      {"nu-stats", "derive W-trick scales and measure the sieve majorant"},
      {"gowers-norm", "averaged local Gowers norm and dual identity"},
      {"pet-linearize", "symbolic van der Corput linearization of a family"},
      {"decompose", "energy-increment decomposition against the majorant"},
      {"count-progressions", "exact pattern counts and heuristic prediction"},
      {"correlation", "nu-product averages over a shift box"},
      {"verify", "run the full verification battery"}};

  // Every per-command parameter is a string option named after its config
  // key; values flow config-file first, then explicit flags.
  std::map<std::string, std::map<std::string, std::string>> flag_values;
  std::map<std::string, std::map<std::string, CLI::Option*>> flag_options;
  for (const auto& [name, desc] : commands) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->fallthrough(true);
    for (const auto& [key, def] : command_defaults(name)) {
      auto& slot = flag_values[name][key];
      slot = def;
      flag_options[name][key] = sub->add_option(
          "--" + key, slot, "default: '" + def + "'");
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  const auto subs = app.get_subcommands();
  if (subs.empty()) {
    out << app.help();
    return 2;
  }
  const std::string command = subs.front()->get_name();

  RunConfig config;
  config.command = command;
  config.seed = seed;
  config.out_dir = out_dir;
  config.mode = mode;
  if (!config_path.empty()) {
    try {
      for (const auto& [k, v] : read_config_file(config_path))
        config.params[k] = v;
    } catch (const std::exception& e) {
      err << "usage error: " << e.what() << "\n";
      return 2;
    }
  }
  for (const auto& [key, opt] : flag_options[command])
    if (opt->count() > 0) config.params[key] = flag_values[command][key];

  return run_command(config, out, err);
}

}  // namespace polyprog
