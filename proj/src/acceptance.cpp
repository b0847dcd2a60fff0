// Verification battery: twelve self-contained criteria, each exercising one
// module against an independent oracle (hand-computed tables, closed forms,
// naive re-implementations, or golden files).  Report rows carry no wall
// clock data, so two identically seeded runs serialize byte-identically;
// the final criterion checks exactly that.
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

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace polyprog {
namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t tag) {
  return seed ^ (0x9E3779B97F4A7C15ULL * (tag + 1));
}

void append_detail(CriterionResult& r, const std::string& msg) {
  if (!r.detail.empty()) r.detail += "; ";
  r.detail += msg;
}

// Collects failures, keeping the detail line readable.
struct Checker {
  CriterionResult& r;
  int fails = 0;
  void require(bool ok, const std::string& label) {
    if (ok) return;
    r.pass = false;
    ++fails;
    if (fails <= 5) append_detail(r, label);
    if (fails == 6) append_detail(r, "(further failures suppressed)");
  }
};

void add_row(CriterionResult& r, std::string quantity, std::string value,
             std::string prediction = std::string(),
             std::string tolerance = std::string(),
             std::string note = std::string()) {
  ReportRow row;
  row.quantity = std::move(quantity);
  row.value = std::move(value);
  row.prediction = std::move(prediction);
  row.tolerance = std::move(tolerance);
  row.note = std::move(note);
  r.rows.push_back(std::move(row));
}

CriterionResult run_criterion(int index, const std::string& name,
                              double budget_seconds,
                              const std::function<void(CriterionResult&)>& body) {
  CriterionResult r;
  r.index = index;
  r.name = name;
  r.pass = true;
  const auto t0 = Clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.pass = false;
    append_detail(r, std::string("unexpected exception: ") + e.what());
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  if (budget_seconds > 0 && r.seconds > budget_seconds) {
    r.pass = false;
    append_detail(r, "runtime " + format_sig(r.seconds) +
                         " s exceeded the budget of " +
                         format_sig(budget_seconds) + " s");
  }
  if (r.pass && r.detail.empty()) r.detail = "all checks passed";
  return r;
}

std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_bytes(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PreconditionError("cannot write " + path);
  out << bytes;
}

std::int64_t ipow64(std::int64_t base, int exp) {
  std::int64_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

std::int64_t pow_mod(std::int64_t b, std::int64_t e, std::int64_t p) {
  std::int64_t r = 1;
  b %= p;
  while (e > 0) {
    if (e & 1) r = r * b % p;
    b = b * b % p;
    e >>= 1;
  }
  return r;
}

int rank_mod_p(std::vector<std::vector<std::int64_t>> m, std::int64_t p) {
  const int rows = static_cast<int>(m.size());
  const int cols = rows ? static_cast<int>(m[0].size()) : 0;
  int rank = 0;
  for (int c = 0; c < cols && rank < rows; ++c) {
    int piv = -1;
    for (int i = rank; i < rows; ++i)
      if (m[i][c] % p != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    std::swap(m[rank], m[piv]);
    const std::int64_t inv = pow_mod(m[rank][c], p - 2, p);
    for (int j = c; j < cols; ++j) m[rank][j] = m[rank][j] % p * inv % p;
    for (int i = 0; i < rows; ++i) {
      if (i == rank || m[i][c] % p == 0) continue;
      const std::int64_t f = m[i][c] % p;
      for (int j = c; j < cols; ++j)
        m[i][j] = ((m[i][j] - f * m[rank][j]) % p + p) % p;
    }
    ++rank;
  }
  return rank;
}

// Random sparse polynomial in D variables, total degree <= max_deg,
// non-zero over Z.
MultiPoly random_poly(std::mt19937_64& rng, int D, int max_deg, int coeff_lo,
                      int coeff_hi, int max_terms) {
  std::uniform_int_distribution<int> nterms(1, max_terms);
  std::uniform_int_distribution<int> cdist(coeff_lo, coeff_hi);
  for (;;) {
    MultiPoly P(D);
    const int T = nterms(rng);
    for (int t = 0; t < T; ++t) {
      Monomial e(static_cast<std::size_t>(D), 0);
      int left = max_deg;
      for (int v = 0; v < D; ++v) {
        const int ev = std::uniform_int_distribution<int>(0, left)(rng);
        e[static_cast<std::size_t>(v)] = static_cast<std::uint32_t>(ev);
        left -= ev;
      }
      int cv = cdist(rng);
      if (cv == 0) cv = 1;
      P += MultiPoly::monomial(D, e, cv);
    }
    if (!P.is_zero()) return P;
  }
}

// Random univariate polynomial of exact degree deg with small coefficients.
MultiPoly random_univariate(std::mt19937_64& rng, int deg, int coeff_lo,
                            int coeff_hi, bool zero_constant) {
  std::uniform_int_distribution<int> cdist(coeff_lo, coeff_hi);
  for (;;) {
    MultiPoly P(1);
    for (int k = zero_constant ? 1 : 0; k <= deg; ++k) {
      int cv = cdist(rng);
      if (k == deg && cv == 0) cv = 1;
      if (cv == 0) continue;
      P += MultiPoly::monomial(1, Monomial{static_cast<std::uint32_t>(k)}, cv);
    }
    if (!P.is_zero()) return P;
  }
}

std::vector<std::string> sorted_strings(const std::vector<MultiPoly>& polys,
                                        const std::vector<std::string>& names) {
  std::vector<std::string> out;
  out.reserve(polys.size());
  for (const auto& q : polys) out.push_back(q.str(names));
  std::sort(out.begin(), out.end());
  return out;
}

bool distinct_and_nonzero(const std::vector<MultiPoly>& polys) {
  for (std::size_t i = 0; i < polys.size(); ++i) {
    if (polys[i].is_zero()) return false;
    for (std::size_t j = i + 1; j < polys.size(); ++j)
      if (polys[i] == polys[j]) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Criterion 1: exact local factors of x^2 + 1 against a hand table.
// ---------------------------------------------------------------------------
void crit_local_factor_table(CriterionResult& r) {
  Checker ck{r};
  const MultiPoly P = parse_poly("x^2 + 1", {"x"});
  const std::pair<std::int64_t, Rat> table[] = {
      {2, Rat(1, 2)},   {3, Rat(0)},      {5, Rat(2, 5)},
      {13, Rat(2, 13)}, {17, Rat(2, 17)}, {19, Rat(0)}};
  for (const auto& [p, want] : table) {
    const Rat got = local_factor({P}, p);
    ck.require(got == want, "local factor mismatch at p=" + std::to_string(p));
    add_row(r, "c01.local_factor_x2plus1_p" + std::to_string(p),
            format_rat(got), format_rat(want), "0",
            "zero density of x^2+1 over F_p, exact rational");
  }
}

// ---------------------------------------------------------------------------
// Criterion 2: complementary factors of independent linear forms, and the
// inclusion-exclusion identity on random families.
// ---------------------------------------------------------------------------
void crit_linear_forms(CriterionResult& r, std::uint64_t seed) {
  Checker ck{r};
  std::mt19937_64 rng(sub_seed(seed, 2));
  const std::int64_t primes[] = {2, 3, 5, 7, 11, 13};

  int independent_checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int D = std::uniform_int_distribution<int>(1, 3)(rng);
    const int J = std::uniform_int_distribution<int>(1, std::min(3, D))(rng);
    const std::int64_t p =
        primes[std::uniform_int_distribution<int>(0, 5)(rng)];
    std::vector<std::vector<std::int64_t>> a;
    do {
      a.assign(static_cast<std::size_t>(J),
               std::vector<std::int64_t>(static_cast<std::size_t>(D), 0));
      for (auto& row : a)
        for (auto& x : row)
          x = std::uniform_int_distribution<std::int64_t>(0, p - 1)(rng);
    } while (rank_mod_p(a, p) != J);
    std::vector<MultiPoly> forms;
    for (int j = 0; j < J; ++j) {
      MultiPoly F = MultiPoly::constant(
          D, std::uniform_int_distribution<std::int64_t>(0, p - 1)(rng));
      for (int v = 0; v < D; ++v)
        F += MultiPoly::variable(D, v).scaled(a[static_cast<std::size_t>(j)]
                                               [static_cast<std::size_t>(v)]);
      forms.push_back(F);
    }
    const Rat got = complementary_factor(forms, p);
    const Rat want(boost::multiprecision::pow(Int(p - 1), static_cast<unsigned>(J)),
                   boost::multiprecision::pow(Int(p), static_cast<unsigned>(J)));
    ck.require(got == want, "independent linear forms trial " +
                                std::to_string(trial) + " (p=" +
                                std::to_string(p) + ", J=" + std::to_string(J) +
                                ")");
    ++independent_checked;
  }
  add_row(r, "c02.independent_form_instances",
          std::to_string(independent_checked), "100", "0",
          "complementary factor equals ((p-1)/p)^J exactly");

  int ie_checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int D = std::uniform_int_distribution<int>(1, 3)(rng);
    const int J = std::uniform_int_distribution<int>(1, 3)(rng);
    const std::int64_t p =
        primes[std::uniform_int_distribution<int>(0, 5)(rng)];
    std::vector<MultiPoly> polys;
    for (int j = 0; j < J; ++j)
      polys.push_back(random_poly(rng, D, 2, -3, 3, 3));
    const std::vector<Rat> sub = local_factor_all_subsets(polys, p);
    Rat alternating = 0;
    for (std::size_t mask = 0; mask < sub.size(); ++mask) {
      if (std::popcount(mask) % 2)
        alternating -= sub[mask];
      else
        alternating += sub[mask];
    }
    ck.require(alternating == complementary_factor(polys, p),
               "inclusion-exclusion trial " + std::to_string(trial));
    ++ie_checked;
  }
  add_row(r, "c02.inclusion_exclusion_instances", std::to_string(ie_checked),
          "200", "0",
          "alternating subset sum equals the complementary factor exactly");
}

// ---------------------------------------------------------------------------
// Criterion 3: zero density of a non-zero polynomial over F_p^D is at most
// (total degree) * D / p.
// ---------------------------------------------------------------------------
void crit_zero_density(CriterionResult& r, std::uint64_t seed) {
  Checker ck{r};
  std::mt19937_64 rng(sub_seed(seed, 3));
  const std::int64_t primes[] = {5, 7, 11, 13};
  double worst_ratio = 0;
  int checked = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int D = std::uniform_int_distribution<int>(1, 3)(rng);
    const std::int64_t p =
        primes[std::uniform_int_distribution<int>(0, 3)(rng)];
    MultiPoly reduced(D);
    do {
      reduced = reduce_mod_p(random_poly(rng, D, 3, -5, 5, 4), p);
    } while (reduced.is_zero());
    const int d = reduced.total_degree();
    std::vector<std::int64_t> pt(static_cast<std::size_t>(D), 0);
    std::int64_t zeros = 0;
    for (;;) {
      if (reduced.eval_mod(pt, p) == 0) ++zeros;
      int v = 0;
      while (v < D && ++pt[static_cast<std::size_t>(v)] == p) {
        pt[static_cast<std::size_t>(v)] = 0;
        ++v;
      }
      if (v == D) break;
    }
    const std::int64_t bound = static_cast<std::int64_t>(D) * d * ipow64(p, D);
    ck.require(zeros * p <= bound,
               "zero density bound violated on trial " + std::to_string(trial));
    if (d > 0)
      worst_ratio = std::max(
          worst_ratio, static_cast<double>(zeros * p) / static_cast<double>(bound));
    ++checked;
  }
  add_row(r, "c03.instances", std::to_string(checked), "500", "0",
          "random non-zero polynomials, D <= 3, deg <= 3, p in {5,7,11,13}");
  add_row(r, "c03.worst_density_ratio", format_sig(worst_ratio), "<= 1", "0",
          "max of (zero count * p) / (D * deg * p^D)");
}

// ---------------------------------------------------------------------------
// Criterion 4: resultant sign convention on linear pairs and the mod-p
// resultant <-> common factor equivalence.
// ---------------------------------------------------------------------------
void crit_resultant(CriterionResult& r, std::uint64_t seed) {
  Checker ck{r};
  std::mt19937_64 rng(sub_seed(seed, 4));
  std::uniform_int_distribution<std::int64_t> coeff(-50, 50);
  const MultiPoly x = MultiPoly::variable(1, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::int64_t a = coeff(rng), b = coeff(rng), c = coeff(rng),
                       d = coeff(rng);
    const MultiPoly P = MultiPoly::constant(1, a) + x.scaled(b);
    const MultiPoly Q = MultiPoly::constant(1, c) + x.scaled(d);
    const MultiPoly res = resultant(P, Q, 0, 1, 1);
    ck.require(res.is_constant() &&
                   res.constant_value() == Int(a) * d - Int(b) * c,
               "linear resultant trial " + std::to_string(trial));
  }
  add_row(r, "c04.linear_pair_instances", "100", "100", "0",
          "resultant(a+bx, c+dx) == a*d - b*c exactly");

  std::uniform_int_distribution<int> degd(1, 4);
  std::uniform_int_distribution<std::int64_t> smallc(-20, 20);
  const std::int64_t primes[] = {5, 7, 11, 13};
  int vanish_count = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::int64_t p =
        primes[std::uniform_int_distribution<int>(0, 3)(rng)];
    auto draw = [&](int deg) {
      MultiPoly P(1);
      for (int k = 0; k < deg; ++k) {
        const std::int64_t cv = smallc(rng);
        if (cv != 0)
          P += MultiPoly::monomial(1, Monomial{static_cast<std::uint32_t>(k)},
                                   cv);
      }
      std::int64_t lc = 0;
      do {
        lc = smallc(rng);
      } while (lc % p == 0);  // also excludes 0
      P += MultiPoly::monomial(1, Monomial{static_cast<std::uint32_t>(deg)},
                               lc);
      return P;
    };
    const MultiPoly P = draw(degd(rng));
    const MultiPoly Q = draw(degd(rng));
    const MultiPoly res = resultant(P, Q, 0);
    const bool res_vanishes = (res.constant_value() % p) == 0;
    const bool gcd_nontrivial = !coprime_mod_p(P, Q, p);
    ck.require(res_vanishes == gcd_nontrivial,
               "resultant/gcd equivalence trial " + std::to_string(trial));
    if (res_vanishes) ++vanish_count;
  }
  add_row(r, "c04.modp_pair_instances", "200", "200", "0",
          "resultant == 0 mod p iff the reductions share a factor");
  add_row(r, "c04.modp_vanishing_pairs", std::to_string(vanish_count), "", "",
          "pairs whose resultant vanished mod p (both branches exercised)");
}

// ---------------------------------------------------------------------------
// Criterion 5: equidistribution of residue classes in boxes of inradius r:
// |density * m^D - 1| <= 5 m / r for m <= r / 10.
// ---------------------------------------------------------------------------
void crit_lattice_equidistribution(CriterionResult& r, std::uint64_t seed) {
  Checker ck{r};
  std::mt19937_64 rng(sub_seed(seed, 5));
  double empirical_C[4] = {0, 0, 0, 0};
  int checked = 0;
  for (int D = 1; D <= 3; ++D) {
    for (int trial = 0; trial < 15; ++trial) {
      const double radius = std::uniform_real_distribution<double>(50, 500)(rng);
      const int tight_axis = std::uniform_int_distribution<int>(0, D - 1)(rng);
      std::vector<double> lo(static_cast<std::size_t>(D)),
          hi(static_cast<std::size_t>(D));
      for (int i = 0; i < D; ++i) {
        const double side =
            (i == tight_axis)
                ? 2 * radius
                : 2 * radius *
                      (1 + std::uniform_real_distribution<double>(0, 1.5)(rng));
        const double center =
            std::uniform_real_distribution<double>(-1000, 1000)(rng);
        lo[static_cast<std::size_t>(i)] = center - side / 2;
        hi[static_cast<std::size_t>(i)] = center + side / 2;
      }
      const ConvexBody body = ConvexBody::box(lo, hi);
      const double r_meas = inradius(body);
      const std::int64_t m = std::uniform_int_distribution<std::int64_t>(
          2, static_cast<std::int64_t>(std::floor(r_meas / 10)))(rng);
      std::vector<std::int64_t> a(static_cast<std::size_t>(D));
      for (auto& ai : a)
        ai = std::uniform_int_distribution<std::int64_t>(0, m - 1)(rng);
      const std::int64_t total = lattice_point_count(
          body, 1, std::vector<std::int64_t>(static_cast<std::size_t>(D), 0));
      const std::int64_t in_class = lattice_point_count(body, m, a);
      const double density =
          static_cast<double>(in_class) / static_cast<double>(total);
      const double err = std::abs(density * std::pow(static_cast<double>(m), D) - 1);
      const double bound = 5.0 * static_cast<double>(m) / r_meas;
      ck.require(err <= bound, "equidistribution failed (D=" +
                                   std::to_string(D) + ", trial " +
                                   std::to_string(trial) + ")");
      empirical_C[D] =
          std::max(empirical_C[D], err * r_meas / static_cast<double>(m));
      ++checked;
    }
  }
  add_row(r, "c05.instances", std::to_string(checked), "45", "0",
          "random boxes, inradius in [50,500], modulus m <= inradius/10");
  for (int D = 1; D <= 3; ++D)
    add_row(r, "c05.empirical_constant_dim" + std::to_string(D),
            format_sig(empirical_C[D]), "<= 5", "0",
            "max |density * m^D - 1| * r / m over the seeded boxes");
}

// ---------------------------------------------------------------------------
// Criterion 6: sieve majorant at N = 50000: exact domination of the prime
// weight, mean bands, and cutoff normalization identities.
// ---------------------------------------------------------------------------
void crit_sieve_majorant(CriterionResult& r, const PrimeTable& table) {
  Checker ck{r};
  const PrimeSet all = PrimeSet::all_primes();
  const SieveParams params = derive_params_direct(
      600000, 5, 16.0, std::pow(50000.0, 0.25), 4.0, all, table);
  ck.require(params.N == 50000, "derived cyclic size");
  ck.require(params.W == 6, "derived W");
  add_row(r, "c06.N", std::to_string(params.N), "50000", "0",
          "cyclic group size after the W-trick");
  add_row(r, "c06.W", std::to_string(params.W), "6", "0",
          "product of primes below 5");
  add_row(r, "c06.b", std::to_string(params.b), "", "",
          "residue class chosen for the W-trick (coprime to W)");
  add_row(r, "c06.R", format_sig(params.R), format_sig(std::pow(50000.0, 0.25)),
          "0", "sieve truncation scale N^(1/4)");

  const CutoffChi tent = CutoffChi::tent();
  const CyclicFn nu_fn = nu(params, tent, table);
  const CyclicFn f = prime_weight_f(params, all, table);
  std::int64_t violations = 0;
  for (std::size_t i = 0; i < nu_fn.v.size(); ++i)
    if (f.v[i] > nu_fn.v[i]) ++violations;
  ck.require(violations == 0, "prime weight exceeds the majorant somewhere");
  add_row(r, "c06.domination_violations", std::to_string(violations), "0", "0",
          "points with f > nu (exact floating comparison)");

  const double mean = nu_fn.mean();
  const double model = nu_model_mean(params, tent, table);
  ck.require(std::abs(mean - 1.0) <= 0.35, "nu mean outside the absolute band");
  ck.require(std::abs(mean - model) <= 0.02, "nu mean outside the model band");
  add_row(r, "c06.mean_nu", format_sig(mean), "1", "0.35",
          "average of the majorant over the cyclic group");
  add_row(r, "c06.mean_nu_model", format_sig(model), format_sig(mean), "0.02",
          "diagonal-free divisor-sum model of the mean");
  add_row(r, "c06.mean_f", format_sig(f.mean()), "", "",
          "average of the prime weight (diagnostic)");

  const CutoffChi smooth = CutoffChi::smooth_plateau();
  const double e_tent = tent.derivative_energy();
  const double e_smooth = smooth.derivative_energy();
  ck.require(std::abs(e_tent - 1.0) <= 1e-6, "tent derivative energy");
  ck.require(std::abs(e_smooth - 1.0) <= 1e-6, "plateau derivative energy");
  add_row(r, "c06.derivative_energy_tent", format_sig(e_tent), "1", "1e-6",
          "normalization integral of |chi'|^2");
  add_row(r, "c06.derivative_energy_plateau", format_sig(e_smooth), "1", "1e-6",
          "normalization integral of |chi'|^2");

  const double pid_smooth = smooth.phi_identity(60.0);
  ck.require(std::abs(pid_smooth - 1.0) <= 1e-3,
             "plateau Fourier identity outside tolerance");
  add_row(r, "c06.phi_identity_plateau", format_sig(pid_smooth), "1", "1e-3",
          "Fourier-side quadratic form at T = 60");
  add_row(r, "c06.phi_identity_tent", format_sig(tent.phi_identity(40.0)), "1",
          "", "diagnostic only: the kink slows the tail convergence");
}

// ---------------------------------------------------------------------------
// Criterion 7: dual-function identity, concatenation domination, and the
// tensor inequalities.
// ---------------------------------------------------------------------------
GowersSpec random_spec(std::mt19937_64& rng, int d, int t, std::int64_t H,
                       std::int64_t sqrtM, std::int64_t Wval) {
  GowersSpec s;
  s.d = d;
  s.t = t;
  s.H = H;
  s.sqrtM = sqrtM;
  s.Wval = Wval;
  const int nv = t + 1;
  std::uniform_int_distribution<int> cdist(0, 2);
  for (int i = 0; i < d; ++i) {
    MultiPoly q(nv);
    do {
      q = MultiPoly(nv);
      for (int v = 0; v < nv; ++v) {
        const int cv = cdist(rng);
        if (cv != 0) q += MultiPoly::variable(nv, v).scaled(cv);
      }
      if (std::uniform_int_distribution<int>(0, 3)(rng) == 0)
        q += MultiPoly::variable(nv, 0) * MultiPoly::variable(nv, 0);
    } while (q.is_zero());
    s.Q.push_back(q);
  }
  s.validate();
  return s;
}

void crit_gowers(CriterionResult& r, std::uint64_t seed) {
  Checker ck{r};
  std::mt19937_64 rng(sub_seed(seed, 7));
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_real_distribution<double> u11(-1.0, 1.0);

  double worst_rel = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::int64_t N =
        std::uniform_int_distribution<std::int64_t>(16, 64)(rng);
    const int t = std::uniform_int_distribution<int>(1, 2)(rng);
    const GowersSpec spec = random_spec(
        rng, 2, t, std::uniform_int_distribution<std::int64_t>(2, 3)(rng),
        std::uniform_int_distribution<std::int64_t>(2, 3)(rng),
        std::uniform_int_distribution<std::int64_t>(1, 3)(rng));
    CyclicFn f(N);
    for (auto& x : f.v) x = u01(rng);
    const AvgGowersResult ar = avg_local_gowers_exact(f, spec);
    const CyclicFn Df = dual_function(f, spec);
    double inner = 0, comp = 0;
    for (std::size_t i = 0; i < f.v.size(); ++i) {
      const double term = f.v[i] * Df.v[i] - comp;
      const double next = inner + term;
      comp = (next - inner) - term;
      inner = next;
    }
    inner /= static_cast<double>(N);
    const double rel = std::abs(inner - ar.norm_pow) / std::abs(ar.norm_pow);
    ck.require(rel <= 1e-9, "dual identity trial " + std::to_string(trial));
    worst_rel = std::max(worst_rel, rel);
  }
  add_row(r, "c07.dual_identity_instances", "50", "50", "0",
          "int f * dual(f) equals the 2^d power of the averaged local norm");
  add_row(r, "c07.dual_identity_worst_rel_err", format_sig(worst_rel), "0",
          "1e-9", "largest relative deviation observed");

  double min_slack = 1e300;
  for (int trial = 0; trial < 100; ++trial) {
    const std::int64_t Wv =
        std::uniform_int_distribution<std::int64_t>(1, 2)(rng);
    const GowersSpec s1 = random_spec(rng, 2, 1, 2, 2, Wv);
    const GowersSpec s2 = random_spec(rng, 2, 1, 2, 2, Wv);
    const std::int64_t N =
        std::uniform_int_distribution<std::int64_t>(16, 48)(rng);
    CyclicFn f(N);
    for (auto& x : f.v) x = u01(rng);
    const double n1 = avg_local_gowers_exact(f, s1).norm;
    const double n12 = avg_local_gowers_exact(f, concat_specs({s1, s2})).norm;
    ck.require(n12 >= n1 - 1e-12,
               "concatenation domination trial " + std::to_string(trial));
    min_slack = std::min(min_slack, n12 - n1);
  }
  add_row(r, "c07.domination_instances", "100", "100", "0",
          "norm under the concatenated specification dominates each part");
  add_row(r, "c07.domination_min_slack", format_sig(min_slack), ">= 0",
          "1e-12", "minimum of (concatenated norm - part norm)");

  for (int trial = 0; trial < 50; ++trial) {
    const int A = std::uniform_int_distribution<int>(1, 3)(rng);
    std::vector<std::int64_t> dims(static_cast<std::size_t>(A));
    for (auto& d : dims)
      d = std::uniform_int_distribution<std::int64_t>(2, 4)(rng);
    std::vector<Tensor> fs;
    for (int w = 0; w < (1 << A); ++w) {
      Tensor F = Tensor::zeros(dims);
      for (auto& x : F.v) x = u11(rng);
      fs.push_back(std::move(F));
    }
    const double lhs = std::abs(gcz_average(fs));
    double rhs = 1.0;
    for (const auto& F : fs) rhs *= box_norm(F);
    ck.require(lhs <= rhs + 1e-12,
               "corner average bound trial " + std::to_string(trial));
  }
  add_row(r, "c07.corner_inequality_instances", "50", "50", "0",
          "corner average bounded by the product of box norms");

  int weighted_ok = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int A = std::uniform_int_distribution<int>(2, 3)(rng);
    std::vector<std::int64_t> dims(static_cast<std::size_t>(A));
    for (auto& d : dims)
      d = std::uniform_int_distribution<std::int64_t>(2, 4)(rng);
    Tensor f = Tensor::zeros(dims);
    for (auto& x : f.v) x = u11(rng);
    std::vector<Tensor> nu_alpha, f_alpha;
    for (int axis = 0; axis < A; ++axis) {
      std::vector<std::int64_t> sub;
      for (int bxs = 0; bxs < A; ++bxs)
        if (bxs != axis) sub.push_back(dims[static_cast<std::size_t>(bxs)]);
      Tensor nu_t = Tensor::zeros(sub);
      for (auto& x : nu_t.v)
        x = std::uniform_real_distribution<double>(0.1, 1.0)(rng);
      Tensor fa = nu_t;
      for (auto& x : fa.v) x *= u11(rng);
      nu_alpha.push_back(std::move(nu_t));
      f_alpha.push_back(std::move(fa));
    }
    const WeightedBoxReport rep = weighted_box_check(f, f_alpha, nu_alpha);
    ck.require(rep.holds,
               "weighted inequality trial " + std::to_string(trial));
    if (rep.holds) ++weighted_ok;
  }
  add_row(r, "c07.weighted_inequality_instances", std::to_string(weighted_ok),
          "50", "0", "weighted corner inequality holds on random tensors");
}

// ---------------------------------------------------------------------------
// Criterion 8: the linearizer against two hand-derived systems, plus the
// shipped family corpus.
// ---------------------------------------------------------------------------
void crit_linearizer(CriterionResult& r, const std::string& data_dir) {
  Checker ck{r};

  // Route A: family {0, m, m^2} with symbolic W scaling.
  {
    std::vector<std::string> mn = {"m"};
    const std::vector<MultiPoly> fam = {MultiPoly(1), parse_poly("m", mn),
                                        parse_poly("m^2", mn)};
    const PolySystem sys = make_system(fam, true);
    const LinearizedResult res = linearize(sys);
    ck.require(res.steps.size() == 1, "route A step count");
    ck.require(res.linear_ids.size() == 3, "route A linear node count");
    ck.require(res.final_system.D == 2, "route A fine variable count");
    const std::vector<std::string> names = res.final_system.var_names();
    const std::vector<MultiPoly> expected = {
        parse_poly("1", names), parse_poly("2*W*(h1 - h2)", names),
        parse_poly("1 + 2*W*(h1 - h2)", names)};
    ck.require(sorted_strings(res.b, names) == sorted_strings(expected, names),
               "route A coarse coefficients");
    ck.require(distinct_and_nonzero(res.b),
               "route A coarse coefficients distinct and non-zero");
    ck.require(res.gowers_spec.d == 3 && res.gowers_spec.Q.size() == 3,
               "route A extracted specification arity");
    add_row(r, "c08.routeA_steps", std::to_string(res.steps.size()), "1", "0",
            "van der Corput steps for {0, m, m^2} with symbolic W");
    add_row(r, "c08.routeA_linear_nodes",
            std::to_string(res.linear_ids.size()), "3", "0",
            "surviving linear nodes");
  }

  // Route B: the same family without W, distinguished node m^2; the first
  // step's five-node structure is pinned, then the full run.
  {
    const std::vector<std::string> rn = {"m", "W"};
    PolySystem sys;
    sys.D = 0;
    sys.distinguished = 3;
    sys.nodes = {{1, true, MultiPoly(2)},
                 {2, true, parse_poly("m", rn)},
                 {3, true, parse_poly("m^2", rn)}};
    sys.validate();

    const PolySystem s1 = vdc_step(sys, 1);
    ck.require(s1.nodes.size() == 5, "route B step-1 node count");
    const std::vector<std::string> n4 = s1.var_names();
    auto node_is = [&](int id, bool active, const std::string& rtext) {
      return s1.has_node(id) && s1.node(id).active == active &&
             s1.node(id).R == parse_poly(rtext, n4);
    };
    ck.require(node_is(1, false, "0"), "route B node 1 after step 1");
    ck.require(node_is(2, true, "m + h1"), "route B node 2 after step 1");
    ck.require(node_is(3, true, "(m + h1)^2"), "route B node 3 after step 1");
    ck.require(node_is(4, true, "m + h2"), "route B node 4 after step 1");
    ck.require(node_is(5, true, "(m + h2)^2"), "route B node 5 after step 1");

    const LinearizedResult res = linearize(sys);
    ck.require(res.steps.size() == 2, "route B step count");
    ck.require(res.steps[0].target == 1 && res.steps[1].target == 2,
               "route B elimination order");
    ck.require(res.steps[0].weight_before.entries ==
                   std::vector<std::int64_t>({1, 1}),
               "route B initial weight");
    ck.require(res.steps[0].weight_after.entries ==
                   std::vector<std::int64_t>({0, 1}),
               "route B weight after one step");
    ck.require(res.final_system.D == 4, "route B fine variable count");
    ck.require(res.linear_ids.size() == 3, "route B linear node count");
    ck.require(res.final_system.nodes.size() == 8, "route B final node count");
    const std::vector<std::string> n6 = res.final_system.var_names();
    const std::vector<MultiPoly> expected = {
        parse_poly("2*(h2 - h1)", n6), parse_poly("2*(h4 - h3)", n6),
        parse_poly("2*(h4 + h2 - h3 - h1)", n6)};
    ck.require(sorted_strings(res.b, n6) == sorted_strings(expected, n6),
               "route B coarse coefficients");
    ck.require(distinct_and_nonzero(res.b),
               "route B coarse coefficients distinct and non-zero");
    add_row(r, "c08.routeB_steps", std::to_string(res.steps.size()), "2", "0",
            "van der Corput steps with the top node distinguished");
    add_row(r, "c08.routeB_final_nodes",
            std::to_string(res.final_system.nodes.size()), "8", "0",
            "nodes in the final linear system");
  }

  // Shipped corpus: every family must linearize within 10 seconds.
  namespace fs = std::filesystem;
  const fs::path corpus = fs::path(data_dir) / "pet_corpus";
  std::vector<fs::path> files;
  if (fs::exists(corpus))
    for (const auto& entry : fs::directory_iterator(corpus))
      if (entry.path().extension() == ".txt") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  ck.require(files.size() == 12, "corpus has 12 families (found " +
                                     std::to_string(files.size()) + ")");
  for (const auto& file : files) {
    const auto t0 = Clock::now();
    const std::vector<MultiPoly> fam = parse_poly_family(read_file_bytes(file.string()));
    const PolySystem sys = make_system(fam, true);
    const LinearizedResult res = linearize(sys);
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    const std::string stem = file.stem().string();
    ck.require(res.final_system.is_linear(), stem + " not linearized");
    ck.require(distinct_and_nonzero(res.b),
               stem + " coarse coefficients not distinct/non-zero");
    ck.require(secs < 10.0, stem + " exceeded 10 s");
    add_row(r, "c08." + stem + "_steps", std::to_string(res.steps.size()), "",
            "", "fine variables: " + std::to_string(res.final_system.D) +
                    ", final nodes: " +
                    std::to_string(res.final_system.nodes.size()) +
                    ", linear nodes: " + std::to_string(res.linear_ids.size()));
  }
}

// ---------------------------------------------------------------------------
// Criterion 9: energy-increment decomposition of the majorant at N = 2048.
// ---------------------------------------------------------------------------
void crit_decomposition(CriterionResult& r, std::uint64_t seed,
                        const std::string& data_dir, const PrimeTable& table) {
  Checker ck{r};
  const PrimeSet all = PrimeSet::all_primes();
  const SieveParams params = derive_params_direct(
      24576, 5, 16.0, std::pow(2048.0, 0.25), 4.0, all, table);
  ck.require(params.N == 2048 && params.W == 6, "derived scales");
  const CyclicFn nu_fn = nu(params, CutoffChi::tent(), table);

  GowersSpec spec;
  spec.d = 2;
  spec.t = 1;
  spec.Q = {MultiPoly::variable(2, 0), MultiPoly::variable(2, 1)};
  spec.H = 4;
  spec.sqrtM = 4;
  spec.Wval = params.W;
  spec.validate();

  const double eta4 = 0.05, eta5 = 1e-3;
  const DecompositionResult dr =
      knvn_decompose(nu_fn, nu_fn, spec, eta4, eta5, sub_seed(seed, 9));

  ck.require(dr.iterations <= dr.cap, "iteration cap");
  double min_gs = 1e300, max_gs = -1e300, min_sum = 1e300, max_excess = -1e300;
  for (std::size_t i = 0; i < nu_fn.v.size(); ++i) {
    min_gs = std::min(min_gs, dr.g_structured.v[i]);
    max_gs = std::max(max_gs, dr.g_structured.v[i]);
    const double sum = dr.g_structured.v[i] + dr.g_uniform.v[i];
    min_sum = std::min(min_sum, sum);
    max_excess = std::max(max_excess, sum - nu_fn.v[i]);
  }
  ck.require(min_gs >= -1e-12 && max_gs <= 1 + dr.sigma + 1e-9,
             "structured part outside [0, 1+sigma]");
  ck.require(min_sum >= -1e-9 && max_excess <= 1e-9,
             "sandwich 0 <= g_s + g_u <= g violated");
  ck.require(dr.mass_structured >= dr.mass_g - 0.25,
             "structured mass lost more than 0.25");
  ck.require(std::abs(dr.final_correlation) <= eta4,
             "final dual correlation above eta4");

  add_row(r, "c09.iterations", std::to_string(dr.iterations),
          "<= " + std::to_string(dr.cap), "0", "factor extensions performed");
  add_row(r, "c09.sigma", format_sig(dr.sigma), "", "",
          "max of exceptional mass and off-set conditional deviation");
  add_row(r, "c09.energy", format_sig(dr.energy),
          "<= " + format_sig((1 + dr.sigma) * (1 + dr.sigma)), "1e-9",
          "energy of the conditional expectation off the exceptional set");
  add_row(r, "c09.final_correlation", format_sig(dr.final_correlation), "0",
          format_sig(eta4), "int g_u * dual(g_u) at termination");
  add_row(r, "c09.mass_g", format_sig(dr.mass_g), "", "", "int g");
  add_row(r, "c09.mass_structured", format_sig(dr.mass_structured),
          ">= " + format_sig(dr.mass_g - 0.25), "0", "int g_s");
  add_row(r, "c09.structured_range_max", format_sig(max_gs),
          "<= " + format_sig(1 + dr.sigma), "1e-9", "sup of g_s");
  add_row(r, "c09.exceptional_points", std::to_string(dr.exceptional_points),
          "", "", "points where g_s + g_u != g exactly");
  add_row(r, "c09.badset_points", std::to_string(dr.global_badset_points), "",
          "", "points cut by the dual-range truncation of the majorant");

  // Golden trace: regenerated only when explicitly requested by environment.
  if (seed == 0) {
    const std::string trace = trace_csv(dr.trace);
    const std::filesystem::path golden =
        std::filesystem::path(data_dir) / "golden" / "knvn_trace_n2048.csv";
    std::string status;
    if (!std::filesystem::exists(golden) &&
        std::getenv("POLYPROG_WRITE_GOLDEN") != nullptr) {
      std::filesystem::create_directories(golden.parent_path());
      write_file_bytes(golden.string(), trace);
    }
    if (std::filesystem::exists(golden)) {
      const bool match = read_file_bytes(golden.string()) == trace;
      ck.require(match, "decomposition trace differs from the golden file");
      status = match ? "match" : "mismatch";
    } else {
      ck.require(false, "golden trace file missing");
      status = "missing";
    }
    add_row(r, "c09.golden_trace", status, "match", "0",
            "byte comparison of the iteration trace against data/golden");
  } else {
    add_row(r, "c09.golden_trace", "skipped", "match", "0",
            "golden comparison runs only at seed 0");
  }
}

// ---------------------------------------------------------------------------
// Criterion 10: progression counts against a naive serial oracle.
// ---------------------------------------------------------------------------
void crit_count_oracle(CriterionResult& r, std::uint64_t seed,
                       const PrimeTable& table) {
  Checker ck{r};
  std::mt19937_64 rng(sub_seed(seed, 10));
  std::int64_t total = 0;
  for (int trial = 0; trial < 50; ++trial) {
    ProgressionSpec spec;
    spec.N = std::uniform_int_distribution<std::int64_t>(100, 2000)(rng);
    spec.M = std::uniform_int_distribution<std::int64_t>(5, 50)(rng);
    const int k = std::uniform_int_distribution<int>(1, 3)(rng);
    while (static_cast<int>(spec.polys.size()) < k) {
      const MultiPoly P = random_univariate(
          rng, std::uniform_int_distribution<int>(1, 3)(rng), -3, 3, true);
      bool dup = false;
      for (const auto& Q : spec.polys) dup = dup || (Q == P);
      if (!dup) spec.polys.push_back(P);
    }
    const CountResult res = count_progressions(spec, table);

    std::int64_t naive = 0;
    for (std::int64_t m = 1; m <= spec.M; ++m) {
      std::vector<std::int64_t> shift;
      for (const auto& P : spec.polys)
        shift.push_back(static_cast<std::int64_t>(P.eval({Int(m)})));
      for (std::int64_t x = 1; x <= spec.N; ++x) {
        bool all = true;
        for (const std::int64_t s : shift) {
          const std::int64_t v = x + s;
          if (v < 2 || !table.is_prime(static_cast<std::uint64_t>(v))) {
            all = false;
            break;
          }
        }
        if (all) ++naive;
      }
    }
    ck.require(res.count == naive,
               "count mismatch on trial " + std::to_string(trial) + " (" +
                   std::to_string(res.count) + " vs " + std::to_string(naive) +
                   ")");
    if (!res.witnesses.empty()) {
      bool wit_ok = true;
      for (const std::int64_t v : res.witnesses.front().values)
        wit_ok = wit_ok && v >= 2 && table.is_prime(static_cast<std::uint64_t>(v));
      ck.require(wit_ok, "invalid witness on trial " + std::to_string(trial));
    }
    total += naive;
  }
  add_row(r, "c10.instances", "50", "50", "0",
          "random spec vs serial oracle, N <= 2000, M <= 50, k <= 3");
  add_row(r, "c10.total_progressions", std::to_string(total), "", "",
          "progressions found across all instances (both counters agree)");
}

// ---------------------------------------------------------------------------
// Criterion 11: observed/predicted ratio for the pair (x, x+m).
// ---------------------------------------------------------------------------
void crit_singular_series(CriterionResult& r, const PrimeTable& table) {
  Checker ck{r};
  ProgressionSpec spec;
  spec.polys = {MultiPoly(1), MultiPoly::variable(1, 0)};
  spec.N = 100000;
  spec.M = 100;
  const CountResult res = count_progressions(spec, table, 5);
  const SingularSeries ss = singular_series(spec, 1000, table);
  ck.require(!ss.obstructed, "series unexpectedly obstructed");
  ck.require(std::abs(ss.gamma_hat - 1.0) <= 1e-9,
             "product should telescope to 1 for this family");
  const double ratio = static_cast<double>(res.count) / ss.predicted;
  ck.require(ratio >= 0.7 && ratio <= 1.3, "observed/predicted ratio " +
                                               format_sig(ratio) +
                                               " outside [0.7, 1.3]");
  add_row(r, "c11.observed", std::to_string(res.count), "", "",
          "pairs (x, x+m), x <= 100000, m <= 100, both prime");
  add_row(r, "c11.gamma_hat", format_sig(ss.gamma_hat), "1", "1e-9",
          "local-density product over p <= 1000 (telescopes exactly)");
  add_row(r, "c11.predicted", format_sig(ss.predicted), "", "",
          "gamma_hat * N * M / log(N)^2");
  add_row(r, "c11.ratio", format_sig(ratio), "1", "0.3",
          "observed over predicted; the log-based prediction runs low at "
          "this scale, so the band is wide");
}

std::vector<CriterionResult> run_battery(std::uint64_t seed,
                                         const std::string& data_dir,
                                         const PrimeTable& table) {
  std::vector<CriterionResult> out;
  out.push_back(run_criterion(1, "local-factor-table", 1.0,
                              [&](CriterionResult& r) { crit_local_factor_table(r); }));
  out.push_back(run_criterion(2, "linear-forms-inclusion-exclusion", 60.0,
                              [&](CriterionResult& r) { crit_linear_forms(r, seed); }));
  out.push_back(run_criterion(3, "zero-density-bound", 30.0,
                              [&](CriterionResult& r) { crit_zero_density(r, seed); }));
  out.push_back(run_criterion(4, "resultant-gcd-criterion", 60.0,
                              [&](CriterionResult& r) { crit_resultant(r, seed); }));
  out.push_back(run_criterion(5, "lattice-equidistribution", 60.0,
                              [&](CriterionResult& r) {
                                crit_lattice_equidistribution(r, seed);
                              }));
  out.push_back(run_criterion(6, "sieve-majorant-bands", 60.0,
                              [&](CriterionResult& r) { crit_sieve_majorant(r, table); }));
  out.push_back(run_criterion(7, "gowers-dual-identities", 60.0,
                              [&](CriterionResult& r) { crit_gowers(r, seed); }));
  out.push_back(run_criterion(8, "pet-linearizer-oracles", 130.0,
                              [&](CriterionResult& r) { crit_linearizer(r, data_dir); }));
  out.push_back(run_criterion(9, "energy-decomposition", 300.0,
                              [&](CriterionResult& r) {
                                crit_decomposition(r, seed, data_dir, table);
                              }));
  out.push_back(run_criterion(10, "progression-count-oracle", 60.0,
                              [&](CriterionResult& r) {
                                crit_count_oracle(r, seed, table);
                              }));
  out.push_back(run_criterion(11, "singular-series-ratio", 60.0,
                              [&](CriterionResult& r) {
                                crit_singular_series(r, table);
                              }));
  return out;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(std::uint64_t seed,
                                            const std::string& data_dir) {
  const PrimeTable table(1000000);
  std::vector<CriterionResult> results = run_battery(seed, data_dir, table);
  const auto t0 = Clock::now();
  const std::vector<CriterionResult> second = run_battery(seed, data_dir, table);
  const std::string bytes1 = acceptance_rows_csv(results);
  const std::string bytes2 = acceptance_rows_csv(second);

  CriterionResult rep;
  rep.index = 12;
  rep.name = "reproducibility";
  rep.pass = bytes1 == bytes2;
  rep.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  rep.detail = rep.pass
                   ? "both battery runs serialized to identical rows (" +
                         std::to_string(bytes1.size()) + " bytes)"
                   : "serialized rows differ between identically seeded runs";
  add_row(rep, "c12.rows_bytes_run1", std::to_string(bytes1.size()),
          std::to_string(bytes2.size()), "0",
          "serialized row bytes of the first full battery run");
  add_row(rep, "c12.byte_identical", rep.pass ? "1" : "0", "1", "0",
          "exact equality of the two serialized row sets");
  results.push_back(rep);
  return results;
}

std::string acceptance_rows_csv(const std::vector<CriterionResult>& results) {
  std::ostringstream out;
  out << kReportCsvHeader << "\n";
  for (const auto& cr : results)
    for (const auto& row : cr.rows)
      out << csv_escape(row.command.empty() ? "verify" : row.command) << ","
          << csv_escape(row.quantity) << "," << csv_escape(row.value) << ","
          << csv_escape(row.prediction) << "," << csv_escape(row.tolerance)
          << "," << csv_escape(row.note) << "\n";
  return out.str();
}

std::string criterion_line(const CriterionResult& r) {
  char idx[8];
  std::snprintf(idx, sizeof idx, "%02d", r.index);
  char secs[32];
  std::snprintf(secs, sizeof secs, "%.2f", r.seconds);
  std::string line = "criterion " + std::string(idx) + " " + r.name + ": " +
                     (r.pass ? "PASS" : "FAIL") + " (" + secs + " s)";
  if (!r.pass) line += "  [" + r.detail + "]";
  return line;
}

}  // namespace polyprog
