#include "polyprog/sieve.hpp"

#include "polyprog/localfactors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace polyprog {

namespace {

constexpr std::int64_t kLatticeBudget = 100000000;

std::int64_t to_int64(const Int& v, const char* what) {
  if (v > std::numeric_limits<std::int64_t>::max() ||
      v < std::numeric_limits<std::int64_t>::min())
    throw PreconditionError(std::string(what) + ": value exceeds 64-bit range");
  return static_cast<std::int64_t>(v);
}

// Evaluates an integer polynomial at an int64 lattice point.
std::int64_t eval_at(const MultiPoly& P, const std::vector<std::int64_t>& pt) {
  std::vector<Int> big(pt.begin(), pt.end());
  return to_int64(P.eval(big), "polynomial shift");
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

// ---------------------------------------------------------------------------
// PrimeSet
// ---------------------------------------------------------------------------

PrimeSet PrimeSet::all_primes() { return PrimeSet{}; }

PrimeSet PrimeSet::from_list(std::vector<std::int64_t> values) {
  PrimeSet s;
  s.kind = Kind::Listed;
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  s.listed = std::move(values);
  return s;
}

bool PrimeSet::contains(std::int64_t n, const PrimeTable& table) const {
  if (kind == Kind::Listed)
    return std::binary_search(listed.begin(), listed.end(), n);
  if (n < 2) return false;
  if (static_cast<std::uint64_t>(n) <= table.limit())
    return table.is_prime(static_cast<std::uint64_t>(n));
  // Trial division by tabulated primes up to sqrt(n).
  if (static_cast<double>(table.limit()) * static_cast<double>(table.limit()) <
      static_cast<double>(n))
    throw PreconditionError("PrimeSet: prime table too small for membership");
  for (std::uint32_t p : table.primes()) {
    if (static_cast<std::int64_t>(p) * p > n) break;
    if (n % p == 0) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Parameter derivation
// ---------------------------------------------------------------------------

namespace {

SieveParams derive_core(std::int64_t N_input, int w, const PrimeSet& A,
                        const PrimeTable& table) {
  if (N_input < 8) throw PreconditionError("derive_params: N_input too small");
  if (w < 2) throw PreconditionError("derive_params: w must be at least 2");
  SieveParams out;
  out.N_input = N_input;
  out.w = w;
  out.W = 1;
  for (std::uint32_t p : table.primes()) {
    if (static_cast<int>(p) >= w) break;
    out.W *= p;
  }
  double quarter = std::pow(static_cast<double>(N_input), 0.25);
  if (static_cast<double>(out.W) > quarter)
    throw PreconditionError("derive_params: W exceeds N_input^{1/4}");
  out.N = N_input / (2 * out.W);
  if (out.N < 4) throw PreconditionError("derive_params: derived N too small");

  // b: residue coprime to W carrying the most elements x in [N/2] with
  // Wx + b in A; ties resolved to the smallest b.
  std::int64_t best_b = -1, best_count = -1;
  std::int64_t half = out.N / 2;
  for (std::int64_t b = 1; b <= out.W; ++b) {
    if (std::gcd(b, out.W) != 1) continue;
    std::int64_t count = 0;
    for (std::int64_t x = 1; x <= half; ++x) {
      if (A.contains(out.W * x + b, table)) ++count;
    }
    if (count > best_count) {
      best_count = count;
      best_b = b;
    }
  }
  if (best_b < 0)
    throw InvariantError("derive_params: no residue coprime to W", "");
  out.b = best_b;
  return out;
}

void hierarchy_check(SieveParams& p) {
  auto warn = [&](const std::string& msg) {
    p.hierarchy_warnings.push_back(msg);
  };
  double W = static_cast<double>(p.W);
  double N = static_cast<double>(p.N);
  if (!(W < p.H)) warn("hierarchy: W < H fails");
  if (!(p.H < p.R)) warn("hierarchy: H < R fails");
  if (!(p.R < p.M)) warn("hierarchy: R < M fails");
  if (!(p.M < N)) warn("hierarchy: M < N fails");
  if (p.eta_mode) {
    double eta1 = p.eta[1], eta6 = p.eta[6];
    if (eta6 > 0 && !(std::pow(W, 1 / eta6) < p.H))
      warn("hierarchy: W^{1/eta6} < H fails");
    if (eta6 > 0 && !(std::pow(p.H, 1 / eta6) < p.R))
      warn("hierarchy: H^{1/eta6} < R fails");
    if (eta1 > 0 && !(std::pow(p.R, 1 / eta1) < p.M))
      warn("hierarchy: R^{1/eta1} < M fails");
  }
}

}  // namespace

SieveParams derive_params_direct(std::int64_t N_input, int w, double M,
                                 double R, double H, const PrimeSet& A,
                                 const PrimeTable& table) {
  if (!(R > 1)) throw PreconditionError("derive_params: R must exceed 1");
  SieveParams out = derive_core(N_input, w, A, table);
  out.M = M;
  out.R = R;
  out.H = H;
  out.eta_mode = false;
  out.eta.fill(std::numeric_limits<double>::quiet_NaN());
  hierarchy_check(out);
  return out;
}

SieveParams derive_params_eta(std::int64_t N_input, int w,
                              const std::array<double, 8>& eta, double delta0,
                              const PrimeSet& A, const PrimeTable& table) {
  SieveParams out = derive_core(N_input, w, A, table);
  out.eta = eta;
  out.delta0 = delta0;
  out.eta_mode = true;
  double N = static_cast<double>(out.N);
  out.M = std::pow(N, eta[0]);
  out.R = std::pow(N, eta[2]);
  out.H = std::pow(N, eta[7]);
  if (!(out.R > 1))
    throw PreconditionError("derive_params: eta2 gives R <= 1");
  hierarchy_check(out);
  return out;
}

// ---------------------------------------------------------------------------
// Majorant and prime weight
// ---------------------------------------------------------------------------

CyclicFn nu(const SieveParams& params, const CutoffChi& chi,
            const PrimeTable& table) {
  if (!(params.R > 1)) throw PreconditionError("nu: R must exceed 1");
  std::uint64_t need =
      static_cast<std::uint64_t>(params.W) * params.N + params.b;
  if (table.limit() < need)
    throw PreconditionError("nu: prime table limit below W*N+b");
  double logR = std::log(params.R);
  double c = static_cast<double>(table.phi(params.W)) /
             static_cast<double>(params.W) * logR;
  CyclicFn out(params.N);
  parallel_chunks(params.N, [&](int, std::int64_t begin, std::int64_t end) {
    for (std::int64_t i = begin; i < end; ++i) {
      std::int64_t x = i + 1;  // x ranges over [N]
      std::uint64_t n = static_cast<std::uint64_t>(params.W) * x + params.b;
      double S = 0;
      table.for_each_squarefree_divisor(
          n, params.R, [&](std::uint64_t m, int mu) {
            S += mu * chi(std::log(static_cast<double>(m)) / logR);
          });
      out.at(x) = c * S * S;
    }
  });
  return out;
}

double nu_model_mean(const SieveParams& params, const CutoffChi& chi,
                     const PrimeTable& table) {
  double logR = std::log(params.R);
  double c = static_cast<double>(table.phi(params.W)) /
             static_cast<double>(params.W) * logR;
  std::vector<std::int64_t> ms;
  std::vector<double> chis;
  std::vector<int> mus;
  for (std::int64_t m = 1; m <= static_cast<std::int64_t>(params.R); ++m) {
    int mu = table.moebius(static_cast<std::uint64_t>(m));
    if (mu == 0 || std::gcd(m, params.W) != 1) continue;
    ms.push_back(m);
    mus.push_back(mu);
    chis.push_back(chi(std::log(static_cast<double>(m)) / logR));
  }
  if (ms.size() > 5000)
    throw BudgetError("nu_model_mean: too many divisor terms (R too large)");
  double total = 0;
  for (size_t i = 0; i < ms.size(); ++i) {
    for (size_t j = 0; j < ms.size(); ++j) {
      std::int64_t l = std::lcm(ms[i], ms[j]);
      total += mus[i] * mus[j] * chis[i] * chis[j] / static_cast<double>(l);
    }
  }
  return c * total;
}

CyclicFn prime_weight_f(const SieveParams& params, const PrimeSet& A,
                        const PrimeTable& table) {
  if (!(params.R > 1))
    throw PreconditionError("prime_weight_f: R must exceed 1");
  std::uint64_t need =
      static_cast<std::uint64_t>(params.W) * params.N + params.b;
  if (table.limit() < need)
    throw PreconditionError("prime_weight_f: prime table limit below W*N+b");
  double c = static_cast<double>(table.phi(params.W)) /
             static_cast<double>(params.W) * std::log(params.R);
  CyclicFn out(params.N);
  std::int64_t half = params.N / 2;
  for (std::int64_t x = 1; x <= half; ++x) {
    std::int64_t n = params.W * x + params.b;
    // Excluding n <= R keeps f <= nu exact: below R the divisor sum in nu
    // loses mass to the chi(log p / log R) term.
    if (static_cast<double>(n) > params.R && A.contains(n, table))
      out.at(x) = c;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Polynomial forms average
// ---------------------------------------------------------------------------

PolyformResult polyform_average(
    const CyclicFn& nu_fn, const SieveParams& params,
    const std::vector<MultiPoly>& Q, const ConvexBody& body,
    std::optional<std::pair<std::int64_t, std::int64_t>> x_window,
    std::int64_t prime_scan_limit) {
  int d = body.dim();
  for (const auto& q : Q) {
    if (q.nvars() != d)
      throw PreconditionError(
          "polyform_average: polynomial arity does not match body dimension");
  }
  std::int64_t N = nu_fn.N;
  int J = static_cast<int>(Q.size());

  // Enumerate h and the shift matrix.
  std::vector<std::vector<std::int64_t>> shifts;  // per h: J shifts
  std::int64_t points = 0;
  std::int64_t smin = 0, smax = 0;
  std::vector<std::int64_t> zero(static_cast<size_t>(d), 0);
  for_each_lattice_point(body, 1, zero,
                         [&](const std::vector<std::int64_t>& h) {
                           ++points;
                           std::vector<std::int64_t> row(static_cast<size_t>(J));
                           for (int j = 0; j < J; ++j) {
                             row[static_cast<size_t>(j)] = eval_at(
                                 Q[static_cast<size_t>(j)], h);
                             smin = std::min(smin, row[static_cast<size_t>(j)]);
                             smax = std::max(smax, row[static_cast<size_t>(j)]);
                           }
                           shifts.push_back(std::move(row));
                         });
  if (points == 0)
    throw PreconditionError("polyform_average: body contains no lattice points");

  PolyformResult out;
  out.lattice_points = points;
  std::int64_t lo = 1, hi = N;
  if (J > 0) {
    lo = 1 - std::min<std::int64_t>(0, smin);
    hi = N - std::max<std::int64_t>(0, smax);
  }
  if (x_window) {
    if (x_window->first > x_window->second || x_window->first < lo ||
        x_window->second > hi)
      throw PreconditionError(
          "polyform_average: window admits wraparound for some shift");
    lo = x_window->first;
    hi = x_window->second;
  }
  if (lo > hi)
    throw PreconditionError(
        "polyform_average: shifts exceed N, no wraparound-free window");
  out.window_lo = lo;
  out.window_hi = hi;
  std::int64_t width = hi - lo + 1;

  if (J == 0) {
    out.average = 1.0;
  } else {
    double total = 0;
    for (const auto& row : shifts) {
      total += parallel_sum(width, [&](std::int64_t i) {
        std::int64_t x = lo + i;
        double prod = 1;
        for (int j = 0; j < J; ++j)
          prod *= nu_fn.at(x + row[static_cast<size_t>(j)]);
        return prod;
      });
    }
    out.average = total / static_cast<double>(points) /
                  static_cast<double>(width);
  }

  // Bad/terrible primes of the shifted family {W Q_j + b}.
  if (J > 0) {
    std::vector<MultiPoly> family;
    family.reserve(Q.size());
    for (const auto& q : Q) {
      family.push_back(q.scaled(Int(params.W)) +
                       MultiPoly::constant(d, Int(params.b)));
    }
    auto rows = classify_primes_in_range(family, params.w, prime_scan_limit,
                                         /*keep_good=*/false);
    for (const auto& row : rows) {
      if (row.result.cls == PrimeClass::Terrible)
        out.terrible_primes.push_back(row.p);
      else
        out.bad_primes.push_back(row.p);
      out.bad_prime_reciprocal_sum += 1.0 / static_cast<double>(row.p);
    }
  }
  out.prediction = 1.0;
  out.prediction_band = exp_fn(out.bad_prime_reciprocal_sum);
  return out;
}

// ---------------------------------------------------------------------------
// Polynomial correlation average
// ---------------------------------------------------------------------------

namespace {

// True when the two coefficient-vector polynomials are proportional
// (cross products of all component pairs vanish identically).
bool vectors_parallel(const std::vector<MultiPoly>& U,
                      const std::vector<MultiPoly>& V) {
  for (size_t i = 0; i < U.size(); ++i) {
    for (size_t j = i + 1; j < U.size(); ++j) {
      if (!(U[i] * V[j] == U[j] * V[i])) return false;
    }
  }
  return true;
}

std::vector<std::vector<std::int64_t>> enumerate_body(
    const std::optional<ConvexBody>& body, int dim, const char* name) {
  if (dim == 0) return {{}};
  if (!body)
    throw PreconditionError(std::string("polycor_average: missing body ") +
                            name);
  if (body->dim() != dim)
    throw PreconditionError(std::string("polycor_average: body ") + name +
                            " has wrong dimension");
  std::vector<std::vector<std::int64_t>> pts;
  std::vector<std::int64_t> zero(static_cast<size_t>(dim), 0);
  for_each_lattice_point(*body, 1, zero,
                         [&](const std::vector<std::int64_t>& p) {
                           pts.push_back(p);
                           if (static_cast<std::int64_t>(pts.size()) >
                               kLatticeBudget)
                             throw BudgetError(
                                 "polycor_average: lattice budget exceeded");
                         });
  if (pts.empty())
    throw PreconditionError(std::string("polycor_average: body ") + name +
                            " contains no lattice points");
  return pts;
}

std::int64_t dot(const std::vector<std::int64_t>& a,
                 const std::vector<std::int64_t>& b) {
  std::int64_t s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

PolycorResult polycor_average(const CyclicFn& nu_fn, const SieveParams& params,
                              const PolycorSpec& spec, std::int64_t budget,
                              std::uint64_t seed) {
  (void)params;
  const int J = spec.J(), K = spec.K(), L = spec.L();
  const int D = spec.D, Dp = spec.Dp, Dpp = spec.Dpp;
  if (static_cast<int>(spec.Q.size()) != J && K > 0)
    throw PreconditionError("polycor_average: Q must have one row per j");
  for (const auto& Pj : spec.P) {
    if (static_cast<int>(Pj.size()) != D)
      throw PreconditionError("polycor_average: P_j must have D components");
    for (const auto& c : Pj)
      if (c.nvars() != Dpp)
        throw PreconditionError("polycor_average: P_j arity must be D''");
  }
  for (const auto& Qj : spec.Q) {
    if (static_cast<int>(Qj.size()) != K)
      throw PreconditionError("polycor_average: Q_j must have K entries");
    for (const auto& Qjk : Qj) {
      if (static_cast<int>(Qjk.size()) != Dp)
        throw PreconditionError(
            "polycor_average: Q_{j,k} must have D' components");
      for (const auto& c : Qjk)
        if (c.nvars() != Dpp)
          throw PreconditionError("polycor_average: Q_{j,k} arity must be D''");
    }
  }
  for (const auto& Sl : spec.S) {
    if (static_cast<int>(Sl.size()) != Dp)
      throw PreconditionError("polycor_average: S_l must have D' components");
    for (const auto& c : Sl)
      if (c.nvars() != Dpp)
        throw PreconditionError("polycor_average: S_l arity must be D''");
  }

  // Non-degeneracy: (P_j, Q_{j,k}) pairwise non-parallel across j for each k.
  if (K > 0) {
    for (int k = 0; k < K; ++k) {
      for (int j = 0; j < J; ++j) {
        for (int jp = j + 1; jp < J; ++jp) {
          std::vector<MultiPoly> U = spec.P[static_cast<size_t>(j)];
          std::vector<MultiPoly> V = spec.P[static_cast<size_t>(jp)];
          for (const auto& c : spec.Q[static_cast<size_t>(j)][static_cast<size_t>(k)])
            U.push_back(c);
          for (const auto& c : spec.Q[static_cast<size_t>(jp)][static_cast<size_t>(k)])
            V.push_back(c);
          if (vectors_parallel(U, V)) {
            std::ostringstream os;
            os << "polycor_average: degenerate spec, (P_j, Q_{j,k}) parallel "
                  "for j="
               << j << ", j'=" << jp << ", k=" << k;
            throw PreconditionError(os.str());
          }
        }
      }
    }
  }
  for (int l = 0; l < L; ++l) {
    for (int lp = l + 1; lp < L; ++lp) {
      if (spec.S[static_cast<size_t>(l)] == spec.S[static_cast<size_t>(lp)]) {
        std::ostringstream os;
        os << "polycor_average: degenerate spec, S_l duplicated for l=" << l
           << ", l'=" << lp;
        throw PreconditionError(os.str());
      }
    }
  }

  auto ms = (K > 0) ? enumerate_body(spec.Omega, D, "Omega")
                    : std::vector<std::vector<std::int64_t>>{{}};
  auto ns = enumerate_body(spec.OmegaP, Dp, "Omega'");
  auto hs = enumerate_body(spec.OmegaPP, Dpp, "Omega''");

  const std::int64_t N = nu_fn.N;

  // Per-h coefficient vectors, then exact shift extrema (m and n parts are
  // independent, so extrema add).
  struct HData {
    std::vector<std::vector<std::int64_t>> P;       // J x D
    std::vector<std::vector<std::vector<std::int64_t>>> Q;  // J x K x Dp
    std::vector<std::vector<std::int64_t>> S;       // L x Dp
  };
  std::vector<HData> hdata(hs.size());
  std::int64_t smin = 0, smax = 0;
  for (size_t hi_ = 0; hi_ < hs.size(); ++hi_) {
    const auto& h = hs[hi_];
    std::vector<Int> hbig(h.begin(), h.end());
    HData& hd = hdata[hi_];
    hd.P.resize(static_cast<size_t>(J));
    hd.Q.resize(static_cast<size_t>(J));
    hd.S.resize(static_cast<size_t>(L));
    for (int j = 0; j < J; ++j) {
      auto& pj = hd.P[static_cast<size_t>(j)];
      pj.resize(static_cast<size_t>(D));
      for (int i = 0; i < D; ++i)
        pj[static_cast<size_t>(i)] = to_int64(
            spec.P[static_cast<size_t>(j)][static_cast<size_t>(i)].eval(hbig),
            "polycor shift");
      auto& qj = hd.Q[static_cast<size_t>(j)];
      qj.resize(static_cast<size_t>(K));
      for (int k = 0; k < K; ++k) {
        auto& qjk = qj[static_cast<size_t>(k)];
        qjk.resize(static_cast<size_t>(Dp));
        for (int i = 0; i < Dp; ++i)
          qjk[static_cast<size_t>(i)] =
              to_int64(spec.Q[static_cast<size_t>(j)][static_cast<size_t>(k)]
                           [static_cast<size_t>(i)]
                               .eval(hbig),
                       "polycor shift");
      }
    }
    for (int l = 0; l < L; ++l) {
      auto& sl = hd.S[static_cast<size_t>(l)];
      sl.resize(static_cast<size_t>(Dp));
      for (int i = 0; i < Dp; ++i)
        sl[static_cast<size_t>(i)] = to_int64(
            spec.S[static_cast<size_t>(l)][static_cast<size_t>(i)].eval(hbig),
            "polycor shift");
    }
    // Extrema of P_j(h).m over m plus Q_{j,k}(h).n over n.
    for (int j = 0; j < J && K > 0; ++j) {
      std::int64_t pmin = std::numeric_limits<std::int64_t>::max();
      std::int64_t pmax = std::numeric_limits<std::int64_t>::min();
      for (const auto& m : ms) {
        std::int64_t v = dot(hd.P[static_cast<size_t>(j)], m);
        pmin = std::min(pmin, v);
        pmax = std::max(pmax, v);
      }
      for (int k = 0; k < K; ++k) {
        std::int64_t qmin = std::numeric_limits<std::int64_t>::max();
        std::int64_t qmax = std::numeric_limits<std::int64_t>::min();
        for (const auto& n : ns) {
          std::int64_t v = dot(hd.Q[static_cast<size_t>(j)][static_cast<size_t>(k)], n);
          qmin = std::min(qmin, v);
          qmax = std::max(qmax, v);
        }
        smin = std::min(smin, pmin + qmin);
        smax = std::max(smax, pmax + qmax);
      }
    }
    for (int l = 0; l < L; ++l) {
      for (const auto& n : ns) {
        std::int64_t v = dot(hd.S[static_cast<size_t>(l)], n);
        smin = std::min(smin, v);
        smax = std::max(smax, v);
      }
    }
  }

  std::int64_t lo = 1 - std::min<std::int64_t>(0, smin);
  std::int64_t hi = N - std::max<std::int64_t>(0, smax);
  if (lo > hi)
    throw PreconditionError(
        "polycor_average: shifts exceed N, no wraparound-free window");
  std::int64_t width = hi - lo + 1;

  PolycorResult out;
  out.seed = seed;
  out.window_lo = lo;
  out.window_hi = hi;

  const std::int64_t per_point =
      std::max<std::int64_t>(1, static_cast<std::int64_t>(K) * J *
                                        static_cast<std::int64_t>(ms.size()) +
                                    L);
  // Value of the integrand at one (h, n, x).
  auto eval_point = [&](size_t hidx, size_t nidx, std::int64_t x) {
    const HData& hd = hdata[hidx];
    const auto& n = ns[nidx];
    double val = 1;
    for (int k = 0; k < K; ++k) {
      double acc = 0;
      for (const auto& m : ms) {
        double prod = 1;
        for (int j = 0; j < J; ++j) {
          std::int64_t shift =
              dot(hd.P[static_cast<size_t>(j)], m) +
              dot(hd.Q[static_cast<size_t>(j)][static_cast<size_t>(k)], n);
          prod *= nu_fn.at(x + shift);
        }
        acc += prod;
      }
      val *= acc / static_cast<double>(ms.size());
    }
    for (int l = 0; l < L; ++l)
      val *= nu_fn.at(x + dot(hd.S[static_cast<size_t>(l)], n));
    return val;
  };

  const std::int64_t outer = static_cast<std::int64_t>(hs.size()) *
                             static_cast<std::int64_t>(ns.size()) * width;
  if (outer <= budget / per_point) {
    // Exact enumeration, parallel over the flattened outer index.
    double total = parallel_sum(outer, [&](std::int64_t t) {
      std::int64_t x = lo + t % width;
      std::int64_t rest = t / width;
      size_t nidx = static_cast<size_t>(rest % static_cast<std::int64_t>(ns.size()));
      size_t hidx = static_cast<size_t>(rest / static_cast<std::int64_t>(ns.size()));
      return eval_point(hidx, nidx, x);
    });
    out.value = total / static_cast<double>(outer);
    out.exact = true;
    out.samples = outer;
    return out;
  }

  // Monte Carlo over (h, n, x) with exact inner m-averages; per-chunk seeded
  // generators keep the result schedule-independent.
  std::int64_t samples = std::max<std::int64_t>(16, budget / per_point);
  std::vector<double> sums(260, 0), sqs(260, 0);
  parallel_chunks(samples, [&](int chunk, std::int64_t begin,
                               std::int64_t end) {
    std::mt19937_64 rng(splitmix64(seed ^ static_cast<std::uint64_t>(chunk)));
    std::uniform_int_distribution<std::int64_t> dx(lo, hi);
    std::uniform_int_distribution<size_t> dh(0, hs.size() - 1);
    std::uniform_int_distribution<size_t> dn(0, ns.size() - 1);
    double s = 0, q = 0;
    for (std::int64_t i = begin; i < end; ++i) {
      double v = eval_point(dh(rng), dn(rng), dx(rng));
      s += v;
      q += v * v;
    }
    sums[static_cast<size_t>(chunk)] = s;
    sqs[static_cast<size_t>(chunk)] = q;
  });
  double s = 0, q = 0;
  for (size_t i = 0; i < sums.size(); ++i) {
    s += sums[i];
    q += sqs[i];
  }
  double mean = s / static_cast<double>(samples);
  double var = std::max(0.0, q / static_cast<double>(samples) - mean * mean);
  out.value = mean;
  out.std_error = std::sqrt(var / static_cast<double>(samples));
  out.exact = false;
  out.samples = samples;
  return out;
}

// ---------------------------------------------------------------------------
// Prime sums
// ---------------------------------------------------------------------------

double mertens_sum(std::int64_t x, const PrimeTable& table) {
  double s = 0;
  for (std::uint32_t p : table.primes()) {
    if (static_cast<std::int64_t>(p) >= x) break;
    s += 1.0 / p;
  }
  return s;
}

double log_power_sum(std::int64_t x, int K, const PrimeTable& table) {
  double s = 0;
  for (std::uint32_t p : table.primes()) {
    if (static_cast<std::int64_t>(p) >= x) break;
    s += std::pow(std::log(static_cast<double>(p)), K) / p;
  }
  return s;
}

double exp_fn(double t) { return std::max(std::exp(t) - 1.0, 0.0); }

ExplogCheck explog_check(const std::vector<std::int64_t>& primes, int K) {
  ExplogCheck out;
  for (std::int64_t p : primes) {
    out.recip_sum += 1.0 / static_cast<double>(p);
    out.log_power_sum +=
        std::pow(std::log(static_cast<double>(p)), K) / static_cast<double>(p);
  }
  out.lhs = exp_fn(K * out.recip_sum);
  out.witness_CK =
      out.log_power_sum > 0 ? out.lhs / out.log_power_sum : 0.0;
  return out;
}

EulerDiagnostic euler_product_diagnostic(double s, std::int64_t X,
                                         const PrimeTable& table) {
  if (!(s > 1)) throw PreconditionError("euler_product_diagnostic: need s > 1");
  EulerDiagnostic out;
  out.s = s;
  double prod = 1;
  for (std::uint32_t p : table.primes()) {
    if (static_cast<std::int64_t>(p) > X) break;
    prod /= 1.0 - std::pow(static_cast<double>(p), -s);
  }
  out.product = prod;
  // Tail-corrected partial zeta sum: sum_{n<=X} n^{-s} + X^{1-s}/(s-1).
  double zsum = parallel_sum(X, [&](std::int64_t i) {
    return std::pow(static_cast<double>(i + 1), -s);
  });
  out.zeta_partial = zsum + std::pow(static_cast<double>(X), 1 - s) / (s - 1);
  return out;
}

double divisor_prime_sum(std::int64_t n, int w, const PrimeTable& table) {
  if (n < 1) throw PreconditionError("divisor_prime_sum: n must be positive");
  double s = 0;
  std::uint64_t rest = static_cast<std::uint64_t>(n);
  if (rest <= table.limit()) {
    for (std::uint32_t p : table.distinct_prime_factors(rest)) {
      if (static_cast<int>(p) >= w) s += 1.0 / p;
    }
    return s;
  }
  for (std::uint32_t p : table.primes()) {
    if (static_cast<std::uint64_t>(p) * p > rest) break;
    if (rest % p == 0) {
      if (static_cast<int>(p) >= w) s += 1.0 / p;
      while (rest % p == 0) rest /= p;
    }
  }
  if (rest > 1 && static_cast<std::int64_t>(rest) >= w)
    s += 1.0 / static_cast<double>(rest);
  return s;
}

}  // namespace polyprog
