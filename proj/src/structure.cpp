#include "polyprog/structure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <sstream>
#include <unordered_map>
#include <vector>

#include "polyprog/common.hpp"

namespace polyprog {

namespace {

struct KahanSum {
  double s = 0, c = 0;
  void add(double t) {
    double y = t - c;
    double u = s + y;
    c = (u - s) - y;
    s = u;
  }
};

void require_same_N(std::int64_t a, std::int64_t b, const char* where) {
  if (a != b) {
    throw PreconditionError(std::string(where) + ": modulus mismatch (" +
                            std::to_string(a) + " vs " + std::to_string(b) +
                            ")");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Factor
// ---------------------------------------------------------------------------

Factor Factor::trivial(std::int64_t N) {
  if (N <= 0) throw PreconditionError("Factor: modulus must be positive");
  Factor f;
  f.N = N;
  f.atom_id.assign(static_cast<size_t>(N), 0);
  f.atom_count = 1;
  return f;
}

Factor Factor::discrete(std::int64_t N) {
  if (N <= 0) throw PreconditionError("Factor: modulus must be positive");
  if (N > std::numeric_limits<std::int32_t>::max())
    throw PreconditionError("Factor: modulus too large for discrete factor");
  Factor f;
  f.N = N;
  f.atom_id.resize(static_cast<size_t>(N));
  for (std::int64_t x = 0; x < N; ++x)
    f.atom_id[static_cast<size_t>(x)] = static_cast<std::int32_t>(x);
  f.atom_count = static_cast<std::int32_t>(N);
  return f;
}

void Factor::validate() const {
  if (N <= 0) throw PreconditionError("Factor: modulus must be positive");
  if (atom_id.size() != static_cast<size_t>(N))
    throw PreconditionError("Factor: atom_id size differs from modulus");
  if (atom_count <= 0)
    throw PreconditionError("Factor: atom count must be positive");
  std::vector<std::int64_t> sizes(static_cast<size_t>(atom_count), 0);
  for (std::int32_t id : atom_id) {
    if (id < 0 || id >= atom_count)
      throw PreconditionError("Factor: atom id out of range");
    ++sizes[static_cast<size_t>(id)];
  }
  for (std::int64_t s : sizes) {
    if (s == 0) throw PreconditionError("Factor: empty atom after compaction");
  }
}

std::vector<std::int64_t> Factor::atom_sizes() const {
  std::vector<std::int64_t> sizes(static_cast<size_t>(atom_count), 0);
  for (std::int32_t id : atom_id) ++sizes[static_cast<size_t>(id)];
  return sizes;
}

Factor factor_from_function(const CyclicFn& G, double eps,
                            std::uint64_t seed) {
  if (eps <= 0) throw PreconditionError("factor_from_function: eps <= 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double alpha = unit(rng);

  const std::int64_t N = G.N;
  std::vector<std::int64_t> bin(static_cast<size_t>(N));
  for (std::int64_t x = 0; x < N; ++x) {
    double v = G.v[static_cast<size_t>(x)];
    if (!std::isfinite(v))
      throw PreconditionError("factor_from_function: non-finite value");
    bin[static_cast<size_t>(x)] =
        static_cast<std::int64_t>(std::floor(v / eps - alpha));
  }
  std::vector<std::int64_t> levels = bin;
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  Factor f;
  f.N = N;
  f.atom_count = static_cast<std::int32_t>(levels.size());
  f.atom_id.resize(static_cast<size_t>(N));
  for (std::int64_t x = 0; x < N; ++x) {
    auto it = std::lower_bound(levels.begin(), levels.end(),
                               bin[static_cast<size_t>(x)]);
    f.atom_id[static_cast<size_t>(x)] =
        static_cast<std::int32_t>(it - levels.begin());
  }
  return f;
}

Factor join(const Factor& a, const Factor& b) {
  require_same_N(a.N, b.N, "join");
  Factor f;
  f.N = a.N;
  f.atom_id.resize(static_cast<size_t>(a.N));
  std::unordered_map<std::int64_t, std::int32_t> ids;
  ids.reserve(static_cast<size_t>(std::min<std::int64_t>(a.N, 4096)));
  std::int32_t next = 0;
  for (std::int64_t x = 0; x < a.N; ++x) {
    std::int64_t key =
        static_cast<std::int64_t>(a.atom_id[static_cast<size_t>(x)]) *
            static_cast<std::int64_t>(b.atom_count) +
        b.atom_id[static_cast<size_t>(x)];
    auto [it, inserted] = ids.try_emplace(key, next);
    if (inserted) ++next;
    f.atom_id[static_cast<size_t>(x)] = it->second;
  }
  f.atom_count = next;
  return f;
}

CyclicFn cond_exp(const CyclicFn& f, const Factor& Y) {
  require_same_N(f.N, Y.N, "cond_exp");
  std::vector<KahanSum> sums(static_cast<size_t>(Y.atom_count));
  std::vector<std::int64_t> sizes(static_cast<size_t>(Y.atom_count), 0);
  for (std::int64_t x = 0; x < f.N; ++x) {
    size_t a = static_cast<size_t>(Y.atom_id[static_cast<size_t>(x)]);
    sums[a].add(f.v[static_cast<size_t>(x)]);
    ++sizes[a];
  }
  std::vector<double> avg(static_cast<size_t>(Y.atom_count), 0.0);
  for (size_t a = 0; a < avg.size(); ++a) {
    if (sizes[a] == 0) throw PreconditionError("cond_exp: empty atom");
    avg[a] = sums[a].s / static_cast<double>(sizes[a]);
  }
  CyclicFn out(f.N);
  for (std::int64_t x = 0; x < f.N; ++x)
    out.v[static_cast<size_t>(x)] =
        avg[static_cast<size_t>(Y.atom_id[static_cast<size_t>(x)])];
  return out;
}

// ---------------------------------------------------------------------------
// Small atoms
// ---------------------------------------------------------------------------

SmallAtomReport refine_bad_set(const Factor& Y, const CyclicFn& nu,
                               double threshold) {
  require_same_N(Y.N, nu.N, "refine_bad_set");
  const std::int64_t N = Y.N;
  const size_t k = static_cast<size_t>(Y.atom_count);
  std::vector<KahanSum> mass(k);   // sum of nu+1 over the atom
  std::vector<KahanSum> dev(k);    // sum of nu-1 over the atom
  std::vector<std::int64_t> sizes(k, 0);
  for (std::int64_t x = 0; x < N; ++x) {
    size_t a = static_cast<size_t>(Y.atom_id[static_cast<size_t>(x)]);
    double nv = nu.v[static_cast<size_t>(x)];
    mass[a].add(nv + 1.0);
    dev[a].add(nv - 1.0);
    ++sizes[a];
  }

  SmallAtomReport rep;
  rep.atom_mass.resize(k);
  rep.atom_dev.resize(k);
  rep.atom_small.assign(k, 0);
  KahanSum mask_mass;
  for (size_t a = 0; a < k; ++a) {
    rep.atom_mass[a] = mass[a].s / static_cast<double>(N);
    rep.atom_dev[a] = dev[a].s / static_cast<double>(sizes[a]);
    if (rep.atom_mass[a] <= threshold) {
      rep.atom_small[a] = 1;
      ++rep.small_atoms;
      mask_mass.add(rep.atom_mass[a]);
    } else {
      rep.sup_good_dev = std::max(rep.sup_good_dev, std::abs(rep.atom_dev[a]));
    }
  }
  rep.mask_mass = mask_mass.s;
  rep.mask.assign(static_cast<size_t>(N), 0);
  for (std::int64_t x = 0; x < N; ++x) {
    size_t a = static_cast<size_t>(Y.atom_id[static_cast<size_t>(x)]);
    if (rep.atom_small[a]) {
      rep.mask[static_cast<size_t>(x)] = 1;
      ++rep.mask_points;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Decomposition
// ---------------------------------------------------------------------------

std::string trace_csv(const std::vector<DecompositionTraceRow>& rows) {
  std::ostringstream out;
  out << "K,sigma,sigma_mass,sigma_dev,energy,correlation,atom_count,"
         "omega_points\n";
  for (const auto& r : rows) {
    out << r.K << ',' << format_sig(r.sigma) << ',' << format_sig(r.sigma_mass)
        << ',' << format_sig(r.sigma_dev) << ',' << format_sig(r.energy) << ','
        << format_sig(r.correlation) << ',' << r.atom_count << ','
        << r.omega_points << '\n';
  }
  return out.str();
}

DecompositionResult knvn_decompose(const CyclicFn& g, const CyclicFn& nu,
                                   const GowersSpec& spec, double eta4,
                                   double eta5, std::uint64_t seed,
                                   std::int64_t budget) {
  require_same_N(g.N, nu.N, "knvn_decompose");
  spec.validate();
  if (!(eta4 > 0)) throw PreconditionError("knvn_decompose: eta4 must be > 0");
  if (!(eta5 > 0)) throw PreconditionError("knvn_decompose: eta5 must be > 0");
  const std::int64_t N = g.N;
  for (std::int64_t x = 0; x < N; ++x) {
    double gv = g.v[static_cast<size_t>(x)];
    double nv = nu.v[static_cast<size_t>(x)];
    if (!(gv >= -1e-12) || !(gv <= nv + 1e-12))
      throw PreconditionError(
          "knvn_decompose: needs 0 <= g <= nu pointwise (violated at residue " +
          std::to_string(x) + ")");
  }

  const double c_inc = 1.0 / 64.0;
  const int cap = static_cast<int>(4.0 / (c_inc * eta4 * eta4)) + 1;
  const double small_threshold = std::sqrt(eta5);

  BadSet badset = global_bad_set(nu, spec, budget);

  DecompositionResult res;
  res.cap = cap;
  res.global_badset_points = badset.points;
  res.global_badset_mass = badset.mass_nu_plus1;
  res.mass_g = g.mean();

  StructuredState st;
  st.factor = Factor::trivial(N);
  st.omega.assign(static_cast<size_t>(N), 0);

  std::int64_t omega_points = 0;
  double sigma_mass = 0, sigma_dev = 0;
  CyclicFn cexp_g(N);

  // Measures the state quantities for the current factor: enlarges omega by
  // the new small atoms, then recomputes sigma (two-sided) and the energy.
  auto measure_state = [&]() {
    SmallAtomReport rep = refine_bad_set(st.factor, nu, small_threshold);
    for (std::int64_t x = 0; x < N; ++x) {
      if (rep.mask[static_cast<size_t>(x)])
        st.omega[static_cast<size_t>(x)] = 1;
    }
    omega_points = 0;
    KahanSum om_mass;
    for (std::int64_t x = 0; x < N; ++x) {
      if (st.omega[static_cast<size_t>(x)]) {
        ++omega_points;
        om_mass.add(nu.v[static_cast<size_t>(x)] + 1.0);
      }
    }
    sigma_mass = om_mass.s / static_cast<double>(N);

    CyclicFn cexp_nu = cond_exp(nu, st.factor);
    sigma_dev = 0;
    for (std::int64_t x = 0; x < N; ++x) {
      if (!st.omega[static_cast<size_t>(x)])
        sigma_dev = std::max(
            sigma_dev, std::abs(cexp_nu.v[static_cast<size_t>(x)] - 1.0));
    }
    st.sigma = std::max(sigma_mass, sigma_dev);

    cexp_g = cond_exp(g, st.factor);
    KahanSum en;
    for (std::int64_t x = 0; x < N; ++x) {
      if (!st.omega[static_cast<size_t>(x)]) {
        double v = cexp_g.v[static_cast<size_t>(x)];
        en.add(v * v);
      }
    }
    st.energy = en.s / static_cast<double>(N);
    double bound = (1.0 + st.sigma) * (1.0 + st.sigma);
    if (st.energy > bound + 1e-9)
      throw InvariantError(
          "knvn_decompose: energy " + format_sig(st.energy) +
              " exceeds (1+sigma)^2 = " + format_sig(bound),
          trace_csv(res.trace));
  };

  measure_state();

  CyclicFn F(N);
  CyclicFn DtF(N);
  double corr = 0;
  while (true) {
    for (std::int64_t x = 0; x < N; ++x) {
      size_t i = static_cast<size_t>(x);
      F.v[i] = st.omega[i] ? 0.0
                           : (g.v[i] - cexp_g.v[i]) / (1.0 + st.sigma);
      if (std::abs(F.v[i]) > nu.v[i] + 1.0 + 1e-9)
        throw InvariantError(
            "knvn_decompose: |F| exceeds nu+1 at residue " + std::to_string(x),
            trace_csv(res.trace));
    }
    CyclicFn DF = dual_function(F, spec, budget);
    DtF = apply_bad_set(DF, badset);
    for (std::int64_t x = 0; x < N; ++x) {
      if (std::abs(DtF.v[static_cast<size_t>(x)]) > badset.threshold + 1e-9)
        throw InvariantError(
            "knvn_decompose: modified dual exceeds its range bound",
            trace_csv(res.trace));
    }
    KahanSum cs;
    for (std::int64_t x = 0; x < N; ++x)
      cs.add(F.v[static_cast<size_t>(x)] * DtF.v[static_cast<size_t>(x)]);
    corr = cs.s / static_cast<double>(N);

    DecompositionTraceRow row;
    row.K = st.K;
    row.sigma = st.sigma;
    row.sigma_mass = sigma_mass;
    row.sigma_dev = sigma_dev;
    row.energy = st.energy;
    row.correlation = corr;
    row.atom_count = st.factor.atom_count;
    row.omega_points = omega_points;
    res.trace.push_back(row);

    if (std::abs(corr) <= eta4) break;

    if (st.K >= cap)
      throw BudgetError(
          "knvn_decompose: iteration cap " + std::to_string(cap) +
          " reached without the correlation dropping below eta4\n" +
          trace_csv(res.trace));

    std::uint64_t step_seed =
        seed ^ (0x9E3779B97F4A7C15ULL *
                static_cast<std::uint64_t>(st.K + 1));
    Factor level = factor_from_function(DtF, eta4 * eta4, step_seed);
    double old_energy = st.energy;
    st.factor = join(st.factor, level);
    st.F_list.push_back(F);
    st.K += 1;
    measure_state();
    if (st.energy < old_energy + c_inc * eta4 * eta4 - 1e-12)
      throw InvariantError(
          "knvn_decompose: energy increment violated at step " +
              std::to_string(st.K) + " (" + format_sig(old_energy) + " -> " +
              format_sig(st.energy) + ", required +" +
              format_sig(c_inc * eta4 * eta4) +
              "); nu is too far from pseudorandom at these parameters",
          trace_csv(res.trace));
  }

  res.g_uniform = F;
  res.g_structured = CyclicFn(N);
  for (std::int64_t x = 0; x < N; ++x) {
    size_t i = static_cast<size_t>(x);
    res.g_structured.v[i] =
        st.omega[i] ? 0.0 : cexp_g.v[i] / (1.0 + st.sigma);
  }

  // Output sandwich checks: 0 <= g_structured <= 1+sigma and
  // 0 <= g_structured + g_uniform <= g, all pointwise.
  for (std::int64_t x = 0; x < N; ++x) {
    size_t i = static_cast<size_t>(x);
    double gs = res.g_structured.v[i];
    double sum = gs + res.g_uniform.v[i];
    if (gs < -1e-12 || gs > 1.0 + st.sigma + 1e-9)
      throw InvariantError(
          "knvn_decompose: structured component out of [0, 1+sigma]",
          trace_csv(res.trace));
    if (sum < -1e-9 || sum > g.v[i] + 1e-9)
      throw InvariantError(
          "knvn_decompose: structured + uniform escapes [0, g]",
          trace_csv(res.trace));
  }

  KahanSum exc_mass;
  for (std::int64_t x = 0; x < N; ++x) {
    size_t i = static_cast<size_t>(x);
    if (res.g_structured.v[i] + res.g_uniform.v[i] != g.v[i]) {
      ++res.exceptional_points;
      exc_mass.add(nu.v[i] + 1.0);
    }
  }
  res.exceptional_mass = exc_mass.s / static_cast<double>(N);

  res.omega = st.omega;
  res.iterations = st.K;
  res.sigma = st.sigma;
  res.sigma_mass = sigma_mass;
  res.sigma_dev = sigma_dev;
  res.energy = st.energy;
  res.final_correlation = corr;
  res.mass_structured = res.g_structured.mean();
  res.mass_uniform = res.g_uniform.mean();
  res.state = std::move(st);
  return res;
}

// ---------------------------------------------------------------------------
// Orthogonality diagnostic
// ---------------------------------------------------------------------------

OrthogonalityReport orthogonality_diagnostic(const CyclicFn& nu,
                                             const GowersSpec& spec, int K,
                                             std::uint64_t seed,
                                             double tolerance,
                                             std::int64_t budget) {
  if (K < 1)
    throw PreconditionError("orthogonality_diagnostic: K must be >= 1");
  spec.validate();
  const std::int64_t N = nu.N;
  BadSet badset = global_bad_set(nu, spec, budget);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  std::vector<double> prod(static_cast<size_t>(N), 1.0);
  for (int k = 0; k < K; ++k) {
    CyclicFn f(N);
    for (std::int64_t x = 0; x < N; ++x)
      f.v[static_cast<size_t>(x)] =
          coeff(rng) * (nu.v[static_cast<size_t>(x)] + 1.0);
    CyclicFn Dtf = apply_bad_set(dual_function(f, spec, budget), badset);
    for (std::int64_t x = 0; x < N; ++x)
      prod[static_cast<size_t>(x)] *= Dtf.v[static_cast<size_t>(x)];
  }
  KahanSum sum;
  for (std::int64_t x = 0; x < N; ++x)
    sum.add(prod[static_cast<size_t>(x)] *
            (nu.v[static_cast<size_t>(x)] - 1.0));

  OrthogonalityReport rep;
  rep.K = K;
  rep.value = sum.s / static_cast<double>(N);
  rep.tolerance = tolerance;
  rep.within = std::abs(rep.value) <= tolerance;
  return rep;
}

}  // namespace polyprog
