#include "polyprog/progressions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace polyprog {

namespace {

std::int64_t to_i64(const Int& v, const char* what) {
  if (v < std::numeric_limits<std::int64_t>::min() ||
      v > std::numeric_limits<std::int64_t>::max())
    throw PreconditionError(std::string(what) + " overflows 64 bits");
  return static_cast<std::int64_t>(v);
}

// P_i(m) for m in [1, M], exact.
std::vector<std::vector<std::int64_t>> shift_table(
    const std::vector<MultiPoly>& polys, std::int64_t M) {
  std::vector<std::vector<std::int64_t>> s(polys.size());
  for (size_t i = 0; i < polys.size(); ++i) {
    s[i].resize(static_cast<size_t>(M));
    for (std::int64_t m = 1; m <= M; ++m)
      s[i][static_cast<size_t>(m - 1)] =
          to_i64(polys[i].eval({Int(m)}), "shift P_i(m)");
  }
  return s;
}

struct KahanSum {
  double s = 0, c = 0;
  void add(double t) {
    double y = t - c;
    double u = s + y;
    c = (u - s) - y;
    s = u;
  }
};

}  // namespace

void ProgressionSpec::validate() const {
  if (polys.empty())
    throw PreconditionError("ProgressionSpec: needs at least one polynomial");
  if (N < 1 || M < 1)
    throw PreconditionError("ProgressionSpec: ranges must satisfy N, M >= 1");
  for (const auto& P : polys) {
    if (P.nvars() != 1)
      throw PreconditionError(
          "ProgressionSpec: polynomials must be univariate in m");
    if (P.eval({Int(0)}) != 0)
      throw PreconditionError("ProgressionSpec: P_i(0) must vanish");
  }
  for (size_t i = 0; i < polys.size(); ++i)
    for (size_t j = i + 1; j < polys.size(); ++j)
      if (polys[i] == polys[j])
        throw PreconditionError(
            "ProgressionSpec: polynomials must be pairwise distinct");
}

CountResult count_progressions(const ProgressionSpec& spec,
                               const PrimeTable& table,
                               std::int64_t witness_cap) {
  spec.validate();
  const int k = spec.k();
  const std::int64_t N = spec.N, M = spec.M;
  auto shifts = shift_table(spec.polys, M);

  CountResult res;
  res.min_shift = std::numeric_limits<std::int64_t>::max();
  res.max_shift = std::numeric_limits<std::int64_t>::min();
  for (const auto& row : shifts)
    for (std::int64_t s : row) {
      res.min_shift = std::min(res.min_shift, s);
      res.max_shift = std::max(res.max_shift, s);
    }
  res.max_value = N + std::max<std::int64_t>(res.max_shift, 0);
  if (static_cast<std::uint64_t>(res.max_value) > table.limit())
    throw PreconditionError(
        "count_progressions: prime table covers " +
        std::to_string(table.limit()) + " but values reach " +
        std::to_string(res.max_value));

  auto member = [&](std::int64_t v) {
    return v >= 2 && spec.prime_set.contains(v, table);
  };

  constexpr int kMaxChunks = 256;
  std::vector<std::int64_t> counts(kMaxChunks, 0);
  std::vector<std::vector<ProgressionWitness>> local(kMaxChunks);
  parallel_chunks(M, [&](int chunk, std::int64_t mb, std::int64_t me) {
    std::vector<std::int64_t> vals(static_cast<size_t>(k));
    for (std::int64_t mi = mb; mi < me; ++mi) {
      const std::int64_t m = mi + 1;
      for (std::int64_t x = 1; x <= N; ++x) {
        bool all = true;
        for (int i = 0; i < k && all; ++i) {
          vals[static_cast<size_t>(i)] =
              x + shifts[static_cast<size_t>(i)][static_cast<size_t>(m - 1)];
          all = member(vals[static_cast<size_t>(i)]);
        }
        if (all) {
          ++counts[static_cast<size_t>(chunk)];
          auto& w = local[static_cast<size_t>(chunk)];
          if (static_cast<std::int64_t>(w.size()) < witness_cap)
            w.push_back({x, m, vals});
        }
      }
    }
  });
  for (int c = 0; c < kMaxChunks; ++c) {
    res.count += counts[static_cast<size_t>(c)];
    for (auto& w : local[static_cast<size_t>(c)]) {
      if (static_cast<std::int64_t>(res.witnesses.size()) < witness_cap)
        res.witnesses.push_back(std::move(w));
    }
  }
  return res;
}

double weighted_polynomial_average(const CyclicFn& g,
                                   const ProgressionSpec& spec,
                                   const SieveParams& params) {
  spec.validate();
  if (spec.N != g.N)
    throw PreconditionError(
        "weighted_polynomial_average: spec range differs from the modulus of "
        "g");
  if (params.W < 1)
    throw PreconditionError("weighted_polynomial_average: W must be >= 1");
  const int k = spec.k();
  const std::int64_t N = g.N, M = spec.M, W = params.W;

  // s_i(m) = P_i(W m) / W, exact (every monomial of P_i has m-degree >= 1).
  std::vector<std::vector<std::int64_t>> s(static_cast<size_t>(k));
  std::int64_t max_abs = 0;
  for (int i = 0; i < k; ++i) {
    s[static_cast<size_t>(i)].resize(static_cast<size_t>(M));
    for (std::int64_t m = 1; m <= M; ++m) {
      Int val = spec.polys[static_cast<size_t>(i)].eval({Int(W) * m});
      if (val % W != 0)
        throw PreconditionError(
            "weighted_polynomial_average: P_i(W m) is not divisible by W");
      std::int64_t sv = to_i64(val / W, "shift P_i(W m)/W");
      s[static_cast<size_t>(i)][static_cast<size_t>(m - 1)] = sv;
      max_abs = std::max(max_abs, std::abs(sv));
    }
  }

  // Truncated window of residues [S, N-1-S]: every shifted index stays in
  // [0, N-1] without crossing the modulus boundary.
  const std::int64_t lo = max_abs;
  const std::int64_t hi = N - 1 - max_abs;
  if (lo > hi)
    throw PreconditionError(
        "weighted_polynomial_average: shifts wrap around Z_N (window "
        "[" +
        std::to_string(lo) + "," + std::to_string(hi) + "] is empty)");

  KahanSum outer;
  for (std::int64_t m = 1; m <= M; ++m) {
    KahanSum inner;
    for (std::int64_t x = lo; x <= hi; ++x) {
      double prod = 1;
      for (int i = 0; i < k; ++i)
        prod *= g.v[static_cast<size_t>(
            x + s[static_cast<size_t>(i)][static_cast<size_t>(m - 1)])];
      inner.add(prod);
    }
    outer.add(inner.s / static_cast<double>(hi - lo + 1));
  }
  return outer.s / static_cast<double>(M);
}

Rat pair_complementary_factor(const std::vector<MultiPoly>& polys,
                              std::int64_t p) {
  if (p < 2) throw PreconditionError("pair_complementary_factor: p < 2");
  if (polys.empty())
    throw PreconditionError("pair_complementary_factor: empty family");
  for (const auto& P : polys)
    if (P.nvars() != 1)
      throw PreconditionError(
          "pair_complementary_factor: polynomials must be univariate in m");

  Int allowed = 0;  // sum over m of (p - #distinct P_i(m) mod p)
  std::vector<std::int64_t> vals(polys.size());
  for (std::int64_t m = 0; m < p; ++m) {
    for (size_t i = 0; i < polys.size(); ++i)
      vals[i] = polys[i].eval_mod({m}, p);
    std::sort(vals.begin(), vals.end());
    std::int64_t distinct = static_cast<std::int64_t>(
        std::unique(vals.begin(), vals.end()) - vals.begin());
    allowed += p - distinct;
  }
  return Rat(allowed, Int(p) * p);
}

SingularSeries singular_series(const ProgressionSpec& spec, std::int64_t P0,
                               const PrimeTable& table) {
  spec.validate();
  if (P0 < 2)
    throw PreconditionError("singular_series: prime cutoff must be >= 2");
  if (static_cast<std::uint64_t>(P0) > table.limit())
    throw PreconditionError("singular_series: prime table smaller than P0");

  SingularSeries out;
  out.P0 = P0;
  out.gamma_hat = 1.0;
  const int k = spec.k();
  for (std::uint32_t p : table.primes()) {
    if (static_cast<std::int64_t>(p) > P0) break;
    Rat cbar = pair_complementary_factor(spec.polys, p);
    out.factors.emplace_back(p, cbar);
    if (cbar == 0) {
      out.obstructed = true;
      out.obstruction_p = p;
      out.gamma_hat = 0.0;
      break;
    }
    // cbar_p / (1 - 1/p)^k = cbar_p * (p/(p-1))^k
    Rat factor = cbar;
    for (int i = 0; i < k; ++i) factor *= Rat(p, p - 1);
    out.gamma_hat *= factor.convert_to<double>();
  }
  const double logN = std::log(static_cast<double>(spec.N));
  out.predicted = out.gamma_hat * static_cast<double>(spec.N) *
                  static_cast<double>(spec.M) / std::pow(logN, k);
  return out;
}

}  // namespace polyprog
