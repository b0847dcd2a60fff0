#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "polyprog/common.hpp"
#include "polyprog/cyclicfn.hpp"
#include "polyprog/multipoly.hpp"
#include "polyprog/primetable.hpp"
#include "polyprog/sieve.hpp"

namespace polyprog {

// Pattern x + P_1(m), ..., x + P_k(m) with x in [1, N] and m in [1, M].
struct ProgressionSpec {
  std::vector<MultiPoly> polys;  // univariate in m, distinct, P_i(0) = 0
  std::int64_t N = 0;
  std::int64_t M = 0;
  PrimeSet prime_set = PrimeSet::all_primes();

  int k() const { return static_cast<int>(polys.size()); }
  void validate() const;
};

struct ProgressionWitness {
  std::int64_t x = 0;
  std::int64_t m = 0;
  std::vector<std::int64_t> values;  // x + P_i(m)
};

struct CountResult {
  std::int64_t count = 0;
  std::vector<ProgressionWitness> witnesses;  // first few in (m, x) order
  std::int64_t max_value = 0;   // largest value whose membership was tested
  std::int64_t min_shift = 0;   // extremes of P_i(m) over i, m in [1, M]
  std::int64_t max_shift = 0;
};

// Exact count of pairs (x, m) with every x + P_i(m) in the prime set.
// Requires the table to cover N + max(max_shift, 0); values below 2 are
// never members.
CountResult count_progressions(const ProgressionSpec& spec,
                               const PrimeTable& table,
                               std::int64_t witness_cap = 20);

// E_{m in [M]} E_{x in X'} prod_i g(x + P_i(W m)/W), where W comes from
// params and the truncated window X' = [max(1, S), N - S] with
// S = max |P_i(W m)/W| keeps every shifted point inside [1, N] (no
// wraparound).  The shifts are exact integers (automatic from P_i(0) = 0).
double weighted_polynomial_average(const CyclicFn& g,
                                   const ProgressionSpec& spec,
                                   const SieveParams& params);

// Exact complementary local density of the two-variable family
// {x + P_i(m)} at p: the fraction of (x, m) in F_p^2 with no member
// vanishing.  Linear-in-x fast path: equals
// (1/p^2) sum_m (p - #{distinct -P_i(m) mod p}).
Rat pair_complementary_factor(const std::vector<MultiPoly>& polys,
                              std::int64_t p);

// Product over p <= P0 of cbar_p / (1 - 1/p)^k for the family
// {x + P_i(m)}, together with the heuristic predicted count
// gamma_hat * N * M / log^k N.  When some cbar_p vanishes the product is
// exactly zero and the obstructing prime is reported.
struct SingularSeries {
  double gamma_hat = 0;
  bool obstructed = false;
  std::int64_t obstruction_p = 0;
  std::int64_t P0 = 0;
  double predicted = 0;  // heuristic
  std::vector<std::pair<std::int64_t, Rat>> factors;  // (p, cbar_p)
};

SingularSeries singular_series(const ProgressionSpec& spec, std::int64_t P0,
                               const PrimeTable& table);

}  // namespace polyprog
