// Exact local densities of polynomial families over F_p.
//
// For a family P_1..P_J in D variables, the local factor c_p(S) is the
// fraction of points of F_p^D at which every P_j, j in S, vanishes; the
// complementary factor is the fraction where none vanish. All values are
// exact rationals obtained by full enumeration (budget-guarded).
#pragma once

#include "polyprog/modpoly.hpp"

namespace polyprog {

// Density of common zeros of the whole family. Budget: p^D <= 1e8.
Rat local_factor(const std::vector<MultiPoly>& polys, std::int64_t p);

// Density of points where no member vanishes.
Rat complementary_factor(const std::vector<MultiPoly>& polys, std::int64_t p);

// c_p(S) for every subset S of the family, indexed by bitmask (bit j set
// means P_{j+1} is required to vanish). Entry 0 is 1. Single enumeration.
std::vector<Rat> local_factor_all_subsets(const std::vector<MultiPoly>& polys,
                                          std::int64_t p);

// Exact local factor of a single polynomial that is linear in `var`:
// writing P = C1*x_var + C0, the density of zeros is (|A| + |C|*p) / p^D
// where A = {C1 != 0} and C = {C1 = 0, C0 = 0} inside F_p^{D-1}.
// Precondition: deg_var(P mod p) == 1.
Rat local_factor_linear(const MultiPoly& P, int var, std::int64_t p);

// Crude structural bounds that short-circuit enumeration when applicable:
//  - some member reduces to a non-zero constant       -> c_p = 0
//  - some member is benignly linear                    -> c_p <= 1/p
// Returns the best upper bound known without enumeration (1 when nothing
// applies), used as a cross-check against the exact value.
Rat local_factor_crude_bound(const std::vector<MultiPoly>& polys,
                             std::int64_t p);

// Diagnostic report: for each structural clause below, the smallest
// constant C making it true at this prime, with a witness subset.
//   (a) c_p(empty) = 1                                   [checked exactly]
//   (b) c_p(S) <= C/p for all nonempty S                 [non-terrible p]
//   (c) |c_p({j}) - 1/p| <= C/p^2                        [good p]
//   (d) c_p(S) <= C/p^2 for |S| > 1                      [good p]
//   (e) complementary factor = 0                         [terrible p]
//   (f) |cbar_p - 1| <= C/p                              [non-terrible p]
struct LocalEstimatesReport {
  std::int64_t p = 0;
  ClassifyResult classification;
  bool empty_subset_is_one = false;       // (a)
  Rat C_subset;                           // (b); witness below
  std::uint32_t C_subset_witness = 0;
  Rat C_singleton;                        // (c), good primes only
  std::uint32_t C_singleton_witness = 0;
  Rat C_pairs;                            // (d), good primes only
  std::uint32_t C_pairs_witness = 0;
  bool complement_zero = false;           // (e), terrible primes only
  Rat C_complement;                       // (f)
  Rat complementary;                      // exact cbar_p
  std::vector<Rat> subset_values;         // exact c_p(S), bitmask-indexed
};

LocalEstimatesReport local_estimates_report(
    const std::vector<MultiPoly>& polys, std::int64_t p);

}  // namespace polyprog
