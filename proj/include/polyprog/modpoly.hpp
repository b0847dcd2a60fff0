// Polynomial arithmetic over F_p layered on MultiPoly, plus the
// good/bad/terrible classification of primes for a polynomial family.
//
// A reduced polynomial is an ordinary MultiPoly whose coefficients lie in
// [0, p); all operations here reduce eagerly. gcds are computed by
// recursive content/primitive-part extraction and a primitive
// pseudo-remainder chain in the highest-indexed variable present.
#pragma once

#include "polyprog/multipoly.hpp"

#include <optional>

namespace polyprog {

// Coefficient-wise reduction into [0, p).
MultiPoly reduce_mod_p(const MultiPoly& P, std::int64_t p);

// gcd over F_p[x_0..x_{n-1}], defined up to units; the result is
// normalized to have leading coefficient 1 in graded-lex order.
// Preconditions: p prime, not both inputs zero mod p.
MultiPoly gcd_mod_p(const MultiPoly& P, const MultiPoly& Q, std::int64_t p);

// True iff gcd_mod_p(P, Q, p) is a unit. Precondition: neither input is
// zero mod p.
bool coprime_mod_p(const MultiPoly& P, const MultiPoly& Q, std::int64_t p);

// Pairwise coprimality of all reductions (precondition: none zero mod p).
bool pairwise_coprime_mod_p(const std::vector<MultiPoly>& polys,
                            std::int64_t p);

// Joint coprimality: no single non-unit divides every reduction.
bool jointly_coprime_mod_p(const std::vector<MultiPoly>& polys,
                           std::int64_t p);

enum class PrimeClass {
  Good,      // pairwise coprime and each member benignly linear (see below)
  Bad,       // not good, but no member vanishes identically
  Terrible,  // some member is identically zero mod p
};

struct ClassifyResult {
  PrimeClass cls = PrimeClass::Bad;
  bool pairwise_coprime = false;
  bool jointly_coprime = false;
  // For good primes: linear_var[j] is the smallest variable index i such
  // that P_j mod p = C1*x_i + C0 with deg_i(C1) = deg_i(C0) = -inf,
  // C1 != 0 and gcd(C1, C0) a unit. -1 when no variable qualifies.
  std::vector<int> linear_var;
  std::string note;  // human-readable reason for the verdict
};

// Classification of p for the family {P_j}. "Good" requires the reductions
// to be pairwise coprime and every member to be linear in some variable
// with invertible-content coefficient pair; "Terrible" means some member
// reduces to zero.
ClassifyResult classify_prime(const std::vector<MultiPoly>& polys,
                              std::int64_t p);

// Scans primes in [p_min, p_max] and returns (p, result) pairs for every
// prime that is not good (plus optionally all, when keep_good is set).
struct PrimeScanRow {
  std::int64_t p;
  ClassifyResult result;
};
std::vector<PrimeScanRow> classify_primes_in_range(
    const std::vector<MultiPoly>& polys, std::int64_t p_min,
    std::int64_t p_max, bool keep_good);

}  // namespace polyprog
