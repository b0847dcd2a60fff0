#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polyprog/cyclicfn.hpp"
#include "polyprog/gowers.hpp"

namespace polyprog {

// ---------------------------------------------------------------------------
// Factors (finite partitions of Z_N)
// ---------------------------------------------------------------------------

// A factor assigns every residue of Z_N to an atom.  Atom ids are compact:
// every id in [0, atom_count) names a non-empty atom.
struct Factor {
  std::int64_t N = 0;
  std::vector<std::int32_t> atom_id;  // size N, values in [0, atom_count)
  std::int32_t atom_count = 0;

  // One atom covering everything.
  static Factor trivial(std::int64_t N);
  // Singleton atoms.
  static Factor discrete(std::int64_t N);

  void validate() const;  // partition with every atom non-empty
  std::vector<std::int64_t> atom_sizes() const;
};

// Level-set factor of G with bin width eps: atoms are preimages of
// [(n + alpha) eps, (n + alpha + 1) eps) where the offset alpha in [0,1)
// is drawn from the seed.  G fluctuates by at most eps on each atom and
// the atom count is at most (range width)/eps + 2.
Factor factor_from_function(const CyclicFn& G, double eps, std::uint64_t seed);

// Common refinement: atoms are the non-empty intersections.  Ids are
// assigned in order of first appearance (deterministic).
Factor join(const Factor& a, const Factor& b);

// Conditional expectation E(f|Y)(x) = average of f over the atom of x.
// Idempotent, mean-preserving, and self-adjoint.
CyclicFn cond_exp(const CyclicFn& f, const Factor& Y);

// ---------------------------------------------------------------------------
// Small atoms
// ---------------------------------------------------------------------------

// Atoms whose mass under nu+1 does not exceed the threshold, returned as a
// pointwise mask together with per-atom diagnostics for the complement.
struct SmallAtomReport {
  std::vector<std::uint8_t> mask;   // 1 on the union of small atoms
  std::int64_t mask_points = 0;     // |{mask = 1}|
  double mask_mass = 0;             // int 1_mask (nu+1)
  std::int64_t small_atoms = 0;
  std::vector<double> atom_mass;    // per atom: int 1_A (nu+1)
  std::vector<double> atom_dev;     // per atom: E(nu-1|Y) on the atom
  std::vector<std::uint8_t> atom_small;
  double sup_good_dev = 0;          // max |atom_dev| over non-small atoms
};
SmallAtomReport refine_bad_set(const Factor& Y, const CyclicFn& nu,
                               double threshold);

// ---------------------------------------------------------------------------
// Energy-increment decomposition
// ---------------------------------------------------------------------------

// Structured factor state: the factor Y_K (a join of level-set factors of
// modified dual functions), the functions F_1..F_K that generated it, the
// exceptional set Omega_K (a union of atoms), the noise level sigma, and
// the energy E_g(Y_K) = int (1 - 1_Omega) E(g|Y_K)^2.
struct StructuredState {
  Factor factor;
  int K = 0;
  std::vector<CyclicFn> F_list;
  std::vector<std::uint8_t> omega;
  double sigma = 0;
  double energy = 0;
};

struct DecompositionTraceRow {
  int K = 0;
  double sigma = 0;
  double sigma_mass = 0;  // int 1_Omega (nu+1)
  double sigma_dev = 0;   // sup off Omega of |E(nu-1|Y)|
  double energy = 0;
  double correlation = 0;  // int F . DtF (signed)
  std::int64_t atom_count = 0;
  std::int64_t omega_points = 0;
};

// Dedicated CSV for traces (header + one row per iteration).
std::string trace_csv(const std::vector<DecompositionTraceRow>& rows);

struct DecompositionResult {
  CyclicFn g_structured;
  CyclicFn g_uniform;
  std::vector<std::uint8_t> omega;  // exceptional set of the final state
  StructuredState state;
  std::vector<DecompositionTraceRow> trace;

  int iterations = 0;  // number of factor extensions performed
  int cap = 0;
  double sigma = 0;
  double sigma_mass = 0;
  double sigma_dev = 0;
  double energy = 0;
  double final_correlation = 0;  // int g_uniform . Dt g_uniform (signed)

  double mass_g = 0;           // int g
  double mass_structured = 0;  // int g_structured
  double mass_uniform = 0;     // int g_uniform

  // Points where g_structured + g_uniform differs from g, with their mass
  // under nu+1 (the sum equals (1/(1+sigma))(1-1_Omega) g, so the sandwich
  // 0 <= g_structured + g_uniform <= g holds pointwise while equality can
  // fail on Omega and, when sigma > 0, wherever g > 0).
  std::int64_t exceptional_points = 0;
  double exceptional_mass = 0;

  std::int64_t global_badset_points = 0;  // modified-dual bad set of nu
  double global_badset_mass = 0;
};

// Energy-increment decomposition of g (0 <= g <= nu pointwise) against the
// majorant nu: iterates F_{K+1} = (1/(1+sigma)) (1-1_Omega)(g - E(g|Y_K)),
// stopping when |int F_{K+1} . Dt F_{K+1}| <= eta4 and otherwise extending
// the factor by the level sets of Dt F_{K+1} (bin width eta4^2), enlarging
// Omega by the atoms of mass <= sqrt(eta5) under nu+1, and requiring the
// energy to increase by at least (1/64) eta4^2 per extension.  The noise
// level is kept two-sided: sigma = max(int 1_Omega (nu+1),
// sup off Omega |E(nu-1|Y)|), which makes |F| <= nu+1 and
// 0 <= g_structured <= 1 + sigma unconditional.  Throws on an energy
// increment violation (trace attached) and on the iteration cap
// 4/((1/64) eta4^2) + 1.
DecompositionResult knvn_decompose(const CyclicFn& g, const CyclicFn& nu,
                                   const GowersSpec& spec, double eta4,
                                   double eta5, std::uint64_t seed,
                                   std::int64_t budget = 500000000);

// ---------------------------------------------------------------------------
// Orthogonality diagnostic
// ---------------------------------------------------------------------------

// For K seeded functions |f_k| <= nu+1, computes int (prod_k Dt f_k)(nu-1),
// which should be small when nu is close to pseudorandom.  Report-only.
struct OrthogonalityReport {
  int K = 0;
  double value = 0;
  double tolerance = 0;
  bool within = false;
};
OrthogonalityReport orthogonality_diagnostic(const CyclicFn& nu,
                                             const GowersSpec& spec, int K,
                                             std::uint64_t seed,
                                             double tolerance,
                                             std::int64_t budget = 500000000);

}  // namespace polyprog
