#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "polyprog/common.hpp"
#include "polyprog/cyclicfn.hpp"
#include "polyprog/multipoly.hpp"

namespace polyprog {

// ---------------------------------------------------------------------------
// Gowers box norms of general tensors
// ---------------------------------------------------------------------------

// Dense real tensor indexed by {0..dims[0]-1} x ... x {0..dims[A-1]-1},
// row-major.  Rank 0 is a single scalar.
struct Tensor {
  std::vector<std::int64_t> dims;
  std::vector<double> v;

  static Tensor zeros(std::vector<std::int64_t> dims);
  std::int64_t size() const;
  double at(const std::vector<std::int64_t>& idx) const;
  double& at(const std::vector<std::int64_t>& idx);
};

// 2^{|A|}-power of the box norm: the alternating-corner average over
// m^{(0)}, m^{(1)} ranging over the index box.
double box_norm_pow(const Tensor& F);

// Box norm itself.  Rank 0: the scalar; rank 1: |E F|; rank >= 2: the
// 2^{|A|}-root, asserting non-negativity of the pre-root value (values in
// [-1e-12, 0) are clamped; anything lower throws).
double box_norm(const Tensor& F);

// Left side of the Cauchy-Schwarz-Gowers inequality: the corner average
// with one tensor per corner (2^{|A|} tensors, indexed by the bits of
// omega, bit i = axis i).  All tensors share the dims of fs[0].
double gcz_average(const std::vector<Tensor>& fs);

// Both sides of the weighted generalized von Neumann inequality:
//   |E_m f(m) prod_a f_a(m restricted away from axis a)|
//     <= ||f||_{box(nu)} prod_a ||nu_a||^{1/2}
// with |f_a| <= nu_a required pointwise.  f_alpha[a] and nu_alpha[a] are
// tensors over the axes of f with axis a removed.
struct WeightedBoxReport {
  double lhs = 0;
  double weighted_norm = 0;
  double weighted_norm_pow = 0;
  double rhs = 0;
  std::vector<double> nu_norms;
  bool holds = false;  // lhs <= rhs + 1e-12
};
WeightedBoxReport weighted_box_check(const Tensor& f,
                                     const std::vector<Tensor>& f_alpha,
                                     const std::vector<Tensor>& nu_alpha);

// ---------------------------------------------------------------------------
// Local and averaged local Gowers norms on Z_N
// ---------------------------------------------------------------------------

// Specification of an averaged local Gowers norm: the d step polynomials
// Q_1..Q_d live in Z[h_1..h_t, W] (variable order: h's first, W last), the
// fine parameter h ranges over [H]^t, the coarse shifts over [sqrtM], and
// W is substituted by Wval.
struct GowersSpec {
  int d = 0;
  int t = 0;
  std::vector<MultiPoly> Q;
  std::int64_t H = 1;
  std::int64_t sqrtM = 1;
  std::int64_t Wval = 1;

  void validate() const;
  // Q_i(h, Wval) for h in [H]^t.
  std::vector<std::int64_t> steps(const std::vector<std::int64_t>& h) const;
  std::int64_t h_count() const;  // H^t
};

// Concatenation: steps of all parts side by side, fine variables renamed
// apart; all parts must share H, sqrtM, Wval.
GowersSpec concat_specs(const std::vector<GowersSpec>& parts);

// 2^d power of the local Gowers norm with fixed integer steps a_1..a_d:
// E_{m0,m1 in [range]^d} E_x prod_omega f(x + sum_i m_i^{(omega_i)} a_i).
double local_gowers_pow(const CyclicFn& f, const std::vector<std::int64_t>& a,
                        std::int64_t range);
double local_gowers(const CyclicFn& f, const std::vector<std::int64_t>& a,
                    std::int64_t range);

struct AvgGowersResult {
  double norm = 0;
  double norm_pow = 0;   // 2^d power (pre-root, after clamping)
  double std_error = 0;  // standard error of norm_pow in sampled mode
  bool exact = true;
  std::int64_t samples = 0;  // h-tuples (exact) or (h,m0,m1) draws (sampled)
  std::uint64_t seed = 0;
};

// Averaged local Gowers norm (E_{h in [H]^t} ||f||_{h}^{2^d})^{1/2^d}.
// Exact when the full enumeration fits the budget; otherwise seeded
// Monte Carlo over (h, m0, m1) with the x-average kept exact.
AvgGowersResult avg_local_gowers(const CyclicFn& f, const GowersSpec& spec,
                                 std::int64_t budget = 500000000,
                                 std::uint64_t seed = 0);
// Exact-only variant: throws BudgetError when enumeration exceeds budget.
AvgGowersResult avg_local_gowers_exact(const CyclicFn& f,
                                       const GowersSpec& spec,
                                       std::int64_t budget = 500000000);

// ---------------------------------------------------------------------------
// Dual functions
// ---------------------------------------------------------------------------

// Df(x) = E_{h, m0, m1} prod_{omega != 0} T^{sum_i (m_i^{(omega_i)} -
// m_i^{(0)}) Q_i(h, W)} f(x), with T^n f(x) = f(x - n).  Satisfies
// int f . Df = (avg local Gowers norm)^{2^d} exactly.
CyclicFn dual_function(const CyclicFn& f, const GowersSpec& spec,
                       std::int64_t budget = 500000000);

// Global bad set.  The mask uses the threshold D(nu+1) >= 2^{2^d}, which
// makes the pointwise bound |(1-1_Omega) Df| <= 2^{2^d} hold for every
// |f| <= nu+1 by dual monotonicity; the count for the plain D(nu)
// threshold is kept as a diagnostic.
struct BadSet {
  std::int64_t N = 0;
  std::vector<std::uint8_t> mask;
  double threshold = 0;  // 2^{2^d}
  std::int64_t points = 0;
  double mass_nu_plus1 = 0;   // int 1_Omega (nu+1)
  std::int64_t points_dnu = 0;  // |{D(nu) >= threshold}|
};
BadSet global_bad_set(const CyclicFn& nu, const GowersSpec& spec,
                      std::int64_t budget = 500000000);

// (1 - 1_Omega) . Df.
CyclicFn apply_bad_set(const CyclicFn& Df, const BadSet& omega);

// Modified dual of f: returns ((1-1_Omega) D f, Omega).  When |f| <= nu+1
// pointwise, asserts the resulting range bound |.| <= 2^{2^d}.
std::pair<CyclicFn, BadSet> modified_dual(const CyclicFn& f,
                                          const CyclicFn& nu,
                                          const GowersSpec& spec,
                                          std::int64_t budget = 500000000);

// Moment diagnostic int |Df|^K (nu+1).
double dual_moment(const CyclicFn& Df, const CyclicFn& nu, int K);

// ---------------------------------------------------------------------------
// van der Corput check
// ---------------------------------------------------------------------------

// Measures |E_{m in [M]} x_m|^2 against E_{h,h' in [H]} E_{m in [M]}
// x_{m+h} x_{m+h'}; epsilon = lhs - rhs is the boundary term (reported,
// not asserted).  x[i] holds the sequence value at m = i+1; the vector
// must cover m up to M + H.
struct VdcReport {
  double lhs = 0;
  double rhs = 0;
  double epsilon = 0;
};
VdcReport vdc_check(const std::vector<double>& x, std::int64_t M,
                    std::int64_t H);

}  // namespace polyprog
