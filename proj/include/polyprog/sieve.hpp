#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "polyprog/common.hpp"
#include "polyprog/convex.hpp"
#include "polyprog/cutoff.hpp"
#include "polyprog/cyclicfn.hpp"
#include "polyprog/multipoly.hpp"
#include "polyprog/primetable.hpp"

namespace polyprog {

// Membership oracle for the target set A (a set of primes).
struct PrimeSet {
  enum class Kind { AllPrimes, Listed };
  Kind kind = Kind::AllPrimes;
  std::vector<std::int64_t> listed;  // sorted, deduplicated

  static PrimeSet all_primes();
  static PrimeSet from_list(std::vector<std::int64_t> values);
  bool contains(std::int64_t n, const PrimeTable& table) const;
};

// Parameters of the W-trick setup: W = prod of primes below w, N =
// floor(N_input / 2W), b the residue class coprime to W carrying the most
// elements of A, and the three scales M (coarse), R (sieve), H (fine).
struct SieveParams {
  std::int64_t N_input = 0;
  int w = 0;
  std::int64_t W = 0;
  std::int64_t b = 0;
  std::int64_t N = 0;
  double M = 0, R = 0, H = 0;
  bool eta_mode = false;
  std::array<double, 8> eta{};  // exponents eta0..eta7 when eta_mode
  double delta0 = 0;
  std::vector<std::string> hierarchy_warnings;
};

// Direct scales: M, R, H given explicitly.
SieveParams derive_params_direct(std::int64_t N_input, int w, double M,
                                 double R, double H, const PrimeSet& A,
                                 const PrimeTable& table);

// Exponent mode: M = N^{eta0}, R = N^{eta2}, H = N^{eta7}.
SieveParams derive_params_eta(std::int64_t N_input, int w,
                              const std::array<double, 8>& eta, double delta0,
                              const PrimeSet& A, const PrimeTable& table);

// The truncated-divisor-sum majorant
//   nu(x) = (phi(W)/W) log R (sum_{m | Wx+b} mu(m) chi(log m / log R))^2.
CyclicFn nu(const SieveParams& params, const CutoffChi& chi,
            const PrimeTable& table);

// Independent-density model for E_X nu: the diagonal-free double divisor sum
//   (phi(W)/W) log R sum_{m,m'} mu(m)mu(m') chi~(m) chi~(m') / lcm(m,m')
// over squarefree m,m' <= R coprime to W.
double nu_model_mean(const SieveParams& params, const CutoffChi& chi,
                     const PrimeTable& table);

// f(x) = (phi(W)/W) log R on {x in [N/2] : Wx+b in A, Wx+b > R}, else 0.
// The > R exclusion keeps f <= nu exact: at primes <= R the divisor sum in
// nu is damped by the chi(log p / log R) term.
CyclicFn prime_weight_f(const SieveParams& params, const PrimeSet& A,
                        const PrimeTable& table);

inline CyclicFn nu_half(const CyclicFn& f) {
  CyclicFn g(f.N);
  for (size_t i = 0; i < f.v.size(); ++i) g.v[i] = (1 + f.v[i]) / 2;
  return g;
}

// ---- polynomial forms average ------------------------------------------

struct PolyformResult {
  double average = 0;
  double prediction = 1.0;
  // band = EXP(sum of 1/p over bad and terrible primes in the scan range).
  double prediction_band = 0;
  double bad_prime_reciprocal_sum = 0;
  std::vector<std::int64_t> bad_primes;
  std::vector<std::int64_t> terrible_primes;
  std::int64_t window_lo = 0, window_hi = 0;  // inclusive x-range in [1,N]
  std::int64_t lattice_points = 0;
};

// E_{h in body} E_{x in X'} prod_j nu(x + Q_j(h)); Q_j in d variables.
// X' is the given window, or when absent the widest [1,N] sub-range keeping
// every shift inside [1,N].  The classification scan covers primes in
// [w, prime_scan_limit] applied to the family {W Q_j + b}.
PolyformResult polyform_average(
    const CyclicFn& nu_fn, const SieveParams& params,
    const std::vector<MultiPoly>& Q, const ConvexBody& body,
    std::optional<std::pair<std::int64_t, std::int64_t>> x_window =
        std::nullopt,
    std::int64_t prime_scan_limit = 100000);

// ---- polynomial correlation average --------------------------------------

struct PolycorSpec {
  int D = 0, Dp = 0, Dpp = 0;  // dimensions of m, n, h
  // P[j] has D components, Q[j][k] has Dp components, S[l] has Dp
  // components; every component is a polynomial in the Dpp h-variables.
  std::vector<std::vector<MultiPoly>> P;
  std::vector<std::vector<std::vector<MultiPoly>>> Q;
  std::vector<std::vector<MultiPoly>> S;
  std::optional<ConvexBody> Omega;     // dim D; needed when K >= 1
  std::optional<ConvexBody> OmegaP;    // dim Dp; needed when Dp >= 1
  std::optional<ConvexBody> OmegaPP;   // dim Dpp; needed when Dpp >= 1
  int J() const { return static_cast<int>(P.size()); }
  int K() const { return Q.empty() ? 0 : static_cast<int>(Q[0].size()); }
  int L() const { return static_cast<int>(S.size()); }
};

struct PolycorResult {
  double value = 0;
  double std_error = 0;  // zero in exact mode
  bool exact = true;
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
  std::int64_t window_lo = 0, window_hi = 0;
};

PolycorResult polycor_average(const CyclicFn& nu_fn, const SieveParams& params,
                              const PolycorSpec& spec, std::int64_t budget,
                              std::uint64_t seed = 0);

// ---- prime sums and diagnostics -------------------------------------------

// sum_{p < x} 1/p.
double mertens_sum(std::int64_t x, const PrimeTable& table);
// sum_{p < x} log(p)^K / p.
double log_power_sum(std::int64_t x, int K, const PrimeTable& table);
// EXP(t) = max(e^t - 1, 0).
double exp_fn(double t);

struct ExplogCheck {
  double recip_sum = 0;      // sum 1/p over the set
  double lhs = 0;            // EXP(K * recip_sum)
  double log_power_sum = 0;  // sum log^K p / p over the set
  double witness_CK = 0;     // lhs / log_power_sum
};
ExplogCheck explog_check(const std::vector<std::int64_t>& primes, int K);

// Partial Euler product prod_{p <= X} (1 - p^{-s})^{-1} and the partial zeta
// sum it tracks; diagnostic only.
struct EulerDiagnostic {
  double product = 0;
  double zeta_partial = 0;
  double s = 0;
};
EulerDiagnostic euler_product_diagnostic(double s, std::int64_t X,
                                         const PrimeTable& table);

// sum of 1/p over primes p >= w dividing n.
double divisor_prime_sum(std::int64_t n, int w, const PrimeTable& table);

}  // namespace polyprog
