// Smallest-prime-factor table with Moebius function, primality queries,
// factorization, squarefree divisor enumeration, and a binary cache.
#pragma once

#include "polyprog/common.hpp"

#include <functional>

namespace polyprog {

class PrimeTable {
 public:
  // Builds spf/mu for all n <= limit (linear sieve).
  explicit PrimeTable(std::uint64_t limit);

  std::uint64_t limit() const { return limit_; }
  bool is_prime(std::uint64_t n) const;
  std::uint32_t smallest_factor(std::uint64_t n) const;
  int moebius(std::uint64_t n) const;  // mu(n), n >= 1
  const std::vector<std::uint32_t>& primes() const { return primes_; }

  // Distinct prime factors of n in increasing order.
  std::vector<std::uint32_t> distinct_prime_factors(std::uint64_t n) const;

  // Visits every squarefree divisor m of n with m <= bound, passing
  // (m, mu(m)). Includes m = 1.
  void for_each_squarefree_divisor(
      std::uint64_t n, double bound,
      const std::function<void(std::uint64_t, int)>& visit) const;

  // Euler phi of small arguments via factorization.
  std::uint64_t phi(std::uint64_t n) const;

  // Binary cache ("PPLT", version, limit, spf entries; little-endian).
  // mu is recomputed on load. Returns false when the file is absent or
  // does not match the requested limit.
  void save(const std::string& path) const;
  static bool try_load(const std::string& path, std::uint64_t limit,
                       PrimeTable& out);

 private:
  PrimeTable() = default;
  void rebuild_mu_and_primes();
  std::uint64_t limit_ = 0;
  std::vector<std::uint32_t> spf_;  // spf_[n], 0 for n < 2
  std::vector<std::int8_t> mu_;
  std::vector<std::uint32_t> primes_;
};

}  // namespace polyprog
