#include "polyprog/primetable.hpp"

#include <cstdio>
#include <cstring>

namespace polyprog {

PrimeTable::PrimeTable(std::uint64_t limit) : limit_(limit) {
  if (limit < 2 || limit > (1ull << 32))
    throw PreconditionError("PrimeTable: limit out of range [2, 2^32]");
  spf_.assign(limit + 1, 0);
  // Linear sieve: each composite is struck once by its smallest factor.
  std::vector<std::uint32_t> ps;
  for (std::uint64_t n = 2; n <= limit; ++n) {
    if (spf_[n] == 0) {
      spf_[n] = static_cast<std::uint32_t>(n);
      ps.push_back(static_cast<std::uint32_t>(n));
    }
    for (std::uint32_t p : ps) {
      if (p > spf_[n] || p * n > limit) break;
      spf_[p * n] = p;
    }
  }
  primes_ = std::move(ps);
  rebuild_mu_and_primes();
}

void PrimeTable::rebuild_mu_and_primes() {
  mu_.assign(limit_ + 1, 0);
  if (limit_ >= 1) mu_[1] = 1;
  for (std::uint64_t n = 2; n <= limit_; ++n) {
    std::uint32_t p = spf_[n];
    std::uint64_t m = n / p;
    mu_[n] = (m % p == 0) ? 0 : static_cast<std::int8_t>(-mu_[m]);
  }
  if (primes_.empty()) {
    for (std::uint64_t n = 2; n <= limit_; ++n)
      if (spf_[n] == n) primes_.push_back(static_cast<std::uint32_t>(n));
  }
}

bool PrimeTable::is_prime(std::uint64_t n) const {
  if (n < 2) return false;
  if (n > limit_) throw PreconditionError("PrimeTable::is_prime: beyond limit");
  return spf_[n] == n;
}

std::uint32_t PrimeTable::smallest_factor(std::uint64_t n) const {
  if (n < 2 || n > limit_)
    throw PreconditionError("PrimeTable::smallest_factor: out of range");
  return spf_[n];
}

int PrimeTable::moebius(std::uint64_t n) const {
  if (n < 1 || n > limit_)
    throw PreconditionError("PrimeTable::moebius: out of range");
  return mu_[n];
}

std::vector<std::uint32_t> PrimeTable::distinct_prime_factors(
    std::uint64_t n) const {
  if (n > limit_)
    throw PreconditionError("distinct_prime_factors: beyond limit");
  std::vector<std::uint32_t> out;
  while (n > 1) {
    std::uint32_t p = spf_[n];
    out.push_back(p);
    while (n % p == 0) n /= p;
  }
  return out;
}

void PrimeTable::for_each_squarefree_divisor(
    std::uint64_t n, double bound,
    const std::function<void(std::uint64_t, int)>& visit) const {
  std::vector<std::uint32_t> ps = distinct_prime_factors(n);
  // DFS over subsets of the distinct primes, pruned by the bound. Primes
  // are increasing, so once a partial product exceeds the bound every
  // extension does too.
  std::function<void(size_t, std::uint64_t, int)> rec =
      [&](size_t i, std::uint64_t m, int mu) {
        visit(m, mu);
        for (size_t j = i; j < ps.size(); ++j) {
          double next = static_cast<double>(m) * ps[j];
          if (next > bound) break;
          rec(j + 1, m * ps[j], -mu);
        }
      };
  if (1.0 <= bound) rec(0, 1, 1);
}

std::uint64_t PrimeTable::phi(std::uint64_t n) const {
  if (n == 0) throw PreconditionError("phi(0)");
  std::uint64_t result = n;
  for (std::uint32_t p : distinct_prime_factors(n)) {
    result -= result / p;
  }
  return result;
}

namespace {
constexpr char kMagic[4] = {'P', 'P', 'L', 'T'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

void PrimeTable::save(const std::string& path) const {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw PreconditionError("PrimeTable::save: cannot open " + path);
  std::uint64_t lim = limit_;
  bool ok = std::fwrite(kMagic, 1, 4, f) == 4 &&
            std::fwrite(&kVersion, sizeof kVersion, 1, f) == 1 &&
            std::fwrite(&lim, sizeof lim, 1, f) == 1 &&
            std::fwrite(spf_.data(), sizeof(std::uint32_t), spf_.size(), f) ==
                spf_.size();
  std::fclose(f);
  if (!ok) throw std::runtime_error("PrimeTable::save: short write");
}

bool PrimeTable::try_load(const std::string& path, std::uint64_t limit,
                          PrimeTable& out) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) return false;
  char magic[4];
  std::uint32_t version = 0;
  std::uint64_t lim = 0;
  bool ok = std::fread(magic, 1, 4, f) == 4 &&
            std::memcmp(magic, kMagic, 4) == 0 &&
            std::fread(&version, sizeof version, 1, f) == 1 &&
            version == kVersion && std::fread(&lim, sizeof lim, 1, f) == 1 &&
            lim == limit;
  if (!ok) {
    std::fclose(f);
    return false;
  }
  PrimeTable t;
  t.limit_ = lim;
  t.spf_.assign(lim + 1, 0);
  ok = std::fread(t.spf_.data(), sizeof(std::uint32_t), t.spf_.size(), f) ==
       t.spf_.size();
  std::fclose(f);
  if (!ok) return false;
  t.rebuild_mu_and_primes();
  out = std::move(t);
  return true;
}

}  // namespace polyprog
