#pragma once

#include <cstdint>
#include <vector>

#include "polyprog/common.hpp"

namespace polyprog {

// Real-valued function on Z_N.  Values are indexed by residue 0..N-1; the
// point x of [N] = {1,...,N} corresponds to residue x mod N (so x = N sits
// at index 0).
struct CyclicFn {
  std::int64_t N = 0;
  std::vector<double> v;

  CyclicFn() = default;
  explicit CyclicFn(std::int64_t n, double fill = 0.0)
      : N(n), v(static_cast<size_t>(n), fill) {
    if (n <= 0) throw PreconditionError("CyclicFn: modulus must be positive");
  }

  std::int64_t residue(std::int64_t x) const {
    std::int64_t r = x % N;
    return r < 0 ? r + N : r;
  }
  double at(std::int64_t x) const { return v[static_cast<size_t>(residue(x))]; }
  double& at(std::int64_t x) { return v[static_cast<size_t>(residue(x))]; }

  // Mean with compensated summation so large N stays exact to double ulps.
  double mean() const {
    double sum = 0, c = 0;
    for (double t : v) {
      double y = t - c;
      double s = sum + y;
      c = (s - sum) - y;
      sum = s;
    }
    return sum / static_cast<double>(N);
  }
};

inline CyclicFn constant_fn(std::int64_t N, double value) {
  return CyclicFn(N, value);
}

}  // namespace polyprog
