#include "polyprog/gowers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace polyprog {

namespace {

constexpr double kClampTol = 1e-12;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Decodes flat (row-major) into idx for the given dims.
void decode(std::int64_t flat, const std::vector<std::int64_t>& dims,
            std::vector<std::int64_t>& idx) {
  for (size_t i = dims.size(); i-- > 0;) {
    idx[i] = flat % dims[i];
    flat /= dims[i];
  }
}

double clamp_pre_root(double pow_value, const char* what) {
  if (pow_value >= 0) return pow_value;
  if (pow_value >= -kClampTol) return 0.0;
  throw InvariantError(std::string(what) +
                           ": pre-root value negative beyond tolerance",
                       format_sig(pow_value));
}

}  // namespace

// ---------------------------------------------------------------------------
// Tensor and box norms
// ---------------------------------------------------------------------------

Tensor Tensor::zeros(std::vector<std::int64_t> dims) {
  Tensor t;
  std::int64_t n = 1;
  for (std::int64_t d : dims) {
    if (d <= 0) throw PreconditionError("Tensor: empty axis");
    n *= d;
    if (n > 100000000) throw BudgetError("Tensor: too large");
  }
  t.dims = std::move(dims);
  t.v.assign(static_cast<size_t>(n), 0.0);
  return t;
}

std::int64_t Tensor::size() const {
  std::int64_t n = 1;
  for (std::int64_t d : dims) n *= d;
  return n;
}

double Tensor::at(const std::vector<std::int64_t>& idx) const {
  std::int64_t flat = 0;
  for (size_t i = 0; i < dims.size(); ++i) flat = flat * dims[i] + idx[i];
  return v[static_cast<size_t>(flat)];
}

double& Tensor::at(const std::vector<std::int64_t>& idx) {
  std::int64_t flat = 0;
  for (size_t i = 0; i < dims.size(); ++i) flat = flat * dims[i] + idx[i];
  return v[static_cast<size_t>(flat)];
}

double box_norm_pow(const Tensor& F) {
  const int A = static_cast<int>(F.dims.size());
  const std::int64_t S = F.size();
  if (A > 4) throw PreconditionError("box_norm: exact mode limited to rank 4");
  const int corners = 1 << A;
  std::vector<std::int64_t> i0(static_cast<size_t>(A)),
      i1(static_cast<size_t>(A)), c(static_cast<size_t>(A));
  double total = 0;
  for (std::int64_t f0 = 0; f0 < S; ++f0) {
    decode(f0, F.dims, i0);
    for (std::int64_t f1 = 0; f1 < S; ++f1) {
      decode(f1, F.dims, i1);
      double prod = 1;
      for (int w = 0; w < corners; ++w) {
        for (int i = 0; i < A; ++i)
          c[static_cast<size_t>(i)] = (w >> i) & 1
                                          ? i1[static_cast<size_t>(i)]
                                          : i0[static_cast<size_t>(i)];
        prod *= F.at(c);
      }
      total += prod;
    }
  }
  return total / static_cast<double>(S) / static_cast<double>(S);
}

double box_norm(const Tensor& F) {
  const int A = static_cast<int>(F.dims.size());
  if (A == 0) return F.v[0];
  double p = clamp_pre_root(box_norm_pow(F), "box_norm");
  return std::pow(p, 1.0 / static_cast<double>(1 << A));
}

double gcz_average(const std::vector<Tensor>& fs) {
  if (fs.empty()) throw PreconditionError("gcz_average: no tensors");
  const int A = static_cast<int>(fs[0].dims.size());
  const int corners = 1 << A;
  if (static_cast<int>(fs.size()) != corners)
    throw PreconditionError("gcz_average: need one tensor per corner");
  for (const Tensor& f : fs)
    if (f.dims != fs[0].dims)
      throw PreconditionError("gcz_average: mismatched dims");
  const std::int64_t S = fs[0].size();
  std::vector<std::int64_t> i0(static_cast<size_t>(A)),
      i1(static_cast<size_t>(A)), c(static_cast<size_t>(A));
  double total = 0;
  for (std::int64_t f0 = 0; f0 < S; ++f0) {
    decode(f0, fs[0].dims, i0);
    for (std::int64_t f1 = 0; f1 < S; ++f1) {
      decode(f1, fs[0].dims, i1);
      double prod = 1;
      for (int w = 0; w < corners; ++w) {
        for (int i = 0; i < A; ++i)
          c[static_cast<size_t>(i)] = (w >> i) & 1
                                          ? i1[static_cast<size_t>(i)]
                                          : i0[static_cast<size_t>(i)];
        prod *= fs[static_cast<size_t>(w)].at(c);
      }
      total += prod;
    }
  }
  return total / static_cast<double>(S) / static_cast<double>(S);
}

WeightedBoxReport weighted_box_check(const Tensor& f,
                                     const std::vector<Tensor>& f_alpha,
                                     const std::vector<Tensor>& nu_alpha) {
  const int A = static_cast<int>(f.dims.size());
  if (A < 1) throw PreconditionError("weighted_box_check: need rank >= 1");
  if (static_cast<int>(f_alpha.size()) != A ||
      static_cast<int>(nu_alpha.size()) != A)
    throw PreconditionError("weighted_box_check: need one f_a, nu_a per axis");
  for (int a = 0; a < A; ++a) {
    std::vector<std::int64_t> want;
    for (int i = 0; i < A; ++i)
      if (i != a) want.push_back(f.dims[static_cast<size_t>(i)]);
    if (f_alpha[static_cast<size_t>(a)].dims != want ||
        nu_alpha[static_cast<size_t>(a)].dims != want)
      throw PreconditionError("weighted_box_check: axis-a tensor dims wrong");
    for (size_t i = 0; i < f_alpha[static_cast<size_t>(a)].v.size(); ++i) {
      if (std::fabs(f_alpha[static_cast<size_t>(a)].v[i]) >
          nu_alpha[static_cast<size_t>(a)].v[i] + kClampTol)
        throw PreconditionError(
            "weighted_box_check: |f_a| <= nu_a violated pointwise");
    }
  }

  WeightedBoxReport out;
  const std::int64_t S = f.size();
  std::vector<std::int64_t> idx(static_cast<size_t>(A)),
      sub(static_cast<size_t>(A - 1));

  // Left side: E_m f(m) prod_a f_a(m minus axis a).
  double lhs = 0;
  for (std::int64_t flat = 0; flat < S; ++flat) {
    decode(flat, f.dims, idx);
    double prod = f.at(idx);
    for (int a = 0; a < A; ++a) {
      size_t k = 0;
      for (int i = 0; i < A; ++i)
        if (i != a) sub[k++] = idx[static_cast<size_t>(i)];
      prod *= f_alpha[static_cast<size_t>(a)].at(
          std::vector<std::int64_t>(sub.begin(), sub.begin() + (A - 1)));
    }
    lhs += prod;
  }
  out.lhs = std::fabs(lhs / static_cast<double>(S));

  // Weighted box norm power.
  const int corners = 1 << A;
  std::vector<std::int64_t> i0(static_cast<size_t>(A)),
      i1(static_cast<size_t>(A)), c(static_cast<size_t>(A));
  std::vector<std::int64_t> csub(static_cast<size_t>(A - 1));
  double total = 0;
  for (std::int64_t f0 = 0; f0 < S; ++f0) {
    decode(f0, f.dims, i0);
    for (std::int64_t f1 = 0; f1 < S; ++f1) {
      decode(f1, f.dims, i1);
      double prod = 1;
      for (int w = 0; w < corners; ++w) {
        for (int i = 0; i < A; ++i)
          c[static_cast<size_t>(i)] = (w >> i) & 1
                                          ? i1[static_cast<size_t>(i)]
                                          : i0[static_cast<size_t>(i)];
        prod *= f.at(c);
      }
      // Weight: for each axis a and each corner of the remaining axes.
      for (int a = 0; a < A && prod != 0; ++a) {
        const int subcorners = 1 << (A - 1);
        for (int w = 0; w < subcorners; ++w) {
          size_t k = 0;
          for (int i = 0; i < A; ++i) {
            if (i == a) continue;
            csub[k] = (w >> k) & 1 ? i1[static_cast<size_t>(i)]
                                   : i0[static_cast<size_t>(i)];
            ++k;
          }
          prod *= nu_alpha[static_cast<size_t>(a)].at(std::vector<std::int64_t>(
              csub.begin(), csub.begin() + (A - 1)));
        }
      }
      total += prod;
    }
  }
  out.weighted_norm_pow = total / static_cast<double>(S) /
                          static_cast<double>(S);
  out.weighted_norm =
      std::pow(clamp_pre_root(out.weighted_norm_pow, "weighted_box_check"),
               1.0 / corners);

  out.rhs = out.weighted_norm;
  for (int a = 0; a < A; ++a) {
    double nn = box_norm(nu_alpha[static_cast<size_t>(a)]);
    out.nu_norms.push_back(nn);
    out.rhs *= std::sqrt(std::fabs(nn));
  }
  out.holds = out.lhs <= out.rhs + 1e-12;
  return out;
}

// ---------------------------------------------------------------------------
// GowersSpec
// ---------------------------------------------------------------------------

void GowersSpec::validate() const {
  if (d < 1) throw PreconditionError("GowersSpec: d must be >= 1");
  if (t < 0) throw PreconditionError("GowersSpec: t must be >= 0");
  if (static_cast<int>(Q.size()) != d)
    throw PreconditionError("GowersSpec: need exactly d step polynomials");
  for (const MultiPoly& q : Q) {
    if (q.nvars() != t + 1)
      throw PreconditionError("GowersSpec: Q_i must live in (h_1..h_t, W)");
    if (q.is_zero())
      throw PreconditionError("GowersSpec: step polynomials must be nonzero");
  }
  if (H < 1 || sqrtM < 1)
    throw PreconditionError("GowersSpec: ranges must be >= 1");
}

std::vector<std::int64_t> GowersSpec::steps(
    const std::vector<std::int64_t>& h) const {
  if (static_cast<int>(h.size()) != t)
    throw PreconditionError("GowersSpec::steps: h must have t components");
  std::vector<Int> pt(h.begin(), h.end());
  pt.push_back(Int(Wval));
  std::vector<std::int64_t> a(static_cast<size_t>(d));
  for (int i = 0; i < d; ++i) {
    Int v = Q[static_cast<size_t>(i)].eval(pt);
    if (v > std::numeric_limits<std::int64_t>::max() ||
        v < std::numeric_limits<std::int64_t>::min())
      throw PreconditionError("GowersSpec::steps: step exceeds 64-bit range");
    a[static_cast<size_t>(i)] = static_cast<std::int64_t>(v);
  }
  return a;
}

std::int64_t GowersSpec::h_count() const {
  std::int64_t n = 1;
  for (int i = 0; i < t; ++i) {
    if (n > 1000000000000000000LL / std::max<std::int64_t>(H, 1))
      throw BudgetError("GowersSpec: H^t overflows");
    n *= H;
  }
  return n;
}

GowersSpec concat_specs(const std::vector<GowersSpec>& parts) {
  if (parts.empty()) throw PreconditionError("concat_specs: no parts");
  GowersSpec out;
  out.H = parts[0].H;
  out.sqrtM = parts[0].sqrtM;
  out.Wval = parts[0].Wval;
  out.t = 0;
  out.d = 0;
  for (const GowersSpec& p : parts) {
    p.validate();
    if (p.H != out.H || p.sqrtM != out.sqrtM || p.Wval != out.Wval)
      throw PreconditionError("concat_specs: parts must share H, sqrtM, W");
    out.t += p.t;
    out.d += p.d;
  }
  int offset = 0;
  for (const GowersSpec& p : parts) {
    std::vector<int> var_map(static_cast<size_t>(p.t + 1));
    for (int j = 0; j < p.t; ++j) var_map[static_cast<size_t>(j)] = offset + j;
    var_map[static_cast<size_t>(p.t)] = out.t;  // W stays last
    for (const MultiPoly& q : p.Q)
      out.Q.push_back(q.remap(out.t + 1, var_map));
    offset += p.t;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Local Gowers norms
// ---------------------------------------------------------------------------

namespace {

// Odometer over [1..range]^k; returns false when exhausted.
bool advance(std::vector<std::int64_t>& idx, std::int64_t range) {
  for (size_t i = 0; i < idx.size(); ++i) {
    if (++idx[i] <= range) return true;
    idx[i] = 1;
  }
  return false;
}

double ipow(double b, int e) {
  double r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

}  // namespace

double local_gowers_pow(const CyclicFn& f, const std::vector<std::int64_t>& a,
                        std::int64_t range) {
  const int d = static_cast<int>(a.size());
  if (d < 1) throw PreconditionError("local_gowers: d must be >= 1");
  if (range < 1) throw PreconditionError("local_gowers: range must be >= 1");
  const int corners = 1 << d;
  double pairs = ipow(static_cast<double>(range), 2 * d);
  if (pairs * static_cast<double>(f.N) * corners > 4e9)
    throw BudgetError("local_gowers: exact enumeration over budget");
  const std::int64_t npairs = static_cast<std::int64_t>(pairs);

  double total = parallel_sum(npairs, [&](std::int64_t t) {
    // Decode t into (m0, m1) in [1..range]^{2d}.
    std::int64_t rest = t;
    std::vector<std::int64_t> m(static_cast<size_t>(2 * d));
    for (int i = 0; i < 2 * d; ++i) {
      m[static_cast<size_t>(i)] = rest % range + 1;
      rest /= range;
    }
    // Corner shifts.
    double inner = 0;
    std::vector<std::int64_t> shift(static_cast<size_t>(corners), 0);
    for (int w = 0; w < corners; ++w) {
      std::int64_t s = 0;
      for (int i = 0; i < d; ++i) {
        std::int64_t mi = (w >> i) & 1 ? m[static_cast<size_t>(d + i)]
                                       : m[static_cast<size_t>(i)];
        s += mi * a[static_cast<size_t>(i)];
      }
      shift[static_cast<size_t>(w)] = s;
    }
    for (std::int64_t x = 0; x < f.N; ++x) {
      double prod = 1;
      for (int w = 0; w < corners; ++w)
        prod *= f.at(x + shift[static_cast<size_t>(w)]);
      inner += prod;
    }
    return inner / static_cast<double>(f.N);
  });
  return total / pairs;
}

double local_gowers(const CyclicFn& f, const std::vector<std::int64_t>& a,
                    std::int64_t range) {
  double p = clamp_pre_root(local_gowers_pow(f, a, range), "local_gowers");
  return std::pow(p, 1.0 / static_cast<double>(1 << a.size()));
}

AvgGowersResult avg_local_gowers_exact(const CyclicFn& f,
                                       const GowersSpec& spec,
                                       std::int64_t budget) {
  spec.validate();
  const std::int64_t hs = spec.h_count();
  const int corners = 1 << spec.d;
  double per_h = ipow(static_cast<double>(spec.sqrtM), 2 * spec.d) *
                 static_cast<double>(f.N) * corners;
  if (static_cast<double>(hs) * per_h > static_cast<double>(budget))
    throw BudgetError(
        "avg_local_gowers: exact enumeration over budget; use sampled mode");
  AvgGowersResult out;
  out.exact = true;
  out.samples = hs;
  double total = 0;
  std::vector<std::int64_t> h(static_cast<size_t>(spec.t), 1);
  if (spec.t == 0) {
    total = local_gowers_pow(f, spec.steps({}), spec.sqrtM);
  } else {
    do {
      total += local_gowers_pow(f, spec.steps(h), spec.sqrtM);
    } while (advance(h, spec.H));
    total /= static_cast<double>(hs);
  }
  out.norm_pow = total;
  out.norm = std::pow(clamp_pre_root(total, "avg_local_gowers"),
                      1.0 / corners);
  return out;
}

AvgGowersResult avg_local_gowers(const CyclicFn& f, const GowersSpec& spec,
                                 std::int64_t budget, std::uint64_t seed) {
  spec.validate();
  const int corners = 1 << spec.d;
  bool fits_exact = true;
  try {
    double per_h = ipow(static_cast<double>(spec.sqrtM), 2 * spec.d) *
                   static_cast<double>(f.N) * corners;
    fits_exact = static_cast<double>(spec.h_count()) * per_h <=
                 static_cast<double>(budget);
  } catch (const BudgetError&) {
    fits_exact = false;
  }
  if (fits_exact) return avg_local_gowers_exact(f, spec, budget);

  // Monte Carlo over (h, m0, m1); the x-average stays exact per draw.
  const std::int64_t per_draw = f.N * corners;
  std::int64_t samples = std::max<std::int64_t>(16, budget / per_draw);
  std::vector<double> sums(260, 0), sqs(260, 0);
  parallel_chunks(samples, [&](int chunk, std::int64_t begin,
                               std::int64_t end) {
    std::mt19937_64 rng(splitmix64(seed ^ static_cast<std::uint64_t>(chunk)));
    std::uniform_int_distribution<std::int64_t> dh(1, spec.H);
    std::uniform_int_distribution<std::int64_t> dm(1, spec.sqrtM);
    std::vector<std::int64_t> h(static_cast<size_t>(spec.t));
    std::vector<std::int64_t> m(static_cast<size_t>(2 * spec.d));
    std::vector<std::int64_t> shift(static_cast<size_t>(corners));
    double s = 0, q = 0;
    for (std::int64_t it = begin; it < end; ++it) {
      for (auto& hv : h) hv = dh(rng);
      for (auto& mv : m) mv = dm(rng);
      std::vector<std::int64_t> a = spec.steps(h);
      for (int w = 0; w < corners; ++w) {
        std::int64_t sh = 0;
        for (int i = 0; i < spec.d; ++i) {
          std::int64_t mi = (w >> i) & 1 ? m[static_cast<size_t>(spec.d + i)]
                                         : m[static_cast<size_t>(i)];
          sh += mi * a[static_cast<size_t>(i)];
        }
        shift[static_cast<size_t>(w)] = sh;
      }
      double inner = 0;
      for (std::int64_t x = 0; x < f.N; ++x) {
        double prod = 1;
        for (int w = 0; w < corners; ++w)
          prod *= f.at(x + shift[static_cast<size_t>(w)]);
        inner += prod;
      }
      inner /= static_cast<double>(f.N);
      s += inner;
      q += inner * inner;
    }
    sums[static_cast<size_t>(chunk)] = s;
    sqs[static_cast<size_t>(chunk)] = q;
  });
  double s = 0, q = 0;
  for (size_t i = 0; i < sums.size(); ++i) {
    s += sums[i];
    q += sqs[i];
  }
  AvgGowersResult out;
  out.exact = false;
  out.samples = samples;
  out.seed = seed;
  out.norm_pow = s / static_cast<double>(samples);
  double var = std::max(
      0.0, q / static_cast<double>(samples) - out.norm_pow * out.norm_pow);
  out.std_error = std::sqrt(var / static_cast<double>(samples));
  out.norm = std::pow(std::max(0.0, out.norm_pow), 1.0 / corners);
  return out;
}

// ---------------------------------------------------------------------------
// Dual functions
// ---------------------------------------------------------------------------

CyclicFn dual_function(const CyclicFn& f, const GowersSpec& spec,
                       std::int64_t budget) {
  spec.validate();
  const int corners = 1 << spec.d;
  const std::int64_t hs = spec.h_count();
  double pairs = ipow(static_cast<double>(spec.sqrtM), 2 * spec.d);
  double rows_d = static_cast<double>(hs) * pairs;
  if (rows_d * (corners - 1) > 2e7)
    throw BudgetError("dual_function: shift table too large");
  if (rows_d * corners * static_cast<double>(f.N) >
      static_cast<double>(budget))
    throw BudgetError("dual_function: enumeration over budget");
  const std::int64_t npairs = static_cast<std::int64_t>(pairs);

  // Precompute all shift rows delta_omega (omega != 0).
  std::vector<std::int64_t> deltas;
  deltas.reserve(static_cast<size_t>(rows_d) * (corners - 1));
  std::vector<std::int64_t> h(static_cast<size_t>(spec.t), 1);
  std::int64_t rows = 0;
  bool more_h = true;
  while (more_h) {
    std::vector<std::int64_t> a =
        spec.steps(std::vector<std::int64_t>(h.begin(), h.end()));
    for (std::int64_t p = 0; p < npairs; ++p) {
      std::int64_t rest = p;
      std::vector<std::int64_t> m(static_cast<size_t>(2 * spec.d));
      for (int i = 0; i < 2 * spec.d; ++i) {
        m[static_cast<size_t>(i)] = rest % spec.sqrtM + 1;
        rest /= spec.sqrtM;
      }
      for (int w = 1; w < corners; ++w) {
        std::int64_t s = 0;
        for (int i = 0; i < spec.d; ++i) {
          std::int64_t diff = ((w >> i) & 1 ? m[static_cast<size_t>(spec.d + i)]
                                            : m[static_cast<size_t>(i)]) -
                              m[static_cast<size_t>(i)];
          s += diff * a[static_cast<size_t>(i)];
        }
        deltas.push_back(s);
      }
      ++rows;
    }
    more_h = spec.t > 0 && advance(h, spec.H);
  }

  CyclicFn out(f.N);
  parallel_chunks(f.N, [&](int, std::int64_t begin, std::int64_t end) {
    for (std::int64_t x = begin; x < end; ++x) {
      double acc = 0;
      size_t pos = 0;
      for (std::int64_t r = 0; r < rows; ++r) {
        double prod = 1;
        for (int w = 1; w < corners; ++w)
          prod *= f.at(x - deltas[pos++]);  // T^n f(x) = f(x - n)
        acc += prod;
      }
      out.v[static_cast<size_t>(x)] = acc / static_cast<double>(rows);
    }
  });
  return out;
}

BadSet global_bad_set(const CyclicFn& nu, const GowersSpec& spec,
                      std::int64_t budget) {
  BadSet bs;
  bs.N = nu.N;
  bs.threshold = std::ldexp(1.0, 1 << spec.d);  // 2^{2^d}
  CyclicFn nu_plus(nu.N);
  for (size_t i = 0; i < nu.v.size(); ++i) nu_plus.v[i] = nu.v[i] + 1;
  CyclicFn Dw = dual_function(nu_plus, spec, budget);
  bs.mask.assign(static_cast<size_t>(nu.N), 0);
  double mass = 0;
  for (size_t i = 0; i < Dw.v.size(); ++i) {
    if (Dw.v[i] >= bs.threshold) {
      bs.mask[i] = 1;
      ++bs.points;
      mass += nu.v[i] + 1;
    }
  }
  bs.mass_nu_plus1 = mass / static_cast<double>(nu.N);
  CyclicFn Dn = dual_function(nu, spec, budget);
  for (size_t i = 0; i < Dn.v.size(); ++i)
    if (Dn.v[i] >= bs.threshold) ++bs.points_dnu;
  return bs;
}

CyclicFn apply_bad_set(const CyclicFn& Df, const BadSet& omega) {
  if (Df.N != omega.N)
    throw PreconditionError("apply_bad_set: mismatched moduli");
  CyclicFn out(Df.N);
  for (size_t i = 0; i < Df.v.size(); ++i)
    out.v[i] = omega.mask[i] ? 0.0 : Df.v[i];
  return out;
}

std::pair<CyclicFn, BadSet> modified_dual(const CyclicFn& f,
                                          const CyclicFn& nu,
                                          const GowersSpec& spec,
                                          std::int64_t budget) {
  if (f.N != nu.N) throw PreconditionError("modified_dual: mismatched moduli");
  BadSet bs = global_bad_set(nu, spec, budget);
  CyclicFn Df = dual_function(f, spec, budget);
  CyclicFn tilde = apply_bad_set(Df, bs);
  bool dominated = true;
  for (size_t i = 0; i < f.v.size(); ++i) {
    if (std::fabs(f.v[i]) > nu.v[i] + 1 + kClampTol) {
      dominated = false;
      break;
    }
  }
  if (dominated) {
    for (size_t i = 0; i < tilde.v.size(); ++i) {
      if (std::fabs(tilde.v[i]) > bs.threshold + 1e-9)
        throw InvariantError("modified_dual: range bound exceeded",
                             "x=" + std::to_string(i) +
                                 " value=" + format_sig(tilde.v[i]));
    }
  }
  return {std::move(tilde), std::move(bs)};
}

double dual_moment(const CyclicFn& Df, const CyclicFn& nu, int K) {
  if (Df.N != nu.N) throw PreconditionError("dual_moment: mismatched moduli");
  double total = 0;
  for (size_t i = 0; i < Df.v.size(); ++i)
    total += std::pow(std::fabs(Df.v[i]), K) * (nu.v[i] + 1);
  return total / static_cast<double>(Df.N);
}

// ---------------------------------------------------------------------------
// van der Corput check
// ---------------------------------------------------------------------------

VdcReport vdc_check(const std::vector<double>& x, std::int64_t M,
                    std::int64_t H) {
  if (M < 1 || H < 1) throw PreconditionError("vdc_check: M, H must be >= 1");
  if (static_cast<std::int64_t>(x.size()) < M + H)
    throw PreconditionError("vdc_check: sequence must cover m up to M+H");
  VdcReport out;
  double mean = 0;
  for (std::int64_t m = 1; m <= M; ++m)
    mean += x[static_cast<size_t>(m - 1)];
  mean /= static_cast<double>(M);
  out.lhs = mean * mean;
  // E_m (E_h x_{m+h})^2 with a sliding window over h.
  double rhs = 0;
  double window = 0;
  for (std::int64_t h = 1; h <= H; ++h)
    window += x[static_cast<size_t>(h)];  // m=1: x_{1+h}
  for (std::int64_t m = 1; m <= M; ++m) {
    double avg = window / static_cast<double>(H);
    rhs += avg * avg;
    if (m < M) {
      window -= x[static_cast<size_t>(m)];          // drop x_{m+1}
      window += x[static_cast<size_t>(m + H)];      // add x_{m+1+H}
    }
  }
  out.rhs = rhs / static_cast<double>(M);
  out.epsilon = out.lhs - out.rhs;
  return out;
}

}  // namespace polyprog
