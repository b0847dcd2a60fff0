#include "polyprog/localfactors.hpp"

#include <algorithm>
#include <cmath>

namespace polyprog {

namespace {

constexpr std::int64_t kPointBudget = 100000000;

struct FlatTerm {
  std::int64_t c;
  std::vector<std::uint32_t> e;
};

struct FlatPoly {
  std::vector<FlatTerm> terms;
  static FlatPoly from(const MultiPoly& P, std::int64_t p) {
    FlatPoly f;
    for (const auto& [m, c] : P.terms()) {
      std::int64_t cc = static_cast<std::int64_t>(c % p);
      if (cc < 0) cc += p;
      if (cc != 0) f.terms.push_back({cc, m});
    }
    return f;
  }
  // pow[v][k] = x_v^k mod p for the current point.
  std::int64_t eval(const std::vector<std::vector<std::int64_t>>& pow,
                    std::int64_t p) const {
    std::int64_t total = 0;
    for (const auto& t : terms) {
      std::int64_t v = t.c;
      for (size_t d = 0; d < t.e.size(); ++d)
        if (t.e[d] != 0) v = (v * pow[d][t.e[d]]) % p;
      total += v;
      if (total >= p) total -= p;
    }
    return total;
  }
};

std::int64_t checked_point_count(int D, std::int64_t p) {
  double est = std::pow(static_cast<double>(p), D);
  if (est > static_cast<double>(kPointBudget))
    throw BudgetError("local factor enumeration exceeds the p^D budget");
  std::int64_t n = 1;
  for (int i = 0; i < D; ++i) n *= p;
  return n;
}

// Visits all points of F_p^D with per-variable power tables maintained
// incrementally; visit(pow) is called once per point.
template <typename Visit>
void enumerate_points(int D, std::int64_t p, int maxdeg, Visit&& visit,
                      std::int64_t x0_begin = 0, std::int64_t x0_end = -1) {
  if (x0_end < 0) x0_end = (D == 0) ? 1 : p;
  std::vector<std::int64_t> x(static_cast<size_t>(std::max(D, 1)), 0);
  std::vector<std::vector<std::int64_t>> pow(
      static_cast<size_t>(std::max(D, 1)),
      std::vector<std::int64_t>(static_cast<size_t>(maxdeg) + 1, 0));
  auto set_var = [&](int v, std::int64_t val) {
    x[static_cast<size_t>(v)] = val;
    auto& row = pow[static_cast<size_t>(v)];
    row[0] = 1 % p;
    for (int k = 1; k <= maxdeg; ++k)
      row[static_cast<size_t>(k)] = (row[static_cast<size_t>(k - 1)] * val) % p;
  };
  if (D == 0) {
    if (x0_begin == 0) visit(pow);
    return;
  }
  for (int v = 1; v < D; ++v) set_var(v, 0);
  for (std::int64_t x0 = x0_begin; x0 < x0_end; ++x0) {
    set_var(0, x0);
    for (;;) {
      visit(pow);
      // Odometer over variables 1..D-1 (variable 0 is the outer loop).
      int v = D - 1;
      while (v >= 1) {
        if (x[static_cast<size_t>(v)] + 1 < p) {
          set_var(v, x[static_cast<size_t>(v)] + 1);
          break;
        }
        set_var(v, 0);
        --v;
      }
      if (v < 1) break;
    }
    if (D == 1) continue;
  }
}

int family_dim(const std::vector<MultiPoly>& polys) {
  if (polys.empty()) throw PreconditionError("local factor: empty family");
  int D = polys.front().nvars();
  for (const auto& P : polys)
    if (P.nvars() != D)
      throw PreconditionError("local factor: mixed variable counts");
  return D;
}

int family_maxdeg(const std::vector<MultiPoly>& polys) {
  int d = 1;
  for (const auto& P : polys)
    for (int v = 0; v < P.nvars(); ++v)
      d = std::max(d, std::max(0, P.degree_in(v)));
  return d;
}

}  // namespace

Rat local_factor(const std::vector<MultiPoly>& polys, std::int64_t p) {
  int D = family_dim(polys);
  std::int64_t total = checked_point_count(D, p);
  int maxdeg = family_maxdeg(polys);
  std::vector<FlatPoly> fps;
  for (const auto& P : polys) fps.push_back(FlatPoly::from(P, p));

  std::int64_t outer = (D == 0) ? 1 : p;
  std::vector<std::int64_t> partial(512, 0);
  parallel_chunks(outer, [&](int chunk, std::int64_t b, std::int64_t e) {
    std::int64_t count = 0;
    enumerate_points(
        D, p, maxdeg,
        [&](const std::vector<std::vector<std::int64_t>>& pow) {
          for (const auto& f : fps)
            if (f.eval(pow, p) != 0) return;  // early exit: not a zero
          ++count;
        },
        b, e);
    partial[static_cast<size_t>(chunk)] = count;
  });
  std::int64_t zeros = 0;
  for (auto c : partial) zeros += c;
  return Rat(Int(zeros), Int(total));
}

Rat complementary_factor(const std::vector<MultiPoly>& polys,
                         std::int64_t p) {
  int D = family_dim(polys);
  std::int64_t total = checked_point_count(D, p);
  int maxdeg = family_maxdeg(polys);
  std::vector<FlatPoly> fps;
  for (const auto& P : polys) fps.push_back(FlatPoly::from(P, p));

  std::int64_t outer = (D == 0) ? 1 : p;
  std::vector<std::int64_t> partial(512, 0);
  parallel_chunks(outer, [&](int chunk, std::int64_t b, std::int64_t e) {
    std::int64_t count = 0;
    enumerate_points(
        D, p, maxdeg,
        [&](const std::vector<std::vector<std::int64_t>>& pow) {
          for (const auto& f : fps)
            if (f.eval(pow, p) == 0) return;  // early exit: vanishes
          ++count;
        },
        b, e);
    partial[static_cast<size_t>(chunk)] = count;
  });
  std::int64_t good = 0;
  for (auto c : partial) good += c;
  return Rat(Int(good), Int(total));
}

std::vector<Rat> local_factor_all_subsets(const std::vector<MultiPoly>& polys,
                                          std::int64_t p) {
  int D = family_dim(polys);
  size_t J = polys.size();
  if (J > 12)
    throw BudgetError("local_factor_all_subsets: more than 12 members");
  std::int64_t total = checked_point_count(D, p);
  int maxdeg = family_maxdeg(polys);
  std::vector<FlatPoly> fps;
  for (const auto& P : polys) fps.push_back(FlatPoly::from(P, p));

  // One pass: histogram points by their vanish mask, then a superset-sum
  // (zeta transform) yields every c_p(S).
  std::vector<std::int64_t> by_mask(static_cast<size_t>(1) << J, 0);
  enumerate_points(D, p, maxdeg,
                   [&](const std::vector<std::vector<std::int64_t>>& pow) {
                     std::uint32_t mask = 0;
                     for (size_t j = 0; j < J; ++j)
                       if (fps[j].eval(pow, p) == 0)
                         mask |= (1u << j);
                     ++by_mask[mask];
                   });
  std::vector<std::int64_t> super = by_mask;
  for (size_t bit = 0; bit < J; ++bit)
    for (std::uint32_t m = 0; m < (1u << J); ++m)
      if (!(m & (1u << bit)))
        super[m] += super[m | (1u << bit)];
  std::vector<Rat> out(static_cast<size_t>(1) << J);
  for (std::uint32_t m = 0; m < (1u << J); ++m)
    out[m] = Rat(Int(super[m]), Int(total));
  return out;
}

Rat local_factor_linear(const MultiPoly& P, int var, std::int64_t p) {
  MultiPoly R = reduce_mod_p(P, p);
  if (R.degree_in(var) != 1)
    throw PreconditionError(
        "local_factor_linear: polynomial is not linear in the variable");
  std::vector<MultiPoly> cs = R.coeffs_in(var);
  const MultiPoly C1 = cs[1];
  const MultiPoly C0 = cs.empty() ? MultiPoly(R.nvars()) : cs[0];
  int D = R.nvars();
  std::int64_t totalD = checked_point_count(D, p);

  // Enumerate the D-1 remaining coordinates; "var" is fixed to 0 in the
  // power tables, which is harmless because C1 and C0 are free of it.
  int maxdeg = std::max(family_maxdeg({C1}), family_maxdeg({C0}));
  std::int64_t countA = 0, countC = 0;
  FlatPoly f1 = FlatPoly::from(C1, p);
  FlatPoly f0 = FlatPoly::from(C0, p);
  // Walk F_p^D but hold x_var = 0: equivalent to F_p^{D-1} with p-fold
  // repetition; divide at the end.
  enumerate_points(D, p, maxdeg,
                   [&](const std::vector<std::vector<std::int64_t>>& pow) {
                     if (pow[static_cast<size_t>(var)][1] != 0) return;
                     std::int64_t v1 = f1.eval(pow, p);
                     if (v1 != 0) {
                       ++countA;
                     } else if (f0.eval(pow, p) == 0) {
                       ++countC;
                     }
                   });
  // countA/countC counted once per y in F_p^{D-1} (x_var pinned to 0).
  Int zeros = Int(countA) + Int(countC) * p;
  return Rat(zeros, Int(totalD));
}

Rat local_factor_crude_bound(const std::vector<MultiPoly>& polys,
                             std::int64_t p) {
  family_dim(polys);
  for (const auto& P : polys) {
    MultiPoly R = reduce_mod_p(P, p);
    if (R.is_constant() && !R.is_zero()) return Rat(0);
  }
  for (const auto& P : polys) {
    MultiPoly R = reduce_mod_p(P, p);
    if (R.is_zero()) continue;
    for (int v = 0; v < R.nvars(); ++v) {
      if (R.degree_in(v) == 1) {
        std::vector<MultiPoly> cs = R.coeffs_in(v);
        if (cs[1].is_constant() && !cs[1].is_zero())
          return Rat(1, p);  // exactly one root in x_v per other point
      }
    }
  }
  return Rat(1);
}

LocalEstimatesReport local_estimates_report(
    const std::vector<MultiPoly>& polys, std::int64_t p) {
  LocalEstimatesReport rep;
  rep.p = p;
  rep.classification = classify_prime(polys, p);
  size_t J = polys.size();

  if (rep.classification.cls == PrimeClass::Terrible) {
    // Enumerating subsets of a terrible family is still well-defined, but
    // the only clause that applies is (e).
    rep.complementary = complementary_factor(polys, p);
    rep.complement_zero = (rep.complementary == 0);
    rep.empty_subset_is_one = true;
    return rep;
  }

  rep.subset_values = local_factor_all_subsets(polys, p);
  rep.empty_subset_is_one = (rep.subset_values[0] == 1);
  rep.complementary = complementary_factor(polys, p);

  Rat c_subset(0), c_single(0), c_pairs(0);
  std::uint32_t w_subset = 0, w_single = 0, w_pairs = 0;
  for (std::uint32_t m = 1; m < (1u << J); ++m) {
    const Rat& v = rep.subset_values[m];
    Rat scaled_b = v * p;
    if (scaled_b > c_subset) {
      c_subset = scaled_b;
      w_subset = m;
    }
    int bits = __builtin_popcount(m);
    if (bits == 1) {
      Rat dev = v - Rat(1, p);
      if (dev < 0) dev = -dev;
      Rat scaled_c = dev * p * p;
      if (scaled_c > c_single) {
        c_single = scaled_c;
        w_single = m;
      }
    } else {
      Rat scaled_d = v * p * p;
      if (scaled_d > c_pairs) {
        c_pairs = scaled_d;
        w_pairs = m;
      }
    }
  }
  rep.C_subset = c_subset;
  rep.C_subset_witness = w_subset;
  rep.C_singleton = c_single;
  rep.C_singleton_witness = w_single;
  rep.C_pairs = c_pairs;
  rep.C_pairs_witness = w_pairs;

  Rat cdev = rep.complementary - 1;
  if (cdev < 0) cdev = -cdev;
  rep.C_complement = cdev * p;
  return rep;
}

}  // namespace polyprog
