#include "polyprog/modpoly.hpp"

#include <algorithm>
#include <sstream>

namespace polyprog {

namespace {

std::int64_t mod_inverse(std::int64_t a, std::int64_t p) {
  std::int64_t t = 0, new_t = 1, r = p, new_r = a % p;
  if (new_r < 0) new_r += p;
  while (new_r != 0) {
    std::int64_t q = r / new_r;
    std::swap(t -= q * new_t, new_t);
    std::swap(r -= q * new_r, new_r);
  }
  if (r != 1) throw PreconditionError("mod_inverse: not invertible");
  return t < 0 ? t + p : t;
}

MultiPoly mul_mod(const MultiPoly& a, const MultiPoly& b, std::int64_t p) {
  return reduce_mod_p(a * b, p);
}

MultiPoly scale_mod(const MultiPoly& a, std::int64_t c, std::int64_t p) {
  return reduce_mod_p(a.scaled(Int(c)), p);
}

std::int64_t leading_coeff_int(const MultiPoly& a) {
  // Graded-lex largest term; caller guarantees a != 0 with small coeffs.
  return static_cast<std::int64_t>(a.terms().rbegin()->second);
}

// Scales a non-zero reduced polynomial so its graded-lex leading
// coefficient is 1.
MultiPoly monic_mod(const MultiPoly& a, std::int64_t p) {
  std::int64_t lc = leading_coeff_int(a);
  if (lc == 1) return a;
  return scale_mod(a, mod_inverse(lc, p), p);
}

int highest_var(const MultiPoly& a) {
  for (int v = a.nvars() - 1; v >= 0; --v)
    if (a.degree_in(v) >= 1) return v;
  return -1;
}

// Exact quotient A / B over F_p (precondition: B divides A exactly).
MultiPoly divide_exact_mod(MultiPoly A, const MultiPoly& B, std::int64_t p) {
  if (B.is_zero()) throw PreconditionError("divide_exact_mod: zero divisor");
  MultiPoly q(A.nvars());
  const Monomial& ltb = B.terms().rbegin()->first;
  std::int64_t lcb_inv = mod_inverse(leading_coeff_int(B), p);
  while (!A.is_zero()) {
    const Monomial& lta = A.terms().rbegin()->first;
    Monomial quot(lta.size());
    for (size_t i = 0; i < lta.size(); ++i) {
      if (lta[i] < ltb[i])
        throw PreconditionError("divide_exact_mod: not divisible");
      quot[i] = lta[i] - ltb[i];
    }
    std::int64_t c =
        (static_cast<std::int64_t>(A.terms().rbegin()->second) * lcb_inv) % p;
    MultiPoly t = MultiPoly::monomial(A.nvars(), quot, Int(c));
    q += t;
    A = reduce_mod_p(A - t * B, p);
  }
  return q;
}

MultiPoly gcd_mod_impl(MultiPoly P, MultiPoly Q, std::int64_t p);

// gcd of the var-degree coefficients of A (its content w.r.t. var).
MultiPoly content_in(const MultiPoly& A, int var, std::int64_t p) {
  std::vector<MultiPoly> cs = A.coeffs_in(var);
  MultiPoly g(A.nvars());
  for (const auto& c : cs) {
    if (c.is_zero()) continue;
    g = g.is_zero() ? monic_mod(c, p) : gcd_mod_impl(g, c, p);
    if (g.is_constant()) break;
  }
  return g;
}

// Pseudo-remainder of A by B in variable var (both reduced, deg_var(B)>=1).
MultiPoly prem(MultiPoly A, const MultiPoly& B, int var, std::int64_t p) {
  int db = B.degree_in(var);
  std::vector<MultiPoly> bc = B.coeffs_in(var);
  const MultiPoly& lcb = bc[static_cast<size_t>(db)];
  while (!A.is_zero() && A.degree_in(var) >= db) {
    int da = A.degree_in(var);
    std::vector<MultiPoly> ac = A.coeffs_in(var);
    const MultiPoly& lca = ac[static_cast<size_t>(da)];
    // A <- lcb*A - lca*var^(da-db)*B
    MultiPoly shift = MultiPoly::variable(A.nvars(), var)
                          .pow(static_cast<unsigned>(da - db));
    A = reduce_mod_p(lcb * A - lca * shift * B, p);
  }
  return A;
}

MultiPoly gcd_mod_impl(MultiPoly P, MultiPoly Q, std::int64_t p) {
  if (P.is_zero()) return Q.is_zero() ? Q : monic_mod(Q, p);
  if (Q.is_zero()) return monic_mod(P, p);
  if (P.is_constant() || Q.is_constant())
    return MultiPoly::constant(P.nvars(), 1);

  int vp = highest_var(P);
  int vq = highest_var(Q);
  int v = std::max(vp, vq);
  if (vp != v) {
    // P is free of v, so any common divisor is too: pass to Q's content.
    return gcd_mod_impl(P, content_in(Q, v, p), p);
  }
  if (vq != v) {
    return gcd_mod_impl(content_in(P, v, p), Q, p);
  }

  MultiPoly contP = content_in(P, v, p);
  MultiPoly contQ = content_in(Q, v, p);
  MultiPoly ppP = divide_exact_mod(P, contP, p);
  MultiPoly ppQ = divide_exact_mod(Q, contQ, p);
  MultiPoly g_cont = gcd_mod_impl(contP, contQ, p);

  MultiPoly A = std::move(ppP);
  MultiPoly B = std::move(ppQ);
  if (A.degree_in(v) < B.degree_in(v)) std::swap(A, B);
  while (!B.is_zero() && B.degree_in(v) >= 1) {
    MultiPoly R = prem(A, B, v, p);
    A = std::move(B);
    if (R.is_zero()) {
      B = MultiPoly(A.nvars());
    } else {
      MultiPoly cont = content_in(R, v, p);
      B = divide_exact_mod(R, cont, p);
    }
  }
  MultiPoly pp_gcd;
  if (B.is_zero()) {
    // Chain ended while A still carries v: A is the primitive gcd part.
    MultiPoly cont = content_in(A, v, p);
    pp_gcd = divide_exact_mod(A, cont, p);
  } else {
    // Remainder dropped to v-degree 0: the primitive parts are coprime.
    pp_gcd = MultiPoly::constant(P.nvars(), 1);
  }
  return monic_mod(mul_mod(g_cont, pp_gcd, p), p);
}

}  // namespace

MultiPoly reduce_mod_p(const MultiPoly& P, std::int64_t p) {
  if (p <= 1) throw PreconditionError("reduce_mod_p: modulus must exceed 1");
  MultiPoly r(P.nvars());
  for (const auto& [m, c] : P.terms()) {
    Int v = c % p;
    if (v < 0) v += p;
    if (v != 0) r += MultiPoly::monomial(P.nvars(), m, v);
  }
  return r;
}

MultiPoly gcd_mod_p(const MultiPoly& P, const MultiPoly& Q, std::int64_t p) {
  MultiPoly rp = reduce_mod_p(P, p);
  MultiPoly rq = reduce_mod_p(Q, p);
  if (rp.is_zero() && rq.is_zero())
    throw PreconditionError("gcd_mod_p: both polynomials vanish mod p");
  return gcd_mod_impl(std::move(rp), std::move(rq), p);
}

bool coprime_mod_p(const MultiPoly& P, const MultiPoly& Q, std::int64_t p) {
  MultiPoly rp = reduce_mod_p(P, p);
  MultiPoly rq = reduce_mod_p(Q, p);
  if (rp.is_zero() || rq.is_zero())
    throw PreconditionError("coprime_mod_p: a polynomial vanishes mod p");
  return gcd_mod_impl(std::move(rp), std::move(rq), p).is_constant();
}

bool pairwise_coprime_mod_p(const std::vector<MultiPoly>& polys,
                            std::int64_t p) {
  for (size_t i = 0; i < polys.size(); ++i)
    for (size_t j = i + 1; j < polys.size(); ++j)
      if (!coprime_mod_p(polys[i], polys[j], p)) return false;
  return true;
}

bool jointly_coprime_mod_p(const std::vector<MultiPoly>& polys,
                           std::int64_t p) {
  if (polys.empty())
    throw PreconditionError("jointly_coprime_mod_p: empty family");
  MultiPoly g = reduce_mod_p(polys.front(), p);
  if (g.is_zero())
    throw PreconditionError("jointly_coprime_mod_p: member vanishes mod p");
  for (size_t i = 1; i < polys.size() && !g.is_constant(); ++i)
    g = gcd_mod_p(g, polys[i], p);
  return g.is_constant();
}

namespace {

// Smallest variable in which R (already reduced mod p) is benignly linear:
// R = C1*x_i + C0 with C1 != 0 and gcd(C1, C0) a unit.
int benign_linear_var(const MultiPoly& R, std::int64_t p) {
  for (int v = 0; v < R.nvars(); ++v) {
    if (R.degree_in(v) != 1) continue;
    std::vector<MultiPoly> cs = R.coeffs_in(v);
    const MultiPoly& c1 = cs[1];
    const MultiPoly& c0 = cs[0];
    if (c1.is_zero()) continue;  // unreachable given degree check
    bool ok;
    if (c0.is_zero()) {
      ok = c1.is_constant();  // gcd(C1, 0) = C1 must be a unit
    } else if (c1.is_constant() || c0.is_constant()) {
      ok = true;
    } else {
      ok = coprime_mod_p(c1, c0, p);
    }
    if (ok) return v;
  }
  return -1;
}

}  // namespace

ClassifyResult classify_prime(const std::vector<MultiPoly>& polys,
                              std::int64_t p) {
  if (polys.empty())
    throw PreconditionError("classify_prime: empty family");
  ClassifyResult out;
  out.linear_var.assign(polys.size(), -1);

  std::vector<MultiPoly> red;
  red.reserve(polys.size());
  for (size_t j = 0; j < polys.size(); ++j) {
    red.push_back(reduce_mod_p(polys[j], p));
    if (red.back().is_zero()) {
      out.cls = PrimeClass::Terrible;
      std::ostringstream os;
      os << "P_" << (j + 1) << " vanishes identically mod " << p;
      out.note = os.str();
      return out;
    }
  }

  out.pairwise_coprime = pairwise_coprime_mod_p(red, p);
  out.jointly_coprime = jointly_coprime_mod_p(red, p);

  bool all_linear = true;
  for (size_t j = 0; j < red.size(); ++j) {
    out.linear_var[j] = benign_linear_var(red[j], p);
    if (out.linear_var[j] < 0) all_linear = false;
  }

  if (out.pairwise_coprime && all_linear) {
    out.cls = PrimeClass::Good;
    out.note = "pairwise coprime, all members benignly linear";
  } else {
    out.cls = PrimeClass::Bad;
    out.note = out.pairwise_coprime
                   ? "some member lacks a benign linear variable"
                   : "reductions are not pairwise coprime";
  }
  return out;
}

std::vector<PrimeScanRow> classify_primes_in_range(
    const std::vector<MultiPoly>& polys, std::int64_t p_min,
    std::int64_t p_max, bool keep_good) {
  if (p_max > 1000000)
    throw BudgetError("classify_primes_in_range: cap is 1e6");
  auto is_prime = [](std::int64_t n) {
    if (n < 2) return false;
    for (std::int64_t d = 2; d * d <= n; ++d)
      if (n % d == 0) return false;
    return true;
  };
  std::vector<PrimeScanRow> rows;
  for (std::int64_t p = std::max<std::int64_t>(2, p_min); p <= p_max; ++p) {
    if (!is_prime(p)) continue;
    ClassifyResult r = classify_prime(polys, p);
    if (keep_good || r.cls != PrimeClass::Good)
      rows.push_back({p, std::move(r)});
  }
  return rows;
}

}  // namespace polyprog
