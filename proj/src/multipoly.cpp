#include "polyprog/multipoly.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace polyprog {

MultiPoly::MultiPoly(int nvars) : nvars_(nvars) {
  if (nvars < 0) throw PreconditionError("MultiPoly: negative variable count");
}

MultiPoly MultiPoly::constant(int nvars, Int c) {
  MultiPoly p(nvars);
  if (c != 0) p.terms_.emplace(Monomial(nvars, 0), std::move(c));
  return p;
}

MultiPoly MultiPoly::variable(int nvars, int index) {
  if (index < 0 || index >= nvars)
    throw PreconditionError("MultiPoly::variable: index out of range");
  Monomial m(nvars, 0);
  m[static_cast<size_t>(index)] = 1;
  return monomial(nvars, std::move(m), 1);
}

MultiPoly MultiPoly::monomial(int nvars, Monomial exps, Int coeff) {
  if (static_cast<int>(exps.size()) != nvars)
    throw PreconditionError("MultiPoly::monomial: exponent arity mismatch");
  MultiPoly p(nvars);
  if (coeff != 0) p.terms_.emplace(std::move(exps), std::move(coeff));
  return p;
}

bool MultiPoly::is_constant() const {
  if (terms_.empty()) return true;
  return terms_.size() == 1 && total_degree() == 0;
}

Int MultiPoly::constant_value() const {
  if (terms_.empty()) return 0;
  if (!is_constant())
    throw PreconditionError("constant_value: polynomial is not constant");
  return terms_.begin()->second;
}

Int MultiPoly::coeff(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Int(0) : it->second;
}

void MultiPoly::normalize() {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (it->second == 0)
      it = terms_.erase(it);
    else
      ++it;
  }
}

MultiPoly MultiPoly::operator-() const {
  MultiPoly r(nvars_);
  for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
  return r;
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& o) {
  if (nvars_ != o.nvars_)
    throw PreconditionError("MultiPoly +: arity mismatch");
  for (const auto& [m, c] : o.terms_) {
    auto [it, fresh] = terms_.try_emplace(m, c);
    if (!fresh) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }
  return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& o) {
  if (nvars_ != o.nvars_)
    throw PreconditionError("MultiPoly -: arity mismatch");
  for (const auto& [m, c] : o.terms_) {
    auto [it, fresh] = terms_.try_emplace(m, -c);
    if (!fresh) {
      it->second -= c;
      if (it->second == 0) terms_.erase(it);
    }
  }
  return *this;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
  if (a.nvars_ != b.nvars_)
    throw PreconditionError("MultiPoly *: arity mismatch");
  MultiPoly r(a.nvars_);
  Monomial m(static_cast<size_t>(a.nvars_), 0);
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      for (size_t i = 0; i < m.size(); ++i) m[i] = ma[i] + mb[i];
      auto [it, fresh] = r.terms_.try_emplace(m, Int(0));
      it->second += ca * cb;
      (void)fresh;
    }
  }
  r.normalize();
  return r;
}

MultiPoly& MultiPoly::operator*=(const MultiPoly& o) {
  *this = *this * o;
  return *this;
}

MultiPoly MultiPoly::scaled(const Int& c) const {
  MultiPoly r(nvars_);
  if (c == 0) return r;
  for (const auto& [m, v] : terms_) r.terms_.emplace(m, v * c);
  return r;
}

MultiPoly MultiPoly::pow(unsigned e) const {
  MultiPoly acc = MultiPoly::constant(nvars_, 1);
  MultiPoly base = *this;
  while (e > 0) {
    if (e & 1u) acc = acc * base;
    e >>= 1u;
    if (e > 0) base = base * base;
  }
  return acc;
}

int MultiPoly::total_degree() const {
  if (terms_.empty()) return kNegInfDegree;
  // Graded order: the last term has maximal total degree.
  const Monomial& m = terms_.rbegin()->first;
  std::uint64_t d = 0;
  for (auto e : m) d += e;
  return static_cast<int>(d);
}

int MultiPoly::degree_in(int var) const {
  if (var < 0 || var >= nvars_)
    throw PreconditionError("degree_in: variable out of range");
  if (terms_.empty()) return kNegInfDegree;
  std::uint32_t d = 0;
  for (const auto& [m, c] : terms_)
    d = std::max(d, m[static_cast<size_t>(var)]);
  return static_cast<int>(d);
}

MultiPoly MultiPoly::substitute(const std::vector<MultiPoly>& images) const {
  if (static_cast<int>(images.size()) != nvars_)
    throw PreconditionError("substitute: image count != arity");
  int out_vars = nvars_ == 0 ? 0 : images.front().nvars();
  for (const auto& im : images)
    if (im.nvars() != out_vars)
      throw PreconditionError("substitute: images live in different rings");
  MultiPoly result(out_vars);
  for (const auto& [m, c] : terms_) {
    MultiPoly term = MultiPoly::constant(out_vars, c);
    for (int v = 0; v < nvars_; ++v) {
      std::uint32_t e = m[static_cast<size_t>(v)];
      if (e > 0) term = term * images[static_cast<size_t>(v)].pow(e);
    }
    result += term;
  }
  return result;
}

MultiPoly MultiPoly::remap(int new_nvars,
                           const std::vector<int>& var_map) const {
  if (static_cast<int>(var_map.size()) != nvars_)
    throw PreconditionError("remap: map arity mismatch");
  MultiPoly r(new_nvars);
  Monomial nm;
  for (const auto& [m, c] : terms_) {
    nm.assign(static_cast<size_t>(new_nvars), 0);
    for (int v = 0; v < nvars_; ++v) {
      std::uint32_t e = m[static_cast<size_t>(v)];
      if (e == 0) continue;
      int t = var_map[static_cast<size_t>(v)];
      if (t < 0 || t >= new_nvars)
        throw PreconditionError("remap: target variable out of range");
      nm[static_cast<size_t>(t)] += e;
    }
    auto [it, fresh] = r.terms_.try_emplace(nm, Int(0));
    it->second += c;
    (void)fresh;
  }
  r.normalize();
  return r;
}

Int MultiPoly::eval(const std::vector<Int>& point) const {
  if (static_cast<int>(point.size()) != nvars_)
    throw PreconditionError("eval: point arity mismatch");
  Int total = 0;
  for (const auto& [m, c] : terms_) {
    Int t = c;
    for (int v = 0; v < nvars_; ++v) {
      for (std::uint32_t k = 0; k < m[static_cast<size_t>(v)]; ++k)
        t *= point[static_cast<size_t>(v)];
    }
    total += t;
  }
  return total;
}

std::int64_t MultiPoly::eval_mod(const std::vector<std::int64_t>& point,
                                 std::int64_t p) const {
  if (static_cast<int>(point.size()) != nvars_)
    throw PreconditionError("eval_mod: point arity mismatch");
  if (p <= 1) throw PreconditionError("eval_mod: modulus must exceed 1");
  std::int64_t total = 0;
  for (const auto& [m, c] : terms_) {
    std::int64_t t = static_cast<std::int64_t>(c % p);
    if (t < 0) t += p;
    for (int v = 0; v < nvars_; ++v) {
      std::int64_t x = point[static_cast<size_t>(v)] % p;
      if (x < 0) x += p;
      for (std::uint32_t k = 0; k < m[static_cast<size_t>(v)]; ++k)
        t = (t * x) % p;
    }
    total = (total + t) % p;
  }
  return total;
}

std::vector<MultiPoly> MultiPoly::coeffs_in(int var) const {
  if (var < 0 || var >= nvars_)
    throw PreconditionError("coeffs_in: variable out of range");
  int d = degree_in(var);
  std::vector<MultiPoly> out;
  if (d == kNegInfDegree) return out;
  out.assign(static_cast<size_t>(d) + 1, MultiPoly(nvars_));
  for (const auto& [m, c] : terms_) {
    Monomial stripped = m;
    std::uint32_t e = stripped[static_cast<size_t>(var)];
    stripped[static_cast<size_t>(var)] = 0;
    out[e].terms_.emplace(std::move(stripped), c);
  }
  return out;
}

MultiPoly MultiPoly::from_coeffs_in(int var,
                                    const std::vector<MultiPoly>& coeffs,
                                    int nvars) {
  MultiPoly r(nvars);
  MultiPoly x = MultiPoly::variable(nvars, var);
  for (size_t k = 0; k < coeffs.size(); ++k) {
    if (coeffs[k].is_zero()) continue;
    r += coeffs[k] * x.pow(static_cast<unsigned>(k));
  }
  return r;
}

std::string MultiPoly::str(const std::vector<std::string>& names) const {
  if (static_cast<int>(names.size()) < nvars_)
    throw PreconditionError("str: not enough variable names");
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  // Print highest-degree terms first for readability.
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [m, c] = *it;
    Int a = c;
    if (first) {
      if (a < 0) {
        os << "-";
        a = -a;
      }
    } else {
      os << (a < 0 ? " - " : " + ");
      if (a < 0) a = -a;
    }
    first = false;
    bool printed = false;
    std::uint64_t deg = 0;
    for (auto e : m) deg += e;
    if (a != 1 || deg == 0) {
      os << a;
      printed = true;
    }
    for (int v = 0; v < nvars_; ++v) {
      std::uint32_t e = m[static_cast<size_t>(v)];
      if (e == 0) continue;
      if (printed) os << "*";
      os << names[static_cast<size_t>(v)];
      if (e > 1) os << "^" << e;
      printed = true;
    }
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Parser: expr := term (('+'|'-') term)* ; term := factor ('*' factor)* ;
// factor := atom ('^' uint)? ; atom := int | ident | '(' expr ')' | '-'factor
// ---------------------------------------------------------------------------

namespace {

struct Parser {
  const std::string& s;
  size_t pos = 0;
  const std::vector<std::string>* names;

  void skip() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
      ++pos;
  }
  bool eat(char c) {
    skip();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& msg) {
    throw PreconditionError("parse_poly: " + msg + " at offset " +
                            std::to_string(pos) + " in \"" + s + "\"");
  }

  MultiPoly expr() {
    MultiPoly acc = term();
    for (;;) {
      skip();
      if (eat('+')) {
        acc += term();
      } else if (eat('-')) {
        acc -= term();
      } else {
        return acc;
      }
    }
  }

  MultiPoly term() {
    MultiPoly acc = factor();
    for (;;) {
      skip();
      if (eat('*')) {
        acc = acc * factor();
      } else if (pos < s.size() &&
                 (s[pos] == '(' || s[pos] == '_' ||
                  std::isalpha(static_cast<unsigned char>(s[pos])))) {
        // Implicit multiplication: "2m", "3(m+1)", "h1 h2".
        acc = acc * factor();
      } else {
        return acc;
      }
    }
  }

  MultiPoly factor() {
    MultiPoly base = atom();
    skip();
    if (eat('^')) {
      skip();
      if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos])))
        fail("expected a non-negative integer exponent");
      unsigned long e = 0;
      while (pos < s.size() &&
             std::isdigit(static_cast<unsigned char>(s[pos]))) {
        e = e * 10 + static_cast<unsigned long>(s[pos] - '0');
        if (e > 1000000) fail("exponent too large");
        ++pos;
      }
      return base.pow(static_cast<unsigned>(e));
    }
    return base;
  }

  MultiPoly atom() {
    skip();
    if (pos >= s.size()) fail("unexpected end of input");
    char c = s[pos];
    if (c == '(') {
      ++pos;
      MultiPoly inner = expr();
      if (!eat(')')) fail("expected ')'");
      return inner;
    }
    if (c == '-') {
      ++pos;
      return -factor();
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string digits;
      while (pos < s.size() &&
             std::isdigit(static_cast<unsigned char>(s[pos])))
        digits.push_back(s[pos++]);
      return MultiPoly::constant(static_cast<int>(names->size()), Int(digits));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string ident;
      while (pos < s.size() &&
             (std::isalnum(static_cast<unsigned char>(s[pos])) ||
              s[pos] == '_'))
        ident.push_back(s[pos++]);
      for (size_t i = 0; i < names->size(); ++i) {
        if ((*names)[i] == ident)
          return MultiPoly::variable(static_cast<int>(names->size()),
                                     static_cast<int>(i));
      }
      fail("unknown variable '" + ident + "'");
    }
    fail("unexpected character");
  }
};

// Pre-scan for identifiers so the ring arity is known before parsing.
void collect_idents(const std::string& text, std::vector<std::string>& names) {
  size_t pos = 0;
  while (pos < text.size()) {
    char c = text[pos];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string ident;
      while (pos < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[pos])) ||
              text[pos] == '_'))
        ident.push_back(text[pos++]);
      if (std::find(names.begin(), names.end(), ident) == names.end())
        names.push_back(ident);
    } else {
      ++pos;
    }
  }
}

}  // namespace

MultiPoly parse_poly(const std::string& text,
                     const std::vector<std::string>& names) {
  Parser p{text, 0, &names};
  MultiPoly r = p.expr();
  p.skip();
  if (p.pos != text.size()) p.fail("trailing input");
  return r;
}

MultiPoly parse_poly_auto(const std::string& text,
                          std::vector<std::string>& names) {
  collect_idents(text, names);
  return parse_poly(text, names);
}

// ---------------------------------------------------------------------------
// Resultant via Sylvester determinant
// ---------------------------------------------------------------------------

namespace {

// Determinant by minor expansion over column subsets (rows processed in
// order). Entry count stays small (matrix dimension <= 16 guard), and all
// arithmetic is exact, so this is simpler than fraction-free elimination.
MultiPoly subset_determinant(const std::vector<std::vector<MultiPoly>>& a,
                             int n, int nvars) {
  // dp maps a bitmask of used columns to the determinant of the top-left
  // |mask| x mask submatrix.
  std::vector<MultiPoly> dp(static_cast<size_t>(1) << n, MultiPoly(nvars));
  dp[0] = MultiPoly::constant(nvars, 1);
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    int row = __builtin_popcount(mask) - 1;
    MultiPoly acc(nvars);
    int seen = 0;
    for (int col = 0; col < n; ++col) {
      if (!(mask & (1u << col))) continue;
      const MultiPoly& entry = a[static_cast<size_t>(row)]
                                [static_cast<size_t>(col)];
      if (!entry.is_zero()) {
        MultiPoly contrib = entry * dp[mask & ~(1u << col)];
        if ((row + seen) % 2 == 0)
          acc += contrib;
        else
          acc -= contrib;
      }
      ++seen;
    }
    dp[mask] = std::move(acc);
  }
  return dp[(static_cast<size_t>(1) << n) - 1];
}

}  // namespace

MultiPoly resultant(const MultiPoly& P, const MultiPoly& Q, int var, int dP,
                    int dQ) {
  if (P.nvars() != Q.nvars())
    throw PreconditionError("resultant: arity mismatch");
  if (dP < 1 || dQ < 1)
    throw PreconditionError("resultant: formal degrees must be >= 1");
  if (P.degree_in(var) > dP || Q.degree_in(var) > dQ)
    throw PreconditionError("resultant: formal degree below actual degree");
  int n = dP + dQ;
  if (n > 16) throw BudgetError("resultant: Sylvester dimension exceeds 16");
  int nv = P.nvars();

  auto pad = [&](const MultiPoly& f, int d) {
    std::vector<MultiPoly> cs = f.coeffs_in(var);
    cs.resize(static_cast<size_t>(d) + 1, MultiPoly(nv));
    return cs;  // cs[k] = coefficient of var^k
  };
  std::vector<MultiPoly> pc = pad(P, dP);
  std::vector<MultiPoly> qc = pad(Q, dQ);

  // Sylvester matrix: dP rows of Q's coefficients then dQ rows of P's,
  // rows shifted right by the row index, coefficients listed from the
  // formal leading coefficient downward.  This row order fixes the sign
  // convention resultant(a+bx, c+dx) = ad - bc.
  std::vector<std::vector<MultiPoly>> m(
      static_cast<size_t>(n),
      std::vector<MultiPoly>(static_cast<size_t>(n), MultiPoly(nv)));
  for (int r = 0; r < dP; ++r)
    for (int k = 0; k <= dQ; ++k)
      m[static_cast<size_t>(r)][static_cast<size_t>(r + k)] =
          qc[static_cast<size_t>(dQ - k)];
  for (int r = 0; r < dQ; ++r)
    for (int k = 0; k <= dP; ++k)
      m[static_cast<size_t>(dP + r)][static_cast<size_t>(r + k)] =
          pc[static_cast<size_t>(dP - k)];
  return subset_determinant(m, n, nv);
}

MultiPoly resultant(const MultiPoly& P, const MultiPoly& Q, int var) {
  int dP = P.degree_in(var);
  int dQ = Q.degree_in(var);
  if (dP < 1 && dQ < 1)
    throw PreconditionError(
        "resultant: neither polynomial involves the variable");
  return resultant(P, Q, var, std::max(dP, 1), std::max(dQ, 1));
}

}  // namespace polyprog
