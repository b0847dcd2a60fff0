// Sparse multivariate polynomials over Z with exact arithmetic.
//
// A MultiPoly is a map from exponent vectors to non-zero cpp_int
// coefficients, ordered graded-lexicographically. The variable count is
// fixed per polynomial; cross-arity operations are precondition errors.
// Degrees of the zero polynomial are the sentinel kNegInfDegree.
#pragma once

#include "polyprog/common.hpp"

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace polyprog {

using Monomial = std::vector<std::uint32_t>;

// Graded lexicographic order: first by total degree, then lexicographic on
// the exponent vector. Keeps leading terms meaningful for elimination.
struct GradedLexLess {
  bool operator()(const Monomial& a, const Monomial& b) const {
    std::uint64_t da = 0, db = 0;
    for (auto e : a) da += e;
    for (auto e : b) db += e;
    if (da != db) return da < db;
    return a < b;
  }
};

class MultiPoly {
 public:
  using TermMap = std::map<Monomial, Int, GradedLexLess>;
  static constexpr int kNegInfDegree = std::numeric_limits<int>::min();

  explicit MultiPoly(int nvars = 0);

  static MultiPoly constant(int nvars, Int c);
  static MultiPoly variable(int nvars, int index);
  static MultiPoly monomial(int nvars, Monomial exps, Int coeff);

  int nvars() const { return nvars_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  // Value of a constant polynomial (0 for the zero polynomial).
  Int constant_value() const;
  const TermMap& terms() const { return terms_; }
  Int coeff(const Monomial& m) const;
  std::size_t term_count() const { return terms_.size(); }

  MultiPoly operator-() const;
  MultiPoly& operator+=(const MultiPoly& o);
  MultiPoly& operator-=(const MultiPoly& o);
  MultiPoly& operator*=(const MultiPoly& o);
  friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
  friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
  MultiPoly scaled(const Int& c) const;
  MultiPoly pow(unsigned e) const;
  bool operator==(const MultiPoly& o) const {
    return nvars_ == o.nvars_ && terms_ == o.terms_;
  }
  bool operator!=(const MultiPoly& o) const { return !(*this == o); }

  int total_degree() const;
  int degree_in(int var) const;

  // Substitutes images[v] for variable v. All images must live in a common
  // ring whose arity is the arity of the result.
  MultiPoly substitute(const std::vector<MultiPoly>& images) const;

  // Reinterprets the polynomial in a ring with new_nvars variables, sending
  // old variable i to index var_map[i].
  MultiPoly remap(int new_nvars, const std::vector<int>& var_map) const;

  Int eval(const std::vector<Int>& point) const;
  // Evaluation in F_p; point entries and the result lie in [0, p).
  std::int64_t eval_mod(const std::vector<std::int64_t>& point,
                        std::int64_t p) const;

  // Coefficients of powers of `var`: result[k] is the coefficient of var^k,
  // a polynomial in the same ring with var-exponent zero everywhere.
  std::vector<MultiPoly> coeffs_in(int var) const;
  static MultiPoly from_coeffs_in(int var,
                                  const std::vector<MultiPoly>& coeffs,
                                  int nvars);

  // Rendering with the given variable names ("0" for the zero polynomial).
  std::string str(const std::vector<std::string>& names) const;

  // Removes zero-coefficient entries; used internally after arithmetic.
  void normalize();

 private:
  int nvars_;
  TermMap terms_;
};

// Parses "+ - * ^ ( )" expressions with integer literals and named
// variables. The ring is fixed by `names`; unknown identifiers are errors.
MultiPoly parse_poly(const std::string& text,
                     const std::vector<std::string>& names);

// As parse_poly, but unknown identifiers are appended to `names`, growing
// the ring. All previously parsed polynomials stay valid via remap.
MultiPoly parse_poly_auto(const std::string& text,
                          std::vector<std::string>& names);

// Resultant of P and Q with respect to `var`, computed as the determinant
// of the Sylvester matrix built with *formal* degrees dP and dQ (leading
// coefficients may be zero; dP >= deg_var(P), dQ >= deg_var(Q) required,
// dP, dQ >= 1). Entries are polynomials in the remaining variables.
MultiPoly resultant(const MultiPoly& P, const MultiPoly& Q, int var, int dP,
                    int dQ);

// Convenience overload using the actual degrees.
MultiPoly resultant(const MultiPoly& P, const MultiPoly& Q, int var);

}  // namespace polyprog
