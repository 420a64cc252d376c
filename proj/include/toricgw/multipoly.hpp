// Sparse exact multivariate polynomials over the rationals.
//
// Monomials are sorted (VarId, exponent) lists compared in pure lexicographic
// order with smaller VarId more significant; this is a genuine monomial order
// (1 is minimal, compatible with multiplication), which makes the greedy
// leading-term elimination in exact_div a terminating exact-divisibility test.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "toricgw/rational.hpp"
#include "toricgw/varid.hpp"

namespace toricgw {

using Mono = std::vector<std::pair<VarId, uint32_t>>;  // sorted by VarId

// Returns <0, 0, >0 like a three-way comparison; larger means later in the
// ascending map order (so the leading monomial of a polynomial is rbegin()).
int mono_cmp(const Mono& a, const Mono& b);

struct MonoLess {
  bool operator()(const Mono& a, const Mono& b) const {
    return mono_cmp(a, b) < 0;
  }
};

Mono mono_mul(const Mono& a, const Mono& b);
// a / b when every exponent of b fits inside a; nullopt otherwise.
std::optional<Mono> mono_div(const Mono& a, const Mono& b);
long mono_total_degree(const Mono& m);
uint32_t mono_deg_in(const Mono& m, VarId v);

class MultiPoly {
 public:
  using TermMap = std::map<Mono, Rat, MonoLess>;

  MultiPoly() = default;
  static MultiPoly constant(const Rat& c);
  static MultiPoly variable(VarId v, uint32_t e = 1);

  const TermMap& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }
  bool is_constant() const;
  // Zero polynomial reports constant value 0.
  Rat constant_value() const;

  MultiPoly operator-() const;
  MultiPoly operator+(const MultiPoly& o) const;
  MultiPoly operator-(const MultiPoly& o) const;
  MultiPoly operator*(const MultiPoly& o) const;
  MultiPoly operator*(const Rat& c) const;
  MultiPoly& operator+=(const MultiPoly& o);
  MultiPoly& operator-=(const MultiPoly& o);
  MultiPoly& operator*=(const MultiPoly& o) { return *this = *this * o; }
  MultiPoly& operator*=(const Rat& c);
  bool operator==(const MultiPoly& o) const { return t_ == o.t_; }

  MultiPoly pow(uint32_t e) const;

  // Exact division: returns q with *this == q * d, or nullopt when *this is
  // not a polynomial multiple of d. No GCDs; pure leading-term elimination.
  std::optional<MultiPoly> exact_div(const MultiPoly& d) const;

  MultiPoly subst(VarId v, const Rat& value) const;
  MultiPoly subst(VarId v, const MultiPoly& value) const;
  MultiPoly subst_many(const std::map<VarId, Rat>& values) const;
  // Sets every variable of the given kind to zero.
  MultiPoly kill_kind(VarKind k) const;

  MultiPoly derivative(VarId v) const;

  long total_degree() const;  // -1 for the zero polynomial
  uint32_t deg_in(VarId v) const;
  bool involves(VarId v) const { return deg_in(v) > 0; }
  bool involves_kind(VarKind k) const;

  // Total degree counting only variables of the given kinds; the polynomial
  // is homogeneous in those kinds iff all terms agree (zero -> any degree,
  // reported as nullopt distinct from "not homogeneous" via has_value flag
  // on the outer optional: zero returns degree 0 by convention).
  std::optional<long> homogeneous_degree(const std::vector<VarKind>& kinds)
      const;

  // Coefficient of v^e, collected as a polynomial in the other variables.
  MultiPoly coeff_of(VarId v, uint32_t e) const;
  // Splits into coefficients of powers of v: result[e] = coeff of v^e.
  std::map<uint32_t, MultiPoly> split_by_var(VarId v) const;
  // Groups terms by their sub-monomial in variables of the given kinds:
  // result[m] * m summed over the map reproduces *this.
  std::map<Mono, MultiPoly, MonoLess> split_by_kinds(
      const std::vector<VarKind>& kinds) const;

  // Content = gcd of numerators / lcm of denominators (positive); primitive
  // part has coprime integer coefficients. normalize() makes the leading
  // coefficient positive as well and returns the scalar s with
  // *this == s * primitive_signed_part.
  Rat content() const;
  std::pair<MultiPoly, Rat> normalized() const;

  Rat eval(const std::map<VarId, Rat>& values) const;

  std::string str() const;

  void add_term(const Mono& m, const Rat& c);  // accumulates, prunes zeros

 private:
  TermMap t_;
};

inline MultiPoly operator*(const Rat& c, const MultiPoly& p) { return p * c; }

// Convenience builders.
MultiPoly mp_var(VarId v);
MultiPoly mp_const(const Rat& c);
// c0 + sum coeffs[i] * vars[i]
MultiPoly mp_linear(const Rat& c0, const std::vector<Rat>& coeffs,
                    const std::vector<VarId>& vars);

}  // namespace toricgw
