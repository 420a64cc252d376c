// Rational functions kept as (expanded numerator) / (multiset of canonical
// irreducible-in-practice factors). No multivariate GCDs anywhere: the only
// simplification is trial exact division of the numerator by denominator
// factors. Denominator factors are canonical: primitive integer coefficients,
// positive leading coefficient in the global variable order, non-constant.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "toricgw/multipoly.hpp"

namespace toricgw {

struct MPLess {
  bool operator()(const MultiPoly& a, const MultiPoly& b) const;
};

class FRF {
 public:
  FRF() = default;  // zero
  FRF(const Rat& c) : num_(MultiPoly::constant(c)) {}
  FRF(const MultiPoly& p) : num_(p) {}

  static FRF zero() { return FRF(); }
  static FRF one() { return FRF(Rat(1)); }

  const MultiPoly& num() const { return num_; }
  const std::map<MultiPoly, int, MPLess>& den() const { return den_; }

  bool is_zero() const { return num_.is_zero(); }
  // True when the denominator is trivial (a polynomial, possibly constant).
  bool is_polynomial() const { return den_.empty(); }
  bool is_constant() const { return den_.empty() && num_.is_constant(); }
  Rat constant_value() const;

  FRF operator-() const;
  FRF operator+(const FRF& o) const;
  FRF operator-(const FRF& o) const;
  FRF operator*(const FRF& o) const;
  FRF operator*(const Rat& c) const;
  FRF& operator+=(const FRF& o) { return *this = *this + o; }
  FRF& operator-=(const FRF& o) { return *this = *this - o; }
  FRF& operator*=(const FRF& o) { return *this = *this * o; }
  bool operator==(const FRF& o) const { return (*this - o).is_zero(); }

  // Multiplication/division by polynomials keeps the factored shape: the
  // divisor joins the denominator multiset (after canonical normalization)
  // rather than being expanded into anything.
  FRF& mul_poly(const MultiPoly& p);
  FRF& div_poly(const MultiPoly& p);
  FRF inverse() const;
  FRF operator/(const FRF& o) const { return *this * o.inverse(); }

  // Trial division of the numerator by denominator factors until no factor
  // divides. Called automatically by arithmetic.
  void reduce();

  FRF subst(VarId v, const Rat& value) const;
  FRF subst_many(const std::map<VarId, Rat>& values) const;
  // Substitutes a rational-function value for a variable.
  FRF subst(VarId v, const FRF& value) const;
  // Sets every variable of a kind to zero (denominator factors must stay
  // nonzero, else SeedCollision).
  FRF kill_kind(VarKind k) const;

  Rat eval(const std::map<VarId, Rat>& values) const;

  uint32_t deg_in(VarId v) const;  // max over numerator and den factors
  bool involves(VarId v) const;

  // If, taking each listed kind's variables to carry the listed weight and
  // everything else weight 0, numerator and all denominator factors are
  // homogeneous, returns deg(num) - deg(den); else nullopt.
  std::optional<long> homogeneous_degree(const std::vector<VarKind>& kinds)
      const;

  std::string str() const;

 private:
  MultiPoly num_;
  std::map<MultiPoly, int, MPLess> den_;

  void push_den(const MultiPoly& canonical_factor, int mult);
};

inline FRF operator*(const Rat& c, const FRF& f) { return f * c; }

// Builds Prod_i factors[i]^{exps[i]} (negative exponents allowed) times c, as
// an FRF, expanding only what lands in the numerator.
FRF frf_from_product(const Rat& c,
                     const std::vector<std::pair<MultiPoly, int>>& factors);

}  // namespace toricgw
