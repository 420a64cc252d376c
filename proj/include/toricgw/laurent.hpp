// Laurent expansion of factored rational functions around h = infinity,
// residues at finite simple poles, and pole-regularity queries. These are the
// primitives behind "reduce mod h^{-1}", descendant-coefficient extraction,
// and the recursivity property tests.
#pragma once

#include <map>

#include "toricgw/factored.hpp"

namespace toricgw {

// Coefficients of h^p for lo <= p <= hi in the expansion of f at h = infinity
// (i.e. in descending powers of h). Coefficients never involve h. Every
// denominator factor involving h must be linear in h with constant leading
// h-coefficient — true for all series in this engine, which are products of
// linear forms. Exact: each reported coefficient is the true one.
std::map<int, FRF> laurent_expand(const FRF& f, VarId h, int lo, int hi);

// True when f, after reduction, has no denominator factor involving h other
// than (possibly) the pure monomial h itself when allow_pole_at_zero is set.
bool frf_regular_in(const FRF& f, VarId h, bool allow_pole_at_zero = false);

// f must have a pole of order exactly one at h = pole (pole free of h);
// returns the residue. Fails if the pole is absent or of higher order.
FRF residue_simple(const FRF& f, VarId h, const FRF& pole);

// Orders of the poles of f in the variable h: for each denominator factor
// c*h + L (after reduction), records the pole location -L/c with its
// multiplicity. A pure h factor yields pole location 0.
std::map<std::string, std::pair<FRF, int>> poles_in(const FRF& f, VarId h);

}  // namespace toricgw
