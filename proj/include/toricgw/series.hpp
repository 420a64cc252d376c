// Hypergeometric series engine.
//
// Builds the exact q-power-series (coefficients in factored rational
// functions of A, alpha, hbar) attached to a toric pair and a split bundle,
// and derives from them:
//   * the differentiation tower D^p / its equivariant lift, together with
//     the structure coefficients C, C-tilde extracted from its hbar
//     expansion;
//   * the transformed series Y_p built from the tower;
//   * mirror-map data (unit series I0, change-of-variable exponents f_i,
//     scalar shift G, equivariant shifts g_j) plus independent closed-form
//     evaluations of the same quantities used as cross-checks;
//   * the projective-space specialisation (one Novikov variable) where the
//     whole tower collapses to a single-variable recursion.
#pragma once

#include <map>
#include <tuple>
#include <utility>
#include <vector>

#include "toricgw/factored.hpp"
#include "toricgw/laurent.hpp"
#include "toricgw/novikov.hpp"
#include "toricgw/toric.hpp"

namespace toricgw {

// ---------------------------------------------------------------------------
// Bundle data
// ---------------------------------------------------------------------------

// Split bundle E = E+ (+) E-: each summand is a line bundle whose class is a
// vector in the basis dual to the degree lattice; column i of `ellPlus`
// (size k) is the class of the i-th positive summand, likewise `ellMinus`.
struct BundleSpec {
  std::vector<std::vector<long>> ellPlus;   // a columns, each of size k
  std::vector<std::vector<long>> ellMinus;  // b columns, each of size k

  long a() const { return static_cast<long>(ellPlus.size()); }
  long b() const { return static_cast<long>(ellMinus.size()); }
};

// Per-degree integer data: D[j] = <column j of M, d>, Lplus[i], Lminus[i]
// are the pairings of the bundle classes with d, and nu is the virtual-rank
// shift  sum_j D_j - sum_i L+_i + sum_i L-_i.
struct DegreeData {
  std::vector<long> D;
  std::vector<long> Lplus;
  std::vector<long> Lminus;
  long nu = 0;
};

DegreeData degree_data(const ToricPair& tp, const BundleSpec& bundle,
                       const Deg& d);

// Checks the sign conditions on the effective-cone generators:
// each positive summand pairs >= 0 with every generator and > 0 with at
// least one; each negative summand pairs < 0 with every generator.  With
// `requireNuNonneg`, additionally nu >= 0 on every generator (else
// NuNegative).  Throws ConfigError on shape mismatches, ValidationFailure
// on sign violations.
void validate_bundle(const ToricData& td, const BundleSpec& bundle,
                     bool requireNuNonneg);

// ---------------------------------------------------------------------------
// Series families
// ---------------------------------------------------------------------------

// The four hypergeometric families.  "Ycheck": positive-summand product
// s = 1..L+, negative-summand product s = 0..-L--1.  "Yhat2": positive
// product s = 0..L+-1, negative product s = 1..-L-.  "Yhatbundle": both
// products start at s = 1 (ranges L+ and -L-).  "Ystar": like Yhatbundle
// but the negative product stops at -L--1, and the sum omits degree zero.
enum class SeriesFamily { Ycheck, Yhat2, Yhatbundle, Ystar };

// Exact coefficient of q^d.  Equivariant coefficients use the shifted
// linear forms (sum_i m_ij A_i - alpha_j + s hbar) over all j; the
// nonequivariant ones split the product by the sign of D_j.
FRF series_coefficient(const ToricPair& tp, const BundleSpec& bundle,
                       SeriesFamily family, const Deg& d, bool equivariant);

// Novikov context whose weight vector is the primitive functional positive
// on the effective cone.
NovCtx make_ctx(const ToricData& td, long cutoff);

// Truncated series over all effective-cone lattice points of weight
// <= ctx.cutoff.  Warns on stderr if some cone generator has nu < 0 (the
// series itself is still well defined).
Nov<FRF> build_series(const ToricData& td, const BundleSpec& bundle,
                      SeriesFamily family, bool equivariant,
                      const NovCtx& ctx);

// Restriction of a coefficient series to a torus fixed point: substitutes
// A_i -> x_i(I) (polynomials in alpha) for i = 0..k-1.
Nov<FRF> restrict_to_fixed_point(const Nov<FRF>& s, const FixedPoint& fp,
                                 long k);

// Multi-index enumeration, sorted by (norm, lexicographic).
std::vector<Deg> exponents_up_to(long k, int nmax);
std::vector<Deg> exponents_of_norm(long k, int n);
int norm_of(const Deg& p);

// ---------------------------------------------------------------------------
// Differentiation tower
// ---------------------------------------------------------------------------

// For the series Y (alpha killed if the tower is equivariant) the tower
// holds, for every multi-index p with |p| <= pmax:
//   * main.at(p): the transformed series D^p Y (equivariant lift when
//     `equivariant`), normalised so its q^0 coefficient is A^p;
//   * reduced.at(p): the same construction applied to Y|alpha=0 (equal to
//     main when the tower is nonequivariant);
//   * the level matrices J (leading endomorphism) and c = J^{-1} computed
//     from the reduced series;
//   * the extracted expansion coefficients  C[(p,s,r)] (coefficient of
//     A^r hbar^{|p|-s} in main) and Cnon for reduced, for 0 <= s <= smax;
//   * the triangular-solve coefficients Ct[(p,r,s)] (r >= 1; r = 0 is the
//     Kronecker delta and not stored), and CtNon likewise.
struct DpTower {
  long k = 0;
  int pmax = 0;
  int smax = 0;
  bool equivariant = false;
  NovCtx ctx;
  std::vector<Deg> plist;  // all |p| <= pmax, sorted (norm, lex)

  Nov<Rat> I0;  // unit part of the reduced series (constant term 1)

  std::map<Deg, Nov<FRF>> main;
  std::map<Deg, Nov<FRF>> reduced;

  // level -> matrix entries keyed (row r, column p), |r| = |p| = level
  std::vector<std::map<std::pair<Deg, Deg>, Nov<Rat>>> J;
  std::vector<std::map<std::pair<Deg, Deg>, Nov<Rat>>> c;

  std::map<std::tuple<Deg, int, Deg>, Nov<FRF>> C;     // (p, s, r)
  std::map<std::tuple<Deg, int, Deg>, Nov<Rat>> Cnon;  // (p, s, r)
  std::map<std::tuple<Deg, int, Deg>, Nov<FRF>> Ct;    // (p, r, s), r >= 1
  std::map<std::tuple<Deg, int, Deg>, Nov<Rat>> CtNon;

  // Looks up C / Ct with absent keys meaning zero.
  Nov<FRF> getC(const Deg& p, int s, const Deg& r) const;
  Nov<Rat> getCnon(const Deg& p, int s, const Deg& r) const;
  Nov<FRF> getCt(const Deg& p, int r, const Deg& s) const;
  Nov<Rat> getCtNon(const Deg& p, int r, const Deg& s) const;
};

// Builds the tower for the given family.  Requires the q^0 coefficient of
// the family to be 1 (JNotInvertible otherwise) and nu >= 0 on the cone
// generators (NuNegative otherwise).
DpTower dp_tower(const ToricData& td, const BundleSpec& bundle,
                 SeriesFamily family, bool equivariant, int pmax,
                 const NovCtx& ctx);

// The transformed one-point series
//   Y_p = D^p Y + sum_{r=1}^{|p|} sum_{|s| <= |p|-r} Ct[(p,r,s)]
//                   hbar^{|p|-r-|s|} D^s Y.
Nov<FRF> y_p_transform(const DpTower& tower, const Deg& p);

// ---------------------------------------------------------------------------
// Mirror data
// ---------------------------------------------------------------------------

struct MirrorData {
  long k = 0;
  long N = 0;
  Nov<Rat> I0check;           // unit series of the Ycheck family
  Nov<Rat> I0hat;             // unit series of the Yhat2 family
  std::vector<Nov<Rat>> f;    // k series, zero constant term
  Nov<Rat> G;                 // zero constant term
  std::vector<Nov<Rat>> g;    // N series, zero constant term
  Nov<Rat> f0;                // populated only when b == 1
  bool hasF0 = false;
};

// Extracts I0 / f_i / G / g_j from the residue part (hbar^{-1} coefficient)
// of the equivariant check series, and f0 (when b == 1) from its
// combinatorial formula.  Enforces nu >= 0 on the cone generators.
MirrorData mirror_data(const ToricData& td, const BundleSpec& bundle,
                       const NovCtx& ctx);

// Independent closed-form evaluations (combinatorial sums over nu = 0
// degrees) used to cross-check mirror_data.
Nov<Rat> i0_closed_form(const ToricData& td, const BundleSpec& bundle,
                        bool hatted, const NovCtx& ctx);
std::vector<Nov<Rat>> f_closed_form(const ToricData& td,
                                    const BundleSpec& bundle,
                                    const NovCtx& ctx);
Nov<Rat> g_shift_closed_form(const ToricData& td, const BundleSpec& bundle,
                             const NovCtx& ctx);
Nov<Rat> f0_series(const ToricData& td, const BundleSpec& bundle,
                   const NovCtx& ctx);

enum class MirrorDirection { Forward, Inverse };

// Unit series U with the substitution q_i -> q_i * U_i(q) realising the
// change of variables: Forward sends a function of the flat variable to a
// function of the algebraic one (Q_i = q_i e^{f_i(q)}); Inverse undoes it.
std::vector<Nov<Rat>> mirror_units(const MirrorData& md, MirrorDirection dir,
                                   const NovCtx& ctx);

template <class C>
Nov<C> mirror_map(const MirrorData& md, MirrorDirection dir, const Nov<C>& s,
                  const NovCtx& ctx) {
  return nov_compose_units(s, mirror_units(md, dir, ctx), ctx);
}

// ---------------------------------------------------------------------------
// Projective-space specialisation
// ---------------------------------------------------------------------------

// For P^{n-1} with split-bundle weights (one Novikov variable, hyperplane
// variable w = A_0): the auxiliary function F(w, q), the renormalised
// iterates M^p F, and the unit series I_p = (M^p F)(0, q).
struct PnSpecial {
  long n = 0;
  long cutoff = 0;
  std::vector<std::vector<FRF>> MF;  // MF[p][d] = coefficient of q^d in M^p F
  std::vector<Nov<Rat>> I;           // I[p], p = 0..pmax
};

PnSpecial pn_special(long n, const std::vector<long>& ellPlus,
                     const std::vector<long>& ellMinus, int pmax,
                     long cutoff);

// I_p with the convention I_p = 1 for p < 0.
Nov<Rat> pn_unit(const PnSpecial& ps, int p);

}  // namespace toricgw
