// Genus-0 one- and two-point generating functions.
//
// Combines the series engine's transformed one-point series with the
// mirror-map prefactor to produce the one-point functions Z_p, assembles
// two-point functions from them through a certified diagonal decomposition,
// produces the reduced two-point function Z* (no constant term) for split
// bundles with negative summands, and extracts individual numeric
// invariants.  Also carries the independent closed-form references: the
// bivariate hypergeometric two-point table for products of projective
// spaces and the classical golden-value formulas.
#pragma once

#include <map>
#include <tuple>
#include <utility>
#include <vector>

#include "toricgw/series.hpp"

namespace toricgw {

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

// Restrictions of a one-point function to the torus fixed points: entry i
// is the Novikov series at fixed point i, coefficients rational functions
// of hbar and alpha.
struct RestrictedSeries {
  std::vector<Nov<FRF>> atI;
};

// The two flavours of twist used by the one-point functions: "Check" pairs
// positive-summand factors s = 1..L+ with negative ones s = 0..-L--1,
// "Hat" the other way round.
enum class OnePointVariant { Check, Hat };

// Certified diagonal decomposition: sum_{p,s} g[p][s] x^p (x) x^s restricts
// to delta_{IJ} * eulerT(I) on the fixed-point pair (I, J).
struct DiagonalData {
  std::vector<Deg> basis;           // exponent vectors, one per basis class
  std::vector<std::vector<FRF>> g;  // g[p][s], alpha-symbolic
};

// Two-point function as restrictions to fixed-point pairs.  Values are
// rational in (hbar1, hbar2) with alpha symbolic.  When hasQ0 is set, the
// degree-zero entry carries the diagonal class with its explicit
// 1/(hbar1+hbar2) pole; numeric extraction is only defined for d != 0.
struct TwoPointSeries {
  int nfp = 0;
  NovCtx ctx;
  std::map<std::pair<int, int>, Nov<FRF>> val;
  bool hasQ0 = false;
};

// Shared assembly state: geometry, bundle, towers, mirror data, caches.
struct Assembly {
  ToricData td;
  BundleSpec bundle;
  NovCtx ctx;
  int pmax = 0;
  DpTower towerCheck;
  DpTower towerHat;
  MirrorData md;

  // lazily built pieces for the reduced two-point function (b >= 1)
  bool haveStar = false;
  Nov<FRF> ystar;        // no-constant-term family, equivariant
  DpTower towerBundle;   // tower of the both-products-from-1 family

  std::map<std::pair<int, Deg>, RestrictedSeries> onePointCache;
  std::map<Deg, RestrictedSeries> starCache;
  std::map<Deg, struct StarExpansion> expCache;
};

// Nonnegative-hbar data of the operator image of the no-constant-term
// family: raw = {A + hbar q d/dq}^p Y*, and the extracted coefficient
// series E[(s, r)] with  raw == sum_{s,r} E[(s,r)] A^r hbar^s  modulo
// strictly negative hbar powers.  Every E entry is a polynomial in alpha
// with |r| + s <= |p| - b (checked; in particular E is empty when
// |p| < b).
struct StarExpansion {
  Nov<FRF> raw;
  std::map<std::pair<int, Deg>, Nov<FRF>> E;
};

// Builds towers for both one-point variants up to |p| <= pmax and the
// mirror data.  Throws NuNegative if the bundle violates the rank
// condition on the effective cone.
Assembly make_assembly(const ToricData& td, const BundleSpec& bundle,
                       const NovCtx& ctx, int pmax);

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

// {A_i + hbar q_i d/dq_i}^p applied degree-by-degree.
Nov<FRF> apply_raw_ops(const Nov<FRF>& s, const Deg& p);

// One-point function Z_p(hbar, Q) as fixed-point restrictions: the
// exponential mirror prefactor times the transformed tower series, with
// the Novikov variable rewritten from the mirror coordinate q to the
// geometric one Q.  Cached per (variant, p).
const RestrictedSeries& z_one_point(Assembly& asmb, const Deg& p,
                                    OnePointVariant variant);

// Reduced one-point function Z*_p (no constant term) for bundles with
// b >= 1 negative summands.  Cached per p.
const RestrictedSeries& z_star_one_point(Assembly& asmb, const Deg& p);

// The raw operator image and its nonnegative-hbar expansion used by
// z_star_one_point (requires b >= 1).  Cached per p.
const StarExpansion& star_expansion(Assembly& asmb, const Deg& p);

// Product of the linear forms (ell . A) over the chosen summands: the
// Euler class of E+ (positive = true) or E- as a polynomial in the A's.
MultiPoly euler_class(const BundleSpec& bundle, bool positive, long k);

// Detects whether the pair is a product of projective spaces; on success
// fills `blocks` with the column indices of each factor.
bool product_of_projective_blocks(const ToricPair& tp,
                                  std::vector<std::vector<int>>& blocks);

// Certified diagonal: for products of projective spaces the
// elementary-symmetric closed form; otherwise the inverse of the Gram
// matrix of the supplied monomial basis (SingularPairing when the basis
// does not span).  Always validated against the delta_{IJ} * eulerT
// property before returning.
DiagonalData diagonal_data(const ToricData& td, const std::vector<Deg>& basis);

// The closed-form diagonal for a product of projective spaces (throws
// ConfigError when the pair is not such a product).
DiagonalData product_diagonal(const ToricData& td);

// Two-point function: 1/(h1+h2) times the diagonal-paired product of
// one-point functions.  The division is performed per degree by verified
// exact divisibility of the assembled numerator (NotDivisibleByH1PlusH2
// otherwise); the degree-zero term keeps its explicit pole.
TwoPointSeries z_two_point(Assembly& asmb, const DiagonalData& dd);

// Reduced two-point function Z*: no degree-zero term.  For b >= 1 it is
// assembled from the reduced one-point functions; for b = 0 it is the
// two-point function with the degree-zero part dropped, multiplied on the
// first slot by the Euler class of the positive summands.
TwoPointSeries z_star(Assembly& asmb, const DiagonalData& dd);

// Coefficient of Q^d hbar1^{-p1-1} hbar2^{-p2-1} paired against the
// insertions eta1, eta2 (given as fixed-point restriction tuples):
//   sum_{I,J} coeff * eta1(I) eta2(J) / (eulerT(I) eulerT(J)),
// evaluated at every listed alpha seed; the results must agree
// (AlphaDependent otherwise).  d = 0 or out-of-cutoff throws MissingDegree.
Rat extract_invariant(const ToricData& td, const TwoPointSeries& zz,
                      const Deg& d, int p1, int p2,
                      const std::vector<FRF>& eta1,
                      const std::vector<FRF>& eta2,
                      const std::vector<int>& seedIdx = {0, 1});

// ---------------------------------------------------------------------------
// Closed-form references
// ---------------------------------------------------------------------------

// Exact two-point table for a product of projective spaces with dimension
// tuple Ns at degree d != 0: the bivariate hypergeometric sum in the
// truncated ring Q[A,B]/(A_i^{N_i}, B_i^{N_i}), with the 1/(h1+h2) step
// performed by verified exact division.  val[(a, b, p1, p2)] is the
// invariant with insertions psi^{p1} H^{N-1-a}, psi^{p2} H^{N-1-b}
// (componentwise complements).
struct TwoPointTable {
  std::map<std::tuple<Deg, Deg, int, int>, Rat> val;
  Rat get(const Deg& a, const Deg& b, int p1, int p2) const;
};
TwoPointTable two_point_closed_form(const std::vector<long>& Ns, const Deg& d);

// The three printed golden families.
enum class GoldenFamily {
  P2_OneOne,   // plane, negative summands of degrees 1 and 2
  P2_Triple,   // plane, three degree-1 negative summands
  P1_Double,   // line, two degree-1 negative summands
};
Rat closed_form_reference(GoldenFamily fam, long d);

// Coefficients (index d = 1..cutoff) of the weighted-sum identity
//   sum_d d q^d <H^{c1}, H^{c2}>_d
//     = (prod ell+ / prod ell-) * (I_{c1+1-b}(q) - 1)
// for the projective space of dimension n-1, computed from the
// single-variable unit series.
std::vector<Rat> weighted_sum_reference(long n,
                                        const std::vector<long>& ellPlus,
                                        const std::vector<long>& ellMinus,
                                        long c1, long cutoff);

}  // namespace toricgw
