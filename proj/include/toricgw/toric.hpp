// Toric input validation, fixed-point and invariant-curve enumeration,
// effective-cone bookkeeping, cohomology presentation, and exact
// localization integrals. Everything is exact; the only numerics are
// rational evaluations at deterministic generic torus-weight seeds.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "toricgw/factored.hpp"
#include "toricgw/linalg.hpp"
#include "toricgw/multipoly.hpp"
#include "toricgw/novikov.hpp"

namespace toricgw {

struct ToricPair {
  long k = 0, N = 0;
  std::vector<std::vector<long>> M;  // k rows, N columns
  RatVec tau;                        // length k
};

struct ValidationReport {
  bool regular = false;     // (i)  no small support hits tau; polytope nonempty
  bool unimodular = false;  // (ii) |det M_J| = 1 at every vertex
  bool bounded = false;     // (iii) only 0 solves Mv = 0, v >= 0
  bool minimal = false;     // (iv) every coordinate hyperplane meets the polytope
  std::string detail;       // first diagnostic, empty when all pass
  bool ok() const { return regular && unimodular && bounded && minimal; }
};

struct FixedPoint {
  std::vector<int> J;        // sorted k-subset of [0, N)
  RatMat MJinv;              // inverse of the k x k column submatrix
  std::vector<MultiPoly> x;  // k linear forms in alpha
  std::vector<MultiPoly> u;  // N linear forms in alpha; u[j] = 0 for j in J
  MultiPoly eulerT;          // prod over j not in J of u[j]
};

struct InvariantCurve {
  int from = 0;            // index of I in the fixed-point list
  int to = 0;              // index of the second fixed point on the curve
  int j = 0;               // column added to I
  int jhat = 0;            // column of I dropped at the far end
  Deg deg;                 // degree vector (entries may be negative)
  std::vector<long> Dvec;  // pairing of the curve with each divisor class
};

struct ConeData {
  std::vector<Deg> gens;  // primitive extremal generators of the curve cone
  std::vector<long> w;    // weight functional, strictly positive on gens
};

struct CohPresentation {
  // Column j of M: the divisor class U_j expressed in the H basis.
  std::vector<std::vector<long>> linearRelations;
  // Inclusion-minimal index sets meeting every fixed-point subset.
  std::vector<std::vector<int>> srSets;
  std::vector<long> c1;  // column sums of M
};

ValidationReport validate_toric_pair(const ToricPair& tp);

std::vector<FixedPoint> fixed_points(const ToricPair& tp);

std::vector<InvariantCurve> invariant_curves(const ToricPair& tp,
                                             const std::vector<FixedPoint>& fps);

ConeData effective_cone(const ToricPair& tp,
                        const std::vector<InvariantCurve>& curves);

bool cone_contains(const ConeData& cone, const Deg& d);

// All lattice points of the cone with weight <= bound, sorted by
// (weight, lex); includes the zero class.
std::vector<Deg> cone_lattice_points(const ConeData& cone, long bound);

CohPresentation cohomology_presentation(const ToricPair& tp,
                                        const std::vector<FixedPoint>& fps);

// Sum over fixed points of restriction / eulerT, reduced.
FRF localize_integral(const std::vector<FixedPoint>& fps,
                      const std::vector<FRF>& restrictions);

// Deterministic generic torus-weight assignment number `idx`.
std::map<VarId, Rat> alpha_seed(long N, int idx);

// Throws SeedCollision if the assignment degenerates on this geometry
// (vanishing tangent weight or two fixed points with equal positions).
void check_seed(const std::vector<FixedPoint>& fps,
                const std::map<VarId, Rat>& seed);

// First non-colliding seed index >= idx for this geometry.
int usable_seed(const std::vector<FixedPoint>& fps, long N, int idx);

// Evaluates the localization sum at two independent seeds; returns the
// common value, throws AlphaDependent when they disagree.
Rat numeric_integral(const std::vector<FixedPoint>& fps, long N,
                     const std::vector<FRF>& restrictions, int seedA = 0,
                     int seedB = 1);

// Restrictions of prod_i x_i^{e[i]} at every fixed point.
std::vector<FRF> x_monomial_restrictions(const std::vector<FixedPoint>& fps,
                                         const std::vector<uint32_t>& e);

struct ToricData {
  ToricPair tp;
  ValidationReport report;
  std::vector<FixedPoint> fps;
  std::vector<InvariantCurve> curves;
  ConeData cone;
  CohPresentation coh;
  // curveFrom[i][j] = index into curves for the curve leaving fixed point i
  // along column j, or -1 when j lies in the subset of i.
  std::vector<std::vector<int>> curveFrom;
};

// Validates (throwing ValidationFailure on any failed condition) and
// assembles all derived geometric data.
ToricData build_toric(const ToricPair& tp);

}  // namespace toricgw
