// Geometry-layer tests: validation of toric pairs, fixed points and their
// restriction data, invariant curves and their degrees, the effective cone,
// cohomology presentation, and exact localization integrals.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <set>

#include "fixtures.hpp"
#include "toricgw/lp.hpp"
#include "toricgw/toric.hpp"

using namespace toricgw;
using namespace toricgw::fixtures;

namespace {

MultiPoly av(uint32_t j) { return MultiPoly::variable(var_alpha(j)); }

int fp_index(const std::vector<FixedPoint>& fps, std::vector<int> J) {
  for (size_t i = 0; i < fps.size(); ++i)
    if (fps[i].J == J) return static_cast<int>(i);
  return -1;
}

}  // namespace

TEST_CASE("exact LP feasibility") {
  // v1 + v2 = 1, v >= 0: feasible.
  CHECK(lp_feasible({{Rat(1), Rat(1)}}, {Rat(1)}));
  // v1 + v2 = -1, v >= 0: infeasible.
  CHECK(!lp_feasible({{Rat(1), Rat(1)}}, {Rat(-1)}));
  // v1 - v2 = 3 with v1 <= 1 encoded as equality with slack:
  // v1 - v2 = 3, v1 + s = 1 -> infeasible needs v1 >= 3.
  CHECK(!lp_feasible({{Rat(1), Rat(-1), Rat(0)}, {Rat(1), Rat(0), Rat(1)}},
                     {Rat(3), Rat(1)}));
  // Degenerate: no variables.
  CHECK(lp_feasible(RatMat{RatVec{}}, {Rat(0)}));
  CHECK(!lp_feasible(RatMat{RatVec{}}, {Rat(2)}));
  // Zero rows: trivially feasible.
  CHECK(lp_feasible({}, {}));
}

TEST_CASE("validation of standard pairs") {
  ValidationReport r = validate_toric_pair(p2());
  CHECK(r.regular);
  CHECK(r.unimodular);
  CHECK(r.bounded);
  CHECK(r.minimal);
  CHECK(r.ok());

  r = validate_toric_pair(hirzebruch(2));
  CHECK(r.ok());

  r = validate_toric_pair(p1xp1());
  CHECK(r.ok());

  // Empty polytope: tau = -1 on the projective line data.
  ToricPair bad = p1();
  bad.tau = {Rat(-1)};
  r = validate_toric_pair(bad);
  CHECK(!r.regular);

  // Non-minimal: third facet never binds (v3 is pinned to 2 > 0).
  ToricPair nm;
  nm.k = 2;
  nm.N = 3;
  nm.M = {{1, 1, 0}, {0, 0, 1}};
  nm.tau = {Rat(1), Rat(2)};
  r = validate_toric_pair(nm);
  CHECK(r.regular);
  CHECK(r.unimodular);
  CHECK(r.bounded);
  CHECK(!r.minimal);

  // Non-unimodular vertex: columns (1) and (2) on a segment.
  ToricPair wp;
  wp.k = 1;
  wp.N = 2;
  wp.M = {{1, 2}};
  wp.tau = {Rat(1)};
  r = validate_toric_pair(wp);
  CHECK(!r.unimodular);
  CHECK_THROWS_AS(fixed_points(wp), EngineError);

  // Unbounded: a single column in k = 1 leaves a ray.
  ToricPair ub;
  ub.k = 1;
  ub.N = 2;
  ub.M = {{1, -1}};
  ub.tau = {Rat(1)};
  r = validate_toric_pair(ub);
  CHECK(!r.bounded);
}

TEST_CASE("fixed points of the projective plane") {
  auto fps = fixed_points(p2());
  REQUIRE(fps.size() == 3);
  for (int j = 0; j < 3; ++j) {
    CHECK(fps[j].J == std::vector<int>{j});
    CHECK(fps[j].x[0] == av(j));
    for (int s = 0; s < 3; ++s) {
      if (s == j) CHECK(fps[j].u[s].is_zero());
      else CHECK(fps[j].u[s] == av(j) - av(s));
    }
    MultiPoly expect = MultiPoly::constant(1);
    for (int s = 0; s < 3; ++s)
      if (s != j) expect *= av(j) - av(s);
    CHECK(fps[j].eulerT == expect);
  }
}

TEST_CASE("fixed points of the Hirzebruch surface") {
  long k = 2;
  auto fps = fixed_points(hirzebruch(k));
  REQUIRE(fps.size() == 4);
  std::set<std::vector<int>> subsets;
  for (const auto& fp : fps) subsets.insert(fp.J);
  CHECK(subsets ==
        std::set<std::vector<int>>{{0, 2}, {0, 3}, {1, 2}, {1, 3}});

  int i13 = fp_index(fps, {0, 2});
  REQUIRE(i13 >= 0);
  const FixedPoint& fp = fps[i13];
  CHECK(fp.x[0] == av(2));
  CHECK(fp.x[1] == av(0));
  CHECK(fp.u[1] == av(0) - av(1));
  CHECK(fp.u[3] == Rat(k) * av(0) + av(2) - av(3));

  // Distinct position tuples at distinct fixed points.
  for (size_t a = 0; a < fps.size(); ++a)
    for (size_t b = a + 1; b < fps.size(); ++b) {
      bool same = true;
      for (long i = 0; i < 2; ++i)
        same = same && fps[a].x[i] == fps[b].x[i];
      CHECK(!same);
    }
}

TEST_CASE("invariant curves: degrees and reflection identities") {
  for (const ToricPair& tp :
       {p2(), p1xp1(), hirzebruch(1), hirzebruch(2)}) {
    auto fps = fixed_points(tp);
    auto curves = invariant_curves(tp, fps);
    CHECK(curves.size() == fps.size() * (tp.N - tp.k));

    std::map<std::pair<int, int>, const InvariantCurve*> by_key;
    for (const auto& c : curves) by_key[{c.from, c.j}] = &c;

    for (const auto& c : curves) {
      const FixedPoint& I = fps[c.from];
      const FixedPoint& V = fps[c.to];
      // Opposite tangent weights at the two ends.
      CHECK(I.u[c.j] + V.u[c.jhat] == MultiPoly());
      // Unit pairing with the added/dropped divisors, zero on the shared set.
      CHECK(c.Dvec[c.j] == 1);
      CHECK(c.Dvec[c.jhat] == 1);
      for (int s : I.J)
        if (s != c.jhat) CHECK(c.Dvec[s] == 0);
      // Divisor pairings are the matrix pairing of the degree vector.
      for (long s = 0; s < tp.N; ++s) {
        long expect = 0;
        for (long i = 0; i < tp.k; ++i) expect += tp.M[i][s] * c.deg[i];
        CHECK(c.Dvec[s] == expect);
      }
      // The reversed curve exists and carries the same degree.
      const InvariantCurve* rev = by_key.at({c.to, c.jhat});
      CHECK(rev->to == c.from);
      CHECK(rev->jhat == c.j);
      CHECK(rev->deg == c.deg);
      CHECK(rev->Dvec == c.Dvec);
    }
  }
}

TEST_CASE("invariant curve degrees on specific geometries") {
  {
    auto tp = p2();
    auto fps = fixed_points(tp);
    auto curves = invariant_curves(tp, fps);
    for (const auto& c : curves) CHECK(c.deg == Deg{1});
  }
  {
    long k = 2;
    auto tp = hirzebruch(k);
    auto fps = fixed_points(tp);
    auto curves = invariant_curves(tp, fps);
    int i13 = fp_index(fps, {0, 2});
    int i14 = fp_index(fps, {0, 3});
    int i23 = fp_index(fps, {1, 2});
    int i24 = fp_index(fps, {1, 3});
    auto find = [&](int from, int j) -> const InvariantCurve& {
      for (const auto& c : curves)
        if (c.from == from && c.j == j) return c;
      FAIL("curve not found");
      return curves[0];
    };
    CHECK(find(i13, 1).to == i23);
    CHECK(find(i13, 1).deg == Deg{0, 1});
    CHECK(find(i13, 3).to == i14);
    CHECK(find(i13, 3).deg == Deg{1, 0});
    CHECK(find(i14, 1).to == i24);
    CHECK(find(i14, 1).deg == Deg{-static_cast<int>(k), 1});
  }
}

TEST_CASE("effective cone and lattice enumeration") {
  {
    auto tp = p2();
    auto td_fps = fixed_points(tp);
    auto cone = effective_cone(tp, invariant_curves(tp, td_fps));
    REQUIRE(cone.gens.size() == 1);
    CHECK(cone.gens[0] == Deg{1});
    CHECK(cone.w == std::vector<long>{1});
    auto pts = cone_lattice_points(cone, 3);
    CHECK(pts == std::vector<Deg>{{0}, {1}, {2}, {3}});
  }
  {
    auto tp = p1xp1();
    auto fps = fixed_points(tp);
    auto cone = effective_cone(tp, invariant_curves(tp, fps));
    std::set<Deg> gens(cone.gens.begin(), cone.gens.end());
    CHECK(gens == std::set<Deg>{{1, 0}, {0, 1}});
    auto pts = cone_lattice_points(cone, 2);
    CHECK(pts.size() == 6);
    CHECK(cone_contains(cone, {1, 1}));
    CHECK(!cone_contains(cone, {-1, 1}));
  }
  {
    long k = 2;
    auto tp = hirzebruch(k);
    auto fps = fixed_points(tp);
    auto cone = effective_cone(tp, invariant_curves(tp, fps));
    std::set<Deg> gens(cone.gens.begin(), cone.gens.end());
    CHECK(gens == std::set<Deg>{{1, 0}, {-static_cast<int>(k), 1}});
    CHECK(cone.w == std::vector<long>{1, 3});
    CHECK(cone_contains(cone, {0, 1}));
    CHECK(!cone_contains(cone, {-3, 1}));
    CHECK(!cone_contains(cone, {1, -1}));
    auto pts = cone_lattice_points(cone, 2);
    std::set<Deg> ptset(pts.begin(), pts.end());
    CHECK(ptset == std::set<Deg>{{0, 0},
                                 {1, 0},
                                 {2, 0},
                                 {-2, 1},
                                 {-1, 1},
                                 {-4, 2}});
    // Sorted by weight then lexicographically.
    CHECK(pts.front() == Deg{0, 0});
    NovCtx ctx{cone.w, 2};
    long prev = -1;
    for (const auto& d : pts) {
      CHECK(ctx.weight(d) >= prev);
      prev = ctx.weight(d);
    }
  }
}

TEST_CASE("cohomology presentation") {
  {
    auto tp = p2();
    auto coh = cohomology_presentation(tp, fixed_points(tp));
    REQUIRE(coh.srSets.size() == 1);
    CHECK(coh.srSets[0] == std::vector<int>{0, 1, 2});
    CHECK(coh.c1 == std::vector<long>{3});
    for (long j = 0; j < 3; ++j)
      CHECK(coh.linearRelations[j] == std::vector<long>{1});
  }
  {
    auto tp = hirzebruch(2);
    auto coh = cohomology_presentation(tp, fixed_points(tp));
    REQUIRE(coh.srSets.size() == 2);
    std::set<std::vector<int>> sets(coh.srSets.begin(), coh.srSets.end());
    CHECK(sets == std::set<std::vector<int>>{{0, 1}, {2, 3}});
    CHECK(coh.c1 == std::vector<long>{2, 4});
  }
  {
    auto tp = p1xp1();
    auto coh = cohomology_presentation(tp, fixed_points(tp));
    std::set<std::vector<int>> sets(coh.srSets.begin(), coh.srSets.end());
    CHECK(sets == std::set<std::vector<int>>{{0, 1}, {2, 3}});
  }
}

TEST_CASE("localization integrals on the projective plane") {
  auto tp = p2();
  auto fps = fixed_points(tp);

  // Degree-two monomial integrates to 1.
  FRF val = localize_integral(fps, x_monomial_restrictions(fps, {2}));
  CHECK(val == FRF::one());

  // Low-degree monomials integrate to 0.
  CHECK(localize_integral(fps, x_monomial_restrictions(fps, {0})) ==
        FRF::zero());
  CHECK(localize_integral(fps, x_monomial_restrictions(fps, {1})) ==
        FRF::zero());

  // The fixed-point class integrates to 1: restriction eulerT at one point.
  for (size_t i = 0; i < fps.size(); ++i) {
    std::vector<FRF> r(fps.size(), FRF::zero());
    r[i] = FRF(fps[i].eulerT);
    CHECK(localize_integral(fps, r) == FRF::one());
  }

  // Numeric path agrees and is seed-independent.
  CHECK(numeric_integral(fps, tp.N, x_monomial_restrictions(fps, {2})) == 1);
  CHECK(numeric_integral(fps, tp.N, x_monomial_restrictions(fps, {1})) == 0);

  // A class of excessive degree is alpha-dependent.
  CHECK_THROWS_AS(
      numeric_integral(fps, tp.N, x_monomial_restrictions(fps, {3})),
      EngineError);
  try {
    numeric_integral(fps, tp.N, x_monomial_restrictions(fps, {3}));
  } catch (const EngineError& e) {
    CHECK(e.code == ErrCode::AlphaDependent);
  }
}

TEST_CASE("localization integrals on the Hirzebruch surface") {
  long k = 2;
  auto tp = hirzebruch(k);
  auto fps = fixed_points(tp);
  CHECK(localize_integral(fps, x_monomial_restrictions(fps, {1, 1})) ==
        FRF::one());
  CHECK(localize_integral(fps, x_monomial_restrictions(fps, {2, 0})) ==
        FRF(Rat(-k)));
  CHECK(localize_integral(fps, x_monomial_restrictions(fps, {0, 2})) ==
        FRF::zero());
  CHECK(numeric_integral(fps, tp.N, x_monomial_restrictions(fps, {1, 1})) ==
        1);
  CHECK(numeric_integral(fps, tp.N, x_monomial_restrictions(fps, {2, 0})) ==
        -k);
}

TEST_CASE("column permutation leaves integrals invariant") {
  long k = 2;
  auto tp = hirzebruch(k);
  ToricPair rp = tp;
  for (long i = 0; i < tp.k; ++i) {
    std::vector<long> row = tp.M[i];
    std::reverse(row.begin(), row.end());
    rp.M[i] = row;
  }
  CHECK(validate_toric_pair(rp).ok());
  auto fa = fixed_points(tp);
  auto fb = fixed_points(rp);
  for (const auto& e :
       std::vector<std::vector<uint32_t>>{{2, 0}, {1, 1}, {0, 2}}) {
    CHECK(numeric_integral(fa, tp.N, x_monomial_restrictions(fa, e)) ==
          numeric_integral(fb, rp.N, x_monomial_restrictions(fb, e)));
  }
}

TEST_CASE("seed hygiene") {
  auto tp = p2();
  auto fps = fixed_points(tp);
  check_seed(fps, alpha_seed(tp.N, 0));
  check_seed(fps, alpha_seed(tp.N, 1));
  CHECK(usable_seed(fps, tp.N, 0) == 0);

  std::map<VarId, Rat> degenerate = {{var_alpha(0), Rat(1)},
                                     {var_alpha(1), Rat(1)},
                                     {var_alpha(2), Rat(2)}};
  CHECK_THROWS_AS(check_seed(fps, degenerate), EngineError);
}

TEST_CASE("build_toric assembles consistent data") {
  ToricData td = build_toric(hirzebruch(1));
  CHECK(td.report.ok());
  CHECK(td.fps.size() == 4);
  CHECK(td.curves.size() == 8);
  CHECK(td.cone.gens.size() == 2);
  for (size_t i = 0; i < td.fps.size(); ++i)
    for (long j = 0; j < td.tp.N; ++j) {
      bool inJ = std::binary_search(td.fps[i].J.begin(), td.fps[i].J.end(),
                                    static_cast<int>(j));
      if (inJ) CHECK(td.curveFrom[i][j] == -1);
      else {
        int c = td.curveFrom[i][j];
        REQUIRE(c >= 0);
        CHECK(td.curves[c].from == static_cast<int>(i));
        CHECK(td.curves[c].j == static_cast<int>(j));
      }
    }
  // Every curve degree lies in the effective cone.
  for (const auto& c : td.curves) CHECK(cone_contains(td.cone, c.deg));

  ToricPair bad = p1();
  bad.tau = {Rat(-1)};
  CHECK_THROWS_AS(build_toric(bad), EngineError);
}
