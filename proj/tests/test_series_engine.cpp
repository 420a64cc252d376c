// Series-engine tests: hypergeometric coefficients for the four families,
// unit series and mirror data (with independent closed-form cross-checks),
// the differentiation tower and its structure coefficients, the transformed
// one-point series, and the projective-space specialisation.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <vector>

#include "fixtures.hpp"
#include "toricgw/laurent.hpp"
#include "toricgw/series.hpp"
#include "toricgw/toric.hpp"

using namespace toricgw;
using namespace toricgw::fixtures;

namespace {

MultiPoly A(uint32_t i) { return MultiPoly::variable(var_A(i)); }
MultiPoly al(uint32_t j) { return MultiPoly::variable(var_alpha(j)); }
MultiPoly hb() { return MultiPoly::variable(var_h()); }

BundleSpec no_bundle() { return BundleSpec{}; }

BundleSpec line_bundle_plus(std::vector<long> col) {
  BundleSpec b;
  b.ellPlus.push_back(std::move(col));
  return b;
}

BundleSpec line_bundles_minus(std::vector<std::vector<long>> cols) {
  BundleSpec b;
  b.ellMinus = std::move(cols);
  return b;
}

Rat coeff1(const Nov<Rat>& s, int d) { return nov_coeff(s, Deg{d}); }

bool series_equal(const Nov<FRF>& a, const Nov<FRF>& b) {
  Nov<FRF> d = nov_sub(a, b);
  nov_prune(d);
  return d.empty();
}

// The non-negative-hbar part of a coefficient, as a polynomial (fails the
// test if a positive window entry is not polynomial).
MultiPoly nonneg_h_part(const FRF& c, int hi) {
  auto lx = laurent_expand(c, var_h(), 0, hi);
  MultiPoly r;
  MultiPoly h = hb();
  for (const auto& [e, v] : lx) {
    FRF vv = v;
    vv.reduce();
    if (vv.is_zero()) continue;
    REQUIRE(vv.is_polynomial());
    MultiPoly hp = mp_const(Rat(1));
    for (int m = 0; m < e; ++m) hp = hp * h;
    r = r + vv.num() * hp;
  }
  return r;
}

MultiPoly mono_A(const Deg& p) {
  MultiPoly r = mp_const(Rat(1));
  for (size_t i = 0; i < p.size(); ++i)
    for (int m = 0; m < p[i]; ++m) r = r * A(static_cast<uint32_t>(i));
  return r;
}

// Direct application of {A + hbar q d/dq}^p (no tower corrections).
Nov<FRF> raw_ops(Nov<FRF> s, const Deg& p) {
  for (size_t i = 0; i < p.size(); ++i)
    for (int m = 0; m < p[i]; ++m) {
      Nov<FRF> r;
      for (const auto& [d, c] : s) {
        MultiPoly op = A(static_cast<uint32_t>(i)) + hb() * Rat(d[i]);
        FRF v = c;
        v.mul_poly(op);
        if (!v.is_zero()) r.emplace(d, std::move(v));
      }
      s = std::move(r);
    }
  return s;
}

}  // namespace

TEST_CASE("degree data") {
  ToricData td = build_toric(p4());
  BundleSpec b5 = line_bundle_plus({5});
  DegreeData dd = degree_data(td.tp, b5, {1});
  CHECK(dd.D == std::vector<long>{1, 1, 1, 1, 1});
  CHECK(dd.Lplus == std::vector<long>{5});
  CHECK(dd.nu == 0);

  ToricData t2 = build_toric(p2());
  BundleSpec bm = line_bundles_minus({{-1}, {-2}});
  DegreeData d2 = degree_data(t2.tp, bm, {1});
  CHECK(d2.D == std::vector<long>{1, 1, 1});
  CHECK(d2.Lminus == std::vector<long>{-1, -2});
  CHECK(d2.nu == 0);

  DegreeData d0 = degree_data(t2.tp, bm, {0});
  CHECK(d0.D == std::vector<long>{0, 0, 0});
  CHECK(d0.nu == 0);
}

TEST_CASE("bundle validation") {
  ToricData td = build_toric(p2());
  // Zero class: pairs to zero with the generator.
  CHECK_THROWS_AS(validate_bundle(td, line_bundle_plus({0}), false),
                  EngineError);
  // Positive class declared as a negative summand.
  CHECK_THROWS_AS(validate_bundle(td, line_bundles_minus({{1}}), false),
                  EngineError);
  // nu < 0 on the generator: P^1 with O(-3).
  ToricData t1 = build_toric(p1());
  BundleSpec bneg = line_bundles_minus({{-3}});
  validate_bundle(t1, bneg, false);  // sign conditions alone are fine
  bool caught = false;
  try {
    validate_bundle(t1, bneg, true);
  } catch (const EngineError& e) {
    caught = true;
    CHECK(e.code == ErrCode::NuNegative);
  }
  CHECK(caught);
  // Raw series construction is still possible (warns on stderr).
  NovCtx ctx = make_ctx(t1, 2);
  Nov<FRF> s = build_series(t1, bneg, SeriesFamily::Ycheck, false, ctx);
  CHECK(!nov_coeff(s, Deg{1}).is_zero());
}

TEST_CASE("series coefficients: explicit values") {
  ToricData td = build_toric(p4());
  BundleSpec b5 = line_bundle_plus({5});

  // Degree zero: 1, or 0 for the starred family.
  for (SeriesFamily fam : {SeriesFamily::Ycheck, SeriesFamily::Yhat2,
                           SeriesFamily::Yhatbundle}) {
    FRF c0 = series_coefficient(td.tp, b5, fam, {0}, false);
    CHECK(c0.is_constant());
    CHECK(c0.constant_value() == 1);
  }
  CHECK(series_coefficient(td.tp, b5, SeriesFamily::Ystar, {0}, false)
            .is_zero());

  // P^4 / O(5), d=1: prod_{s=1}^5 (5A+s hbar) / (A+hbar)^5.
  FRF c1 = series_coefficient(td.tp, b5, SeriesFamily::Ycheck, {1}, false);
  std::vector<std::pair<MultiPoly, int>> factors;
  for (long s = 1; s <= 5; ++s)
    factors.emplace_back(A(0) * Rat(5) + hb() * Rat(s), 1);
  factors.emplace_back(A(0) + hb(), -5);
  FRF expect = frf_from_product(Rat(1), factors);
  CHECK(c1 == expect);

  // P^1 / O(-1)+O(-1), d=1, equivariant second-convention family:
  // (-A-hbar)^2 / ((A-al1+hbar)(A-al2+hbar)).
  ToricData t1 = build_toric(p1());
  BundleSpec bconi = line_bundles_minus({{-1}, {-1}});
  FRF ch = series_coefficient(t1.tp, bconi, SeriesFamily::Yhat2, {1}, true);
  FRF eh = frf_from_product(
      Rat(1), {{MultiPoly() - A(0) - hb(), 2},
               {A(0) - al(0) + hb(), -1},
               {A(0) - al(1) + hb(), -1}});
  CHECK(ch == eh);

  // Same data, first-convention family: (-A)^2 / (...).
  FRF cc = series_coefficient(t1.tp, bconi, SeriesFamily::Ycheck, {1}, true);
  FRF ec = frf_from_product(
      Rat(1), {{MultiPoly() - A(0), 2},
               {A(0) - al(0) + hb(), -1},
               {A(0) - al(1) + hb(), -1}});
  CHECK(cc == ec);

  // Starred family, d=1: the negative product is empty.
  FRF cs = series_coefficient(t1.tp, bconi, SeriesFamily::Ystar, {1}, false);
  FRF es = frf_from_product(Rat(1), {{A(0) + hb(), -2}});
  CHECK(cs == es);
}

TEST_CASE("family coefficient homogeneity") {
  std::vector<std::pair<ToricData, BundleSpec>> targets;
  targets.emplace_back(build_toric(p4()), line_bundle_plus({5}));
  targets.emplace_back(build_toric(p2()),
                       line_bundles_minus({{-1}, {-2}}));
  targets.emplace_back(build_toric(p1xp1()), no_bundle());
  targets.emplace_back(build_toric(hirzebruch(1)), no_bundle());
  std::vector<VarKind> kinds{VarKind::A, VarKind::Alpha, VarKind::H};
  for (const auto& [td, bundle] : targets) {
    NovCtx ctx = make_ctx(td, 3);
    for (bool eq : {false, true})
      for (SeriesFamily fam :
           {SeriesFamily::Ycheck, SeriesFamily::Yhat2, SeriesFamily::Yhatbundle,
            SeriesFamily::Ystar}) {
        Nov<FRF> s = build_series(td, bundle, fam, eq, ctx);
        // The starred family drops one factor per negative summand, so its
        // coefficients sit b degrees lower than the normalised families.
        long shift = fam == SeriesFamily::Ystar ? bundle.b() : 0;
        for (const auto& [d, c] : s) {
          long nu = degree_data(td.tp, bundle, d).nu;
          auto deg = c.homogeneous_degree(kinds);
          REQUIRE(deg.has_value());
          CHECK(*deg == -nu - shift);
        }
      }
  }
}

TEST_CASE("support at fixed points") {
  // Restricting to a fixed point I kills every degree with some D_j(d) < 0,
  // j in I.
  for (ToricPair tp : {p2(), hirzebruch(1)}) {
    ToricData td = build_toric(tp);
    NovCtx ctx = make_ctx(td, 3);
    Nov<FRF> s = build_series(td, no_bundle(), SeriesFamily::Ycheck, true, ctx);
    for (const FixedPoint& fp : td.fps) {
      Nov<FRF> r = restrict_to_fixed_point(s, fp, td.tp.k);
      for (const auto& [d, c] : r) {
        DegreeData dd = degree_data(td.tp, no_bundle(), d);
        bool inside = true;
        for (int j : fp.J)
          if (dd.D[static_cast<size_t>(j)] < 0) inside = false;
        FRF v = c;
        v.reduce();
        if (!inside) CHECK(v.is_zero());
      }
    }
  }
}

TEST_CASE("unit series: quintic and conifold") {
  ToricData td = build_toric(p4());
  BundleSpec b5 = line_bundle_plus({5});
  NovCtx ctx = make_ctx(td, 3);
  MirrorData md = mirror_data(td, b5, ctx);
  CHECK(coeff1(md.I0check, 0) == 1);
  CHECK(coeff1(md.I0check, 1) == 120);
  CHECK(coeff1(md.I0check, 2) == 113400);
  CHECK(coeff1(md.I0check, 3) == 168168000);
  // Combinatorial closed form agrees.
  CHECK(md.I0check == i0_closed_form(td, b5, false, ctx));
  CHECK(md.I0hat == i0_closed_form(td, b5, true, ctx));
  // A nonzero positive part kills every d != 0 in the hatted sum.
  Nov<Rat> one;
  one.emplace(ctx.zero(), Rat(1));
  CHECK(md.I0hat == one);

  // Conifold: the plain unit collapses to 1 (negative summands push every
  // nonzero degree below hbar^0), while the hatted unit is
  // 1/(1-q) = 1 + q + q^2 + ...
  ToricData t1 = build_toric(p1());
  BundleSpec bconi = line_bundles_minus({{-1}, {-1}});
  NovCtx c1 = make_ctx(t1, 3);
  MirrorData mc = mirror_data(t1, bconi, c1);
  for (int d = 0; d <= 3; ++d) {
    CHECK(coeff1(mc.I0check, d) == (d == 0 ? 1 : 0));
    CHECK(coeff1(mc.I0hat, d) == 1);
  }
  CHECK(mc.I0check == i0_closed_form(t1, bconi, false, c1));
  CHECK(mc.I0hat == i0_closed_form(t1, bconi, true, c1));
}

TEST_CASE("mirror data: quintic values and closed forms") {
  ToricData td = build_toric(p4());
  BundleSpec b5 = line_bundle_plus({5});
  NovCtx ctx = make_ctx(td, 3);
  MirrorData md = mirror_data(td, b5, ctx);

  CHECK(coeff1(md.f[0], 1) == 770);
  CHECK(md.G.empty());  // no degree has rank shift 1
  for (long j = 0; j < 5; ++j) CHECK(coeff1(md.g[static_cast<size_t>(j)], 1) == 120);
  // All five equivariant shifts coincide on P^4.
  for (long j = 1; j < 5; ++j) CHECK(md.g[static_cast<size_t>(j)] == md.g[0]);

  // Closed forms.
  std::vector<Nov<Rat>> fc = f_closed_form(td, b5, ctx);
  CHECK(fc[0] == md.f[0]);
  CHECK(g_shift_closed_form(td, b5, ctx) == md.G);

  // P^4 / O(4): G = 24 q exactly.
  BundleSpec b4 = line_bundle_plus({4});
  MirrorData m4 = mirror_data(td, b4, ctx);
  CHECK(coeff1(m4.G, 1) == 24);
  CHECK(m4.G.size() == 1);
  CHECK(g_shift_closed_form(td, b4, ctx) == m4.G);

  // Fano with nu > 0 off zero: everything trivial.
  ToricData t2 = build_toric(p2());
  MirrorData m2 = mirror_data(t2, no_bundle(), make_ctx(t2, 3));
  CHECK(m2.I0check == i0_closed_form(t2, no_bundle(), false, make_ctx(t2, 3)));
  CHECK(coeff1(m2.I0check, 1) == 0);
  CHECK(m2.f[0].empty());
  CHECK(m2.G.empty());
  for (const auto& gj : m2.g) CHECK(gj.empty());
}

TEST_CASE("mirror data: residue identity") {
  // hbar^{-1} part of the equivariant check series equals
  // I0 [G + sum A_i f_i + sum alpha_j g_j] degree by degree.
  ToricData td = build_toric(p4());
  BundleSpec b5 = line_bundle_plus({5});
  NovCtx ctx = make_ctx(td, 2);
  MirrorData md = mirror_data(td, b5, ctx);
  Nov<FRF> Y = build_series(td, b5, SeriesFamily::Ycheck, true, ctx);

  Nov<FRF> lin;
  for (const auto& [d, v] : md.G) lin[d] = lin.count(d) ? lin[d] + FRF(Rat(v)) : FRF(Rat(v));
  for (long i = 0; i < td.tp.k; ++i)
    for (const auto& [d, v] : md.f[static_cast<size_t>(i)]) {
      FRF t(mp_var(var_A(static_cast<uint32_t>(i))) * v);
      lin[d] = lin.count(d) ? lin[d] + t : t;
    }
  for (long j = 0; j < td.tp.N; ++j)
    for (const auto& [d, v] : md.g[static_cast<size_t>(j)]) {
      FRF t(mp_var(var_alpha(static_cast<uint32_t>(j))) * v);
      lin[d] = lin.count(d) ? lin[d] + t : t;
    }
  Nov<FRF> expect = nov_mul_with<Rat, FRF, FRF>(
      md.I0check, lin, ctx, [](const Rat& x, const FRF& y) { return y * x; });

  for (const Deg& d : cone_lattice_points(td.cone, ctx.cutoff)) {
    FRF c = nov_coeff(Y, d);
    FRF res;
    if (!c.is_zero()) {
      auto lx = laurent_expand(c, var_h(), -1, -1);
      if (lx.count(-1)) res = lx.at(-1);
    }
    CHECK(res == nov_coeff(expect, d));
  }
}

TEST_CASE("mirror map round trip") {
  ToricData td = build_toric(p4());
  BundleSpec b5 = line_bundle_plus({5});
  NovCtx ctx = make_ctx(td, 3);
  MirrorData md = mirror_data(td, b5, ctx);

  // Leading inverse coefficient: q = Q(1 - 770 Q + ...).
  std::vector<Nov<Rat>> inv = mirror_units(md, MirrorDirection::Inverse, ctx);
  CHECK(coeff1(inv[0], 1) == -770);
  std::vector<Nov<Rat>> fwd = mirror_units(md, MirrorDirection::Forward, ctx);
  CHECK(coeff1(fwd[0], 1) == 770);

  // Round trip on an arbitrary series.
  Nov<Rat> s;
  s[{0}] = 7;
  s[{1}] = Rat(-3, 2);
  s[{2}] = 5;
  s[{3}] = Rat(1, 9);
  Nov<Rat> t = mirror_map(md, MirrorDirection::Inverse, s, ctx);
  Nov<Rat> u = mirror_map(md, MirrorDirection::Forward, t, ctx);
  CHECK(u == s);
  // And in the other composition order.
  Nov<Rat> t2 = mirror_map(md, MirrorDirection::Forward, s, ctx);
  Nov<Rat> u2 = mirror_map(md, MirrorDirection::Inverse, t2, ctx);
  CHECK(u2 == s);
}

TEST_CASE("f0 series for one negative summand") {
  // P^2 / O(-1)+O(-2) has b=2; use P^1 x P^1 / O(-1,-1) for b=1:
  // columns pair (-1,-1) with both generators.
  ToricData td = build_toric(p1xp1());
  BundleSpec b;
  b.ellMinus.push_back({-1, -1});
  NovCtx ctx = make_ctx(td, 2);
  MirrorData md = mirror_data(td, b, ctx);
  CHECK(md.hasF0);
  // d=(1,0): nu = 2 - 1 = 1, skipped; no nu=0 degrees at all here.
  CHECK(md.f0.empty());

  // P^1 / O(-2): nu(d) = 2d - 2d = 0 for all d; f0 = sum q^d
  // (-1)^{2d+1} (2d-1)!/(d!)^2.
  ToricData t1 = build_toric(p1());
  BundleSpec b2 = line_bundles_minus({{-2}});
  MirrorData m2 = mirror_data(t1, b2, make_ctx(t1, 3));
  CHECK(m2.hasF0);
  CHECK(coeff1(m2.f0, 1) == -1);
  CHECK(coeff1(m2.f0, 2) == Rat(-3, 2));
  CHECK(coeff1(m2.f0, 3) == Rat(-10, 3));
  // Footnote relation: f_i = ell^-_{i1} f0 when b = 1.
  CHECK(m2.f[0] == nov_scale(m2.f0, Rat(-2)));
}

TEST_CASE("projective specialisation") {
  // Quintic: F(0,q) coefficients (5d)!/(d!)^5.
  PnSpecial q5 = pn_special(5, {5}, {}, 2, 3);
  CHECK(coeff1(q5.I[0], 0) == 1);
  CHECK(coeff1(q5.I[0], 1) == 120);
  CHECK(coeff1(q5.I[0], 2) == 113400);
  CHECK(coeff1(q5.I[0], 3) == 168168000);
  // p < 0 convention.
  CHECK(coeff1(pn_unit(q5, -1), 0) == 1);
  CHECK(pn_unit(q5, -1).size() == 1);

  // Conifold: F(w,q) = sum q^d, so I_0 = 1/(1-q) and M F = F again.
  PnSpecial coni = pn_special(2, {}, {-1, -1}, 2, 4);
  for (int d = 0; d <= 4; ++d) CHECK(coeff1(coni.I[0], d) == 1);
  for (int d = 0; d <= 4; ++d) CHECK(coeff1(coni.I[1], d) == (d == 0 ? 1 : 0));
}

TEST_CASE("tower: Fano shortcut") {
  // nu > 0 on every nonzero degree: the tower is the raw operator power,
  // and the reduced corrected coefficients are supported exactly on the
  // degrees with rank shift equal to the correction order.
  for (ToricPair tp : {p2(), p1xp1()}) {
    ToricData td = build_toric(tp);
    NovCtx ctx = make_ctx(td, 2);
    for (bool eq : {false, true}) {
      DpTower t = dp_tower(td, no_bundle(), SeriesFamily::Ycheck, eq, 2, ctx);
      Nov<FRF> Y = build_series(td, no_bundle(), SeriesFamily::Ycheck, eq, ctx);
      for (const Deg& p : t.plist) {
        CHECK(series_equal(t.main.at(p), raw_ops(Y, p)));
        for (int r = 1; r <= norm_of(p); ++r)
          for (const Deg& s : exponents_up_to(t.k, norm_of(p) - r))
            for (const auto& [d, v] : t.getCtNon(p, r, s))
              CHECK(degree_data(td.tp, no_bundle(), d).nu == r);
      }
    }
  }

  // P^2: the smallest rank shift (3) exceeds every correction order at this
  // level, so all corrected coefficients vanish.
  {
    ToricData td = build_toric(p2());
    NovCtx ctx = make_ctx(td, 2);
    DpTower t = dp_tower(td, no_bundle(), SeriesFamily::Ycheck, true, 2, ctx);
    CHECK(t.Ct.empty());
    CHECK(t.CtNon.empty());
  }

  // P^1 x P^1: frozen second-order corrections -q1 and -q2, present because
  // the rank shift of each ruling class equals 2.
  {
    ToricData td = build_toric(p1xp1());
    NovCtx ctx = make_ctx(td, 2);
    DpTower t = dp_tower(td, no_bundle(), SeriesFamily::Ycheck, false, 2, ctx);
    Nov<Rat> q1, q2;
    q1.emplace(Deg{1, 0}, Rat(-1));
    q2.emplace(Deg{0, 1}, Rat(-1));
    CHECK(t.getCtNon(Deg{2, 0}, 2, Deg{0, 0}) == q1);
    CHECK(t.getCtNon(Deg{0, 2}, 2, Deg{0, 0}) == q2);
    CHECK(t.CtNon.size() == 2);
  }
}

TEST_CASE("tower: starred family is rejected") {
  ToricData td = build_toric(p1());
  BundleSpec bconi = line_bundles_minus({{-1}, {-1}});
  NovCtx ctx = make_ctx(td, 2);
  bool caught = false;
  try {
    dp_tower(td, bconi, SeriesFamily::Ystar, false, 1, ctx);
  } catch (const EngineError& e) {
    caught = true;
    CHECK(e.code == ErrCode::JNotInvertible);
  }
  CHECK(caught);
}

namespace {

// Shared structural checks for any constructed tower.
void check_tower_properties(const ToricData& td, const BundleSpec& bundle,
                            const DpTower& t) {
  const NovCtx& ctx = t.ctx;
  std::map<Deg, long> nuOf;
  for (const Deg& d : cone_lattice_points(td.cone, ctx.cutoff))
    nuOf[d] = degree_data(td.tp, bundle, d).nu;
  Deg zero = ctx.zero();

  for (const Deg& p : t.plist) {
    int np = norm_of(p);

    // q^0 term of the series is A^p exactly.
    FRF c0 = nov_coeff(t.main.at(p), zero);
    CHECK(c0 == FRF(mono_A(p)));

    // (EP1): the alpha=0 specialisation of the equivariant tower is the
    // nonequivariant tower.
    if (t.equivariant)
      for (const auto& [d, c] : t.main.at(p)) {
        FRF red = c.kill_kind(VarKind::Alpha);
        CHECK(red == nov_coeff(t.reduced.at(p), d));
      }

    for (int s = 0; s <= t.smax; ++s)
      for (const Deg& r : exponents_up_to(t.k, t.smax)) {
        Nov<FRF> Ce = t.getC(p, s, r);
        Nov<Rat> Cn = t.getCnon(p, s, r);

        // q^0 coefficient: delta_{p,r} delta_{|r|,s}.
        Rat want0 = (r == p && norm_of(r) == s) ? 1 : 0;
        FRF e0 = nov_coeff(Ce, zero);
        CHECK(e0 == FRF(want0));
        CHECK(nov_coeff(Cn, zero) == want0);

        // Nonequivariant support: s = nu + |r|; the nu=0 part is trivial
        // for s <= |p|; equivariant alpha-homogeneity of degree s-nu-|r|.
        for (const auto& [d, v] : Cn) {
          CHECK(s == nuOf.at(d) + norm_of(r));
          if (s <= np && nuOf.at(d) == 0)
            CHECK(v == ((r == p && norm_of(r) == s && d == zero) ? Rat(1) : Rat(0)));
        }
        for (const auto& [d, v] : Ce) {
          long want = s - nuOf.at(d) - norm_of(r);
          if (want < 0) {
            FRF vv = v;
            vv.reduce();
            CHECK(vv.is_zero());
            continue;
          }
          REQUIRE(v.is_polynomial());
          auto hd = v.num().homogeneous_degree({VarKind::Alpha});
          REQUIRE(hd.has_value());
          CHECK(*hd == want);
          CHECK(!v.involves(var_h()));
          // alpha=0 specialisation matches the reduced table.
          FRF red = v.kill_kind(VarKind::Alpha);
          CHECK(red == FRF(nov_coeff(Cn, d)));
        }

        // |r| <= |p| row normalisation: C_{p,|r|}^{(r)} = delta_{p,r}.
        if (s == norm_of(r) && s <= np) {
          Nov<Rat> want;
          if (r == p) want.emplace(zero, Rat(1));
          CHECK(Cn == want);
        }
      }

    // Corrected coefficients: defining triangular identity
    //   sum_{t<=r} sum_{|s|<=|p|-t} Ct[(p,t,s)] C[(s,|rr|+r-t,rr)]
    //     = delta_{p,rr} delta_{r,0},
    // plus the q^0 normalisation and alpha-homogeneity of degree r - nu.
    for (int r = 0; r <= np; ++r)
      for (const Deg& rr : exponents_up_to(t.k, np - r)) {
        Nov<FRF> acc;
        for (int tt = 0; tt <= r; ++tt)
          for (const Deg& s : exponents_up_to(t.k, np - tt)) {
            Nov<FRF> ct = tt == 0 ? (s == p ? Nov<FRF>{{zero, FRF(Rat(1))}}
                                            : Nov<FRF>())
                                  : t.getCt(p, tt, s);
            if (ct.empty()) continue;
            Nov<FRF> cc = t.getC(s, norm_of(rr) + r - tt, rr);
            if (cc.empty()) continue;
            acc = nov_add(acc, nov_mul(ct, cc, ctx));
          }
        Nov<FRF> want;
        if (rr == p && r == 0) want.emplace(zero, FRF(Rat(1)));
        CHECK(series_equal(acc, want));

        if (r >= 1) {
          Nov<FRF> ct = t.getCt(p, r, rr);
          CHECK(nov_coeff(ct, zero) == FRF());
          for (const auto& [d, v] : ct) {
            long want_deg = r - nuOf.at(d);
            if (want_deg < 0) {
              FRF vv = v;
              vv.reduce();
              CHECK(vv.is_zero());
              continue;
            }
            REQUIRE(v.is_polynomial());
            auto hd = v.num().homogeneous_degree({VarKind::Alpha});
            REQUIRE(hd.has_value());
            CHECK(*hd == want_deg);
            FRF red = v.kill_kind(VarKind::Alpha);
            CHECK(red == FRF(nov_coeff(t.getCtNon(p, r, rr), d)));
          }
        }
      }

    // Transformed series: congruent to A^p modulo hbar^{-1}.
    Nov<FRF> yp = y_p_transform(t, p);
    for (const auto& [d, c] : yp) {
      MultiPoly nn = nonneg_h_part(c, np + 1);
      if (d == zero)
        CHECK((nn - mono_A(p)).is_zero());
      else
        CHECK(nn.is_zero());
    }
  }
}

}  // namespace

TEST_CASE("tower: quintic structure") {
  ToricData td = build_toric(p4());
  BundleSpec b5 = line_bundle_plus({5});
  NovCtx ctx = make_ctx(td, 2);
  DpTower tn = dp_tower(td, b5, SeriesFamily::Ycheck, false, 3, ctx);
  check_tower_properties(td, b5, tn);
  DpTower te = dp_tower(td, b5, SeriesFamily::Ycheck, true, 2, ctx);
  check_tower_properties(td, b5, te);

  // Projective shortcut: J at level p is I_p(q) times the identity
  // (threshold 0 here), and the tower matches the renormalised
  // one-variable recursion.
  PnSpecial ps = pn_special(5, {5}, {}, 3, ctx.cutoff);
  CHECK(tn.I0 == ps.I[0]);
  for (int level = 1; level <= 3; ++level) {
    const auto& J = tn.J[static_cast<size_t>(level)];
    REQUIRE(J.size() == 1);
    CHECK(J.begin()->second == pn_unit(ps, level));
  }
  // D^p Y = A^p M^p F(A/hbar, q) / I_p: check via the recursion
  // D^p = (1/I_p) {A + hbar q d/dq} D^{p-1}.
  Nov<FRF> cur = tn.main.at(Deg{0});
  for (int p = 1; p <= 3; ++p) {
    Nov<FRF> nxt = raw_ops(cur, Deg{1});
    Nov<Rat> inv = nov_invert(pn_unit(ps, p), ctx);
    nxt = nov_mul_with<Rat, FRF, FRF>(
        inv, nxt, ctx, [](const Rat& x, const FRF& y) { return y * x; });
    CHECK(series_equal(tn.main.at(Deg{p}), nxt));
    cur = nxt;
  }
}

TEST_CASE("tower: conifold structure") {
  ToricData td = build_toric(p1());
  BundleSpec bconi = line_bundles_minus({{-1}, {-1}});
  NovCtx ctx = make_ctx(td, 3);
  DpTower te = dp_tower(td, bconi, SeriesFamily::Ycheck, true, 2, ctx);
  check_tower_properties(td, bconi, te);
  DpTower th = dp_tower(td, bconi, SeriesFamily::Yhat2, true, 2, ctx);
  check_tower_properties(td, bconi, th);

  // Threshold 2: J at level p is I_{p-2}, so level 1 gives the constant 1
  // and level 2 gives I_0 = 1/(1-q).
  PnSpecial ps = pn_special(2, {}, {-1, -1}, 0, ctx.cutoff);
  Nov<Rat> one;
  one.emplace(ctx.zero(), Rat(1));
  REQUIRE(te.J[1].size() == 1);
  CHECK(te.J[1].begin()->second == one);
  REQUIRE(te.J[2].size() == 1);
  CHECK(te.J[2].begin()->second == ps.I[0]);
}

TEST_CASE("tower: two-variable target") {
  // P^1 x P^1 with the (-1,-1) bundle: nu = 0 on all of the cone, k = 2.
  ToricData td = build_toric(p1xp1());
  BundleSpec b;
  b.ellMinus.push_back({-1, -1});
  b.ellMinus.push_back({-1, -1});
  NovCtx ctx = make_ctx(td, 2);
  DpTower tn = dp_tower(td, b, SeriesFamily::Ycheck, false, 2, ctx);
  check_tower_properties(td, b, tn);
  DpTower te = dp_tower(td, b, SeriesFamily::Ycheck, true, 2, ctx);
  check_tower_properties(td, b, te);
}

TEST_CASE("tower: hatted bundle family") {
  // P^2 / O(-1)+O(-2): nu = 0, b = 2; both the plain and hatted families
  // admit towers.
  ToricData td = build_toric(p2());
  BundleSpec bm = line_bundles_minus({{-1}, {-2}});
  NovCtx ctx = make_ctx(td, 2);
  DpTower tc = dp_tower(td, bm, SeriesFamily::Ycheck, true, 2, ctx);
  check_tower_properties(td, bm, tc);
  DpTower tb = dp_tower(td, bm, SeriesFamily::Yhatbundle, false, 2, ctx);
  check_tower_properties(td, bm, tb);
}
