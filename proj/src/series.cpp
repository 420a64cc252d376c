#include "toricgw/series.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <sstream>

namespace toricgw {

namespace {

// ---------------------------------------------------------------------------
// Small utilities
// ---------------------------------------------------------------------------

long dot_col(const std::vector<long>& col, const Deg& d) {
  long v = 0;
  for (size_t i = 0; i < col.size(); ++i) v += col[i] * d[i];
  return v;
}

// sum_i m_ij A_i [- alpha_j] + s*hbar
MultiPoly column_form(const ToricPair& tp, int j, long s, bool equivariant) {
  MultiPoly p;
  for (long i = 0; i < tp.k; ++i)
    if (tp.M[i][j] != 0)
      p = p + mp_var(var_A(static_cast<uint32_t>(i))) * Rat(tp.M[i][j]);
  if (equivariant) p = p - mp_var(var_alpha(static_cast<uint32_t>(j)));
  if (s != 0) p = p + mp_var(var_h()) * Rat(s);
  return p;
}

// sum_r ell_r A_r + s*hbar   (s may be negative)
MultiPoly bundle_form(const std::vector<long>& ell, long s) {
  MultiPoly p;
  for (size_t r = 0; r < ell.size(); ++r)
    if (ell[r] != 0)
      p = p + mp_var(var_A(static_cast<uint32_t>(r))) * Rat(ell[r]);
  if (s != 0) p = p + mp_var(var_h()) * Rat(s);
  return p;
}

bool is_zero_deg(const Deg& d) {
  for (long v : d)
    if (v != 0) return false;
  return true;
}

std::string deg_str(const Deg& d) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < d.size(); ++i) os << (i ? "," : "") << d[i];
  os << ")";
  return os.str();
}

// Reduces and demands a polynomial value.
MultiPoly frf_to_poly(FRF v, const std::string& what) {
  v.reduce();
  if (v.is_zero()) return MultiPoly();
  if (!v.is_polynomial())
    fail(ErrCode::Internal, what + ": expected a polynomial value, got " + v.str());
  return v.num();
}

Nov<FRF> kill_alpha_series(const Nov<FRF>& s) {
  Nov<FRF> r;
  for (const auto& [d, c] : s) {
    FRF v = c.kill_kind(VarKind::Alpha);
    if (!v.is_zero()) r.emplace(d, v);
  }
  return r;
}

// Per-degree hbar^0 Laurent coefficient; must be a rational constant.
Nov<Rat> h0_scalar(const Nov<FRF>& s, const std::string& what) {
  Nov<Rat> r;
  for (const auto& [d, c] : s) {
    auto lx = laurent_expand(c, var_h(), 0, 0);
    auto it = lx.find(0);
    if (it == lx.end()) continue;
    FRF v = it->second;
    v.reduce();
    if (v.is_zero()) continue;
    if (!v.is_constant())
      fail(ErrCode::Internal,
           what + ": leading part at " + deg_str(d) + " is not scalar: " + v.str());
    r.emplace(d, v.constant_value());
  }
  return r;
}

// series (Nov<Rat>) * series (Nov<FRF>)
Nov<FRF> scale_series(const Nov<Rat>& a, const Nov<FRF>& b, const NovCtx& ctx) {
  return nov_mul_with<Rat, FRF, FRF>(
      a, b, ctx, [](const Rat& x, const FRF& y) { return y * x; });
}

// {A_i + hbar q_i d/dq_i} acting degree-by-degree.
Nov<FRF> apply_op(const Nov<FRF>& s, long i) {
  Nov<FRF> r;
  for (const auto& [d, c] : s) {
    MultiPoly op = mp_var(var_A(static_cast<uint32_t>(i)));
    if (d[i] != 0) op = op + mp_var(var_h()) * Rat(d[i]);
    FRF v = c;
    v.mul_poly(op);
    if (!v.is_zero()) r.emplace(d, std::move(v));
  }
  return r;
}

Deg mono_to_exponents(const Mono& m, long k, const std::string& what) {
  Deg r(static_cast<size_t>(k), 0);
  for (const auto& [vid, e] : m) {
    if (var_kind(vid) != VarKind::A || var_index(vid) >= k)
      fail(ErrCode::Internal, what + ": unexpected variable in monomial");
    r[var_index(vid)] = static_cast<long>(e);
  }
  return r;
}

using NovMat = std::map<std::pair<Deg, Deg>, Nov<Rat>>;

NovMat mat_identity(const std::vector<Deg>& basis, const NovCtx& ctx) {
  NovMat id;
  for (const Deg& p : basis) {
    Nov<Rat> one;
    one.emplace(ctx.zero(), Rat(1));
    id.emplace(std::make_pair(p, p), std::move(one));
  }
  return id;
}

NovMat mat_mul(const NovMat& A, const NovMat& B, const std::vector<Deg>& basis,
               const NovCtx& ctx) {
  NovMat C;
  for (const Deg& r : basis)
    for (const Deg& p : basis) {
      Nov<Rat> acc;
      for (const Deg& s : basis) {
        auto ia = A.find({r, s});
        if (ia == A.end()) continue;
        auto ib = B.find({s, p});
        if (ib == B.end()) continue;
        acc = nov_add(acc, nov_mul(ia->second, ib->second, ctx));
      }
      nov_prune(acc);
      if (!acc.empty()) C.emplace(std::make_pair(r, p), std::move(acc));
    }
  return C;
}

bool mat_equal(const NovMat& A, const NovMat& B) {
  auto norm = [](const NovMat& M) {
    NovMat r;
    for (const auto& [k, v] : M) {
      Nov<Rat> c = v;
      nov_prune(c);
      if (!c.empty()) r.emplace(k, std::move(c));
    }
    return r;
  };
  return norm(A) == norm(B);
}

// Inverse of a matrix over truncated Novikov series whose constant term is
// the identity, by the terminating geometric series.
NovMat mat_inverse(const NovMat& J, const std::vector<Deg>& basis,
                   const NovCtx& ctx) {
  NovMat id = mat_identity(basis, ctx);
  // E = Id - J
  NovMat E;
  for (const Deg& r : basis)
    for (const Deg& p : basis) {
      Nov<Rat> v;
      auto ii = id.find({r, p});
      if (ii != id.end()) v = ii->second;
      auto ij = J.find({r, p});
      if (ij != J.end()) v = nov_sub(v, ij->second);
      nov_prune(v);
      if (!v.empty()) E.emplace(std::make_pair(r, p), std::move(v));
    }
  for (const auto& [key, v] : E)
    if (v.count(ctx.zero()))
      fail(ErrCode::JNotInvertible,
           "endomorphism is not the identity at degree zero");
  NovMat X = id;
  for (long it = 0; it <= ctx.cutoff; ++it) {
    NovMat EX = mat_mul(E, X, basis, ctx);
    X = id;
    for (auto& [key, v] : EX) {
      auto ix = X.find(key);
      if (ix == X.end()) X.emplace(key, std::move(v));
      else ix->second = nov_add(ix->second, v);
    }
  }
  if (!mat_equal(mat_mul(J, X, basis, ctx), id))
    fail(ErrCode::Internal, "matrix inverse verification failed");
  return X;
}

// Unit constant series in an arbitrary coefficient ring.
template <class C>
Nov<C> one_series(const NovCtx& ctx) {
  Nov<C> r;
  r.emplace(ctx.zero(), C() + Rat(1));
  return r;
}

// Triangular solve for the corrected structure coefficients: for each p and
// r = 1..|p| (in increasing r, then increasing |rr|),
//   Ct[(p,r,rr)] = - sum_{t<r} sum_{|s|<=|p|-t} Ct[(p,t,s)] C[(s,|rr|+r-t,rr)]
//                  - sum_{|s|<|rr|}            Ct[(p,r,s)] C[(s,|rr|,rr)]
// with the t = 0 layer the Kronecker delta (not stored).
template <class C>
std::map<std::tuple<Deg, int, Deg>, Nov<C>> solve_ctilde(
    const std::map<std::tuple<Deg, int, Deg>, Nov<C>>& Ctab,
    const std::vector<Deg>& plist, long k, int pmax, const NovCtx& ctx) {
  auto getC = [&](const Deg& s, int sidx, const Deg& rr) -> Nov<C> {
    auto it = Ctab.find(std::make_tuple(s, sidx, rr));
    return it == Ctab.end() ? Nov<C>() : it->second;
  };
  std::map<std::tuple<Deg, int, Deg>, Nov<C>> out;
  auto getCt = [&](const Deg& p, int t, const Deg& s) -> Nov<C> {
    if (t == 0) return s == p ? one_series<C>(ctx) : Nov<C>();
    auto it = out.find(std::make_tuple(p, t, s));
    return it == out.end() ? Nov<C>() : it->second;
  };
  for (const Deg& p : plist) {
    int np = norm_of(p);
    for (int r = 1; r <= np; ++r) {
      for (const Deg& rr : exponents_up_to(k, np - r)) {
        int nrr = norm_of(rr);
        Nov<C> acc;
        for (int t = 0; t < r; ++t)
          for (const Deg& s : exponents_up_to(k, np - t)) {
            Nov<C> ct = getCt(p, t, s);
            if (ct.empty()) continue;
            Nov<C> cc = getC(s, nrr + r - t, rr);
            if (cc.empty()) continue;
            acc = nov_add(acc, nov_mul(ct, cc, ctx));
          }
        if (nrr > 0)
          for (const Deg& s : exponents_up_to(k, nrr - 1)) {
            Nov<C> ct = getCt(p, r, s);
            if (ct.empty()) continue;
            Nov<C> cc = getC(s, nrr, rr);
            if (cc.empty()) continue;
            acc = nov_add(acc, nov_mul(ct, cc, ctx));
          }
        Nov<C> val = nov_scale(acc, Rat(-1));
        nov_prune(val);
        if (!val.empty()) out.emplace(std::make_tuple(p, r, rr), std::move(val));
      }
    }
  }
  (void)pmax;
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Degrees and bundle validation
// ---------------------------------------------------------------------------

DegreeData degree_data(const ToricPair& tp, const BundleSpec& bundle,
                       const Deg& d) {
  if (static_cast<long>(d.size()) != tp.k)
    fail(ErrCode::Internal, "degree vector has wrong length");
  DegreeData dd;
  dd.D.resize(static_cast<size_t>(tp.N));
  for (long j = 0; j < tp.N; ++j) {
    long v = 0;
    for (long i = 0; i < tp.k; ++i) v += tp.M[i][j] * d[i];
    dd.D[static_cast<size_t>(j)] = v;
    dd.nu += v;
  }
  for (const auto& col : bundle.ellPlus) {
    long v = dot_col(col, d);
    dd.Lplus.push_back(v);
    dd.nu -= v;
  }
  for (const auto& col : bundle.ellMinus) {
    long v = dot_col(col, d);
    dd.Lminus.push_back(v);
    dd.nu += v;
  }
  return dd;
}

void validate_bundle(const ToricData& td, const BundleSpec& bundle,
                     bool requireNuNonneg) {
  const long k = td.tp.k;
  for (const auto& col : bundle.ellPlus)
    if (static_cast<long>(col.size()) != k)
      fail(ErrCode::ConfigError, "positive summand class has wrong length");
  for (const auto& col : bundle.ellMinus)
    if (static_cast<long>(col.size()) != k)
      fail(ErrCode::ConfigError, "negative summand class has wrong length");
  for (size_t i = 0; i < bundle.ellPlus.size(); ++i) {
    bool positive = false;
    for (const Deg& g : td.cone.gens) {
      long v = dot_col(bundle.ellPlus[i], g);
      if (v < 0)
        fail(ErrCode::ValidationFailure,
             "positive summand " + std::to_string(i + 1) +
                 " pairs negatively with a curve-cone generator");
      if (v > 0) positive = true;
    }
    if (!positive)
      fail(ErrCode::ValidationFailure,
           "positive summand " + std::to_string(i + 1) +
               " pairs to zero with every curve-cone generator");
  }
  for (size_t i = 0; i < bundle.ellMinus.size(); ++i)
    for (const Deg& g : td.cone.gens)
      if (dot_col(bundle.ellMinus[i], g) >= 0)
        fail(ErrCode::ValidationFailure,
             "negative summand " + std::to_string(i + 1) +
                 " must pair negatively with every curve-cone generator");
  if (requireNuNonneg)
    for (const Deg& g : td.cone.gens)
      if (degree_data(td.tp, bundle, g).nu < 0)
        fail(ErrCode::NuNegative,
             "rank shift is negative on curve-cone generator " + deg_str(g));
}

// ---------------------------------------------------------------------------
// Series families
// ---------------------------------------------------------------------------

FRF series_coefficient(const ToricPair& tp, const BundleSpec& bundle,
                       SeriesFamily family, const Deg& d, bool equivariant) {
  if (family == SeriesFamily::Ystar && is_zero_deg(d)) return FRF();
  DegreeData dd = degree_data(tp, bundle, d);
  std::vector<std::pair<MultiPoly, int>> factors;
  for (long j = 0; j < tp.N; ++j) {
    long D = dd.D[static_cast<size_t>(j)];
    for (long s = D + 1; s <= 0; ++s)
      factors.emplace_back(column_form(tp, static_cast<int>(j), s, equivariant), 1);
    for (long s = 1; s <= D; ++s)
      factors.emplace_back(column_form(tp, static_cast<int>(j), s, equivariant), -1);
  }
  // Positive-summand product: s = 1..L+ except the Yhat2 family, which uses
  // s = 0..L+-1.
  for (size_t i = 0; i < bundle.ellPlus.size(); ++i) {
    long L = dd.Lplus[i];
    long lo = family == SeriesFamily::Yhat2 ? 0 : 1;
    long hi = family == SeriesFamily::Yhat2 ? L - 1 : L;
    for (long s = lo; s <= hi; ++s)
      factors.emplace_back(bundle_form(bundle.ellPlus[i], s), 1);
  }
  // Negative-summand product (factors ell.A - s hbar): the ranges are
  // s = 0..-L--1 (Ycheck), 1..-L- (Yhat2), 1..-L- (Yhatbundle),
  // 1..-L--1 (Ystar).
  for (size_t i = 0; i < bundle.ellMinus.size(); ++i) {
    long L = dd.Lminus[i];
    long lo = family == SeriesFamily::Ycheck ? 0 : 1;
    long hi = -L;
    if (family == SeriesFamily::Ycheck || family == SeriesFamily::Ystar) --hi;
    for (long s = lo; s <= hi; ++s)
      factors.emplace_back(bundle_form(bundle.ellMinus[i], -s), 1);
  }
  return frf_from_product(Rat(1), factors);
}

NovCtx make_ctx(const ToricData& td, long cutoff) {
  NovCtx ctx;
  ctx.w = td.cone.w;
  ctx.cutoff = cutoff;
  return ctx;
}

Nov<FRF> build_series(const ToricData& td, const BundleSpec& bundle,
                      SeriesFamily family, bool equivariant,
                      const NovCtx& ctx) {
  for (const Deg& g : td.cone.gens)
    if (degree_data(td.tp, bundle, g).nu < 0) {
      std::fprintf(stderr,
                   "warning: rank shift is negative on a curve-cone "
                   "generator; series built anyway\n");
      break;
    }
  Nov<FRF> r;
  for (const Deg& d : cone_lattice_points(td.cone, ctx.cutoff)) {
    FRF c = series_coefficient(td.tp, bundle, family, d, equivariant);
    if (!c.is_zero()) r.emplace(d, std::move(c));
  }
  return r;
}

Nov<FRF> restrict_to_fixed_point(const Nov<FRF>& s, const FixedPoint& fp,
                                 long k) {
  Nov<FRF> r;
  for (const auto& [d, c] : s) {
    FRF v = c;
    for (long i = 0; i < k; ++i)
      v = v.subst(var_A(static_cast<uint32_t>(i)), FRF(fp.x[static_cast<size_t>(i)]));
    if (!v.is_zero()) r.emplace(d, std::move(v));
  }
  return r;
}

int norm_of(const Deg& p) {
  long s = 0;
  for (long v : p) s += v;
  return static_cast<int>(s);
}

std::vector<Deg> exponents_of_norm(long k, int n) {
  std::vector<Deg> out;
  if (n < 0) return out;
  if (k == 1) {
    out.push_back(Deg{n});
    return out;
  }
  for (int v = 0; v <= n; ++v)
    for (Deg rest : exponents_of_norm(k - 1, n - v)) {
      Deg d;
      d.push_back(v);
      d.insert(d.end(), rest.begin(), rest.end());
      out.push_back(std::move(d));
    }
  return out;
}

std::vector<Deg> exponents_up_to(long k, int nmax) {
  std::vector<Deg> out;
  for (int n = 0; n <= nmax; ++n)
    for (Deg& d : exponents_of_norm(k, n)) out.push_back(std::move(d));
  return out;
}

// ---------------------------------------------------------------------------
// Differentiation tower
// ---------------------------------------------------------------------------

Nov<FRF> DpTower::getC(const Deg& p, int s, const Deg& r) const {
  auto it = C.find(std::make_tuple(p, s, r));
  return it == C.end() ? Nov<FRF>() : it->second;
}
Nov<Rat> DpTower::getCnon(const Deg& p, int s, const Deg& r) const {
  auto it = Cnon.find(std::make_tuple(p, s, r));
  return it == Cnon.end() ? Nov<Rat>() : it->second;
}
Nov<FRF> DpTower::getCt(const Deg& p, int r, const Deg& s) const {
  auto it = Ct.find(std::make_tuple(p, r, s));
  return it == Ct.end() ? Nov<FRF>() : it->second;
}
Nov<Rat> DpTower::getCtNon(const Deg& p, int r, const Deg& s) const {
  auto it = CtNon.find(std::make_tuple(p, r, s));
  return it == CtNon.end() ? Nov<Rat>() : it->second;
}

DpTower dp_tower(const ToricData& td, const BundleSpec& bundle,
                 SeriesFamily family, bool equivariant, int pmax,
                 const NovCtx& ctx) {
  validate_bundle(td, bundle, /*requireNuNonneg=*/true);
  DpTower t;
  t.k = td.tp.k;
  t.pmax = pmax;
  t.equivariant = equivariant;
  t.ctx = ctx;
  t.plist = exponents_up_to(t.k, pmax);

  std::vector<Deg> pts = cone_lattice_points(td.cone, ctx.cutoff);
  std::map<Deg, long> nuOf;
  long maxnu = 0;
  for (const Deg& d : pts) {
    long nu = degree_data(td.tp, bundle, d).nu;
    nuOf[d] = nu;
    maxnu = std::max(maxnu, nu);
  }
  t.smax = pmax + static_cast<int>(maxnu);

  Nov<FRF> Y = build_series(td, bundle, family, equivariant, ctx);
  Nov<FRF> Y0 = equivariant ? kill_alpha_series(Y) : Y;

  t.I0 = h0_scalar(Y0, "unit-series extraction");
  if (nov_coeff(t.I0, ctx.zero()) != Rat(1))
    fail(ErrCode::JNotInvertible,
         "family is not normalised to 1 at degree zero");
  for (const auto& [d, v] : t.I0)
    if (nuOf.at(d) != 0)
      fail(ErrCode::Internal, "unit series has support off the zero rank-shift sublattice");
  Nov<Rat> inv0 = nov_invert(t.I0, ctx);

  Deg p0(static_cast<size_t>(t.k), 0);
  t.reduced[p0] = scale_series(inv0, Y0, ctx);
  t.main[p0] = equivariant ? scale_series(inv0, Y, ctx) : t.reduced[p0];

  t.J.resize(static_cast<size_t>(pmax) + 1);
  t.c.resize(static_cast<size_t>(pmax) + 1);

  for (int level = 1; level <= pmax; ++level) {
    std::vector<Deg> basis = exponents_of_norm(t.k, level);
    std::map<Deg, Nov<FRF>> dtRed, dtMain;
    for (const Deg& p : basis) {
      long nsupp = 0;
      for (long v : p)
        if (v != 0) ++nsupp;
      Nov<FRF> accR, accM;
      for (long i = 0; i < t.k; ++i) {
        if (p[static_cast<size_t>(i)] == 0) continue;
        Deg pm = p;
        --pm[static_cast<size_t>(i)];
        accR = nov_add(accR, apply_op(t.reduced.at(pm), i));
        if (equivariant) accM = nov_add(accM, apply_op(t.main.at(pm), i));
      }
      Rat w(1, static_cast<unsigned long>(nsupp));
      dtRed[p] = nov_scale(accR, w);
      if (equivariant) dtMain[p] = nov_scale(accM, w);
    }

    // Leading endomorphism: the A-degree-`level` part of the hbar^0
    // coefficient of each column, read off from the reduced series.
    NovMat Jm;
    for (const Deg& p : basis) {
      for (const auto& [d, coeff] : dtRed.at(p)) {
        auto lx = laurent_expand(coeff, var_h(), 0, level + 1);
        for (const auto& [e, vraw] : lx) {
          MultiPoly poly = frf_to_poly(vraw, "endomorphism extraction");
          if (poly.is_zero()) continue;
          for (const auto& [mono, cof] : poly.split_by_kinds({VarKind::A})) {
            if (static_cast<int>(mono_total_degree(mono)) != level) continue;
            if (e != 0)
              fail(ErrCode::Internal,
                   "positive descendant power contributes to the endomorphism");
            if (!cof.is_constant())
              fail(ErrCode::Internal, "endomorphism entry is not rational");
            if (nuOf.at(d) != 0)
              fail(ErrCode::Internal,
                   "endomorphism entry off the zero rank-shift sublattice");
            Deg row = mono_to_exponents(mono, t.k, "endomorphism extraction");
            Jm[{row, p}][d] = Jm[{row, p}].count(d)
                                  ? Jm[{row, p}][d] + cof.constant_value()
                                  : cof.constant_value();
          }
        }
      }
      for (auto& [key, v] : Jm) nov_prune(v);
    }
    NovMat cm = mat_inverse(Jm, basis, ctx);
    t.J[static_cast<size_t>(level)] = Jm;
    t.c[static_cast<size_t>(level)] = cm;

    for (const Deg& p : basis) {
      Nov<FRF> sR, sM;
      for (const Deg& pp : basis) {
        auto ic = cm.find({pp, p});
        if (ic == cm.end() || ic->second.empty()) continue;
        sR = nov_add(sR, scale_series(ic->second, dtRed.at(pp), ctx));
        if (equivariant)
          sM = nov_add(sM, scale_series(ic->second, dtMain.at(pp), ctx));
      }
      t.reduced[p] = sR;
      t.main[p] = equivariant ? sM : sR;
    }
  }

  // Expansion coefficients: the hbar^{|p|-s} Laurent coefficient of the
  // series at each q-degree, split by A-monomials.
  auto extract = [&](const std::map<Deg, Nov<FRF>>& src, bool wantRat) {
    std::map<std::tuple<Deg, int, Deg>, Nov<FRF>> tabF;
    std::map<std::tuple<Deg, int, Deg>, Nov<Rat>> tabR;
    for (const Deg& p : t.plist) {
      int np = norm_of(p);
      for (const auto& [d, coeff] : src.at(p)) {
        auto lx = laurent_expand(coeff, var_h(), np - t.smax, np + 1);
        auto top = lx.find(np + 1);
        if (top != lx.end() && !top->second.is_zero())
          fail(ErrCode::Internal, "descendant power above |p| in tower series");
        for (const auto& [e, vraw] : lx) {
          if (e == np + 1) continue;
          int s = np - e;
          MultiPoly poly = frf_to_poly(vraw, "structure-coefficient extraction");
          if (poly.is_zero()) continue;
          for (const auto& [mono, cof] : poly.split_by_kinds({VarKind::A})) {
            Deg r = mono_to_exponents(mono, t.k, "structure-coefficient extraction");
            auto key = std::make_tuple(p, s, r);
            if (wantRat) {
              if (!cof.is_constant())
                fail(ErrCode::Internal,
                     "reduced structure coefficient is not rational");
              Rat v = cof.constant_value();
              tabR[key][d] = tabR[key].count(d) ? tabR[key][d] + v : v;
            } else {
              FRF v(cof);
              tabF[key][d] = tabF[key].count(d) ? tabF[key][d] + v : v;
            }
          }
        }
      }
    }
    for (auto& [key, v] : tabF) nov_prune(v);
    for (auto& [key, v] : tabR) nov_prune(v);
    return std::make_pair(tabF, tabR);
  };

  t.C = extract(t.main, false).first;
  t.Cnon = extract(t.reduced, true).second;

  t.Ct = solve_ctilde<FRF>(t.C, t.plist, t.k, pmax, ctx);
  t.CtNon = solve_ctilde<Rat>(t.Cnon, t.plist, t.k, pmax, ctx);
  return t;
}

Nov<FRF> y_p_transform(const DpTower& tower, const Deg& p) {
  int np = norm_of(p);
  if (np > tower.pmax)
    fail(ErrCode::Internal, "tower not built to the requested level");
  Nov<FRF> res = tower.main.at(p);
  MultiPoly h = mp_var(var_h());
  for (int r = 1; r <= np; ++r)
    for (const Deg& s : exponents_up_to(tower.k, np - r)) {
      Nov<FRF> ct = tower.getCt(p, r, s);
      if (ct.empty()) continue;
      Nov<FRF> term = nov_mul(ct, tower.main.at(s), tower.ctx);
      int e = np - r - norm_of(s);
      if (e > 0) {
        MultiPoly hp = h;
        for (int m = 1; m < e; ++m) hp = hp * h;
        for (auto& [d, v] : term) v.mul_poly(hp);
      }
      res = nov_add(res, term);
    }
  return res;
}

// ---------------------------------------------------------------------------
// Mirror data
// ---------------------------------------------------------------------------

MirrorData mirror_data(const ToricData& td, const BundleSpec& bundle,
                       const NovCtx& ctx) {
  validate_bundle(td, bundle, /*requireNuNonneg=*/true);
  MirrorData md;
  md.k = td.tp.k;
  md.N = td.tp.N;

  std::map<Deg, long> nuOf;
  for (const Deg& d : cone_lattice_points(td.cone, ctx.cutoff))
    nuOf[d] = degree_data(td.tp, bundle, d).nu;

  Nov<FRF> Yeq = build_series(td, bundle, SeriesFamily::Ycheck, true, ctx);
  Nov<FRF> Y0 = kill_alpha_series(Yeq);
  md.I0check = h0_scalar(Y0, "unit-series extraction");
  if (nov_coeff(md.I0check, ctx.zero()) != Rat(1))
    fail(ErrCode::Internal, "unit series lacks constant term 1");
  md.I0hat = h0_scalar(build_series(td, bundle, SeriesFamily::Yhat2, false, ctx),
                       "unit-series extraction");

  // Residue part: per-degree hbar^{-1} Laurent coefficient, divided by the
  // unit series; the result must be linear in (A, alpha).
  Nov<FRF> W;
  for (const auto& [d, c] : Yeq) {
    auto lx = laurent_expand(c, var_h(), -1, -1);
    auto it = lx.find(-1);
    if (it == lx.end() || it->second.is_zero()) continue;
    W.emplace(d, it->second);
  }
  Nov<Rat> invI0 = nov_invert(md.I0check, ctx);
  Nov<FRF> S = scale_series(invI0, W, ctx);

  md.f.assign(static_cast<size_t>(md.k), Nov<Rat>());
  md.g.assign(static_cast<size_t>(md.N), Nov<Rat>());
  for (const auto& [d, vraw] : S) {
    if (d == ctx.zero())
      fail(ErrCode::Internal, "residue part has a degree-zero term");
    long nu = nuOf.at(d);
    MultiPoly poly = frf_to_poly(vraw, "residue extraction");
    for (const auto& [mono, cof] : poly.split_by_kinds({VarKind::A, VarKind::Alpha})) {
      if (!cof.is_constant())
        fail(ErrCode::Internal, "residue part involves the descendant variable");
      Rat v = cof.constant_value();
      if (mono.empty()) {
        // Constant residues live exactly where the rank shift is one.
        if (nu != 1)
          fail(ErrCode::Internal,
               "constant residue off the rank-shift-one sublattice");
        md.G[d] = v;
      } else if (mono.size() == 1 && mono[0].second == 1) {
        if (nu != 0)
          fail(ErrCode::Internal,
               "linear residue off the zero rank-shift sublattice");
        VarId vid = mono[0].first;
        if (var_kind(vid) == VarKind::A)
          md.f[var_index(vid)][d] = v;
        else
          md.g[var_index(vid)][d] = v;
      } else {
        fail(ErrCode::Internal, "residue part is not linear in (A, alpha)");
      }
    }
  }

  if (bundle.b() == 1) {
    md.f0 = f0_series(td, bundle, ctx);
    md.hasF0 = true;
  }
  return md;
}

Nov<Rat> i0_closed_form(const ToricData& td, const BundleSpec& bundle,
                        bool hatted, const NovCtx& ctx) {
  Nov<Rat> r;
  r.emplace(ctx.zero(), Rat(1));
  for (const Deg& d : cone_lattice_points(td.cone, ctx.cutoff)) {
    if (is_zero_deg(d)) continue;
    DegreeData dd = degree_data(td.tp, bundle, d);
    if (dd.nu != 0) continue;
    bool ok = true;
    for (long D : dd.D)
      if (D < 0) ok = false;
    if (!ok) continue;
    Rat den = 1;
    for (long D : dd.D) den *= rat_factorial(D);
    if (!hatted) {
      if (bundle.b() != 0) continue;
      Rat num = 1;
      for (long L : dd.Lplus) num *= rat_factorial(L);
      r[d] = num / den;
    } else {
      bool plusZero = true;
      for (long L : dd.Lplus)
        if (L != 0) plusZero = false;
      if (!plusZero) continue;
      Rat num = 1;
      long sgn = 0;
      for (long L : dd.Lminus) {
        num *= rat_factorial(-L);
        sgn += L;
      }
      Rat v = num / den;
      if (sgn % 2 != 0) v = -v;
      r[d] = v;
    }
  }
  return r;
}

std::vector<Nov<Rat>> f_closed_form(const ToricData& td,
                                    const BundleSpec& bundle,
                                    const NovCtx& ctx) {
  const long k = td.tp.k;
  std::vector<Nov<Rat>> raw(static_cast<size_t>(k));
  std::map<VarId, Rat> allAZero;
  for (long i = 0; i < k; ++i) allAZero[var_A(static_cast<uint32_t>(i))] = 0;
  for (const Deg& d : cone_lattice_points(td.cone, ctx.cutoff)) {
    if (is_zero_deg(d)) continue;
    if (degree_data(td.tp, bundle, d).nu != 0) continue;
    FRF c = series_coefficient(td.tp, bundle, SeriesFamily::Ycheck, d, false);
    FRF c1 = c.subst(var_h(), Rat(1));
    // d/dA_i of num/den at A = 0 via the quotient rule on the expanded
    // denominator.
    MultiPoly num = c1.num();
    MultiPoly den = mp_const(Rat(1));
    for (const auto& [f, e] : c1.den())
      for (int m = 0; m < e; ++m) den = den * f;
    Rat n0 = num.subst_many(allAZero).constant_value();
    Rat d0 = den.subst_many(allAZero).constant_value();
    if (d0 == 0) fail(ErrCode::Internal, "denominator vanishes at A = 0");
    for (long i = 0; i < k; ++i) {
      Rat np = num.derivative(var_A(static_cast<uint32_t>(i)))
                   .subst_many(allAZero)
                   .constant_value();
      Rat dp = den.derivative(var_A(static_cast<uint32_t>(i)))
                   .subst_many(allAZero)
                   .constant_value();
      Rat v = (np * d0 - n0 * dp) / (d0 * d0);
      if (v != 0) raw[static_cast<size_t>(i)][d] = v;
    }
  }
  Nov<Rat> invI0 = nov_invert(i0_closed_form(td, bundle, false, ctx), ctx);
  std::vector<Nov<Rat>> out;
  for (auto& s : raw) out.push_back(nov_mul(invI0, s, ctx));
  return out;
}

Nov<Rat> g_shift_closed_form(const ToricData& td, const BundleSpec& bundle,
                             const NovCtx& ctx) {
  Nov<Rat> raw;
  if (bundle.b() != 0) return raw;
  for (const Deg& d : cone_lattice_points(td.cone, ctx.cutoff)) {
    if (is_zero_deg(d)) continue;
    DegreeData dd = degree_data(td.tp, bundle, d);
    if (dd.nu != 1) continue;
    bool ok = true;
    for (long D : dd.D)
      if (D < 0) ok = false;
    if (!ok) continue;
    Rat num = 1;
    for (long L : dd.Lplus) num *= rat_factorial(L);
    Rat den = 1;
    for (long D : dd.D) den *= rat_factorial(D);
    raw[d] = num / den;
  }
  Nov<Rat> invI0 = nov_invert(i0_closed_form(td, bundle, false, ctx), ctx);
  return nov_mul(invI0, raw, ctx);
}

Nov<Rat> f0_series(const ToricData& td, const BundleSpec& bundle,
                   const NovCtx& ctx) {
  if (bundle.b() != 1)
    fail(ErrCode::Internal, "f0 requires exactly one negative summand");
  Nov<Rat> r;
  for (const Deg& d : cone_lattice_points(td.cone, ctx.cutoff)) {
    if (is_zero_deg(d)) continue;
    DegreeData dd = degree_data(td.tp, bundle, d);
    if (dd.nu != 0) continue;
    bool ok = true;
    for (long D : dd.D)
      if (D < 0) ok = false;
    if (!ok) continue;
    long L1 = dd.Lminus[0];
    Rat num = rat_factorial(-L1 - 1);
    for (long L : dd.Lplus) num *= rat_factorial(L);
    Rat den = 1;
    for (long D : dd.D) den *= rat_factorial(D);
    Rat v = num / den;
    if ((L1 + 1) % 2 != 0) v = -v;
    if (v != 0) r[d] = v;
  }
  return r;
}

std::vector<Nov<Rat>> mirror_units(const MirrorData& md, MirrorDirection dir,
                                   const NovCtx& ctx) {
  const size_t k = static_cast<size_t>(md.k);
  std::vector<Nov<Rat>> units(k);
  if (dir == MirrorDirection::Forward) {
    for (size_t i = 0; i < k; ++i) units[i] = nov_exp(md.f[i], ctx);
    return units;
  }
  // Inverse: solve q_i = Q_i V_i(Q) with V_i = exp(-f_i(q(Q))) by fixed
  // point; each pass is exact one weight level further.
  std::vector<Nov<Rat>> V(k);
  for (size_t i = 0; i < k; ++i) {
    V[i].emplace(ctx.zero(), Rat(1));
  }
  for (long it = 0; it <= ctx.cutoff + 1; ++it) {
    std::vector<Nov<Rat>> Vn(k);
    bool same = true;
    for (size_t i = 0; i < k; ++i) {
      Nov<Rat> fhat = nov_compose_units(md.f[i], V, ctx);
      Vn[i] = nov_exp(nov_scale(fhat, Rat(-1)), ctx);
      if (Vn[i] != V[i]) same = false;
    }
    V = std::move(Vn);
    if (same) return V;
  }
  fail(ErrCode::Internal, "mirror-map inversion did not converge");
}

// ---------------------------------------------------------------------------
// Projective-space specialisation
// ---------------------------------------------------------------------------

PnSpecial pn_special(long n, const std::vector<long>& ellPlus,
                     const std::vector<long>& ellMinus, int pmax,
                     long cutoff) {
  long lsum = 0;
  for (long l : ellPlus) lsum += l;
  for (long l : ellMinus) lsum -= l;
  if (lsum != n)
    fail(ErrCode::Internal,
         "projective specialisation needs total bundle weight n");
  NovCtx ctx;
  ctx.w = {1};
  ctx.cutoff = cutoff;
  VarId w = var_A(0);
  MultiPoly wp = mp_var(w);

  PnSpecial ps;
  ps.n = n;
  ps.cutoff = cutoff;

  std::vector<FRF> F(static_cast<size_t>(cutoff) + 1);
  for (long d = 0; d <= cutoff; ++d) {
    std::vector<std::pair<MultiPoly, int>> factors;
    for (long l : ellPlus)
      for (long r = 1; r <= l * d; ++r)
        factors.emplace_back(wp * Rat(l) + mp_const(Rat(r)), 1);
    for (long l : ellMinus)
      for (long r = 1; r <= -l * d; ++r)
        factors.emplace_back(wp * Rat(l) - mp_const(Rat(r)), 1);
    for (long r = 1; r <= d; ++r)
      factors.emplace_back(wp + mp_const(Rat(r)), -static_cast<int>(n));
    F[static_cast<size_t>(d)] = frf_from_product(Rat(1), factors);
  }

  auto unit_of = [&](const std::vector<FRF>& G) {
    Nov<Rat> I;
    for (long d = 0; d <= cutoff; ++d) {
      FRF v = G[static_cast<size_t>(d)];
      v.reduce();
      if (v.is_zero()) continue;
      FRF at0 = v.subst(w, Rat(0));
      at0.reduce();
      if (!at0.is_constant())
        fail(ErrCode::Internal, "unit evaluation is not scalar");
      Rat c = at0.constant_value();
      if (c != 0) I[{static_cast<int>(d)}] = c;
    }
    return I;
  };

  ps.MF.push_back(F);
  ps.I.push_back(unit_of(F));

  for (int p = 1; p <= pmax; ++p) {
    const std::vector<FRF>& prev = ps.MF.back();
    Nov<Rat> inv = nov_invert(ps.I.back(), ctx);
    std::vector<FRF> next(static_cast<size_t>(cutoff) + 1);
    for (long d = 0; d <= cutoff; ++d) {
      // H = prev / prev(0, q), then {1 + (q/w) d/dq} H degreewise.
      FRF H;
      for (long e = 0; e <= d; ++e) {
        auto it = inv.find({static_cast<int>(d - e)});
        if (it == inv.end()) continue;
        H = H + prev[static_cast<size_t>(e)] * it->second;
      }
      if (d > 0 && !H.is_zero()) {
        H.mul_poly(wp + mp_const(Rat(d)));
        H.div_poly(wp);
        H.reduce();
      }
      next[static_cast<size_t>(d)] = H;
    }
    ps.I.push_back(unit_of(next));
    ps.MF.push_back(std::move(next));
  }
  return ps;
}

Nov<Rat> pn_unit(const PnSpecial& ps, int p) {
  if (p < 0) {
    Nov<Rat> one;
    one.emplace(Deg{0}, Rat(1));
    return one;
  }
  if (static_cast<size_t>(p) >= ps.I.size())
    fail(ErrCode::Internal, "unit series index beyond construction depth");
  return ps.I[static_cast<size_t>(p)];
}

}  // namespace toricgw
