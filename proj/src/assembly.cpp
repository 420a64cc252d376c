#include "toricgw/assembly.hpp"

#include <algorithm>
#include <sstream>

namespace toricgw {

namespace {

// ---------------------------------------------------------------------------
// Small helpers
// ---------------------------------------------------------------------------

bool is_zero_deg(const Deg& d) {
  for (int v : d)
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

// prod_i (ell_i . A) over the given summand columns.
MultiPoly summand_euler(const std::vector<std::vector<long>>& ell, long k) {
  MultiPoly e = MultiPoly::constant(1);
  for (const auto& col : ell) {
    MultiPoly f;
    for (long i = 0; i < k; ++i)
      if (col[i] != 0) f += mp_var(var_A(static_cast<uint32_t>(i))) * Rat(col[i]);
    e *= f;
  }
  return e;
}

}  // namespace

MultiPoly euler_class(const BundleSpec& bundle, bool positive, long k) {
  return summand_euler(positive ? bundle.ellPlus : bundle.ellMinus, k);
}

namespace {

// A^p as a polynomial.
MultiPoly a_monomial(const Deg& p) {
  MultiPoly m = MultiPoly::constant(1);
  for (size_t i = 0; i < p.size(); ++i)
    if (p[i] != 0)
      m *= mp_var(var_A(static_cast<uint32_t>(i))).pow(
          static_cast<uint32_t>(p[i]));
  return m;
}

// prod_i x_i(I)^{p_i} at a fixed point.
MultiPoly x_power_at(const FixedPoint& fp, const Deg& p) {
  MultiPoly m = MultiPoly::constant(1);
  for (size_t i = 0; i < p.size(); ++i)
    if (p[i] != 0) m *= fp.x[i].pow(static_cast<uint32_t>(p[i]));
  return m;
}

// Moves the single hbar slot of every coefficient to the given variable.
Nov<FRF> to_slot(const Nov<FRF>& s, VarId slot) {
  FRF target{mp_var(slot)};
  Nov<FRF> r;
  for (const auto& [d, c] : s) {
    FRF v = c.subst(var_h(), target);
    if (!v.is_zero()) r.emplace(d, v);
  }
  return r;
}

// Exact divisibility of a bivariate-slot value by (h1 + h2): every
// denominator factor involves at most one slot, so the value vanishes on
// h2 = -h1 iff its reduced numerator does.
bool divisible_by_h1_plus_h2(const FRF& v) {
  FRF num{v.num()};
  FRF sub = num.subst(var_h2(), FRF(-mp_var(var_h1())));
  return sub.is_zero();
}

FRF h1_plus_h2() { return FRF(mp_var(var_h1()) + mp_var(var_h2())); }

Rat factorial(long n) {
  Rat f = 1;
  for (long i = 2; i <= n; ++i) f *= i;
  return f;
}

// Evaluates an alpha-only rational function at a seed.
Rat eval_at_seed(const FRF& f, const std::map<VarId, Rat>& seed) {
  FRF v = f.subst_many(seed);
  if (!v.is_constant())
    fail(ErrCode::Internal, "seed evaluation left a non-constant value");
  return v.constant_value();
}

}  // namespace

// ---------------------------------------------------------------------------
// Assembly state
// ---------------------------------------------------------------------------

Assembly make_assembly(const ToricData& td, const BundleSpec& bundle,
                       const NovCtx& ctx, int pmax) {
  Assembly asmb;
  asmb.td = td;
  asmb.bundle = bundle;
  asmb.ctx = ctx;
  asmb.pmax = pmax;
  asmb.towerCheck =
      dp_tower(td, bundle, SeriesFamily::Ycheck, /*equivariant=*/true, pmax, ctx);
  asmb.towerHat =
      dp_tower(td, bundle, SeriesFamily::Yhat2, /*equivariant=*/true, pmax, ctx);
  asmb.md = mirror_data(td, bundle, ctx);
  return asmb;
}

Nov<FRF> apply_raw_ops(const Nov<FRF>& s, const Deg& p) {
  Nov<FRF> r = s;
  FRF h{mp_var(var_h())};
  for (size_t i = 0; i < p.size(); ++i) {
    FRF ai{mp_var(var_A(static_cast<uint32_t>(i)))};
    for (int rep = 0; rep < p[i]; ++rep) {
      Nov<FRF> next;
      for (const auto& [d, c] : r) {
        FRF v = (ai + h * Rat(d[i])) * c;
        if (!v.is_zero()) next.emplace(d, v);
      }
      r = std::move(next);
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// One-point functions
// ---------------------------------------------------------------------------

namespace {

// G(q) + sum_i A_i f_i(q) + sum_j alpha_j g_j(q), per Novikov degree.
Nov<FRF> mirror_shift_exponent(const MirrorData& md) {
  Nov<FRF> P;
  auto acc = [&P](const Deg& d, const FRF& v) {
    if (v.is_zero()) return;
    auto it = P.find(d);
    if (it == P.end()) P.emplace(d, v);
    else it->second += v;
  };
  for (const auto& [d, c] : md.G) acc(d, FRF(Rat(c)));
  for (size_t i = 0; i < md.f.size(); ++i)
    for (const auto& [d, c] : md.f[i])
      acc(d, FRF(mp_var(var_A(static_cast<uint32_t>(i))) * c));
  for (size_t j = 0; j < md.g.size(); ++j)
    for (const auto& [d, c] : md.g[j])
      acc(d, FRF(mp_var(var_alpha(static_cast<uint32_t>(j))) * c));
  nov_prune(P);
  return P;
}

// e^{-P/hbar} with P the mirror shift exponent.
Nov<FRF> mirror_prefactor(const MirrorData& md, const NovCtx& ctx) {
  Nov<FRF> P = mirror_shift_exponent(md);
  FRF minusInvH = FRF(mp_var(var_h())).inverse() * Rat(-1);
  Nov<FRF> e;
  for (const auto& [d, c] : P) e.emplace(d, c * minusInvH);
  return nov_exp(e, ctx);
}

RestrictedSeries restrict_all(const Nov<FRF>& s, const ToricData& td) {
  RestrictedSeries r;
  r.atI.reserve(td.fps.size());
  for (const auto& fp : td.fps)
    r.atI.push_back(restrict_to_fixed_point(s, fp, td.tp.k));
  return r;
}

}  // namespace

const RestrictedSeries& z_one_point(Assembly& asmb, const Deg& p,
                                    OnePointVariant variant) {
  int vkey = variant == OnePointVariant::Check ? 0 : 1;
  auto key = std::make_pair(vkey, p);
  auto it = asmb.onePointCache.find(key);
  if (it != asmb.onePointCache.end()) return it->second;

  const DpTower& tower =
      variant == OnePointVariant::Check ? asmb.towerCheck : asmb.towerHat;
  Nov<FRF> yp = y_p_transform(tower, p);
  Nov<FRF> zq = nov_mul(mirror_prefactor(asmb.md, asmb.ctx), yp, asmb.ctx);
  Nov<FRF> zQ = mirror_map(asmb.md, MirrorDirection::Inverse, zq, asmb.ctx);
  return asmb.onePointCache
      .emplace(key, restrict_all(zQ, asmb.td))
      .first->second;
}

// ---------------------------------------------------------------------------
// Reduced one-point functions (b >= 1)
// ---------------------------------------------------------------------------

namespace {

void ensure_star(Assembly& asmb) {
  if (asmb.haveStar) return;
  if (asmb.bundle.b() < 1)
    fail(ErrCode::UnsupportedBundle,
         "reduced one-point functions need a negative summand");
  asmb.ystar = build_series(asmb.td, asmb.bundle, SeriesFamily::Ystar,
                            /*equivariant=*/true, asmb.ctx);
  asmb.towerBundle = dp_tower(asmb.td, asmb.bundle, SeriesFamily::Yhatbundle,
                              /*equivariant=*/true, asmb.pmax, asmb.ctx);
  asmb.haveStar = true;
}

}  // namespace

const StarExpansion& star_expansion(Assembly& asmb, const Deg& p) {
  auto it = asmb.expCache.find(p);
  if (it != asmb.expCache.end()) return it->second;
  ensure_star(asmb);

  const long k = asmb.td.tp.k;
  const long b = asmb.bundle.b();
  const int plen = norm_of(p);

  StarExpansion se;
  se.raw = apply_raw_ops(asmb.ystar, p);

  // Nonnegative-hbar part of the raw series, organised as
  // sum_{s, r} E[(s, r)] A^r hbar^s with |r| + s <= |p| - b.  Shape
  // violations (nonzero coefficients outside that range) are reported.
  for (const auto& [d, c] : se.raw) {
    int hi = static_cast<int>(c.num().deg_in(var_h()));
    std::map<int, FRF> ex = laurent_expand(c, var_h(), 0, hi);
    for (const auto& [s, cs] : ex) {
      if (cs.is_zero()) continue;
      if (s > plen - b)
        fail(ErrCode::Internal,
             "nonnegative hbar power above |p| - b in the reduced series at "
             "degree " + deg_str(d));
      if (!cs.is_polynomial())
        fail(ErrCode::Internal,
             "non-polynomial nonnegative hbar coefficient in the reduced "
             "series");
      for (const auto& [mono, coef] : cs.num().split_by_kinds({VarKind::A})) {
        Deg r(static_cast<size_t>(k), 0);
        for (const auto& [vid, e] : mono)
          r[var_index(vid)] = static_cast<int>(e);
        if (norm_of(r) > plen - b - s)
          fail(ErrCode::Internal,
               "A-degree above |p| - b - s in the reduced series");
        Nov<FRF>& slot = se.E[{s, r}];
        auto jt = slot.find(d);
        if (jt == slot.end()) slot.emplace(d, FRF(coef));
        else jt->second += FRF(coef);
      }
    }
  }
  return asmb.expCache.emplace(p, std::move(se)).first->second;
}

const RestrictedSeries& z_star_one_point(Assembly& asmb, const Deg& p) {
  auto it = asmb.starCache.find(p);
  if (it != asmb.starCache.end()) return it->second;
  ensure_star(asmb);

  const long k = asmb.td.tp.k;
  const long b = asmb.bundle.b();
  const StarExpansion& se = star_expansion(asmb, p);

  Nov<FRF> bracket = se.raw;
  for (const auto& [sr, series] : se.E) {
    const auto& [s, r] = sr;
    Nov<FRF> yr = y_p_transform(asmb.towerBundle, r);
    Nov<FRF> prod = nov_mul(series, yr, asmb.ctx);
    if (s > 0)
      prod = nov_scale(prod,
                       FRF(mp_var(var_h()).pow(static_cast<uint32_t>(s))));
    bracket = nov_sub(bracket, prod);
  }

  MultiPoly eplus = summand_euler(asmb.bundle.ellPlus, k);
  Nov<FRF> zq = nov_scale(bracket, FRF(eplus));

  if (b == 1) {
    // Single negative summand: exponential prefactor and correction tail
    // built from the auxiliary unit-degree series f0.
    MultiPoly eminus = summand_euler(asmb.bundle.ellMinus, k);
    FRF invH = FRF(mp_var(var_h())).inverse();
    Nov<FRF> u;  // -e(E-) f0 / hbar
    for (const auto& [d, c] : asmb.md.f0)
      u.emplace(d, FRF(eminus * c) * invH * Rat(-1));
    Nov<FRF> pref = nov_exp(u, asmb.ctx);
    zq = nov_mul(pref, zq, asmb.ctx);

    // sum_{n >= 0} u^n / (n+1)!
    Nov<FRF> S, pw;
    S.emplace(asmb.ctx.zero(), FRF::one());
    pw.emplace(asmb.ctx.zero(), FRF::one());
    for (long n = 1;; ++n) {
      pw = nov_mul(pw, u, asmb.ctx);
      if (pw.empty()) break;
      S = nov_add(S, nov_scale(pw, Rat(1) / factorial(n + 1)));
    }
    Nov<FRF> f0h;  // e(E+) x^p f0 / hbar
    MultiPoly lead = eplus * a_monomial(p);
    for (const auto& [d, c] : asmb.md.f0)
      f0h.emplace(d, FRF(lead * c) * invH);
    zq = nov_sub(zq, nov_mul(f0h, S, asmb.ctx));
  }

  Nov<FRF> zQ = mirror_map(asmb.md, MirrorDirection::Inverse, zq, asmb.ctx);
  return asmb.starCache.emplace(p, restrict_all(zQ, asmb.td)).first->second;
}

// ---------------------------------------------------------------------------
// Diagonal data
// ---------------------------------------------------------------------------

bool product_of_projective_blocks(const ToricPair& tp,
                                  std::vector<std::vector<int>>& blocks) {
  blocks.assign(static_cast<size_t>(tp.k), {});
  for (long j = 0; j < tp.N; ++j) {
    int onesRow = -1;
    for (long i = 0; i < tp.k; ++i) {
      if (tp.M[i][j] == 0) continue;
      if (tp.M[i][j] != 1 || onesRow >= 0) return false;
      onesRow = static_cast<int>(i);
    }
    if (onesRow < 0) return false;
    blocks[static_cast<size_t>(onesRow)].push_back(static_cast<int>(j));
  }
  for (const auto& blk : blocks)
    if (blk.size() < 2) return false;
  return true;
}

namespace {

// All exponent vectors with p_i <= top_i, ordered (norm, lex).
std::vector<Deg> box_exponents(const std::vector<int>& top) {
  std::vector<Deg> out;
  Deg cur(top.size(), 0);
  while (true) {
    out.push_back(cur);
    size_t i = 0;
    while (i < top.size() && cur[i] == top[i]) cur[i++] = 0;
    if (i == top.size()) break;
    ++cur[i];
  }
  std::sort(out.begin(), out.end(), [](const Deg& a, const Deg& b) {
    int na = norm_of(a), nb = norm_of(b);
    if (na != nb) return na < nb;
    return a < b;
  });
  return out;
}

void validate_diagonal(const ToricData& td, const DiagonalData& dd) {
  const size_t P = dd.basis.size();
  std::vector<std::vector<FRF>> xp(P);
  for (size_t p = 0; p < P; ++p)
    for (const auto& fp : td.fps)
      xp[p].push_back(FRF(x_power_at(fp, dd.basis[p])));
  for (size_t I = 0; I < td.fps.size(); ++I)
    for (size_t J = 0; J < td.fps.size(); ++J) {
      FRF sum;
      for (size_t p = 0; p < P; ++p)
        for (size_t s = 0; s < P; ++s)
          if (!dd.g[p][s].is_zero()) sum += dd.g[p][s] * xp[p][I] * xp[s][J];
      FRF expect = I == J ? FRF(td.fps[I].eulerT) : FRF();
      if (!(sum == expect))
        fail(ErrCode::Internal,
             "diagonal certificate failed at a fixed-point pair");
    }
}

// Inverse of a square matrix over the rational-function field.
std::vector<std::vector<FRF>> frf_inverse(std::vector<std::vector<FRF>> m) {
  const size_t n = m.size();
  std::vector<std::vector<FRF>> inv(n, std::vector<FRF>(n));
  for (size_t i = 0; i < n; ++i) inv[i][i] = FRF::one();
  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    while (piv < n && m[piv][col].is_zero()) ++piv;
    if (piv == n)
      fail(ErrCode::SingularPairing, "pairing matrix is singular");
    std::swap(m[piv], m[col]);
    std::swap(inv[piv], inv[col]);
    FRF d = m[col][col].inverse();
    for (size_t j = 0; j < n; ++j) {
      m[col][j] *= d;
      inv[col][j] *= d;
    }
    for (size_t r = 0; r < n; ++r) {
      if (r == col || m[r][col].is_zero()) continue;
      FRF f = m[r][col];
      for (size_t j = 0; j < n; ++j) {
        m[r][j] -= f * m[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

}  // namespace

DiagonalData product_diagonal(const ToricData& td) {
  std::vector<std::vector<int>> blocks;
  if (!product_of_projective_blocks(td.tp, blocks))
    fail(ErrCode::ConfigError,
         "closed-form diagonal requires a product of projective spaces");
  const size_t k = blocks.size();

  // Elementary symmetric polynomials of the alphas of each block.
  std::vector<std::vector<MultiPoly>> sigma(k);
  for (size_t i = 0; i < k; ++i) {
    size_t Ni = blocks[i].size();
    sigma[i].assign(Ni + 1, MultiPoly());
    sigma[i][0] = MultiPoly::constant(1);
    size_t used = 0;
    for (int j : blocks[i]) {
      ++used;
      MultiPoly aj = mp_var(var_alpha(static_cast<uint32_t>(j)));
      for (size_t r = std::min(used, Ni);; --r) {
        if (r >= 1) sigma[i][r] = sigma[i][r] + sigma[i][r - 1] * aj;
        if (r == 0) break;
      }
    }
  }

  std::vector<int> top(k);
  for (size_t i = 0; i < k; ++i)
    top[i] = static_cast<int>(blocks[i].size()) - 1;
  DiagonalData dd;
  dd.basis = box_exponents(top);
  const size_t P = dd.basis.size();
  dd.g.assign(P, std::vector<FRF>(P));
  for (size_t p = 0; p < P; ++p)
    for (size_t s = 0; s < P; ++s) {
      MultiPoly prod = MultiPoly::constant(1);
      bool ok = true;
      for (size_t i = 0; i < k && ok; ++i) {
        int r = top[i] - dd.basis[p][i] - dd.basis[s][i];
        if (r < 0) {
          ok = false;
          break;
        }
        prod *= sigma[i][static_cast<size_t>(r)];
        if (r % 2 == 1) prod *= Rat(-1);
      }
      if (ok && !prod.is_zero()) dd.g[p][s] = FRF(prod);
    }
  validate_diagonal(td, dd);
  return dd;
}

DiagonalData diagonal_data(const ToricData& td, const std::vector<Deg>& basis) {
  std::vector<std::vector<int>> blocks;
  if (basis.empty() && product_of_projective_blocks(td.tp, blocks))
    return product_diagonal(td);
  if (basis.size() != td.fps.size())
    fail(ErrCode::SingularPairing,
         "diagonal basis must have one class per fixed point");
  const size_t P = basis.size();
  std::vector<std::vector<FRF>> G(P, std::vector<FRF>(P));
  for (size_t p = 0; p < P; ++p)
    for (size_t s = 0; s <= p; ++s) {
      std::vector<uint32_t> e(basis[p].size());
      for (size_t i = 0; i < e.size(); ++i)
        e[i] = static_cast<uint32_t>(basis[p][i] + basis[s][i]);
      FRF val = localize_integral(td.fps, x_monomial_restrictions(td.fps, e));
      G[p][s] = val;
      G[s][p] = val;
    }
  DiagonalData dd;
  dd.basis = basis;
  dd.g = frf_inverse(std::move(G));
  validate_diagonal(td, dd);
  return dd;
}

// ---------------------------------------------------------------------------
// Two-point assembly
// ---------------------------------------------------------------------------

namespace {

// Per-degree exact division by (h1 + h2); degree zero keeps its explicit
// pole, every other degree must divide exactly.
Nov<FRF> divide_out_h1_plus_h2(const Nov<FRF>& acc, const Deg& zero) {
  Nov<FRF> out;
  FRF h12 = h1_plus_h2();
  for (const auto& [d, c] : acc) {
    if (d != zero && !divisible_by_h1_plus_h2(c))
      fail(ErrCode::NotDivisibleByH1PlusH2,
           "two-point numerator at degree " + deg_str(d) +
               " is not divisible by (h1 + h2)");
    FRF q = c / h12;
    if (!q.is_zero()) out.emplace(d, q);
  }
  return out;
}

}  // namespace

TwoPointSeries z_two_point(Assembly& asmb, const DiagonalData& dd) {
  const size_t P = dd.basis.size();
  const size_t nf = asmb.td.fps.size();

  std::vector<std::vector<Nov<FRF>>> SC(P), SH(P);
  for (size_t p = 0; p < P; ++p) {
    const RestrictedSeries& zc =
        z_one_point(asmb, dd.basis[p], OnePointVariant::Check);
    const RestrictedSeries& zh =
        z_one_point(asmb, dd.basis[p], OnePointVariant::Hat);
    SC[p].reserve(nf);
    SH[p].reserve(nf);
    for (size_t I = 0; I < nf; ++I) {
      SC[p].push_back(to_slot(zc.atI[I], var_h1()));
      SH[p].push_back(to_slot(zh.atI[I], var_h2()));
    }
  }

  TwoPointSeries zz;
  zz.nfp = static_cast<int>(nf);
  zz.ctx = asmb.ctx;
  zz.hasQ0 = true;
  Deg zero = asmb.ctx.zero();
  for (size_t I = 0; I < nf; ++I)
    for (size_t J = 0; J < nf; ++J) {
      Nov<FRF> acc;
      for (size_t p = 0; p < P; ++p)
        for (size_t s = 0; s < P; ++s) {
          if (dd.g[p][s].is_zero()) continue;
          acc = nov_add(acc,
                        nov_scale(nov_mul(SC[p][I], SH[s][J], asmb.ctx),
                                  dd.g[p][s]));
        }
      zz.val[{static_cast<int>(I), static_cast<int>(J)}] =
          divide_out_h1_plus_h2(acc, zero);
    }
  return zz;
}

TwoPointSeries z_star(Assembly& asmb, const DiagonalData& dd) {
  const size_t nf = asmb.td.fps.size();
  const long k = asmb.td.tp.k;
  Deg zero = asmb.ctx.zero();

  if (asmb.bundle.b() == 0) {
    // No negative summands: the reduced function is the two-point function
    // with the constant term dropped, multiplied on the first slot by the
    // Euler class of the positive summands.
    TwoPointSeries zz = z_two_point(asmb, dd);
    MultiPoly eplus = summand_euler(asmb.bundle.ellPlus, k);
    std::vector<FRF> ep(nf);
    for (size_t I = 0; I < nf; ++I) {
      Nov<FRF> r = restrict_to_fixed_point(Nov<FRF>{{zero, FRF(eplus)}},
                                           asmb.td.fps[I], k);
      ep[I] = r.count(zero) ? r.at(zero) : FRF();
    }
    TwoPointSeries out;
    out.nfp = zz.nfp;
    out.ctx = zz.ctx;
    out.hasQ0 = false;
    for (const auto& [key, series] : zz.val) {
      Nov<FRF> v;
      for (const auto& [d, c] : series) {
        if (d == zero) continue;
        FRF val = c * ep[static_cast<size_t>(key.first)];
        if (!val.is_zero()) v.emplace(d, val);
      }
      out.val[key] = std::move(v);
    }
    return out;
  }

  const size_t P = dd.basis.size();
  std::vector<std::vector<Nov<FRF>>> S1(P), S2(P), H2(P);
  std::vector<std::vector<FRF>> xp(P);
  for (size_t p = 0; p < P; ++p) {
    const RestrictedSeries& zs = z_star_one_point(asmb, dd.basis[p]);
    const RestrictedSeries& zh =
        z_one_point(asmb, dd.basis[p], OnePointVariant::Hat);
    S1[p].reserve(nf);
    S2[p].reserve(nf);
    H2[p].reserve(nf);
    for (size_t I = 0; I < nf; ++I) {
      S1[p].push_back(to_slot(zs.atI[I], var_h1()));
      S2[p].push_back(to_slot(zs.atI[I], var_h2()));
      H2[p].push_back(to_slot(zh.atI[I], var_h2()));
      xp[p].push_back(FRF(x_power_at(asmb.td.fps[I], dd.basis[p])));
    }
  }

  TwoPointSeries zz;
  zz.nfp = static_cast<int>(nf);
  zz.ctx = asmb.ctx;
  zz.hasQ0 = false;
  for (size_t I = 0; I < nf; ++I)
    for (size_t J = 0; J < nf; ++J) {
      Nov<FRF> acc;
      for (size_t p = 0; p < P; ++p)
        for (size_t s = 0; s < P; ++s) {
          if (dd.g[p][s].is_zero()) continue;
          Nov<FRF> term = nov_scale(S2[s][J], dd.g[p][s] * xp[p][I]);
          term = nov_add(term,
                         nov_scale(nov_mul(S1[p][I], H2[s][J], asmb.ctx),
                                   dd.g[p][s]));
          acc = nov_add(acc, term);
        }
      if (acc.count(zero))
        fail(ErrCode::Internal,
             "reduced two-point numerator acquired a constant term");
      zz.val[{static_cast<int>(I), static_cast<int>(J)}] =
          divide_out_h1_plus_h2(acc, zero);
    }
  return zz;
}

// ---------------------------------------------------------------------------
// Extraction
// ---------------------------------------------------------------------------

Rat extract_invariant(const ToricData& td, const TwoPointSeries& zz,
                      const Deg& d, int p1, int p2,
                      const std::vector<FRF>& eta1,
                      const std::vector<FRF>& eta2,
                      const std::vector<int>& seedIdx) {
  if (is_zero_deg(d))
    fail(ErrCode::MissingDegree,
         "degree zero carries no two-point invariant");
  if (zz.ctx.weight(d) > zz.ctx.cutoff)
    fail(ErrCode::MissingDegree,
         "degree " + deg_str(d) + " is beyond the computed cutoff");
  if (seedIdx.size() < 2)
    fail(ErrCode::ConfigError, "invariant extraction needs two seeds");

  const long N = td.tp.N;
  std::vector<Rat> results;
  for (int idx : seedIdx) {
    std::map<VarId, Rat> seed = alpha_seed(N, idx);
    check_seed(td.fps, seed);
    Rat total = 0;
    for (int I = 0; I < zz.nfp; ++I)
      for (int J = 0; J < zz.nfp; ++J) {
        const Nov<FRF>& series = zz.val.at({I, J});
        FRF c = nov_coeff(series, d);
        if (c.is_zero()) continue;
        FRF cs = c.subst_many(seed);
        if (cs.is_zero()) continue;
        FRF c1 = laurent_expand(cs, var_h1(), -p1 - 1, -p1 - 1)[-p1 - 1];
        if (c1.is_zero()) continue;
        FRF c2 = laurent_expand(c1, var_h2(), -p2 - 1, -p2 - 1)[-p2 - 1];
        if (c2.is_zero()) continue;
        if (!c2.is_constant())
          fail(ErrCode::Internal, "extracted coefficient is not a scalar");
        Rat e1 = eval_at_seed(eta1[static_cast<size_t>(I)], seed);
        Rat e2 = eval_at_seed(eta2[static_cast<size_t>(J)], seed);
        if (e1 == 0 || e2 == 0) continue;
        Rat t1 = eval_at_seed(FRF(td.fps[static_cast<size_t>(I)].eulerT), seed);
        Rat t2 = eval_at_seed(FRF(td.fps[static_cast<size_t>(J)].eulerT), seed);
        total += c2.constant_value() * e1 * e2 / (t1 * t2);
      }
    results.push_back(total);
  }
  for (size_t i = 1; i < results.size(); ++i)
    if (results[i] != results[0])
      fail(ErrCode::AlphaDependent,
           "invariant extraction disagrees between alpha seeds");
  return results[0];
}

// ---------------------------------------------------------------------------
// Closed-form two-point table
// ---------------------------------------------------------------------------

namespace {

// Element of Q[A,B]/(A_i^{N_i}, B_i^{N_i}) with Laurent hbar powers:
// keyed by (A exponents, B exponents, h1 power, h2 power).
using TKey = std::tuple<Deg, Deg, int, int>;
using TElem = std::map<TKey, Rat>;

void tacc(TElem& t, const TKey& k, const Rat& c) {
  auto it = t.find(k);
  if (it == t.end()) {
    if (c != 0) t.emplace(k, c);
    return;
  }
  it->second += c;
  if (it->second == 0) t.erase(it);
}

TElem tmul(const TElem& x, const TElem& y, const std::vector<long>& Ns) {
  TElem r;
  for (const auto& [kx, cx] : x)
    for (const auto& [ky, cy] : y) {
      Deg a = std::get<0>(kx), b = std::get<1>(kx);
      const Deg& a2 = std::get<0>(ky);
      const Deg& b2 = std::get<1>(ky);
      bool keep = true;
      for (size_t i = 0; i < a.size(); ++i) {
        a[i] += a2[i];
        b[i] += b2[i];
        if (a[i] >= Ns[i] || b[i] >= Ns[i]) {
          keep = false;
          break;
        }
      }
      if (!keep) continue;
      tacc(r,
           {a, b, std::get<2>(kx) + std::get<2>(ky),
            std::get<3>(kx) + std::get<3>(ky)},
           cx * cy);
    }
  return r;
}

Rat binom(long n, long m) {
  Rat r = 1;
  for (long i = 0; i < m; ++i) r *= Rat(n - i) / Rat(i + 1);
  return r;
}

// (X + c*h)^e expanded, X the A- or B-slot of block `blk` and h the
// matching hbar slot (selected by `first`).
TElem linear_power(size_t nblocks, size_t blk, bool first, long c, long e) {
  TElem r;
  for (long m = 0; m <= e; ++m) {
    // X^{e-m} (c h)^m
    Rat coef = binom(e, m);
    for (long t = 0; t < m; ++t) coef *= c;
    if (coef == 0) continue;
    Deg a(nblocks, 0), b(nblocks, 0);
    int e1 = 0, e2 = 0;
    if (first) {
      a[blk] = static_cast<int>(e - m);
      e1 = static_cast<int>(m);
    } else {
      b[blk] = static_cast<int>(e - m);
      e2 = static_cast<int>(m);
    }
    tacc(r, {a, b, e1, e2}, coef);
  }
  return r;
}

// 1/(X + r*h)^{Nb} expanded in the truncated ring: powers X^m for
// m < Nb with hbar power -(Nb + m).
TElem inverse_power(size_t nblocks, size_t blk, bool first, long r, long Nb) {
  TElem out;
  for (long m = 0; m < Nb; ++m) {
    Rat coef = binom(Nb + m - 1, m);
    if (m % 2 == 1) coef = -coef;
    // (r h)^{-(Nb+m)}
    Rat rp = 1;
    for (long t = 0; t < Nb + m; ++t) rp *= r;
    coef /= rp;
    Deg a(nblocks, 0), b(nblocks, 0);
    int e1 = 0, e2 = 0;
    if (first) {
      a[blk] = static_cast<int>(m);
      e1 = -static_cast<int>(Nb + m);
    } else {
      b[blk] = static_cast<int>(m);
      e2 = -static_cast<int>(Nb + m);
    }
    tacc(out, {a, b, e1, e2}, coef);
  }
  return out;
}

// Exact division by (h1 + h2): shift to polynomial hbar powers, run
// synthetic division in h1, demand zero remainder, shift back.
TElem tdiv_h1_plus_h2(const TElem& t) {
  if (t.empty()) return {};
  int shift = 0;
  for (const auto& [k, c] : t)
    shift = std::max({shift, -std::get<2>(k), -std::get<3>(k)});
  // coefficients of h1^m: map (a, b, e2) -> Rat
  std::map<int, std::map<std::tuple<Deg, Deg, int>, Rat>> byH1;
  for (const auto& [k, c] : t)
    byH1[std::get<2>(k) + shift]
        [{std::get<0>(k), std::get<1>(k), std::get<3>(k) + shift}] += c;
  int M = byH1.rbegin()->first;
  std::map<int, std::map<std::tuple<Deg, Deg, int>, Rat>> q;
  std::map<std::tuple<Deg, Deg, int>, Rat> carry;  // h2 * q_m, pending
  for (int m = M; m >= 1; --m) {
    std::map<std::tuple<Deg, Deg, int>, Rat> qm = byH1.count(m) ? byH1[m]
                                                                : decltype(carry){};
    for (const auto& [k, c] : carry) {
      qm[k] -= c;
    }
    for (auto it = qm.begin(); it != qm.end();)
      it = it->second == 0 ? qm.erase(it) : std::next(it);
    if (!qm.empty()) q[m - 1] = qm;
    carry.clear();
    for (const auto& [k, c] : qm)
      carry[{std::get<0>(k), std::get<1>(k), std::get<2>(k) + 1}] = c;
  }
  // remainder: c_0 - h2 * q_0
  std::map<std::tuple<Deg, Deg, int>, Rat> rem =
      byH1.count(0) ? byH1[0] : std::map<std::tuple<Deg, Deg, int>, Rat>{};
  for (const auto& [k, c] : carry) rem[k] -= c;
  for (const auto& [k, c] : rem)
    if (c != 0)
      fail(ErrCode::NotDivisibleByH1PlusH2,
           "closed-form two-point numerator is not divisible by (h1 + h2)");
  TElem out;
  for (const auto& [m, cm] : q)
    for (const auto& [k, c] : cm)
      tacc(out,
           {std::get<0>(k), std::get<1>(k), m - shift,
            std::get<2>(k) - shift},
           c);
  return out;
}

// Componentwise e <= d enumeration.
bool next_split(Deg& e, const Deg& d) {
  size_t i = 0;
  while (i < d.size() && e[i] == d[i]) e[i++] = 0;
  if (i == d.size()) return false;
  ++e[i];
  return true;
}

}  // namespace

Rat TwoPointTable::get(const Deg& a, const Deg& b, int p1, int p2) const {
  auto it = val.find({a, b, p1, p2});
  return it == val.end() ? Rat(0) : it->second;
}

TwoPointTable two_point_closed_form(const std::vector<long>& Ns,
                                    const Deg& d) {
  const size_t s = Ns.size();
  if (d.size() != s)
    fail(ErrCode::ConfigError, "degree tuple size mismatch");
  bool allZero = true;
  for (int v : d) {
    if (v < 0) fail(ErrCode::ConfigError, "negative degree component");
    if (v != 0) allZero = false;
  }
  if (allZero)
    fail(ErrCode::MissingDegree, "degree zero carries no two-point invariant");

  TElem total;
  Deg e(s, 0);
  do {
    // f = d - e
    TElem term;
    term.emplace(TKey{Deg(s, 0), Deg(s, 0), 0, 0}, Rat(1));
    for (size_t i = 0; i < s; ++i) {
      long ei = e[i], fi = d[i] - ei;
      TElem blockSum;
      for (long ai = 0; ai <= Ns[i] - 1; ++ai) {
        long bi = Ns[i] - 1 - ai;
        TElem f = tmul(linear_power(s, i, true, ei, ai),
                       linear_power(s, i, false, fi, bi), Ns);
        for (const auto& [k, c] : f) tacc(blockSum, k, c);
      }
      for (long r = 1; r <= ei; ++r)
        blockSum = tmul(blockSum, inverse_power(s, i, true, r, Ns[i]), Ns);
      for (long r = 1; r <= fi; ++r)
        blockSum = tmul(blockSum, inverse_power(s, i, false, r, Ns[i]), Ns);
      term = tmul(term, blockSum, Ns);
    }
    for (const auto& [k, c] : term) tacc(total, k, c);
  } while (next_split(e, d));

  TElem divided = tdiv_h1_plus_h2(total);
  TwoPointTable table;
  for (const auto& [k, c] : divided) {
    int e1 = std::get<2>(k), e2 = std::get<3>(k);
    if (e1 >= 0 || e2 >= 0)
      fail(ErrCode::Internal,
           "closed-form two-point table has a nonnegative hbar power");
    table.val[{std::get<0>(k), std::get<1>(k), -e1 - 1, -e2 - 1}] = c;
  }
  return table;
}

// ---------------------------------------------------------------------------
// Golden references
// ---------------------------------------------------------------------------

Rat closed_form_reference(GoldenFamily fam, long d) {
  if (d < 1) fail(ErrCode::ConfigError, "golden values start at degree 1");
  switch (fam) {
    case GoldenFamily::P2_OneOne:
      // (-1)^d (2d)! / (2d (d!)^2)
      {
        Rat v = factorial(2 * d) / (Rat(2 * d) * factorial(d) * factorial(d));
        return d % 2 == 0 ? v : -v;
      }
    case GoldenFamily::P2_Triple:
      return d % 2 == 0 ? Rat(-1) / Rat(d) : Rat(1) / Rat(d);
    case GoldenFamily::P1_Double:
      return Rat(1) / Rat(d);
  }
  fail(ErrCode::Internal, "unknown golden family");
}

std::vector<Rat> weighted_sum_reference(long n,
                                        const std::vector<long>& ellPlus,
                                        const std::vector<long>& ellMinus,
                                        long c1, long cutoff) {
  long b = static_cast<long>(ellMinus.size());
  int idx = static_cast<int>(c1 + 1 - b);
  PnSpecial ps = pn_special(n, ellPlus, ellMinus, std::max(idx, 0), cutoff);
  Nov<Rat> I = pn_unit(ps, idx);
  Rat ratio = 1;
  for (long l : ellPlus) ratio *= l;
  for (long l : ellMinus) ratio /= l;
  std::vector<Rat> out;
  out.reserve(static_cast<size_t>(cutoff));
  for (long dd = 1; dd <= cutoff; ++dd)
    out.push_back(ratio * nov_coeff(I, Deg{static_cast<int>(dd)}));
  return out;
}

}  // namespace toricgw
