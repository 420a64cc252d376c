#include "toricgw/toric.hpp"

#include <algorithm>
#include <cstddef>
#include <set>
#include <sstream>

#include "toricgw/lp.hpp"

namespace toricgw {

namespace {

// All sorted subsets of {0, ..., n-1} of the given size.
void for_each_subset(long n, long size,
                     const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> idx(size);
  for (long i = 0; i < size; ++i) idx[i] = static_cast<int>(i);
  if (size > n) return;
  while (true) {
    fn(idx);
    long i = size - 1;
    while (i >= 0 && idx[i] == n - size + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (long t = i + 1; t < size; ++t) idx[t] = idx[t - 1] + 1;
  }
}

RatMat columns(const ToricPair& tp, const std::vector<int>& J) {
  RatMat a(tp.k, RatVec(J.size(), Rat(0)));
  for (long i = 0; i < tp.k; ++i)
    for (size_t t = 0; t < J.size(); ++t) a[i][t] = tp.M[i][J[t]];
  return a;
}

std::string subset_str(const std::vector<int>& J) {
  std::string s = "{";
  for (size_t t = 0; t < J.size(); ++t)
    s += (t ? "," : "") + std::to_string(J[t] + 1);
  return s + "}";
}

}  // namespace

ValidationReport validate_toric_pair(const ToricPair& tp) {
  ValidationReport rep;
  rep.regular = true;
  rep.unimodular = true;
  rep.bounded = true;
  rep.minimal = true;

  // (i) regularity: for every subset of fewer than k columns, tau must not
  // be a nonnegative combination of them; and the polytope must be nonempty.
  for (long size = 0; size < tp.k && rep.regular; ++size) {
    for_each_subset(tp.N, size, [&](const std::vector<int>& J) {
      if (!rep.regular) return;
      if (lp_feasible(columns(tp, J), tp.tau)) {
        rep.regular = false;
        rep.detail = "regularity fails: tau lies in the nonnegative span of "
                     "columns " + subset_str(J);
      }
    });
  }
  if (rep.regular) {
    std::vector<int> all(tp.N);
    for (long j = 0; j < tp.N; ++j) all[j] = static_cast<int>(j);
    if (!lp_feasible(columns(tp, all), tp.tau)) {
      rep.regular = false;
      rep.detail = "regularity fails: the polytope is empty";
    }
  }

  // (ii) unimodularity at every vertex subset.
  for_each_subset(tp.N, tp.k, [&](const std::vector<int>& J) {
    RatMat a = columns(tp, J);
    Rat det = rat_det(a);
    if (det == 0) return;
    auto inv = rat_inverse(a);
    RatVec v = mat_vec(*inv, tp.tau);
    for (const Rat& c : v)
      if (c <= 0) return;
    if (det != 1 && det != -1 && rep.unimodular) {
      rep.unimodular = false;
      if (rep.detail.empty())
        rep.detail = "vertex subset " + subset_str(J) +
                     " has determinant " + rat_to_string(det);
    }
  });

  // (iii) boundedness: Mv = 0, v >= 0, sum v = 1 must be infeasible.
  {
    RatMat a(tp.k + 1, RatVec(tp.N, Rat(0)));
    for (long i = 0; i < tp.k; ++i)
      for (long j = 0; j < tp.N; ++j) a[i][j] = tp.M[i][j];
    for (long j = 0; j < tp.N; ++j) a[tp.k][j] = 1;
    RatVec b(tp.k + 1, Rat(0));
    b[tp.k] = 1;
    if (lp_feasible(a, b)) {
      rep.bounded = false;
      if (rep.detail.empty())
        rep.detail = "unbounded: the recession cone of the polytope is "
                     "nontrivial";
    }
  }

  // (iv) minimality: every coordinate hyperplane meets the polytope.
  for (long j = 0; j < tp.N && rep.minimal; ++j) {
    std::vector<int> others;
    for (long s = 0; s < tp.N; ++s)
      if (s != j) others.push_back(static_cast<int>(s));
    if (!lp_feasible(columns(tp, others), tp.tau)) {
      rep.minimal = false;
      if (rep.detail.empty())
        rep.detail = "not minimal: facet " + std::to_string(j + 1) +
                     " never binds";
    }
  }
  return rep;
}

std::vector<FixedPoint> fixed_points(const ToricPair& tp) {
  std::vector<FixedPoint> fps;
  for_each_subset(tp.N, tp.k, [&](const std::vector<int>& J) {
    RatMat a = columns(tp, J);
    Rat det = rat_det(a);
    if (det == 0) return;
    auto inv = rat_inverse(a);
    RatVec v = mat_vec(*inv, tp.tau);
    for (const Rat& c : v)
      if (c <= 0) return;
    if (det != 1 && det != -1)
      fail(ErrCode::ValidationFailure,
           "non-unimodular vertex subset " + subset_str(J));
    FixedPoint fp;
    fp.J = J;
    fp.MJinv = *inv;
    fp.x.assign(tp.k, MultiPoly());
    for (long i = 0; i < tp.k; ++i)
      for (long t = 0; t < tp.k; ++t)
        fp.x[i] += (*inv)[t][i] * MultiPoly::variable(var_alpha(J[t]));
    fp.u.assign(tp.N, MultiPoly());
    fp.eulerT = MultiPoly::constant(1);
    for (long j = 0; j < tp.N; ++j) {
      MultiPoly uj;
      for (long i = 0; i < tp.k; ++i) uj += Rat(tp.M[i][j]) * fp.x[i];
      uj -= MultiPoly::variable(var_alpha(j));
      bool in_J = std::binary_search(J.begin(), J.end(), static_cast<int>(j));
      if (in_J) {
        if (!uj.is_zero())
          fail(ErrCode::Internal, "tangent weight at own column is nonzero");
      } else {
        if (uj.is_zero())
          fail(ErrCode::Internal, "vanishing tangent weight");
        fp.eulerT *= uj;
      }
      fp.u[j] = uj;
    }
    fps.push_back(std::move(fp));
  });
  return fps;
}

std::vector<InvariantCurve> invariant_curves(
    const ToricPair& tp, const std::vector<FixedPoint>& fps) {
  std::map<std::vector<int>, int> index;
  for (size_t i = 0; i < fps.size(); ++i) index[fps[i].J] = static_cast<int>(i);

  std::vector<InvariantCurve> curves;
  for (size_t a = 0; a < fps.size(); ++a) {
    const FixedPoint& I = fps[a];
    for (long j = 0; j < tp.N; ++j) {
      if (std::binary_search(I.J.begin(), I.J.end(), static_cast<int>(j)))
        continue;
      int other = -1, dropped = -1;
      for (int i : I.J) {
        std::vector<int> cand;
        for (int t : I.J)
          if (t != i) cand.push_back(t);
        cand.push_back(static_cast<int>(j));
        std::sort(cand.begin(), cand.end());
        auto it = index.find(cand);
        if (it == index.end()) continue;
        if (other != -1)
          fail(ErrCode::ValidationFailure,
               "invariant curve through " + subset_str(I.J) + " and column " +
                   std::to_string(j + 1) + " is not unique");
        other = it->second;
        dropped = i;
      }
      if (other == -1)
        fail(ErrCode::ValidationFailure,
             "no second fixed point on the curve from " + subset_str(I.J) +
                 " along column " + std::to_string(j + 1));

      InvariantCurve c;
      c.from = static_cast<int>(a);
      c.to = other;
      c.j = static_cast<int>(j);
      c.jhat = dropped;
      const FixedPoint& V = fps[other];
      const MultiPoly& uj = I.u[j];
      auto int_quotient = [&](const MultiPoly& diff, const char* what) {
        if (diff.is_zero()) return 0L;
        auto q = diff.exact_div(uj);
        if (!q || !q->is_constant())
          fail(ErrCode::ValidationFailure,
               std::string(what) + " is not a scalar multiple of the curve "
                                   "weight");
        Rat ratio = q->constant_value();
        if (ratio.get_den() != 1)
          fail(ErrCode::ValidationFailure,
               std::string(what) + " has non-integral degree " +
                   rat_to_string(ratio));
        return rat_to_long(ratio);
      };
      c.deg.resize(tp.k);
      for (long i = 0; i < tp.k; ++i)
        c.deg[i] = static_cast<int>(
            int_quotient(I.x[i] - V.x[i], "position difference"));
      c.Dvec.resize(tp.N);
      for (long s = 0; s < tp.N; ++s)
        c.Dvec[s] = int_quotient(I.u[s] - V.u[s], "weight difference");
      curves.push_back(std::move(c));
    }
  }
  return curves;
}

ConeData effective_cone(const ToricPair& tp,
                        const std::vector<InvariantCurve>& curves) {
  // Distinct primitive degree directions.
  std::set<std::vector<long>> prim;
  for (const InvariantCurve& c : curves) {
    std::vector<long> d(c.deg.begin(), c.deg.end());
    bool zero = true;
    for (long x : d) zero = zero && x == 0;
    if (zero)
      fail(ErrCode::ValidationFailure, "invariant curve of degree zero");
    prim.insert(primitive_vector(d));
  }
  std::vector<std::vector<long>> gens(prim.begin(), prim.end());

  // Drop generators lying in the cone of the others. Removability is stable
  // under removing other non-extremal generators, so one pass suffices.
  auto in_span = [&](const std::vector<std::vector<long>>& gs,
                     const std::vector<long>& d) {
    if (gs.empty()) return false;
    RatMat a(tp.k, RatVec(gs.size(), Rat(0)));
    for (long i = 0; i < tp.k; ++i)
      for (size_t t = 0; t < gs.size(); ++t) a[i][t] = gs[t][i];
    RatVec b(tp.k, Rat(0));
    for (long i = 0; i < tp.k; ++i) b[i] = d[i];
    return lp_feasible(a, b);
  };
  std::vector<std::vector<long>> extremal;
  for (size_t i = 0; i < gens.size(); ++i) {
    std::vector<std::vector<long>> others;
    for (size_t t = 0; t < gens.size(); ++t)
      if (t != i) others.push_back(gens[t]);
    if (!in_span(others, gens[i])) extremal.push_back(gens[i]);
  }

  ConeData cone;
  for (const auto& g : extremal) cone.gens.emplace_back(g.begin(), g.end());

  // Weight functional: the primitive integer vector along tau.
  std::vector<long> wt(tp.k);
  Int lcm = 1;
  for (const Rat& t : tp.tau)
    mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), t.get_den().get_mpz_t());
  for (long i = 0; i < tp.k; ++i) {
    Rat scaled = tp.tau[i] * Rat(lcm);
    wt[i] = rat_to_long(scaled);
  }
  cone.w = primitive_vector(wt);
  for (const Deg& g : cone.gens) {
    long pairing = 0;
    for (long i = 0; i < tp.k; ++i) pairing += cone.w[i] * g[i];
    if (pairing <= 0)
      fail(ErrCode::ValidationFailure,
           "weight functional is not positive on a curve-cone generator");
  }
  return cone;
}

bool cone_contains(const ConeData& cone, const Deg& d) {
  size_t k = cone.w.size();
  RatMat a(k, RatVec(cone.gens.size(), Rat(0)));
  for (size_t i = 0; i < k; ++i)
    for (size_t t = 0; t < cone.gens.size(); ++t) a[i][t] = cone.gens[t][i];
  RatVec b(k, Rat(0));
  for (size_t i = 0; i < k; ++i) b[i] = d[i];
  return lp_feasible(a, b);
}

std::vector<Deg> cone_lattice_points(const ConeData& cone, long bound) {
  size_t k = cone.w.size();
  NovCtx ctx{cone.w, bound};
  // Bounding box: the slice { d in cone : <w, d> <= bound } lies in the
  // convex hull of 0 and the scaled generators (bound / <w, g>) g.
  std::vector<Rat> lo(k, Rat(0)), hi(k, Rat(0));
  for (const Deg& g : cone.gens) {
    long wg = 0;
    for (size_t i = 0; i < k; ++i) wg += cone.w[i] * g[i];
    for (size_t i = 0; i < k; ++i) {
      Rat v = Rat(bound) * Rat(g[i]) / Rat(wg);
      lo[i] = std::min(lo[i], v);
      hi[i] = std::max(hi[i], v);
    }
  }
  std::vector<long> blo(k), bhi(k);
  for (size_t i = 0; i < k; ++i) {
    Int f, c;
    mpz_fdiv_q(f.get_mpz_t(), lo[i].get_num().get_mpz_t(),
               lo[i].get_den().get_mpz_t());
    mpz_cdiv_q(c.get_mpz_t(), hi[i].get_num().get_mpz_t(),
               hi[i].get_den().get_mpz_t());
    blo[i] = f.get_si();
    bhi[i] = c.get_si();
  }
  std::vector<Deg> out;
  Deg d(k);
  for (size_t i = 0; i < k; ++i) d[i] = static_cast<int>(blo[i]);
  while (true) {
    long wd = ctx.weight(d);
    if (wd >= 0 && wd <= bound && cone_contains(cone, d)) out.push_back(d);
    size_t i = 0;
    while (i < k && d[i] == bhi[i]) {
      d[i] = static_cast<int>(blo[i]);
      ++i;
    }
    if (i == k) break;
    ++d[i];
  }
  std::sort(out.begin(), out.end(), [&](const Deg& a, const Deg& b) {
    long wa = ctx.weight(a), wb = ctx.weight(b);
    if (wa != wb) return wa < wb;
    return a < b;
  });
  return out;
}

CohPresentation cohomology_presentation(const ToricPair& tp,
                                        const std::vector<FixedPoint>& fps) {
  CohPresentation coh;
  coh.linearRelations.assign(tp.N, std::vector<long>(tp.k, 0));
  for (long j = 0; j < tp.N; ++j)
    for (long i = 0; i < tp.k; ++i) coh.linearRelations[j][i] = tp.M[i][j];
  coh.c1.assign(tp.k, 0);
  for (long i = 0; i < tp.k; ++i)
    for (long j = 0; j < tp.N; ++j) coh.c1[i] += tp.M[i][j];

  if (tp.N > 20)
    fail(ErrCode::Internal, "presentation enumeration limited to N <= 20");
  std::vector<std::vector<int>> minimal;
  for (long size = 1; size <= tp.N; ++size) {
    for_each_subset(tp.N, size, [&](const std::vector<int>& J) {
      for (const auto& kept : minimal)
        if (std::includes(J.begin(), J.end(), kept.begin(), kept.end()))
          return;
      for (const FixedPoint& fp : fps) {
        bool meets = false;
        for (int j : J)
          if (std::binary_search(fp.J.begin(), fp.J.end(), j)) {
            meets = true;
            break;
          }
        if (!meets) return;  // J misses this fixed point: not a cover
      }
      minimal.push_back(J);
    });
  }
  coh.srSets = std::move(minimal);
  return coh;
}

FRF localize_integral(const std::vector<FixedPoint>& fps,
                      const std::vector<FRF>& restrictions) {
  if (restrictions.size() != fps.size())
    fail(ErrCode::Internal, "one restriction per fixed point required");
  FRF total;
  for (size_t i = 0; i < fps.size(); ++i) {
    FRF term = restrictions[i];
    term.div_poly(fps[i].eulerT);
    total += term;
  }
  total.reduce();
  return total;
}

std::map<VarId, Rat> alpha_seed(long N, int idx) {
  static const std::vector<Rat> bases = {
      Rat(5, 2),  Rat(7, 3),  Rat(11, 5), Rat(13, 7),
      Rat(17, 11), Rat(19, 13), Rat(23, 17), Rat(29, 19)};
  if (idx < 0 || idx >= static_cast<int>(bases.size()))
    fail(ErrCode::Internal, "seed index out of range");
  std::map<VarId, Rat> seed;
  Rat p = 1;
  for (long j = 0; j < N; ++j) {
    p *= bases[idx];
    seed[var_alpha(j)] = p;
  }
  return seed;
}

void check_seed(const std::vector<FixedPoint>& fps,
                const std::map<VarId, Rat>& seed) {
  std::set<std::vector<Rat>> positions;
  for (const FixedPoint& fp : fps) {
    std::vector<Rat> pos;
    for (const MultiPoly& xi : fp.x) pos.push_back(xi.eval(seed));
    if (!positions.insert(pos).second)
      fail(ErrCode::SeedCollision, "two fixed points collide at this seed");
    for (size_t j = 0; j < fp.u.size(); ++j) {
      if (fp.u[j].is_zero()) continue;
      if (fp.u[j].eval(seed) == 0)
        fail(ErrCode::SeedCollision, "tangent weight vanishes at this seed");
    }
  }
}

int usable_seed(const std::vector<FixedPoint>& fps, long N, int idx) {
  for (int i = idx;; ++i) {
    try {
      check_seed(fps, alpha_seed(N, i));
      return i;
    } catch (const EngineError& e) {
      if (e.code != ErrCode::SeedCollision) throw;
    }
  }
}

Rat numeric_integral(const std::vector<FixedPoint>& fps, long N,
                     const std::vector<FRF>& restrictions, int seedA,
                     int seedB) {
  int sa = usable_seed(fps, N, seedA);
  int sb = usable_seed(fps, N, std::max(seedB, sa + 1));
  auto eval_at = [&](int s) {
    std::map<VarId, Rat> seed = alpha_seed(N, s);
    Rat total = 0;
    for (size_t i = 0; i < fps.size(); ++i)
      total += restrictions[i].eval(seed) / fps[i].eulerT.eval(seed);
    return total;
  };
  Rat va = eval_at(sa), vb = eval_at(sb);
  if (va != vb)
    fail(ErrCode::AlphaDependent,
         "localization sum depends on the torus weights: " +
             rat_to_string(va) + " vs " + rat_to_string(vb));
  return va;
}

std::vector<FRF> x_monomial_restrictions(const std::vector<FixedPoint>& fps,
                                         const std::vector<uint32_t>& e) {
  std::vector<FRF> out;
  for (const FixedPoint& fp : fps) {
    MultiPoly m = MultiPoly::constant(1);
    for (size_t i = 0; i < e.size(); ++i) m *= fp.x[i].pow(e[i]);
    out.emplace_back(m);
  }
  return out;
}

ToricData build_toric(const ToricPair& tp) {
  ToricData td;
  td.tp = tp;
  td.report = validate_toric_pair(tp);
  if (!td.report.ok())
    fail(ErrCode::ValidationFailure, td.report.detail.empty()
                                         ? "toric pair validation failed"
                                         : td.report.detail);
  td.fps = fixed_points(tp);
  td.curves = invariant_curves(tp, td.fps);
  td.cone = effective_cone(tp, td.curves);
  td.coh = cohomology_presentation(tp, td.fps);
  td.curveFrom.assign(td.fps.size(), std::vector<int>(tp.N, -1));
  for (size_t c = 0; c < td.curves.size(); ++c)
    td.curveFrom[td.curves[c].from][td.curves[c].j] = static_cast<int>(c);
  return td;
}

}  // namespace toricgw
