// Formal series indexed by effective curve classes ("Novikov" bookkeeping).
// A series is a map from integer degree vectors (coordinates in the chosen
// curve-class basis) to coefficients; truncation is by a positive integer
// weight functional. Coefficient types: Rat, MultiPoly, FRF.
#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "toricgw/factored.hpp"

namespace toricgw {

using Deg = std::vector<int>;

struct NovCtx {
  std::vector<long> w;  // weight functional; positive on every nonzero degree
  long cutoff = 0;      // keep degrees with weight(d) <= cutoff

  long weight(const Deg& d) const {
    long s = 0;
    for (size_t i = 0; i < d.size(); ++i) s += w[i] * d[i];
    return s;
  }
  Deg zero() const { return Deg(w.size(), 0); }
};

template <class C>
using Nov = std::map<Deg, C>;

inline bool coeff_is_zero(const Rat& c) { return c == 0; }
inline bool coeff_is_zero(const MultiPoly& c) { return c.is_zero(); }
inline bool coeff_is_zero(const FRF& c) { return c.is_zero(); }

template <class C>
void nov_prune(Nov<C>& s) {
  for (auto it = s.begin(); it != s.end();)
    it = coeff_is_zero(it->second) ? s.erase(it) : std::next(it);
}

template <class C>
C nov_coeff(const Nov<C>& s, const Deg& d) {
  auto it = s.find(d);
  return it == s.end() ? C() : it->second;
}

template <class C>
Nov<C> nov_add(const Nov<C>& a, const Nov<C>& b) {
  Nov<C> r = a;
  for (const auto& [d, c] : b) {
    auto it = r.find(d);
    if (it == r.end()) r.emplace(d, c);
    else it->second = it->second + c;
  }
  nov_prune(r);
  return r;
}

template <class C>
Nov<C> nov_sub(const Nov<C>& a, const Nov<C>& b) {
  Nov<C> r = a;
  for (const auto& [d, c] : b) {
    auto it = r.find(d);
    if (it == r.end()) r.emplace(d, C() - c);
    else it->second = it->second - c;
  }
  nov_prune(r);
  return r;
}

template <class C, class S>
Nov<C> nov_scale(const Nov<C>& a, const S& c) {
  Nov<C> r;
  for (const auto& [d, v] : a) {
    C nv = v * c;
    if (!coeff_is_zero(nv)) r.emplace(d, nv);
  }
  return r;
}

inline Deg deg_add(const Deg& a, const Deg& b) {
  Deg r = a;
  for (size_t i = 0; i < r.size(); ++i) r[i] += b[i];
  return r;
}

template <class CA, class CB, class CR, class MulFn>
Nov<CR> nov_mul_with(const Nov<CA>& a, const Nov<CB>& b, const NovCtx& ctx,
                     MulFn mul) {
  Nov<CR> r;
  for (const auto& [da, ca] : a) {
    long wa = ctx.weight(da);
    for (const auto& [db, cb] : b) {
      if (wa + ctx.weight(db) > ctx.cutoff) continue;
      CR prod = mul(ca, cb);
      if (coeff_is_zero(prod)) continue;
      Deg d = deg_add(da, db);
      auto it = r.find(d);
      if (it == r.end()) r.emplace(d, prod);
      else it->second = it->second + prod;
    }
  }
  nov_prune(r);
  return r;
}

template <class C>
Nov<C> nov_mul(const Nov<C>& a, const Nov<C>& b, const NovCtx& ctx) {
  return nov_mul_with<C, C, C>(a, b, ctx,
                               [](const C& x, const C& y) { return x * y; });
}

// All degrees reachable from sums of elements of `gens` within the cutoff,
// in increasing-weight order (the zero degree first).
std::vector<Deg> nov_support_closure(const std::vector<Deg>& gens,
                                     const NovCtx& ctx);

inline Rat coeff_inverse(const Rat& c) {
  if (c == 0) fail(ErrCode::Internal, "inverse of zero series constant term");
  return 1 / c;
}
inline FRF coeff_inverse(const FRF& c) { return c.inverse(); }

// Multiplicative inverse of a series with invertible constant term.
template <class C>
Nov<C> nov_invert(const Nov<C>& a, const NovCtx& ctx) {
  Deg d0 = ctx.zero();
  auto it0 = a.find(d0);
  if (it0 == a.end())
    fail(ErrCode::Internal, "series inverse: zero constant term");
  C inv0 = coeff_inverse(it0->second);
  std::vector<Deg> gens;
  for (const auto& [d, c] : a)
    if (d != d0) gens.push_back(d);
  std::vector<Deg> degs = nov_support_closure(gens, ctx);
  Nov<C> b;
  b.emplace(d0, inv0);
  for (const Deg& d : degs) {
    if (d == d0) continue;
    // b_d = -inv0 * sum_{0 != e <= d} a_e b_{d-e}
    C acc = C();
    for (const auto& [e, ae] : a) {
      if (e == d0) continue;
      Deg rest = d;
      bool ok = true;
      for (size_t i = 0; i < rest.size(); ++i) rest[i] -= e[i];
      auto itb = b.find(rest);
      if (itb == b.end()) ok = false;
      if (!ok) continue;
      acc = acc + ae * itb->second;
    }
    if (!coeff_is_zero(acc)) {
      C v = C() - inv0 * acc;
      if (!coeff_is_zero(v)) b.emplace(d, v);
    }
  }
  nov_prune(b);
  return b;
}

// exp of a series with zero constant term.
template <class C>
Nov<C> nov_exp(const Nov<C>& a, const NovCtx& ctx) {
  Deg d0 = ctx.zero();
  if (a.count(d0))
    fail(ErrCode::Internal, "series exp requires zero constant term");
  Nov<C> r;
  r.emplace(d0, C() + Rat(1));  // 1 in the coefficient ring
  Nov<C> pw = r;                // a^n / n!
  Rat nfact = 1;
  for (long n = 1;; ++n) {
    pw = nov_mul(pw, a, ctx);
    if (pw.empty()) break;
    nfact *= n;
    r = nov_add(r, nov_scale(pw, Rat(1) / nfact));
  }
  return r;
}

// Integer power (possibly negative) of a series with invertible constant
// term; for nonnegative exponents a unit constant term is not required.
template <class C>
Nov<C> nov_pow(const Nov<C>& a, long e, const NovCtx& ctx) {
  Nov<C> base = e < 0 ? nov_invert(a, ctx) : a;
  unsigned long n = static_cast<unsigned long>(e < 0 ? -e : e);
  Nov<C> r;
  r.emplace(ctx.zero(), C() + Rat(1));
  while (n) {
    if (n & 1) r = nov_mul(r, base, ctx);
    n >>= 1;
    if (n) base = nov_mul(base, base, ctx);
  }
  return r;
}

// Substitutes q_i -> Q_i * units[i](Q): every term c * q^d becomes
// c * Q^d * prod_i units[i]^{d_i}. Units must have constant term 1.
template <class C>
Nov<C> nov_compose_units(const Nov<C>& s, const std::vector<Nov<Rat>>& units,
                         const NovCtx& ctx) {
  size_t k = ctx.w.size();
  std::vector<std::map<long, Nov<Rat>>> cache(k);
  auto unit_pow = [&](size_t i, long e) -> const Nov<Rat>& {
    auto it = cache[i].find(e);
    if (it == cache[i].end())
      it = cache[i].emplace(e, nov_pow(units[i], e, ctx)).first;
    return it->second;
  };
  Nov<C> r;
  for (const auto& [d, c] : s) {
    Nov<Rat> factor;
    factor.emplace(ctx.zero(), Rat(1));
    for (size_t i = 0; i < k; ++i)
      if (d[i] != 0) factor = nov_mul(factor, unit_pow(i, d[i]), ctx);
    long wd = ctx.weight(d);
    for (const auto& [e, fe] : factor) {
      if (wd + ctx.weight(e) > ctx.cutoff) continue;
      Deg nd = deg_add(d, e);
      C v = c * fe;
      if (coeff_is_zero(v)) continue;
      auto it = r.find(nd);
      if (it == r.end()) r.emplace(nd, v);
      else it->second = it->second + v;
    }
  }
  nov_prune(r);
  return r;
}

}  // namespace toricgw
