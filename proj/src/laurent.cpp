#include "toricgw/laurent.hpp"

namespace toricgw {

namespace {

// Splits a canonical denominator factor as c*h + L with c a nonzero rational
// constant and L free of h. Fails on anything else that involves h.
bool split_linear_in(const MultiPoly& f, VarId h, Rat& c, MultiPoly& L) {
  uint32_t d = f.deg_in(h);
  if (d == 0) return false;
  if (d > 1)
    fail(ErrCode::Internal,
         "denominator factor of h-degree > 1 in Laurent expansion: " +
             f.str());
  MultiPoly ch = f.coeff_of(h, 1);
  if (!ch.is_constant())
    fail(ErrCode::Internal,
         "denominator factor with non-constant h-coefficient: " + f.str());
  c = ch.constant_value();
  L = f.coeff_of(h, 0);
  return true;
}

}  // namespace

std::map<int, FRF> laurent_expand(const FRF& f0, VarId h, int lo, int hi) {
  FRF f = f0;
  f.reduce();
  std::map<int, FRF> out;
  if (f.is_zero()) return out;

  // Base denominator (h-free factors) and the list of h-linear factors.
  FRF base = FRF::one();
  std::vector<std::pair<Rat, MultiPoly>> hfac;  // (c, L) with mult unrolled
  for (const auto& [g, m] : f.den()) {
    Rat c;
    MultiPoly L;
    if (split_linear_in(g, h, c, L)) {
      for (int i = 0; i < m; ++i) hfac.emplace_back(c, L);
    } else {
      for (int i = 0; i < m; ++i) base.div_poly(g);
    }
  }

  // Start from the numerator split by powers of h: partial[p] is the
  // coefficient (an h-free polynomial) of h^p so far.
  std::map<int, MultiPoly> partial;
  for (const auto& [e, coeff] : f.num().split_by_var(h))
    partial[static_cast<int>(e)] = coeff;

  // Fold in 1/(c h + L) = sum_{j>=0} (-1)^j L^j c^{-1-j} h^{-1-j}, pruning
  // everything that can no longer reach the window floor `lo`.
  int remaining = static_cast<int>(hfac.size());
  for (const auto& [c, L] : hfac) {
    --remaining;
    std::map<int, MultiPoly> next;
    for (const auto& [p, coeff] : partial) {
      // After this factor the maximum total shift from `remaining` more
      // factors is -remaining, so terms below lo + remaining*1 - ... keep
      // exactly those with p - 1 - j >= lo - remaining.
      MultiPoly Lj = MultiPoly::constant(1);
      Rat cinv = 1 / c;
      Rat cpow = cinv;
      for (int j = 0;; ++j) {
        int target = p - 1 - j;
        if (target < lo - remaining) break;
        MultiPoly term = coeff * Lj * (j % 2 ? -cpow : cpow);
        if (!term.is_zero()) {
          auto it = next.find(target);
          if (it == next.end()) next.emplace(target, term);
          else it->second += term;
        }
        Lj = Lj * L;
        cpow *= cinv;
        if (Lj.is_zero()) break;
      }
    }
    partial = std::move(next);
  }

  for (const auto& [p, coeff] : partial) {
    if (p < lo || p > hi || coeff.is_zero()) continue;
    FRF v = base * FRF(coeff);
    if (!v.is_zero()) out[p] = v;
  }
  return out;
}

bool frf_regular_in(const FRF& f0, VarId h, bool allow_pole_at_zero) {
  FRF f = f0;
  f.reduce();
  for (const auto& [g, m] : f.den()) {
    if (!g.involves(h)) continue;
    if (allow_pole_at_zero && g == MultiPoly::variable(h)) continue;
    return false;
  }
  return true;
}

FRF residue_simple(const FRF& f0, VarId h, const FRF& pole) {
  FRF f = f0;
  f.reduce();
  // Residue of n / prod g_i at the root of one linear factor c h + L whose
  // root equals `pole`: n(pole) / (c * prod_{others} g_i(pole)).
  FRF rest = FRF::one();
  int pole_order = 0;
  Rat cpole = 1;
  for (const auto& [g, m] : f.den()) {
    Rat c;
    MultiPoly L;
    if (!split_linear_in(g, h, c, L)) {
      for (int i = 0; i < m; ++i) rest = rest / FRF(g);
      continue;
    }
    FRF root = FRF(-(L)) * (1 / c);
    if (root == pole) {
      pole_order += m;
      cpole *= rat_pow(c, m);
    } else {
      FRF val = (FRF(g)).subst(h, pole);
      FRF vi = val.inverse();
      for (int i = 0; i < m; ++i) rest *= vi;
    }
  }
  if (pole_order == 0) return FRF::zero();
  if (pole_order != 1)
    fail(ErrCode::Internal, "residue_simple at a pole of order > 1");
  FRF n = FRF(f.num()).subst(h, pole);
  return n * rest * (1 / cpole);
}

std::map<std::string, std::pair<FRF, int>> poles_in(const FRF& f0, VarId h) {
  FRF f = f0;
  f.reduce();
  std::map<std::string, std::pair<FRF, int>> out;
  for (const auto& [g, m] : f.den()) {
    Rat c;
    MultiPoly L;
    if (!split_linear_in(g, h, c, L)) continue;
    FRF root = FRF(-(L)) * (1 / c);
    std::string key = root.str();
    auto it = out.find(key);
    if (it == out.end()) out.emplace(key, std::make_pair(root, m));
    else it->second.second += m;
  }
  return out;
}

}  // namespace toricgw
