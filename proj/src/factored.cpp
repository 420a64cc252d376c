#include "toricgw/factored.hpp"

#include <sstream>

namespace toricgw {

bool MPLess::operator()(const MultiPoly& a, const MultiPoly& b) const {
  // Order polynomials as term sequences (monomial, coefficient), descending.
  auto ia = a.terms().rbegin(), ea = a.terms().rend();
  auto ib = b.terms().rbegin(), eb = b.terms().rend();
  for (; ia != ea && ib != eb; ++ia, ++ib) {
    int c = mono_cmp(ia->first, ib->first);
    if (c != 0) return c < 0;
    if (ia->second != ib->second) return ia->second < ib->second;
  }
  return ib != eb;
}

Rat FRF::constant_value() const {
  if (!is_constant()) fail(ErrCode::Internal, "constant_value of non-constant");
  return num_.constant_value();
}

void FRF::push_den(const MultiPoly& f, int mult) {
  if (mult == 0) return;
  auto it = den_.find(f);
  if (it == den_.end()) den_.emplace(f, mult);
  else {
    it->second += mult;
    if (it->second == 0) den_.erase(it);
    else if (it->second < 0)
      fail(ErrCode::Internal, "negative denominator multiplicity");
  }
}

FRF FRF::operator-() const {
  FRF r = *this;
  r.num_ = -r.num_;
  return r;
}

FRF FRF::operator*(const Rat& c) const {
  FRF r = *this;
  r.num_ *= c;
  if (r.num_.is_zero()) r.den_.clear();
  return r;
}

FRF FRF::operator*(const FRF& o) const {
  FRF r;
  r.num_ = num_ * o.num_;
  if (r.num_.is_zero()) return r;
  r.den_ = den_;
  for (const auto& [f, m] : o.den_) r.push_den(f, m);
  r.reduce();
  return r;
}

FRF FRF::operator+(const FRF& o) const {
  if (is_zero()) return o;
  if (o.is_zero()) return *this;
  // Common denominator: per factor, take the max multiplicity.
  FRF r;
  MultiPoly na = num_, nb = o.num_;
  auto ita = den_.begin();
  auto itb = o.den_.begin();
  MPLess less;
  auto take = [&r, &na, &nb](const MultiPoly& f, int ma, int mb) {
    int m = std::max(ma, mb);
    r.push_den(f, m);
    for (int i = ma; i < m; ++i) na *= f;
    for (int i = mb; i < m; ++i) nb *= f;
  };
  while (ita != den_.end() || itb != o.den_.end()) {
    if (itb == o.den_.end() ||
        (ita != den_.end() && less(ita->first, itb->first))) {
      take(ita->first, ita->second, 0);
      ++ita;
    } else if (ita == den_.end() || less(itb->first, ita->first)) {
      take(itb->first, 0, itb->second);
      ++itb;
    } else {
      take(ita->first, ita->second, itb->second);
      ++ita;
      ++itb;
    }
  }
  r.num_ = na + nb;
  if (r.num_.is_zero()) {
    r.den_.clear();
    return r;
  }
  r.reduce();
  return r;
}

FRF FRF::operator-(const FRF& o) const { return *this + (-o); }

FRF& FRF::mul_poly(const MultiPoly& p) {
  num_ *= p;
  if (num_.is_zero()) den_.clear();
  else reduce();
  return *this;
}

FRF& FRF::div_poly(const MultiPoly& p) {
  if (p.is_zero()) fail(ErrCode::Internal, "division by zero polynomial");
  auto [canon, scale] = p.normalized();
  num_ *= (1 / scale);
  if (canon.is_constant()) return *this;  // factor was a constant
  if (num_.is_zero()) return *this;
  push_den(canon, 1);
  reduce();
  return *this;
}

FRF FRF::inverse() const {
  if (is_zero()) fail(ErrCode::Internal, "inverse of zero rational function");
  FRF r;
  r.num_ = MultiPoly::constant(1);
  for (const auto& [f, m] : den_)
    for (int i = 0; i < m; ++i) r.num_ *= f;
  auto [canon, scale] = num_.normalized();
  r.num_ *= (1 / scale);
  if (!canon.is_constant()) r.push_den(canon, 1);
  r.reduce();
  return r;
}

void FRF::reduce() {
  if (num_.is_zero()) {
    den_.clear();
    return;
  }
  bool progress = true;
  while (progress) {
    progress = false;
    for (auto it = den_.begin(); it != den_.end();) {
      auto q = num_.exact_div(it->first);
      if (q) {
        num_ = std::move(*q);
        if (--it->second == 0) it = den_.erase(it);
        progress = true;
      } else {
        ++it;
      }
      if (num_.is_constant()) break;
    }
    if (num_.is_constant() && num_.constant_value() == 0) break;
  }
}

FRF FRF::subst(VarId v, const Rat& value) const {
  FRF r;
  r.num_ = num_.subst(v, value);
  for (const auto& [f, m] : den_) {
    MultiPoly g = f.subst(v, value);
    if (g.is_zero())
      fail(ErrCode::SeedCollision,
           "denominator factor vanishes under substitution: " + f.str());
    if (g.is_constant()) {
      r.num_ *= rat_pow(g.constant_value(), -m);
    } else {
      auto [canon, scale] = g.normalized();
      r.num_ *= rat_pow(scale, -m);
      r.push_den(canon, m);
    }
  }
  if (r.num_.is_zero()) r.den_.clear();
  else r.reduce();
  return r;
}

FRF FRF::subst_many(const std::map<VarId, Rat>& values) const {
  FRF r;
  r.num_ = num_.subst_many(values);
  for (const auto& [f, m] : den_) {
    MultiPoly g = f.subst_many(values);
    if (g.is_zero())
      fail(ErrCode::SeedCollision,
           "denominator factor vanishes under substitution: " + f.str());
    if (g.is_constant()) {
      r.num_ *= rat_pow(g.constant_value(), -m);
    } else {
      auto [canon, scale] = g.normalized();
      r.num_ *= rat_pow(scale, -m);
      r.push_den(canon, m);
    }
  }
  if (r.num_.is_zero()) r.den_.clear();
  else r.reduce();
  return r;
}

FRF FRF::subst(VarId v, const FRF& value) const {
  // Numerator: substitute polynomially; denominator factors: substitute and
  // divide. Factors are polynomials, so their substitution is an FRF.
  auto subst_poly = [&](const MultiPoly& p) -> FRF {
    auto parts = p.split_by_var(v);
    FRF acc;
    FRF vpow = FRF::one();
    uint32_t cur = 0;
    for (const auto& [e, coeff] : parts) {
      while (cur < e) {
        vpow *= value;
        ++cur;
      }
      acc += FRF(coeff) * vpow;
    }
    return acc;
  };
  FRF r = subst_poly(num_);
  for (const auto& [f, m] : den_) {
    FRF g = f.involves(v) ? subst_poly(f) : FRF(f);
    if (g.is_zero())
      fail(ErrCode::SeedCollision,
           "denominator factor vanishes under substitution: " + f.str());
    FRF gi = g.inverse();
    for (int i = 0; i < m; ++i) r *= gi;
  }
  return r;
}

FRF FRF::kill_kind(VarKind k) const {
  FRF r;
  r.num_ = num_.kill_kind(k);
  for (const auto& [f, m] : den_) {
    MultiPoly g = f.kill_kind(k);
    if (g.is_zero())
      fail(ErrCode::SeedCollision,
           "denominator factor vanishes at zero specialization: " + f.str());
    if (g.is_constant()) {
      r.num_ *= rat_pow(g.constant_value(), -m);
    } else {
      auto [canon, scale] = g.normalized();
      r.num_ *= rat_pow(scale, -m);
      r.push_den(canon, m);
    }
  }
  if (r.num_.is_zero()) r.den_.clear();
  else r.reduce();
  return r;
}

Rat FRF::eval(const std::map<VarId, Rat>& values) const {
  Rat n = num_.eval(values);
  Rat d = 1;
  for (const auto& [f, m] : den_) {
    Rat fv = f.eval(values);
    if (fv == 0)
      fail(ErrCode::SeedCollision,
           "denominator factor vanishes at evaluation point: " + f.str());
    d *= rat_pow(fv, m);
  }
  return n / d;
}

uint32_t FRF::deg_in(VarId v) const {
  uint32_t d = num_.deg_in(v);
  for (const auto& [f, m] : den_) d = std::max(d, f.deg_in(v));
  return d;
}

bool FRF::involves(VarId v) const {
  if (num_.involves(v)) return true;
  for (const auto& [f, m] : den_)
    if (f.involves(v)) return true;
  return false;
}

std::optional<long> FRF::homogeneous_degree(
    const std::vector<VarKind>& kinds) const {
  auto dn = num_.homogeneous_degree(kinds);
  if (!dn) return std::nullopt;
  long d = *dn;
  for (const auto& [f, m] : den_) {
    auto df = f.homogeneous_degree(kinds);
    if (!df) return std::nullopt;
    d -= m * (*df);
  }
  return d;
}

std::string FRF::str() const {
  std::ostringstream os;
  os << "(" << num_.str() << ")";
  if (!den_.empty()) {
    os << " / [";
    bool first = true;
    for (const auto& [f, m] : den_) {
      if (!first) os << " * ";
      first = false;
      os << "(" << f.str() << ")";
      if (m > 1) os << "^" << m;
    }
    os << "]";
  }
  return os.str();
}

FRF frf_from_product(const Rat& c,
                     const std::vector<std::pair<MultiPoly, int>>& factors) {
  FRF r(c);
  if (c == 0) return r;
  for (const auto& [p, e] : factors) {
    if (e == 0) continue;
    if (e > 0) {
      MultiPoly pw = p.pow(static_cast<uint32_t>(e));
      r.mul_poly(pw);
    } else {
      for (int i = 0; i < -e; ++i) r.div_poly(p);
    }
    if (r.is_zero()) return r;
  }
  return r;
}

}  // namespace toricgw
