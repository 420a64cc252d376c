#include "toricgw/multipoly.hpp"

#include <algorithm>
#include <sstream>

namespace toricgw {

int mono_cmp(const Mono& a, const Mono& b) {
  size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    // The next most significant variable present in either monomial.
    VarId va = i < a.size() ? a[i].first : UINT32_MAX;
    VarId vb = j < b.size() ? b[j].first : UINT32_MAX;
    if (va < vb) return 1;   // a has a positive power of an earlier variable
    if (vb < va) return -1;
    if (a[i].second != b[j].second) return a[i].second > b[j].second ? 1 : -1;
    ++i;
    ++j;
  }
  return 0;
}

Mono mono_mul(const Mono& a, const Mono& b) {
  Mono r;
  r.reserve(a.size() + b.size());
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first < b[j].first) r.push_back(a[i++]);
    else if (b[j].first < a[i].first) r.push_back(b[j++]);
    else {
      r.emplace_back(a[i].first, a[i].second + b[j].second);
      ++i;
      ++j;
    }
  }
  while (i < a.size()) r.push_back(a[i++]);
  while (j < b.size()) r.push_back(b[j++]);
  return r;
}

std::optional<Mono> mono_div(const Mono& a, const Mono& b) {
  Mono r;
  size_t i = 0;
  for (const auto& [v, e] : b) {
    while (i < a.size() && a[i].first < v) r.push_back(a[i++]);
    if (i == a.size() || a[i].first != v || a[i].second < e)
      return std::nullopt;
    if (a[i].second > e) r.emplace_back(v, a[i].second - e);
    ++i;
  }
  while (i < a.size()) r.push_back(a[i++]);
  return r;
}

long mono_total_degree(const Mono& m) {
  long d = 0;
  for (const auto& [v, e] : m) d += e;
  return d;
}

uint32_t mono_deg_in(const Mono& m, VarId v) {
  for (const auto& [w, e] : m)
    if (w == v) return e;
  return 0;
}

// GMP's mpq_class(p, q) constructor does not reduce p/q; arithmetic on
// unreduced values is undefined. Every coefficient entering a MultiPoly
// passes through here so stored coefficients are always canonical.
static Rat canon(const Rat& c) {
  Rat r = c;
  r.canonicalize();
  return r;
}

MultiPoly MultiPoly::constant(const Rat& c) {
  MultiPoly p;
  Rat cc = canon(c);
  if (cc != 0) p.t_.emplace(Mono{}, cc);
  return p;
}

MultiPoly MultiPoly::variable(VarId v, uint32_t e) {
  MultiPoly p;
  if (e == 0) return constant(1);
  p.t_.emplace(Mono{{v, e}}, Rat(1));
  return p;
}

bool MultiPoly::is_constant() const {
  return t_.empty() || (t_.size() == 1 && t_.begin()->first.empty());
}

Rat MultiPoly::constant_value() const {
  if (t_.empty()) return 0;
  if (!is_constant()) fail(ErrCode::Internal, "constant_value of non-constant");
  return t_.begin()->second;
}

void MultiPoly::add_term(const Mono& m, const Rat& c0) {
  Rat c = canon(c0);
  if (c == 0) return;
  auto [it, inserted] = t_.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) t_.erase(it);
  }
}

MultiPoly MultiPoly::operator-() const {
  MultiPoly r;
  for (const auto& [m, c] : t_) r.t_.emplace(m, -c);
  return r;
}

MultiPoly MultiPoly::operator+(const MultiPoly& o) const {
  MultiPoly r = *this;
  r += o;
  return r;
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& o) {
  for (const auto& [m, c] : o.t_) add_term(m, c);
  return *this;
}

MultiPoly MultiPoly::operator-(const MultiPoly& o) const {
  MultiPoly r = *this;
  r -= o;
  return r;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& o) {
  for (const auto& [m, c] : o.t_) add_term(m, -c);
  return *this;
}

MultiPoly MultiPoly::operator*(const MultiPoly& o) const {
  MultiPoly r;
  for (const auto& [ma, ca] : t_)
    for (const auto& [mb, cb] : o.t_) r.add_term(mono_mul(ma, mb), ca * cb);
  return r;
}

MultiPoly MultiPoly::operator*(const Rat& c0) const {
  MultiPoly r;
  Rat c = canon(c0);
  if (c == 0) return r;
  for (const auto& [m, cc] : t_) r.t_.emplace(m, cc * c);
  return r;
}

MultiPoly& MultiPoly::operator*=(const Rat& c0) {
  Rat c = canon(c0);
  if (c == 0) {
    t_.clear();
    return *this;
  }
  for (auto& [m, cc] : t_) cc *= c;
  return *this;
}

MultiPoly MultiPoly::pow(uint32_t e) const {
  MultiPoly acc = constant(1);
  MultiPoly base = *this;
  while (e) {
    if (e & 1) acc = acc * base;
    base = e > 1 ? base * base : base;
    e >>= 1;
  }
  return acc;
}

std::optional<MultiPoly> MultiPoly::exact_div(const MultiPoly& d) const {
  if (d.is_zero()) fail(ErrCode::Internal, "division by zero polynomial");
  MultiPoly q;
  MultiPoly r = *this;
  const auto& dl = *d.t_.rbegin();  // leading term of the divisor
  while (!r.is_zero()) {
    const auto& rl = *r.t_.rbegin();
    auto m = mono_div(rl.first, dl.first);
    if (!m) return std::nullopt;
    Rat c = rl.second / dl.second;
    MultiPoly t;
    t.t_.emplace(*m, c);
    q += t;
    r -= t * d;
  }
  return q;
}

MultiPoly MultiPoly::subst(VarId v, const Rat& value) const {
  MultiPoly r;
  for (const auto& [m, c] : t_) {
    Rat cc = c;
    Mono mm;
    mm.reserve(m.size());
    for (const auto& [w, e] : m) {
      if (w == v) cc *= rat_pow(value, e);
      else mm.emplace_back(w, e);
    }
    r.add_term(mm, cc);
  }
  return r;
}

MultiPoly MultiPoly::subst(VarId v, const MultiPoly& value) const {
  // Horner over the powers of v.
  auto parts = split_by_var(v);
  MultiPoly r;
  uint32_t cur = 0;
  MultiPoly vp = constant(1);
  for (const auto& [e, coeff] : parts) {
    while (cur < e) {
      vp = vp * value;
      ++cur;
    }
    r += coeff * vp;
  }
  return r;
}

MultiPoly MultiPoly::subst_many(const std::map<VarId, Rat>& values) const {
  MultiPoly r;
  for (const auto& [m, c] : t_) {
    Rat cc = c;
    Mono mm;
    for (const auto& [w, e] : m) {
      auto it = values.find(w);
      if (it != values.end()) cc *= rat_pow(it->second, e);
      else mm.emplace_back(w, e);
    }
    r.add_term(mm, cc);
  }
  return r;
}

MultiPoly MultiPoly::kill_kind(VarKind k) const {
  MultiPoly r;
  for (const auto& [m, c] : t_) {
    bool has = false;
    for (const auto& [w, e] : m)
      if (var_kind(w) == k) {
        has = true;
        break;
      }
    if (!has) r.add_term(m, c);
  }
  return r;
}

MultiPoly MultiPoly::derivative(VarId v) const {
  MultiPoly r;
  for (const auto& [m, c] : t_) {
    for (size_t i = 0; i < m.size(); ++i) {
      if (m[i].first != v) continue;
      Mono mm = m;
      Rat cc = c * Rat(static_cast<long>(m[i].second));
      if (mm[i].second == 1) mm.erase(mm.begin() + i);
      else --mm[i].second;
      r.add_term(mm, cc);
      break;
    }
  }
  return r;
}

long MultiPoly::total_degree() const {
  long d = -1;
  for (const auto& [m, c] : t_) d = std::max(d, mono_total_degree(m));
  return d;
}

uint32_t MultiPoly::deg_in(VarId v) const {
  uint32_t d = 0;
  for (const auto& [m, c] : t_) d = std::max(d, mono_deg_in(m, v));
  return d;
}

bool MultiPoly::involves_kind(VarKind k) const {
  for (const auto& [m, c] : t_)
    for (const auto& [w, e] : m)
      if (var_kind(w) == k) return true;
  return false;
}

std::optional<long> MultiPoly::homogeneous_degree(
    const std::vector<VarKind>& kinds) const {
  if (t_.empty()) return 0;
  long deg = -1;
  for (const auto& [m, c] : t_) {
    long d = 0;
    for (const auto& [w, e] : m)
      if (std::find(kinds.begin(), kinds.end(), var_kind(w)) != kinds.end())
        d += e;
    if (deg == -1) deg = d;
    else if (deg != d) return std::nullopt;
  }
  return deg;
}

MultiPoly MultiPoly::coeff_of(VarId v, uint32_t e) const {
  MultiPoly r;
  for (const auto& [m, c] : t_) {
    if (mono_deg_in(m, v) != e) continue;
    Mono mm;
    for (const auto& [w, ee] : m)
      if (w != v) mm.emplace_back(w, ee);
    r.add_term(mm, c);
  }
  return r;
}

std::map<uint32_t, MultiPoly> MultiPoly::split_by_var(VarId v) const {
  std::map<uint32_t, MultiPoly> r;
  for (const auto& [m, c] : t_) {
    uint32_t e = mono_deg_in(m, v);
    Mono mm;
    for (const auto& [w, ee] : m)
      if (w != v) mm.emplace_back(w, ee);
    r[e].add_term(mm, c);
  }
  return r;
}

std::map<Mono, MultiPoly, MonoLess> MultiPoly::split_by_kinds(
    const std::vector<VarKind>& kinds) const {
  std::map<Mono, MultiPoly, MonoLess> r;
  for (const auto& [m, c] : t_) {
    Mono key, rest;
    for (const auto& [w, e] : m) {
      if (std::find(kinds.begin(), kinds.end(), var_kind(w)) != kinds.end())
        key.emplace_back(w, e);
      else rest.emplace_back(w, e);
    }
    r[key].add_term(rest, c);
  }
  return r;
}

Rat MultiPoly::content() const {
  if (t_.empty()) return 0;
  Int num_gcd = 0, den_lcm = 1;
  for (const auto& [m, c] : t_) {
    mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(),
            c.get_num().get_mpz_t());
    mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(),
            c.get_den().get_mpz_t());
  }
  Rat r(num_gcd, den_lcm);
  r.canonicalize();
  if (r < 0) r = -r;
  return r;
}

std::pair<MultiPoly, Rat> MultiPoly::normalized() const {
  if (t_.empty()) return {MultiPoly(), Rat(0)};
  Rat c = content();
  if (t_.rbegin()->second < 0) c = -c;  // positive leading coefficient
  MultiPoly p = *this * (1 / c);
  return {p, c};
}

Rat MultiPoly::eval(const std::map<VarId, Rat>& values) const {
  Rat r = 0;
  for (const auto& [m, c] : t_) {
    Rat term = c;
    for (const auto& [w, e] : m) {
      auto it = values.find(w);
      if (it == values.end())
        fail(ErrCode::Internal, "eval: unassigned variable " + var_name(w));
      term *= rat_pow(it->second, e);
    }
    r += term;
  }
  return r;
}

std::string MultiPoly::str() const {
  if (t_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = t_.rbegin(); it != t_.rend(); ++it) {
    const auto& [m, c] = *it;
    Rat a = c;
    if (first) {
      if (a < 0) {
        os << "-";
        a = -a;
      }
    } else {
      os << (a < 0 ? " - " : " + ");
      if (a < 0) a = -a;
    }
    first = false;
    bool coeff_shown = (a != 1) || m.empty();
    if (coeff_shown) os << rat_to_string(a);
    bool need_star = coeff_shown;
    for (const auto& [w, e] : m) {
      if (need_star) os << "*";
      os << var_name(w);
      if (e > 1) os << "^" << e;
      need_star = true;
    }
  }
  return os.str();
}

MultiPoly mp_var(VarId v) { return MultiPoly::variable(v); }
MultiPoly mp_const(const Rat& c) { return MultiPoly::constant(c); }

MultiPoly mp_linear(const Rat& c0, const std::vector<Rat>& coeffs,
                    const std::vector<VarId>& vars) {
  MultiPoly p = MultiPoly::constant(c0);
  for (size_t i = 0; i < coeffs.size(); ++i)
    p += MultiPoly::variable(vars[i]) * coeffs[i];
  return p;
}

}  // namespace toricgw
