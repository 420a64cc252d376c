#include "toricgw/linalg.hpp"

#include <cstddef>
#include <numeric>

namespace toricgw {

Rat rat_det(RatMat a) {
  size_t n = a.size();
  Rat det = 1;
  for (size_t c = 0; c < n; ++c) {
    size_t p = c;
    while (p < n && a[p][c] == 0) ++p;
    if (p == n) return 0;
    if (p != c) {
      std::swap(a[p], a[c]);
      det = -det;
    }
    det *= a[c][c];
    Rat inv = 1 / a[c][c];
    for (size_t r = c + 1; r < n; ++r) {
      if (a[r][c] == 0) continue;
      Rat f = a[r][c] * inv;
      for (size_t j = c; j < n; ++j) a[r][j] -= f * a[c][j];
    }
  }
  return det;
}

std::optional<RatMat> rat_inverse(RatMat a) {
  size_t n = a.size();
  RatMat inv(n, RatVec(n, Rat(0)));
  for (size_t i = 0; i < n; ++i) inv[i][i] = 1;
  for (size_t c = 0; c < n; ++c) {
    size_t p = c;
    while (p < n && a[p][c] == 0) ++p;
    if (p == n) return std::nullopt;
    std::swap(a[p], a[c]);
    std::swap(inv[p], inv[c]);
    Rat f = 1 / a[c][c];
    for (size_t j = 0; j < n; ++j) {
      a[c][j] *= f;
      inv[c][j] *= f;
    }
    for (size_t r = 0; r < n; ++r) {
      if (r == c || a[r][c] == 0) continue;
      Rat g = a[r][c];
      for (size_t j = 0; j < n; ++j) {
        a[r][j] -= g * a[c][j];
        inv[r][j] -= g * inv[c][j];
      }
    }
  }
  return inv;
}

RatVec mat_vec(const RatMat& a, const RatVec& v) {
  RatVec r(a.size(), Rat(0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < v.size(); ++j) r[i] += a[i][j] * v[j];
  return r;
}

RatVec vec_mat(const RatVec& v, const RatMat& a) {
  size_t n = a.empty() ? 0 : a[0].size();
  RatVec r(n, Rat(0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < n; ++j) r[j] += v[i] * a[i][j];
  return r;
}

std::vector<long> primitive_vector(const std::vector<long>& v) {
  long g = 0;
  for (long x : v) g = std::gcd(g, x);
  if (g == 0)
    fail(ErrCode::Internal, "primitive_vector of the zero vector");
  std::vector<long> r = v;
  for (long& x : r) x /= g;
  return r;
}

}  // namespace toricgw
