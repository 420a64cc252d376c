#include "toricgw/lp.hpp"

#include <cstddef>

namespace toricgw {

// Phase-1 simplex: minimize the sum of artificial variables for
//   [A | I] (v, s) = b, v, s >= 0   (rows pre-negated so b >= 0).
// Feasible iff the optimum is 0. Bland's rule (smallest entering index,
// smallest-row tie-break on leaving) prevents cycling, so termination is
// unconditional with exact arithmetic.
bool lp_feasible(const RatMat& A, const RatVec& b) {
  size_t m = b.size();
  size_t n = m == 0 ? 0 : A.empty() ? 0 : A[0].size();
  if (m == 0) return true;

  // Tableau: m rows, n + m + 1 columns (real vars, artificials, rhs).
  size_t cols = n + m + 1;
  std::vector<RatVec> T(m, RatVec(cols, Rat(0)));
  for (size_t i = 0; i < m; ++i) {
    bool neg = b[i] < 0;
    for (size_t j = 0; j < n; ++j) T[i][j] = neg ? -A[i][j] : A[i][j];
    T[i][n + i] = 1;
    T[i][cols - 1] = neg ? -b[i] : b[i];
  }
  std::vector<size_t> basis(m);
  for (size_t i = 0; i < m; ++i) basis[i] = n + i;

  // Reduced-cost row for cost (0,...,0,1,...,1): z_j = c_j - sum_i T[i][j],
  // objective value -sum_i rhs_i (stored negated in zval for convenience).
  RatVec z(cols, Rat(0));
  for (size_t j = 0; j < cols; ++j) {
    Rat s = 0;
    for (size_t i = 0; i < m; ++i) s += T[i][j];
    Rat cost = (j >= n && j < n + m) ? Rat(1) : Rat(0);
    z[j] = cost - s;
  }

  while (true) {
    // Bland: smallest index with negative reduced cost enters.
    size_t enter = cols - 1;
    for (size_t j = 0; j + 1 < cols; ++j) {
      if (z[j] < 0) {
        enter = j;
        break;
      }
    }
    if (enter == cols - 1) break;  // optimal

    // Ratio test; ties broken by smallest basis variable (Bland).
    size_t leave = m;
    Rat best = 0;
    for (size_t i = 0; i < m; ++i) {
      if (T[i][enter] <= 0) continue;
      Rat ratio = T[i][cols - 1] / T[i][enter];
      if (leave == m || ratio < best ||
          (ratio == best && basis[i] < basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave == m) {
      // Unbounded phase-1 objective cannot happen (objective >= 0), but a
      // column with no positive entry simply cannot improve: mark it
      // nonnegative to skip. This would indicate arithmetic breakage.
      fail(ErrCode::Internal, "phase-1 simplex: unbounded direction");
    }

    // Pivot on (leave, enter).
    Rat piv = T[leave][enter];
    for (size_t j = 0; j < cols; ++j) T[leave][j] /= piv;
    for (size_t i = 0; i < m; ++i) {
      if (i == leave) continue;
      Rat f = T[i][enter];
      if (f == 0) continue;
      for (size_t j = 0; j < cols; ++j) T[i][j] -= f * T[leave][j];
    }
    Rat fz = z[enter];
    if (fz != 0)
      for (size_t j = 0; j < cols; ++j) z[j] -= fz * T[leave][j];
    basis[leave] = enter;
  }

  // Optimum = sum of artificial values = sum of rhs entries whose basis
  // variable is artificial.
  Rat opt = 0;
  for (size_t i = 0; i < m; ++i)
    if (basis[i] >= n) opt += T[i][cols - 1];
  return opt == 0;
}

}  // namespace toricgw
