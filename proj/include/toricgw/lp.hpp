// Exact rational linear-programming feasibility via phase-1 simplex with
// Bland's rule (guaranteed termination, no floating point anywhere).
#pragma once

#include <vector>

#include "toricgw/linalg.hpp"

namespace toricgw {

// Decides whether { v >= 0 : A v = b } is nonempty. A is m x n (n may be 0).
bool lp_feasible(const RatMat& A, const RatVec& b);

}  // namespace toricgw
