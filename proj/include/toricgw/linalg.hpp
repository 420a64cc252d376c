// Small dense exact-rational linear algebra: determinants, inverses, and
// integer-vector utilities used by the fixed-point and cone machinery.
#pragma once

#include <optional>
#include <vector>

#include "toricgw/rational.hpp"

namespace toricgw {

using RatMat = std::vector<std::vector<Rat>>;
using RatVec = std::vector<Rat>;

// Determinant by fraction-free-ish Gaussian elimination (exact rationals).
Rat rat_det(RatMat a);

// Inverse of a square matrix; nullopt when singular.
std::optional<RatMat> rat_inverse(RatMat a);

// r = a * v (a is m x n, v length n).
RatVec mat_vec(const RatMat& a, const RatVec& v);

// r = v * a (v length m, a is m x n).
RatVec vec_mat(const RatVec& v, const RatMat& a);

// Divides an integer vector by the gcd of its entries (error on the zero
// vector); the direction is preserved.
std::vector<long> primitive_vector(const std::vector<long>& v);

}  // namespace toricgw
