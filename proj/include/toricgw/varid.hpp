// Variable identifiers for the sparse multivariate polynomial layer.
//
// Every symbolic quantity in the engine lives in a polynomial ring over a
// fixed, globally ordered variable universe:
//   alpha_j  — torus weights (one per divisor, j in [N])
//   A_i, B_i — formal curvature/insertion variables (one per Kaehler
//              direction; B is the second copy used by bivariate formulas)
//   h        — the descendant variable (and h1, h2 for two-point series)
//   z_i      — auxiliary variables of the pairing-polynomiality functional
// The kind is packed in the high bits so all alphas sort before all A's, etc.
// This fixed order doubles as the monomial order used for canonical factor
// normalization and exact division.
#pragma once

#include <cstdint>
#include <string>

namespace toricgw {

enum class VarKind : uint32_t {
  Alpha = 0,
  A = 1,
  B = 2,
  H = 3,   // single descendant variable
  H1 = 4,  // first slot of a two-point series
  H2 = 5,  // second slot
  Z = 6,   // pairing-functional variables
};

using VarId = uint32_t;

constexpr VarId make_var(VarKind k, uint32_t index) {
  return (static_cast<uint32_t>(k) << 16) | index;
}

constexpr VarKind var_kind(VarId v) { return static_cast<VarKind>(v >> 16); }
constexpr uint32_t var_index(VarId v) { return v & 0xffffu; }

constexpr VarId var_alpha(uint32_t j) { return make_var(VarKind::Alpha, j); }
constexpr VarId var_A(uint32_t i) { return make_var(VarKind::A, i); }
constexpr VarId var_B(uint32_t i) { return make_var(VarKind::B, i); }
constexpr VarId var_h() { return make_var(VarKind::H, 0); }
constexpr VarId var_h1() { return make_var(VarKind::H1, 0); }
constexpr VarId var_h2() { return make_var(VarKind::H2, 0); }
constexpr VarId var_z(uint32_t i) { return make_var(VarKind::Z, i); }

inline std::string var_name(VarId v) {
  uint32_t i = var_index(v);
  switch (var_kind(v)) {
    case VarKind::Alpha: return "al" + std::to_string(i + 1);
    case VarKind::A: return "A" + std::to_string(i + 1);
    case VarKind::B: return "B" + std::to_string(i + 1);
    case VarKind::H: return "h";
    case VarKind::H1: return "h1";
    case VarKind::H2: return "h2";
    case VarKind::Z: return "z" + std::to_string(i + 1);
  }
  return "v?";
}

}  // namespace toricgw
