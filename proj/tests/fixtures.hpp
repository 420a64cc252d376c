// Shared geometric fixtures for the test suites: the standard minimal toric
// pairs exercised throughout (projective spaces, products, Hirzebruch
// surfaces).
#pragma once

#include "toricgw/toric.hpp"

namespace toricgw::fixtures {

inline ToricPair projective_space(long n) {
  ToricPair tp;
  tp.k = 1;
  tp.N = n + 1;
  tp.M.assign(1, std::vector<long>(tp.N, 1));
  tp.tau = {Rat(1)};
  return tp;
}

inline ToricPair p1() { return projective_space(1); }
inline ToricPair p2() { return projective_space(2); }
inline ToricPair p4() { return projective_space(4); }

inline ToricPair p1xp1() {
  ToricPair tp;
  tp.k = 2;
  tp.N = 4;
  tp.M = {{1, 1, 0, 0}, {0, 0, 1, 1}};
  tp.tau = {Rat(1), Rat(1)};
  return tp;
}

// Hirzebruch surface: columns (0,1),(0,1),(1,0),(1,k).
inline ToricPair hirzebruch(long k) {
  ToricPair tp;
  tp.k = 2;
  tp.N = 4;
  tp.M = {{0, 0, 1, 1}, {1, 1, 0, k}};
  tp.tau = {Rat(1), Rat(k + 1)};
  return tp;
}

}  // namespace toricgw::fixtures
