// Exact rational arithmetic: a thin layer over GMP's mpq_class plus the
// handful of combinatorial helpers (factorials, binomials, integer powers)
// the series formulas need.
#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace toricgw {

using Rat = mpq_class;
using Int = mpz_class;

// Error taxonomy shared by all modules; `code` maps onto process exit codes
// in the CLI layer (2 = bad input, 3 = validation failure, 4 = internal
// consistency failure).
enum class ErrCode {
  ConfigError,
  ValidationFailure,
  Internal,
  NotDivisible,
  SeedCollision,
  AlphaDependent,
  NuNegative,
  SingularPairing,
  MissingDegree,
  NotDivisibleByH1PlusH2,
  UnsupportedBundle,
  JNotInvertible,
};

class EngineError : public std::runtime_error {
 public:
  EngineError(ErrCode c, const std::string& msg)
      : std::runtime_error(msg), code(c) {}
  ErrCode code;
};

[[noreturn]] inline void fail(ErrCode c, const std::string& msg) {
  throw EngineError(c, msg);
}

// Parses "p", "-p/q", etc.; rejects zero denominators and garbage.
inline Rat rat_from_string(const std::string& s) {
  mpq_class q;
  if (s.empty() || q.set_str(s, 10) != 0)
    fail(ErrCode::ConfigError, "bad rational literal: '" + s + "'");
  if (q.get_den() == 0)
    fail(ErrCode::ConfigError, "zero denominator in rational: '" + s + "'");
  q.canonicalize();
  return q;
}

inline std::string rat_to_string(const Rat& r) { return r.get_str(); }

inline Rat rat_factorial(long n) {
  if (n < 0) fail(ErrCode::Internal, "factorial of negative argument");
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(n));
  return Rat(f);
}

inline Rat rat_binomial(long n, long k) {
  if (k < 0) return 0;
  // Generalized binomial for integer n (possibly negative), integer k >= 0.
  Rat num = 1;
  for (long i = 0; i < k; ++i) num *= Rat(n - i);
  return num / rat_factorial(k);
}

inline Rat rat_pow(const Rat& base, long e) {
  if (e == 0) return 1;
  Rat b = base;
  b.canonicalize();  // mpq_class(p, q) literals need not be reduced
  bool inv = e < 0;
  unsigned long n = static_cast<unsigned long>(inv ? -e : e);
  if (inv) {
    if (b == 0) fail(ErrCode::SeedCollision, "zero raised to negative power");
    b = 1 / b;
  }
  Rat acc = 1;
  while (n) {
    if (n & 1) acc *= b;
    b *= b;
    n >>= 1;
  }
  return acc;
}

inline long rat_to_long(const Rat& r) {
  if (r.get_den() != 1) fail(ErrCode::Internal, "expected integer rational");
  if (!r.get_num().fits_slong_p())
    fail(ErrCode::Internal, "integer out of range");
  return r.get_num().get_si();
}

}  // namespace toricgw
