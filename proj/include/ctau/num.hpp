#pragma once
#include <gmpxx.h>

#include <cstdint>
#include <string>

#include "ctau/error.hpp"

namespace ctau {

/* Exact scalars. Rat is canonical (lowest terms, positive denominator) by gmpxx. */
using Rat = mpq_class;

inline Rat rat_from(long n, long d = 1) {
  Rat r(n, d);
  r.canonicalize();
  return r;
}

/* Parse "p" or "p/q" (q != 0). */
inline Rat rat_parse(const std::string& s) {
  try {
    Rat r(s);
    if (r.get_den() == 0) parse_error("zero denominator in '" + s + "'");
    r.canonicalize();
    return r;
  } catch (const std::invalid_argument&) {
    parse_error("bad rational '" + s + "'");
  }
}

inline std::string rat_str(const Rat& r) { return r.get_str(); }

/* Prime field F_P, residues in [0,P). P must be an odd prime < 2^31 so products fit. */
template <std::uint64_t P>
struct Fp {
  std::uint64_t v = 0;
  Fp() = default;
  Fp(long x) {
    long m = x % long(P);
    v = std::uint64_t(m < 0 ? m + long(P) : m);
  }
  friend Fp operator+(Fp a, Fp b) { return raw((a.v + b.v) % P); }
  friend Fp operator-(Fp a, Fp b) { return raw((a.v + P - b.v) % P); }
  friend Fp operator*(Fp a, Fp b) { return raw((a.v * b.v) % P); }
  friend Fp operator/(Fp a, Fp b) {
    if (b.v == 0) precondition_error("division by zero in F_p");
    return a * b.inv();
  }
  Fp operator-() const { return raw(v == 0 ? 0 : P - v); }
  Fp& operator+=(Fp b) { return *this = *this + b; }
  Fp& operator-=(Fp b) { return *this = *this - b; }
  Fp& operator*=(Fp b) { return *this = *this * b; }
  Fp& operator/=(Fp b) { return *this = *this / b; }
  friend bool operator==(Fp a, Fp b) { return a.v == b.v; }
  friend bool operator!=(Fp a, Fp b) { return a.v != b.v; }
  Fp inv() const {  // Fermat: v^(P-2)
    Fp r = raw(1), b = *this;
    for (std::uint64_t e = P - 2; e; e >>= 1, b = b * b)
      if (e & 1) r = r * b;
    return r;
  }
  static Fp raw(std::uint64_t x) {
    Fp f;
    f.v = x;
    return f;
  }
};

/* Field adapter used by generic code: coefficient import and printing. */
template <class K>
struct FieldOps;
template <>
struct FieldOps<Rat> {
  static Rat from_rat(const Rat& r) { return r; }
  static std::string str(const Rat& x) { return rat_str(x); }
  static constexpr const char* name() { return "Q"; }
};
template <std::uint64_t P>
struct FieldOps<Fp<P>> {
  static Fp<P> from_rat(const Rat& r) {
    long num = long(mpz_fdiv_ui(r.get_num().get_mpz_t(), P));
    long den = long(mpz_fdiv_ui(r.get_den().get_mpz_t(), P));
    if (den == 0) precondition_error("denominator vanishes mod p");
    return Fp<P>(num) / Fp<P>(den);
  }
  static std::string str(Fp<P> x) { return std::to_string(x.v); }
  static std::string name() { return "F_" + std::to_string(P); }
};

}  // namespace ctau
