#pragma once

// Exact arithmetic layer: arbitrary-precision integers/rationals (GMP),
// p-adic valuations, Legendre symbols, square tests in completions,
// Hensel lifting and CRT. Everything here is pure and exact; no
// floating point.

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace normct {

using Int = mpz_class;
using Rat = mpq_class;

struct domain_error : std::runtime_error {
  explicit domain_error(const std::string& what) : std::runtime_error(what) {}
};

struct budget_exceeded : std::runtime_error {
  explicit budget_exceeded(const std::string& what) : std::runtime_error(what) {}
};

// A place of Q: the real place or a p-adic one.
class Place {
 public:
  static Place infinite() { return Place(Int(0)); }
  static Place finite(const Int& p);

  bool is_infinite() const { return p_ == 0; }
  const Int& prime() const { return p_; }

  bool operator==(const Place& o) const { return p_ == o.p_; }
  bool operator<(const Place& o) const { return p_ < o.p_; }

  std::string str() const { return is_infinite() ? "inf" : p_.get_str(); }

 private:
  explicit Place(Int p) : p_(std::move(p)) {}
  Int p_;  // 0 encodes the real place
};

// Residue value in [0, modulus), modulus >= 1.
struct ResidueClass {
  Int value;
  Int modulus;

  ResidueClass() : value(0), modulus(1) {}
  ResidueClass(Int v, Int m);
};

bool is_prime(const Int& n);

// v_p of a nonzero integer or rational.
long valuation(const Int& x, const Int& p);
long valuation(const Rat& x, const Int& p);

// Unit part: x / p^{v_p(x)} as an exact rational.
Rat unit_part(const Rat& x, const Int& p);

// Legendre symbol (a/p), p an odd prime not dividing a.
int legendre(const Int& a, const Int& p);

// Unit part of x as an integer residue mod p^k.
Int unit_mod(const Rat& x, const Int& p, unsigned k);

// True iff x is a nonzero square in the completion at the given place.
bool is_square_in_Qp(const Rat& x, const Place& v);

// CRT for pairwise coprime moduli. Throws domain_error on a conflict
// between non-coprime constraints; compatible overlaps are merged.
ResidueClass solve_congruences(const std::vector<ResidueClass>& pairs);

// Hensel lift of a simple root r0 of f mod p to a root mod p^m.
// Coefficients of f are given densely, constant term first.
ResidueClass hensel_root(const std::vector<Int>& f, const Int& r0, const Int& p,
                         unsigned m);

// All roots of f mod p^m (handles non-simple roots by branching).
std::vector<Int> roots_mod_prime_power(const std::vector<Int>& f, const Int& p,
                                       unsigned m);

Int eval_poly(const std::vector<Int>& f, const Int& x);
std::vector<Int> derive_poly(const std::vector<Int>& f);

Int pow_int(const Int& base, unsigned e);
Int mod_floor(const Int& a, const Int& m);

// Trial-division factorization; intended for desk-scale inputs.
// Returns (prime, exponent) pairs for |n|, n != 0.
std::vector<std::pair<Int, unsigned>> factor(const Int& n);

// sqrt if n is a perfect square.
std::optional<Int> exact_sqrt(const Int& n);

// Is a rational a square in Q?
bool is_rational_square(const Rat& x);

}  // namespace normct
