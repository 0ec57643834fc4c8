#pragma once

// Sparse multivariate polynomials over Q with a fixed variable list.
// Terms are kept in total-degree-then-lex order so printing and
// hashing are canonical.

#include <map>
#include <string>
#include <vector>

#include "normct/numbers.hpp"

namespace normct {

using Exponents = std::vector<unsigned>;

struct TermOrder {
  bool operator()(const Exponents& a, const Exponents& b) const {
    unsigned da = 0, db = 0;
    for (unsigned e : a) da += e;
    for (unsigned e : b) db += e;
    if (da != db) return da < db;
    return a < b;
  }
};

class Poly {
 public:
  Poly() = default;
  explicit Poly(std::vector<std::string> vars) : vars_(std::move(vars)) {}

  static Poly constant(const Rat& c, std::vector<std::string> vars = {});
  // The i-th variable of the given list, as a polynomial.
  static Poly variable(size_t i, std::vector<std::string> vars);
  // Dense univariate constructor, constant term first.
  static Poly univariate(const std::vector<Rat>& coeffs,
                         const std::string& var = "t");

  size_t nvars() const { return vars_.size(); }
  const std::vector<std::string>& vars() const { return vars_; }
  const std::map<Exponents, Rat, TermOrder>& terms() const { return terms_; }

  bool is_zero() const { return terms_.empty(); }
  unsigned total_degree() const;
  Rat coefficient(const Exponents& e) const;
  void set_coefficient(const Exponents& e, const Rat& c);

  Rat eval(const std::vector<Rat>& point) const;
  Poly derivative(size_t var) const;

  // Dense coefficient list for a univariate polynomial, constant first.
  std::vector<Rat> univariate_coeffs() const;
  // Integer coefficients after clearing denominators (content ignored).
  std::vector<Int> univariate_int_coeffs() const;

  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator*(const Poly& o) const;
  Poly operator-() const;
  Poly operator*(const Rat& c) const;
  bool operator==(const Poly& o) const;

  std::string str() const;

 private:
  std::vector<std::string> vars_;
  std::map<Exponents, Rat, TermOrder> terms_;

  static void check_compatible(const Poly& a, const Poly& b);
};

}  // namespace normct
