#pragma once

// Quadratic forms over Q: Hilbert symbols, diagonalization, Hasse
// invariants and the standard local isotropy / representation
// criteria at every place.

#include <vector>

#include "normct/numbers.hpp"

namespace normct {

// Element of (1/2)Z/Z, the value group of local invariants here.
class InvariantValue {
 public:
  InvariantValue() : half_(false) {}
  static InvariantValue zero() { return InvariantValue(false); }
  static InvariantValue half() { return InvariantValue(true); }

  bool is_zero() const { return !half_; }
  InvariantValue operator+(InvariantValue o) const {
    return InvariantValue(half_ != o.half_);
  }
  InvariantValue& operator+=(InvariantValue o) {
    half_ = half_ != o.half_;
    return *this;
  }
  bool operator==(InvariantValue o) const { return half_ == o.half_; }
  std::string str() const { return half_ ? "1/2" : "0"; }

 private:
  explicit InvariantValue(bool h) : half_(h) {}
  bool half_;
};

class QuadForm {
 public:
  QuadForm() = default;
  // Symmetric Gram matrix; q(x) = x^T G x.
  explicit QuadForm(std::vector<std::vector<Rat>> gram);
  static QuadForm diagonal(const std::vector<Rat>& entries);

  size_t dim() const { return gram_.size(); }
  const std::vector<std::vector<Rat>>& gram() const { return gram_; }
  Rat entry(size_t i, size_t j) const { return gram_[i][j]; }

  Rat eval(const std::vector<Rat>& x) const;
  Rat det() const;
  bool nondegenerate() const { return det() != 0; }

  // Orthogonal direct sum.
  QuadForm direct_sum(const QuadForm& o) const;
  // Appends <c> as an extra diagonal entry.
  QuadForm extend_diagonal(const Rat& c) const;

 private:
  std::vector<std::vector<Rat>> gram_;
};

// Hilbert symbol (a,b)_v as an invariant value: 0 iff z^2 = ax^2 + by^2
// has a nontrivial solution in the completion at v.
InvariantValue hilbert_symbol(const Rat& a, const Rat& b, const Place& v);

// Diagonal entries of a form equivalent to q over Q.
std::vector<Rat> diagonalize(const QuadForm& q);

// Sum over i<j of (d_i, d_j)_v.
InvariantValue hasse_invariant(const std::vector<Rat>& diag, const Place& v);

// (n_plus, n_minus) over R.
std::pair<int, int> signature(const QuadForm& q);

bool is_isotropic_local(const QuadForm& q, const Place& v);
bool represents_local(const QuadForm& q, const Rat& c, const Place& v);

// Exhaustive primitive-solution search mod p^k; independent of the
// symbol-based criteria, used as an oracle in tests.
bool isotropic_by_enumeration(const QuadForm& q, const Int& p, unsigned k);

}  // namespace normct
