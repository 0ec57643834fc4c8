#include "normct/linineq.hpp"

namespace normct {

bool satisfies(const LinSystem& sys, const std::vector<Rat>& w) {
  for (const auto& c : sys.cons) {
    Rat lhs = 0;
    for (size_t i = 0; i < sys.nvars; ++i) lhs += c.coeffs[i] * w[i];
    if (c.strict ? !(lhs > c.rhs) : !(lhs >= c.rhs)) return false;
  }
  return true;
}

namespace {

struct Bound {
  Rat value;
  bool strict;
};

}  // namespace

std::optional<std::vector<Rat>> feasible_point(const LinSystem& sys) {
  // Stack of eliminated layers; layer k holds the constraints involving
  // variable k with all later variables already eliminated.
  std::vector<std::vector<LinConstraint>> layers;
  std::vector<LinConstraint> current = sys.cons;

  for (size_t var = sys.nvars; var-- > 0;) {
    std::vector<LinConstraint> with_var, without;
    for (auto& c : current) {
      if (c.coeffs[var] != 0)
        with_var.push_back(c);
      else
        without.push_back(c);
    }
    // Combine each lower bound on w[var] with each upper bound.
    for (const auto& lo : with_var) {
      if (lo.coeffs[var] <= 0) continue;
      for (const auto& hi : with_var) {
        if (hi.coeffs[var] >= 0) continue;
        LinConstraint comb;
        comb.coeffs.assign(sys.nvars, Rat(0));
        Rat a = lo.coeffs[var], b = -hi.coeffs[var];
        for (size_t i = 0; i < var; ++i)
          comb.coeffs[i] = b * lo.coeffs[i] + a * hi.coeffs[i];
        comb.rhs = b * lo.rhs + a * hi.rhs;
        comb.strict = lo.strict || hi.strict;
        without.push_back(std::move(comb));
      }
    }
    layers.push_back(std::move(with_var));
    current = std::move(without);
  }

  // All variables eliminated: remaining constraints are 0 ? rhs.
  for (const auto& c : current)
    if (c.strict ? !(Rat(0) > c.rhs) : !(Rat(0) >= c.rhs)) return std::nullopt;

  // Back-substitute a witness, innermost variable first.
  std::vector<Rat> w(sys.nvars, Rat(0));
  for (size_t var = 0; var < sys.nvars; ++var) {
    const auto& layer = layers[layers.size() - 1 - var];
    std::optional<Bound> lo, hi;
    for (const auto& c : layer) {
      Rat rest = c.rhs;
      for (size_t i = 0; i < var; ++i) rest -= c.coeffs[i] * w[i];
      Rat bound = rest / c.coeffs[var];
      if (c.coeffs[var] > 0) {
        if (!lo || bound > lo->value || (bound == lo->value && c.strict))
          lo = Bound{bound, c.strict};
      } else {
        if (!hi || bound < hi->value || (bound == hi->value && c.strict))
          hi = Bound{bound, c.strict};
      }
    }
    if (lo && hi) {
      if (lo->value == hi->value)
        w[var] = lo->value;  // feasibility guarantees non-strict on both sides
      else
        w[var] = (lo->value + hi->value) / 2;
    } else if (lo) {
      w[var] = lo->strict ? lo->value + 1 : lo->value;
    } else if (hi) {
      w[var] = hi->strict ? hi->value - 1 : hi->value;
    }
  }
  return w;
}

}  // namespace normct
