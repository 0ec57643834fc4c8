#pragma once

// Exact-rational feasibility for systems of linear inequalities via
// Fourier-Motzkin elimination, with witness extraction. Intended for
// the small systems arising from sign-vector polyhedra and recession
// directions.

#include <optional>
#include <vector>

#include "normct/numbers.hpp"

namespace normct {

struct LinConstraint {
  std::vector<Rat> coeffs;  // length nvars
  Rat rhs;
  bool strict = false;  // coeffs . w > rhs instead of >= rhs
};

struct LinSystem {
  size_t nvars = 0;
  std::vector<LinConstraint> cons;

  void add(std::vector<Rat> coeffs, Rat rhs, bool strict = false) {
    cons.push_back({std::move(coeffs), std::move(rhs), strict});
  }
};

// A satisfying point, or nullopt if the system is infeasible.
std::optional<std::vector<Rat>> feasible_point(const LinSystem& sys);

bool satisfies(const LinSystem& sys, const std::vector<Rat>& w);

}  // namespace normct
