#pragma once

// Quaternion classes (f(t), d) on a split norm variety over a quadratic
// field, their local invariants at certified local points, the adelic
// pairing and the bounded-obstruction pipeline.

#include "normct/variety.hpp"

namespace normct {

struct QuaternionClass {
  Poly numerator;   // f(t), univariate, typically t - a_i
  Rat d;            // square class of the field
  Poly complement;  // P(t)/f(t), the fallback representative where f vanishes
};

// The classes (t - a_i, d), i = 1..r-1, with complement representatives.
std::vector<QuaternionClass> standard_generators(const NormVariety& V);

// Hilbert symbol of (f(t_q), d) at the point's place, switching to the
// complement representative when f(t_q) vanishes to working precision.
InvariantValue local_invariant(const NormVariety& V, const QuaternionClass& beta,
                               const LocalPoint& q);

// Places where a generator can have nonzero invariant on integral points.
std::vector<Place> bad_places(const NormVariety& V, const QuaternionClass& beta);

struct PairingReport {
  std::vector<QuaternionClass> classes;
  std::vector<Place> places;
  // local_invs[class][place index]
  std::vector<std::vector<InvariantValue>> local_invs;
  std::vector<InvariantValue> totals;
  // Sums over every subset of generators (the full 2-group).
  std::vector<std::pair<std::vector<size_t>, InvariantValue>> subset_totals;
  std::vector<std::string> spot_checks;

  bool orthogonal() const {
    for (const auto& t : totals)
      if (!t.is_zero()) return false;
    return true;
  }
};

PairingReport bm_pairing(const NormVariety& V, const AdelicPointSpec& spec);

// lhs = sum_i e_i * inv_v((t - a_i, d)), rhs = inv_v((c, d)); equal on X.
std::pair<InvariantValue, InvariantValue> relation_check(const NormVariety& V,
                                                         const LocalPoint& q);

enum class CertVerdict { Impossible, Unknown };

// Exhaustive check: is there an integer t in [lo, hi] satisfying all the
// congruences? Impossible realizes the archimedean/p-adic contradiction.
CertVerdict product_formula_certificate(const Rat& lo, const Rat& hi,
                                        const std::vector<ResidueClass>& congruences);

struct ObstructionVerdict {
  PairingReport pairing;
  bool orthogonal = false;
  std::vector<std::string> forced_components;
  CertVerdict certificate = CertVerdict::Unknown;
  std::vector<IntegralPoint> found_points;
  std::string verdict;  // "counterexample confirmed" | "point found" |
                        // "pairing nonzero" | "inconclusive"
};

ObstructionVerdict obstruction_demo(const NormVariety& V, const AdelicPointSpec& spec,
                                    const std::vector<ResidueClass>& t_congruences,
                                    const Int& bound);

}  // namespace normct
