#pragma once

// The affine varieties X: P(t) = N_{K/Q}(z) and their real / p-adic /
// integral point analysis: connected components of the t-image over R,
// recession-ball criteria, box searches and certified local points.

#include <cstdint>
#include <map>
#include <optional>
#include <tuple>
#include <variant>

#include "normct/fields.hpp"
#include "normct/linineq.hpp"
#include "normct/poly.hpp"

namespace normct {

// P(t) = c * prod_i g_i(t)^{e_i} with linear g_i in s variables.
struct SplitSpec {
  Rat c;
  struct Factor {
    Poly g;  // linear polynomial in t_1..t_s
    unsigned exponent;
  };
  std::vector<Factor> factors;
  size_t s = 1;
};

// P(t) = c*(t^2 - a), irreducible.
struct QuadraticSpec {
  Rat c;
  Rat a;
};

using FieldSpec = std::variant<QuadraticField, QuarticTower, QuadForm>;
using PolySpec = std::variant<SplitSpec, QuadraticSpec>;

class NormVariety {
 public:
  NormVariety(FieldSpec field, PolySpec poly);

  const FieldSpec& field() const { return field_; }
  const PolySpec& poly() const { return poly_; }

  size_t s() const;  // number of t-variables
  size_t n() const;  // number of z-variables

  Rat eval_P(const std::vector<Rat>& t) const;
  Rat eval_norm(const std::vector<Rat>& z) const;
  // P as a polynomial (expanded).
  Poly P_poly() const;

  bool norm_positive_definite() const;

  // Roots a_i for a split s=1 spec with linear monic-normalized factors.
  std::vector<Rat> split_roots() const;

  // Square class of d for a quadratic field spec.
  Rat field_d() const;

 private:
  FieldSpec field_;
  PolySpec poly_;
};

struct Endpoint {
  enum Kind { NegInf, PosInf, Rational, SqrtA } kind = Rational;
  Rat value;     // Rational: the endpoint; SqrtA: sign * sqrt(value)
  int sign = 1;  // for SqrtA
  bool closed = false;
};

struct RealComponent {
  enum Kind { AllSpace, Interval, Region } kind = AllSpace;
  // Interval (s = 1)
  Endpoint lo, hi;
  // Region (s >= 2): sign vector and the open polyhedron {eps_i g_i > 0}
  std::vector<int> eps;
  LinSystem region;
  bool unbounded_ball = false;

  std::string str() const;
};

struct LocalPoint {
  Place place = Place::infinite();
  // Finite place: residues mod p^precision, and a Newton certificate:
  // coordinate index (t-block first, then z) whose partial derivative
  // has valuation e with precision >= 2e+1.
  std::vector<Int> t_res, z_res;
  unsigned precision = 0;
  int cert_coord = -1;
  long cert_valuation = 0;
  // Real place: exact coordinates.
  std::vector<Rat> t_real, z_real;
};

struct AdelicPointSpec {
  std::vector<Rat> default_t, default_z;  // exact integral point, used off the list
  std::vector<LocalPoint> explicit_points;
  std::vector<Place> excluded;  // the set S
};

using Congruences = std::map<size_t, ResidueClass>;  // coord index -> constraint

std::vector<RealComponent> real_components(const NormVariety& V);

// All sign vectors obeying the sign rule, with polyhedron-nonemptiness.
std::vector<std::pair<std::vector<int>, bool>> sign_vectors(const NormVariety& V);

bool polytope_unbounded_ball(const RealComponent& comp);

struct IntegralPoint {
  std::vector<Int> t, z;
  bool operator<(const IntegralPoint& o) const {
    return std::tie(t, z) < std::tie(o.t, o.z);
  }
};

std::vector<IntegralPoint> search_points(const NormVariety& V, const Int& bound,
                                         const Congruences& congruences = {},
                                         uint64_t budget = 400000000ULL);

std::vector<LocalPoint> local_integral_points(const NormVariety& V, const Int& p,
                                              unsigned m, size_t max_points = 1000000,
                                              uint64_t budget = 200000000ULL);

// Verifies equation-to-precision and the Newton certificate.
bool check_local_point(const NormVariety& V, const LocalPoint& q);

bool is_smooth_point(const NormVariety& V, const std::vector<Rat>& t,
                     const std::vector<Rat>& z);

struct SolubilityReport {
  bool soluble = false;
  bool inconclusive = false;
  std::optional<Place> failure;  // insoluble or inconclusive place
  std::vector<std::pair<Place, std::string>> witnesses;
};

SolubilityReport everywhere_locally_soluble(const NormVariety& V,
                                            unsigned max_precision = 8,
                                            uint64_t budget = 200000000ULL);

// Places where a quaternion generator can have nonzero invariant on
// integral points: {inf, 2}, primes of c and d, primes of the root
// differences, and small primes up to deg P.
std::vector<Place> bad_places(const NormVariety& V);

}  // namespace normct
