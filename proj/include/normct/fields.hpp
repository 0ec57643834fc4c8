#pragma once

// Quadratic fields Q(sqrt d) and quartic towers K = Q(sqrt(u + v sqrt a)):
// norm forms, the g_0/g_1/lambda expansion and the Galois-type
// classification behind the Brauer-order table.

#include <optional>

#include "normct/poly.hpp"
#include "normct/quadform.hpp"

namespace normct {

enum class BasisMode { Power, Maximal };

class QuadraticField {
 public:
  QuadraticField(Int d, BasisMode mode = BasisMode::Power);

  const Int& d() const { return d_; }
  BasisMode basis_mode() const { return mode_; }
  Int discriminant() const;
  bool imaginary() const { return d_ < 0; }
  // Number of roots of unity.
  int roots_of_unity() const;

  // Binary norm form N(z1 + z2*omega) in the chosen basis.
  QuadForm norm_form() const;
  Rat norm(const Rat& z1, const Rat& z2) const;

  // Calibrated value of the lattice-density constant c_K, when set.
  std::optional<std::pair<Rat, Rat>> ck_interval;

 private:
  Int d_;
  BasisMode mode_;
};

enum class QuarticGaloisType { Cyclic, Biquadratic, NonGalois };

// K = Q(theta), theta^2 = u + v*sqrt(a), over L = Q(sqrt(a)).
class QuarticTower {
 public:
  QuarticTower(Rat a, Rat u, Rat v);

  const Rat& a() const { return a_; }
  const Rat& u() const { return u_; }
  const Rat& v() const { return v_; }

  // N_{K/L}(x) = g_0(x) + g_1(x)*sqrt(a) for x in the basis
  // {1, sqrt(a), theta, sqrt(a)*theta}.
  std::pair<QuadForm, QuadForm> g_forms() const;

  // N_{K/Q}(x) = g_0(x)^2 - a*g_1(x)^2.
  Rat norm(const std::vector<Rat>& x) const;

  // Minimal polynomial x^4 - 2u x^2 + (u^2 - a v^2) of theta, dense.
  std::vector<Rat> theta_min_poly() const;

 private:
  Rat a_, u_, v_;
};

// rho*sigma(N_{K/L}(y)) = lambda_0(y) + lambda_1(y)*sqrt(a), for
// rho = rho0 + rho1*sqrt(a); the disc identity is verified symbolically.
std::pair<QuadForm, QuadForm> lambda_forms(const QuarticTower& tower,
                                           const Rat& rho0, const Rat& rho1);

QuarticGaloisType classify_quartic_galois(const QuarticTower& tower);
int brauer_order_quartic(const QuarticTower& tower);

// A quadratic form as an explicit polynomial in named variables.
Poly quadform_to_poly(const QuadForm& q, const std::vector<std::string>& vars);

// Products in the field algebras, coordinate vectors in the chosen
// bases: {1, sqrt(d)} or {1, (1+sqrt(d))/2}, and {1, sqrt(a), theta,
// sqrt(a)*theta}.
std::vector<Rat> field_mul(const QuadraticField& F, const std::vector<Rat>& x,
                           const std::vector<Rat>& y);
std::vector<Rat> field_mul(const QuarticTower& K, const std::vector<Rat>& x,
                           const std::vector<Rat>& y);

std::string galois_type_str(QuarticGaloisType t);

}  // namespace normct
