#include "normct/fields.hpp"

namespace normct {

namespace {

bool squarefree(const Int& d) {
  for (const auto& [p, e] : factor(d))
    if (e > 1) return false;
  return true;
}

}  // namespace

QuadraticField::QuadraticField(Int d, BasisMode mode) : d_(std::move(d)), mode_(mode) {
  if (d_ == 0 || d_ == 1) throw domain_error("QuadraticField: d must be != 0, 1");
  if (!squarefree(d_)) throw domain_error("QuadraticField: d must be squarefree");
  if (mode_ == BasisMode::Maximal && mod_floor(d_, Int(4)) != 1)
    throw domain_error("QuadraticField: maximal basis requires d = 1 mod 4");
}

Int QuadraticField::discriminant() const {
  return mod_floor(d_, Int(4)) == 1 ? d_ : Int(4 * d_);
}

int QuadraticField::roots_of_unity() const {
  if (d_ == -1) return 4;
  if (d_ == -3) return 6;
  return 2;
}

QuadForm QuadraticField::norm_form() const {
  if (mode_ == BasisMode::Power) {
    // N(z1 + z2*sqrt(d)) = z1^2 - d*z2^2
    return QuadForm::diagonal({Rat(1), Rat(-d_)});
  }
  // omega = (1 + sqrt(d))/2: N(z1 + z2*omega) = z1^2 + z1 z2 + z2^2 (1-d)/4
  Rat half(1, 2);
  Rat c(Int(1 - d_), Int(4));
  c.canonicalize();
  return QuadForm({{Rat(1), half}, {half, c}});
}

Rat QuadraticField::norm(const Rat& z1, const Rat& z2) const {
  return norm_form().eval({z1, z2});
}

QuarticTower::QuarticTower(Rat a, Rat u, Rat v)
    : a_(std::move(a)), u_(std::move(u)), v_(std::move(v)) {
  if (v_ == 0) throw domain_error("QuarticTower: v must be nonzero");
  if (is_rational_square(a_))
    throw domain_error("QuarticTower: t^2 - a must be irreducible over Q");
  // u + v*sqrt(a) must not be a square in L, i.e. there is no rational x
  // with x^2 = (u +- w)/2 for w^2 = u^2 - a v^2.
  Rat n = u_ * u_ - a_ * v_ * v_;
  if (n == 0) throw domain_error("QuarticTower: u^2 - a v^2 = 0 (degenerate)");
  if (is_rational_square(n)) {
    Rat w(0);
    // exact sqrt of n = num/den, both perfect squares here
    Rat nc = n;
    nc.canonicalize();
    w = Rat(*exact_sqrt(Int(nc.get_num())), *exact_sqrt(Int(nc.get_den())));
    w.canonicalize();
    if (is_rational_square((u_ + w) / 2) || is_rational_square((u_ - w) / 2))
      throw domain_error("QuarticTower: u + v*sqrt(a) is a square in L");
  }
}

std::pair<QuadForm, QuadForm> QuarticTower::g_forms() const {
  const Rat &a = a_, &u = u_, &v = v_;
  Rat z(0);
  // g_0 = x1^2 + a x2^2 - u x3^2 - a u x4^2 - 2 a v x3 x4
  QuadForm g0({{Rat(1), z, z, z},
               {z, a, z, z},
               {z, z, -u, -a * v},
               {z, z, -a * v, -a * u}});
  // g_1 = 2 x1 x2 - v x3^2 - 2 u x3 x4 - a v x4^2
  QuadForm g1({{z, Rat(1), z, z},
               {Rat(1), z, z, z},
               {z, z, -v, -u},
               {z, z, -u, -a * v}});
  return {g0, g1};
}

Rat QuarticTower::norm(const std::vector<Rat>& x) const {
  auto [g0, g1] = g_forms();
  Rat n0 = g0.eval(x), n1 = g1.eval(x);
  return n0 * n0 - a_ * n1 * n1;
}

std::vector<Rat> QuarticTower::theta_min_poly() const {
  return {u_ * u_ - a_ * v_ * v_, Rat(0), Rat(-2) * u_, Rat(0), Rat(1)};
}

Poly quadform_to_poly(const QuadForm& q, const std::vector<std::string>& vars) {
  if (vars.size() != q.dim()) throw domain_error("quadform_to_poly: arity mismatch");
  Poly out(vars);
  for (size_t i = 0; i < q.dim(); ++i)
    for (size_t j = i; j < q.dim(); ++j) {
      Rat c = i == j ? q.entry(i, i) : q.entry(i, j) * 2;
      if (c == 0) continue;
      Exponents e(vars.size(), 0);
      e[i] += 1;
      e[j] += 1;
      out.set_coefficient(e, out.coefficient(e) + c);
    }
  return out;
}

std::pair<QuadForm, QuadForm> lambda_forms(const QuarticTower& tower,
                                           const Rat& rho0, const Rat& rho1) {
  if (rho0 == 0 && rho1 == 0) throw domain_error("lambda_forms: rho = 0");
  auto [g0, g1] = tower.g_forms();
  const Rat& a = tower.a();
  auto combine = [&](const Rat& c0, const Rat& c1) {
    std::vector<std::vector<Rat>> m(4, std::vector<Rat>(4));
    for (size_t i = 0; i < 4; ++i)
      for (size_t j = 0; j < 4; ++j)
        m[i][j] = c0 * g0.entry(i, j) + c1 * g1.entry(i, j);
    return QuadForm(m);
  };
  QuadForm l0 = combine(rho0, -a * rho1);  // rho0*g0 - a*rho1*g1
  QuadForm l1 = combine(rho1, -rho0);      // rho1*g0 - rho0*g1

  // Symbolic check of the disc identity
  //   a*lambda_1^2 - lambda_0^2 = -N_L(rho) * (g_0^2 - a*g_1^2).
  std::vector<std::string> y{"y1", "y2", "y3", "y4"};
  Poly P0 = quadform_to_poly(l0, y), P1 = quadform_to_poly(l1, y);
  Poly G0 = quadform_to_poly(g0, y), G1 = quadform_to_poly(g1, y);
  Rat nrho = rho0 * rho0 - a * rho1 * rho1;
  Poly lhs = P1 * P1 * a - P0 * P0;
  Poly rhs = (G0 * G0 - G1 * G1 * a) * (-nrho);
  if (!(lhs == rhs)) throw domain_error("lambda_forms: disc identity failed");
  return {l0, l1};
}

std::vector<Rat> field_mul(const QuadraticField& F, const std::vector<Rat>& x,
                           const std::vector<Rat>& y) {
  if (x.size() != 2 || y.size() != 2) throw domain_error("field_mul: arity");
  Rat d(F.d());
  if (F.basis_mode() == BasisMode::Power)
    return {x[0] * y[0] + d * x[1] * y[1], x[0] * y[1] + x[1] * y[0]};
  // omega^2 = (d-1)/4 + omega
  Rat w2 = (d - 1) / 4;
  return {x[0] * y[0] + w2 * x[1] * y[1], x[0] * y[1] + x[1] * y[0] + x[1] * y[1]};
}

std::vector<Rat> field_mul(const QuarticTower& K, const std::vector<Rat>& x,
                           const std::vector<Rat>& y) {
  if (x.size() != 4 || y.size() != 4) throw domain_error("field_mul: arity");
  const Rat &a = K.a(), &u = K.u(), &v = K.v();
  // Basis products: sqrt(a)^2 = a, theta^2 = u + v*sqrt(a),
  // sqrt(a)*theta^2 = av + u*sqrt(a) (times theta-block placement).
  std::vector<Rat> z(4, Rat(0));
  auto add = [&](size_t i, size_t j, const Rat& c) {
    if (c == 0) return;
    if (i > j) std::swap(i, j);
    if (i == 0) {
      z[j] += c;
    } else if (i == 1 && j == 1) {
      z[0] += a * c;
    } else if (i == 1 && j == 2) {
      z[3] += c;
    } else if (i == 1 && j == 3) {
      z[2] += a * c;
    } else if (i == 2 && j == 2) {
      z[0] += u * c;
      z[1] += v * c;
    } else if (i == 2 && j == 3) {
      z[0] += a * v * c;
      z[1] += u * c;
    } else {
      z[0] += a * u * c;
      z[1] += a * v * c;
    }
  };
  for (size_t i = 0; i < 4; ++i)
    for (size_t j = 0; j < 4; ++j) add(i, j, x[i] * y[j]);
  return z;
}

QuarticGaloisType classify_quartic_galois(const QuarticTower& tower) {
  Rat n = tower.u() * tower.u() - tower.a() * tower.v() * tower.v();
  if (is_rational_square(n)) return QuarticGaloisType::Biquadratic;
  if (is_rational_square(tower.a() * n)) return QuarticGaloisType::Cyclic;
  return QuarticGaloisType::NonGalois;
}

int brauer_order_quartic(const QuarticTower& tower) {
  return classify_quartic_galois(tower) == QuarticGaloisType::Biquadratic ? 2 : 1;
}

std::string galois_type_str(QuarticGaloisType t) {
  switch (t) {
    case QuarticGaloisType::Cyclic:
      return "cyclic";
    case QuarticGaloisType::Biquadratic:
      return "biquadratic";
    default:
      return "non-galois";
  }
}

}  // namespace normct
