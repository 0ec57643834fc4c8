#include "normct/numbers.hpp"

#include <algorithm>

namespace normct {

Place Place::finite(const Int& p) {
  if (!is_prime(p)) throw domain_error("Place::finite: " + p.get_str() + " is not prime");
  return Place(p);
}

ResidueClass::ResidueClass(Int v, Int m) : modulus(std::move(m)) {
  if (modulus < 1) throw domain_error("ResidueClass: modulus must be positive");
  value = mod_floor(v, modulus);
}

bool is_prime(const Int& n) {
  if (n < 2) return false;
  // mpz_probab_prime_p is deterministic well beyond 64-bit inputs with
  // this many rounds; larger candidates are rejected at call sites that
  // construct places.
  return mpz_probab_prime_p(n.get_mpz_t(), 40) != 0;
}

Int mod_floor(const Int& a, const Int& m) {
  Int r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

Int pow_int(const Int& base, unsigned e) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

long valuation(const Int& x, const Int& p) {
  if (x == 0) throw domain_error("valuation: x = 0");
  Int r = abs(x);
  long v = 0;
  Int q, rem;
  for (;;) {
    mpz_fdiv_qr(q.get_mpz_t(), rem.get_mpz_t(), r.get_mpz_t(), p.get_mpz_t());
    if (rem != 0) break;
    r = q;
    ++v;
  }
  return v;
}

long valuation(const Rat& x, const Int& p) {
  if (x == 0) throw domain_error("valuation: x = 0");
  Rat r = x;
  r.canonicalize();
  return valuation(Int(r.get_num()), p) - valuation(Int(r.get_den()), p);
}

Rat unit_part(const Rat& x, const Int& p) {
  long v = valuation(x, p);
  Rat pw(pow_int(p, static_cast<unsigned>(v < 0 ? -v : v)));
  return v >= 0 ? Rat(x / pw) : Rat(x * pw);
}

int legendre(const Int& a, const Int& p) {
  if (p == 2 || !is_prime(p)) throw domain_error("legendre: p must be an odd prime");
  if (mod_floor(a, p) == 0) throw domain_error("legendre: p divides a");
  return mpz_legendre(a.get_mpz_t(), p.get_mpz_t());
}

Int unit_mod(const Rat& x, const Int& p, unsigned k) {
  Rat u = unit_part(x, p);
  Int mod = pow_int(p, k);
  Int num = mod_floor(Int(u.get_num()), mod);
  Int den = mod_floor(Int(u.get_den()), mod);
  Int den_inv;
  if (mpz_invert(den_inv.get_mpz_t(), den.get_mpz_t(), mod.get_mpz_t()) == 0)
    throw domain_error("unit_mod: denominator not invertible");
  return mod_floor(num * den_inv, mod);
}

bool is_square_in_Qp(const Rat& x, const Place& v) {
  if (x == 0) throw domain_error("is_square_in_Qp: x = 0");
  if (v.is_infinite()) return x > 0;
  const Int& p = v.prime();
  if (valuation(x, p) % 2 != 0) return false;
  Int unit = unit_mod(x, p, 3);
  if (p == 2) return mod_floor(unit, Int(8)) == 1;
  return legendre(unit, p) == 1;
}

ResidueClass solve_congruences(const std::vector<ResidueClass>& pairs) {
  Int r = 0, m = 1;
  for (const auto& c : pairs) {
    Int g, s, t;
    mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), m.get_mpz_t(),
               c.modulus.get_mpz_t());
    Int diff = c.value - r;
    if (mod_floor(diff, g) != 0)
      throw domain_error("solve_congruences: incompatible congruences");
    Int lcm = m / g * c.modulus;
    // r + m*s*(diff/g) solves both congruences mod lcm.
    Int sol = r + m * s * (diff / g);
    r = mod_floor(sol, lcm);
    m = lcm;
  }
  return ResidueClass(r, m);
}

Int eval_poly(const std::vector<Int>& f, const Int& x) {
  Int acc = 0;
  for (auto it = f.rbegin(); it != f.rend(); ++it) acc = acc * x + *it;
  return acc;
}

std::vector<Int> derive_poly(const std::vector<Int>& f) {
  std::vector<Int> d;
  for (size_t i = 1; i < f.size(); ++i) d.push_back(Int(i) * f[i]);
  return d;
}

ResidueClass hensel_root(const std::vector<Int>& f, const Int& r0, const Int& p,
                         unsigned m) {
  Int fp = eval_poly(f, r0);
  if (mod_floor(fp, p) != 0) throw domain_error("hensel_root: f(r0) != 0 mod p");
  std::vector<Int> df = derive_poly(f);
  Int dv = mod_floor(eval_poly(df, r0), p);
  if (dv == 0) throw domain_error("hensel_root: root is not simple mod p");

  Int r = mod_floor(r0, p);
  Int mod = p;
  while (mod < pow_int(p, m)) {
    mod *= mod;  // quadratic Newton step
    Int target = pow_int(p, m);
    if (mod > target) mod = target;
    Int fr = mod_floor(eval_poly(f, r), mod);
    Int d = mod_floor(eval_poly(df, r), mod);
    Int d_inv;
    if (mpz_invert(d_inv.get_mpz_t(), d.get_mpz_t(), mod.get_mpz_t()) == 0)
      throw domain_error("hensel_root: derivative not invertible");
    r = mod_floor(r - fr * d_inv, mod);
  }
  return ResidueClass(r, pow_int(p, m));
}

namespace {

void roots_rec(const std::vector<Int>& f, const Int& p, unsigned m, unsigned k,
               const Int& r, std::vector<Int>& out) {
  if (k == m) {
    out.push_back(r);
    return;
  }
  Int pk1 = pow_int(p, k + 1);
  Int step = pow_int(p, k);
  for (Int i = 0; i < p; ++i) {
    Int cand = r + i * step;
    if (mod_floor(eval_poly(f, cand), pk1) == 0) roots_rec(f, p, m, k + 1, cand, out);
  }
}

}  // namespace

std::vector<Int> roots_mod_prime_power(const std::vector<Int>& f, const Int& p,
                                       unsigned m) {
  std::vector<Int> out;
  roots_rec(f, p, m, 0, Int(0), out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::pair<Int, unsigned>> factor(const Int& n) {
  if (n == 0) throw domain_error("factor: n = 0");
  std::vector<std::pair<Int, unsigned>> out;
  Int r = abs(n);
  auto strip = [&](const Int& p) {
    unsigned e = 0;
    while (mod_floor(r, p) == 0) {
      r /= p;
      ++e;
    }
    if (e > 0) out.emplace_back(p, e);
  };
  strip(Int(2));
  strip(Int(3));
  Int p = 5;
  while (p * p <= r) {
    strip(p);
    strip(p + 2);
    p += 6;
  }
  if (r > 1) out.emplace_back(r, 1);
  return out;
}

std::optional<Int> exact_sqrt(const Int& n) {
  if (n < 0) return std::nullopt;
  Int r;
  mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
  if (r * r == n) return r;
  return std::nullopt;
}

bool is_rational_square(const Rat& x) {
  if (x < 0) return false;
  if (x == 0) return true;
  Rat r = x;
  r.canonicalize();
  return exact_sqrt(Int(r.get_num())).has_value() &&
         exact_sqrt(Int(r.get_den())).has_value();
}

}  // namespace normct
