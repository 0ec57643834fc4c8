#include "normct/variety.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace normct {

namespace {

// Sign of u + v*sqrt(a) for a > 0 not a rational square.
int sign_u_plus_v_sqrt_a(const Rat& u, const Rat& v, const Rat& a) {
  if (v == 0) return u > 0 ? 1 : (u < 0 ? -1 : 0);
  if (u == 0) return v > 0 ? 1 : -1;
  if (u > 0 && v > 0) return 1;
  if (u < 0 && v < 0) return -1;
  Rat w = u * u - a * v * v;  // nonzero since a is not a square
  if (u > 0) return w > 0 ? 1 : -1;
  return w > 0 ? -1 : 1;
}

}  // namespace

NormVariety::NormVariety(FieldSpec field, PolySpec poly)
    : field_(std::move(field)), poly_(std::move(poly)) {
  if (const auto* sp = std::get_if<SplitSpec>(&poly_)) {
    if (sp->c == 0) throw domain_error("NormVariety: c = 0");
    for (const auto& f : sp->factors) {
      if (f.g.total_degree() != 1)
        throw domain_error("NormVariety: split factors must be linear");
      if (f.exponent == 0) throw domain_error("NormVariety: zero exponent");
    }
  } else {
    const auto& qs = std::get<QuadraticSpec>(poly_);
    if (qs.c == 0) throw domain_error("NormVariety: c = 0");
    if (is_rational_square(qs.a))
      throw domain_error("NormVariety: t^2 - a must be irreducible");
  }
}

size_t NormVariety::s() const {
  if (const auto* sp = std::get_if<SplitSpec>(&poly_)) return sp->s;
  return 1;
}

size_t NormVariety::n() const {
  if (std::holds_alternative<QuarticTower>(field_)) return 4;
  if (const auto* q = std::get_if<QuadForm>(&field_)) return q->dim();
  return 2;
}

Rat NormVariety::eval_P(const std::vector<Rat>& t) const {
  if (const auto* sp = std::get_if<SplitSpec>(&poly_)) {
    Rat acc = sp->c;
    for (const auto& f : sp->factors) {
      Rat g = f.g.eval(t);
      for (unsigned k = 0; k < f.exponent; ++k) acc *= g;
    }
    return acc;
  }
  const auto& qs = std::get<QuadraticSpec>(poly_);
  return qs.c * (t[0] * t[0] - qs.a);
}

Rat NormVariety::eval_norm(const std::vector<Rat>& z) const {
  if (const auto* qf = std::get_if<QuadraticField>(&field_))
    return qf->norm_form().eval(z);
  if (const auto* q = std::get_if<QuadForm>(&field_)) return q->eval(z);
  return std::get<QuarticTower>(field_).norm(z);
}

Poly NormVariety::P_poly() const {
  if (const auto* sp = std::get_if<SplitSpec>(&poly_)) {
    std::vector<std::string> vars;
    if (!sp->factors.empty())
      vars = sp->factors.front().g.vars();
    else
      for (size_t i = 0; i < sp->s; ++i) vars.push_back("t" + std::to_string(i + 1));
    Poly acc = Poly::constant(sp->c, vars);
    for (const auto& f : sp->factors)
      for (unsigned k = 0; k < f.exponent; ++k) acc = acc * f.g;
    return acc;
  }
  const auto& qs = std::get<QuadraticSpec>(poly_);
  return Poly::univariate({-qs.c * qs.a, Rat(0), qs.c});
}

bool NormVariety::norm_positive_definite() const {
  if (const auto* qf = std::get_if<QuadraticField>(&field_)) return qf->imaginary();
  if (const auto* q = std::get_if<QuadForm>(&field_)) {
    auto [np, nm] = signature(*q);
    return nm == 0;
  }
  const auto& tw = std::get<QuarticTower>(field_);
  if (tw.a() < 0) return true;
  return sign_u_plus_v_sqrt_a(tw.u(), tw.v(), tw.a()) < 0 &&
         sign_u_plus_v_sqrt_a(tw.u(), -tw.v(), tw.a()) < 0;
}

std::vector<Rat> NormVariety::split_roots() const {
  const auto* sp = std::get_if<SplitSpec>(&poly_);
  if (!sp || sp->s != 1) throw domain_error("split_roots: requires a split s=1 spec");
  std::vector<Rat> roots;
  for (const auto& f : sp->factors) {
    Rat a = f.g.coefficient({1}), b = f.g.coefficient({0});
    if (a == 0) throw domain_error("split_roots: constant factor");
    roots.push_back(-b / a);
  }
  return roots;
}

Rat NormVariety::field_d() const {
  if (const auto* qf = std::get_if<QuadraticField>(&field_)) return Rat(qf->d());
  if (const auto* q = std::get_if<QuadForm>(&field_)) {
    if (q->dim() != 2) throw domain_error("field_d: rank must be 2");
    Rat b = q->entry(0, 1) * 2;
    return b * b - Rat(4) * q->entry(0, 0) * q->entry(1, 1);
  }
  throw domain_error("field_d: quartic tower has no quadratic d");
}

std::string RealComponent::str() const {
  std::ostringstream os;
  if (kind == AllSpace) return "R^s";
  if (kind == Interval) {
    auto emit = [&](const Endpoint& e, bool left) {
      if (e.kind == Endpoint::NegInf) {
        os << "(-inf";
      } else if (e.kind == Endpoint::PosInf) {
        os << "inf)";
      } else {
        std::string val = e.kind == Endpoint::Rational
                              ? e.value.get_str()
                              : std::string(e.sign < 0 ? "-" : "") + "sqrt(" +
                                    e.value.get_str() + ")";
        if (left)
          os << (e.closed ? "[" : "(") << val;
        else
          os << val << (e.closed ? "]" : ")");
      }
    };
    emit(lo, true);
    os << ", ";
    emit(hi, false);
    return os.str();
  }
  os << "region eps=(";
  for (size_t i = 0; i < eps.size(); ++i) os << (eps[i] > 0 ? "+" : "-");
  os << ")";
  return os.str();
}

std::vector<std::pair<std::vector<int>, bool>> sign_vectors(const NormVariety& V) {
  const auto* sp = std::get_if<SplitSpec>(&V.poly());
  if (!sp) throw domain_error("sign_vectors: requires a split spec");
  size_t r = sp->factors.size();
  std::vector<std::pair<std::vector<int>, bool>> out;
  for (uint64_t mask = 0; mask < (1ULL << r); ++mask) {
    std::vector<int> eps(r);
    bool neg = sp->c < 0;
    for (size_t i = 0; i < r; ++i) {
      eps[i] = (mask >> i) & 1 ? -1 : 1;
      if (eps[i] < 0 && sp->factors[i].exponent % 2 == 1) neg = !neg;
    }
    if (neg) continue;  // sign rule prod eps_i^{e_i} * c > 0 fails
    LinSystem sys;
    sys.nvars = sp->s;
    for (size_t i = 0; i < r; ++i) {
      std::vector<Rat> coeffs(sp->s);
      Exponents e(sp->s, 0);
      for (size_t j = 0; j < sp->s; ++j) {
        e.assign(sp->s, 0);
        e[j] = 1;
        coeffs[j] = Rat(eps[i]) * sp->factors[i].g.coefficient(e);
      }
      e.assign(sp->s, 0);
      Rat rhs = -Rat(eps[i]) * sp->factors[i].g.coefficient(e);
      sys.add(std::move(coeffs), rhs, /*strict=*/true);
    }
    out.emplace_back(std::move(eps), feasible_point(sys).has_value());
  }
  return out;
}

namespace {

RealComponent make_region(const NormVariety& V, const std::vector<int>& eps) {
  const auto& sp = std::get<SplitSpec>(V.poly());
  RealComponent comp;
  comp.kind = RealComponent::Region;
  comp.eps = eps;
  comp.region.nvars = sp.s;
  for (size_t i = 0; i < eps.size(); ++i) {
    std::vector<Rat> coeffs(sp.s);
    Exponents e(sp.s, 0);
    for (size_t j = 0; j < sp.s; ++j) {
      e.assign(sp.s, 0);
      e[j] = 1;
      coeffs[j] = Rat(eps[i]) * sp.factors[i].g.coefficient(e);
    }
    e.assign(sp.s, 0);
    Rat rhs = -Rat(eps[i]) * sp.factors[i].g.coefficient(e);
    comp.region.add(std::move(coeffs), rhs, /*strict=*/true);
  }
  comp.unbounded_ball = polytope_unbounded_ball(comp);
  return comp;
}

}  // namespace

std::vector<RealComponent> real_components(const NormVariety& V) {
  std::vector<RealComponent> out;
  if (!V.norm_positive_definite()) {
    RealComponent all;
    all.kind = RealComponent::AllSpace;
    all.unbounded_ball = true;
    out.push_back(all);
    return out;
  }

  if (const auto* qs = std::get_if<QuadraticSpec>(&V.poly())) {
    // P = c(t^2 - a), definite norm: need P >= 0.
    auto mk = [&](Endpoint lo, Endpoint hi) {
      RealComponent c;
      c.kind = RealComponent::Interval;
      c.lo = lo;
      c.hi = hi;
      c.unbounded_ball =
          lo.kind == Endpoint::NegInf || hi.kind == Endpoint::PosInf;
      out.push_back(c);
    };
    Endpoint ninf{Endpoint::NegInf}, pinf{Endpoint::PosInf};
    if (qs->a < 0) {
      if (qs->c > 0) mk(ninf, pinf);
      return out;
    }
    Endpoint msq{Endpoint::SqrtA, qs->a, -1, true}, psq{Endpoint::SqrtA, qs->a, 1, true};
    if (qs->c > 0) {
      mk(ninf, msq);
      mk(psq, pinf);
    } else {
      mk(msq, psq);
    }
    return out;
  }

  const auto& sp = std::get<SplitSpec>(V.poly());
  if (sp.s == 1) {
    // Sort the roots; keep intervals where P > 0, with simple roots as
    // closed endpoints.
    struct Root {
      Rat a;
      unsigned e;
    };
    std::vector<Root> roots;
    {
      auto rs = V.split_roots();
      std::map<Rat, unsigned> merged;
      for (size_t i = 0; i < rs.size(); ++i) merged[rs[i]] += sp.factors[i].exponent;
      for (const auto& [a, e] : merged) roots.push_back({a, e});
    }
    if (roots.empty()) {
      if (sp.c > 0) {
        RealComponent all;
        all.kind = RealComponent::AllSpace;
        all.unbounded_ball = true;
        out.push_back(all);
      }
      return out;
    }
    auto sample_positive = [&](const Rat& t) { return V.eval_P({t}) > 0; };
    size_t k = roots.size();
    for (size_t i = 0; i <= k; ++i) {
      Rat sample;
      if (i == 0)
        sample = roots.front().a - 1;
      else if (i == k)
        sample = roots.back().a + 1;
      else
        sample = (roots[i - 1].a + roots[i].a) / 2;
      if (!sample_positive(sample)) continue;
      RealComponent c;
      c.kind = RealComponent::Interval;
      if (i == 0)
        c.lo = {Endpoint::NegInf};
      else
        c.lo = {Endpoint::Rational, roots[i - 1].a, 1, roots[i - 1].e == 1};
      if (i == k)
        c.hi = {Endpoint::PosInf};
      else
        c.hi = {Endpoint::Rational, roots[i].a, 1, roots[i].e == 1};
      c.unbounded_ball = i == 0 || i == k;
      out.push_back(c);
    }
    return out;
  }

  for (const auto& [eps, nonempty] : sign_vectors(V))
    if (nonempty) out.push_back(make_region(V, eps));
  return out;
}

bool polytope_unbounded_ball(const RealComponent& comp) {
  if (comp.kind == RealComponent::AllSpace) return true;
  if (comp.kind == RealComponent::Interval)
    return comp.lo.kind == Endpoint::NegInf || comp.hi.kind == Endpoint::PosInf;
  if (!feasible_point(comp.region)) return false;
  // Strict-interior recession direction: eps_i * l_i(w) >= 1 for the
  // homogeneous parts l_i; feasibility gives balls of radius Theta(R)
  // around R*w.
  LinSystem lp;
  lp.nvars = comp.region.nvars;
  for (const auto& c : comp.region.cons) lp.add(c.coeffs, Rat(1), false);
  return feasible_point(lp).has_value();
}

namespace {

// Binary quadratic solver: all z1 with A z1^2 + B z1 z2 + C z2^2 = m for
// fixed z2, exact.
void solve_binary_for_z1(const Int& A, const Int& B, const Int& C, const Int& z2,
                         const Int& m, std::vector<Int>& out) {
  out.clear();
  if (A == 0) {
    // B z2 z1 = m - C z2^2
    Int rhs = m - C * z2 * z2;
    Int den = B * z2;
    if (den == 0) return;  // constant in z1; no constraint solutions here
    if (rhs % den == 0) out.push_back(rhs / den);
    return;
  }
  Int disc = B * z2 * B * z2 - 4 * A * (C * z2 * z2 - m);
  auto r = exact_sqrt(disc);
  if (!r) return;
  for (int sgn : {1, -1}) {
    Int num = -B * z2 + sgn * (*r);
    if (num % (2 * A) == 0) out.push_back(num / (2 * A));
    if (*r == 0) break;
  }
}

bool congruence_ok(const Congruences& cong, size_t idx, const Int& val) {
  auto it = cong.find(idx);
  if (it == cong.end()) return true;
  return mod_floor(val, it->second.modulus) == it->second.value;
}

bool isqrt_ll(unsigned __int128 n, long long& root) {
  auto r = static_cast<unsigned long long>(sqrtl(static_cast<long double>(n)));
  while (r > 0 && static_cast<unsigned __int128>(r) * r > n) --r;
  while (static_cast<unsigned __int128>(r + 1) * (r + 1) <= n) ++r;
  root = static_cast<long long>(r);
  return static_cast<unsigned __int128>(r) * r == n;
}

bool fits_ll(const Int& x) { return x.fits_slong_p(); }

}  // namespace

std::vector<IntegralPoint> search_points(const NormVariety& V, const Int& bound,
                                         const Congruences& congruences,
                                         uint64_t budget) {
  if (bound < 0) throw domain_error("search_points: bound must be >= 0");
  size_t s = V.s(), n = V.n();
  std::vector<IntegralPoint> out;
  uint64_t used = 0;
  auto charge = [&](uint64_t k) {
    used += k;
    if (used > budget) throw budget_exceeded("search_points: budget exceeded");
  };

  // Norm data for the rank-2 fast path.
  bool rank2 = n == 2;
  Int A, B2, C;
  bool definite = V.norm_positive_definite();
  if (rank2) {
    QuadForm nf = std::holds_alternative<QuadraticField>(V.field())
                      ? std::get<QuadraticField>(V.field()).norm_form()
                      : std::get<QuadForm>(V.field());
    Rat a = nf.entry(0, 0), b = nf.entry(0, 1) * 2, c = nf.entry(1, 1);
    if (a.get_den() != 1 || b.get_den() != 1 || c.get_den() != 1)
      throw domain_error("search_points: norm form must be integral");
    A = Int(a.get_num());
    B2 = Int(b.get_num());
    C = Int(c.get_num());
  }

  // Largest value a definite integral binary form takes on the box.
  Int form_max = rank2 ? Int((abs(A) + abs(B2) + abs(C)) * bound * bound) : Int(0);
  bool fast_ok = rank2 && definite && fits_ll(A) && fits_ll(B2) && fits_ll(C) &&
                 fits_ll(bound) && fits_ll(form_max);
  long long cong1_mod = 0, cong1_val = 0, cong2_mod = 0, cong2_val = 0;
  if (fast_ok) {
    for (size_t which : {s, s + 1}) {
      auto it = congruences.find(which);
      if (it == congruences.end()) continue;
      if (!fits_ll(it->second.modulus)) {
        fast_ok = false;
        break;
      }
      (which == s ? cong1_mod : cong2_mod) = it->second.modulus.get_si();
      (which == s ? cong1_val : cong2_val) = it->second.value.get_si();
    }
  }

  std::vector<Int> t(s);
  std::vector<Rat> tr(s);
  auto solve_z = [&](const Int& m) {
    if (rank2) {
      Int z2max = bound;
      if (definite) {
        if (m < 0 || m > form_max) return;
        Int disc = 4 * A * C - B2 * B2;  // positive
        // z2^2 <= 4*A*m/disc
        Int lim = *exact_sqrt(Int(4 * A * m / disc)) + 1;
        if (lim < z2max) z2max = lim;
      }
      if (fast_ok) {
        long long a = A.get_si(), b = B2.get_si(), c = C.get_si();
        long long mm = m.get_si(), lim = z2max.get_si(), bnd = bound.get_si();
        charge(static_cast<uint64_t>(2 * lim + 1));
        for (long long z2 = -lim; z2 <= lim; ++z2) {
          if (cong2_mod && ((z2 % cong2_mod) + cong2_mod) % cong2_mod != cong2_val)
            continue;
          __int128 disc = static_cast<__int128>(b) * b * z2 * z2 -
                          4 * static_cast<__int128>(a) *
                              (static_cast<__int128>(c) * z2 * z2 - mm);
          if (disc < 0) continue;
          long long r;
          if (!isqrt_ll(static_cast<unsigned __int128>(disc), r)) continue;
          for (int sgn : {1, -1}) {
            long long num = -b * z2 + sgn * r;
            if (num % (2 * a) != 0) {
              if (r == 0) break;
              continue;
            }
            long long z1 = num / (2 * a);
            if (z1 > bnd || z1 < -bnd) {
              if (r == 0) break;
              continue;
            }
            if (cong1_mod &&
                ((z1 % cong1_mod) + cong1_mod) % cong1_mod != cong1_val) {
              if (r == 0) break;
              continue;
            }
            out.push_back(
                {t, {Int(static_cast<long>(z1)), Int(static_cast<long>(z2))}});
            if (r == 0) break;
          }
        }
        return;
      }
      std::vector<Int> z1s;
      for (Int z2 = -z2max; z2 <= z2max; ++z2) {
        charge(1);
        if (!congruence_ok(congruences, s + 1, z2)) continue;
        solve_binary_for_z1(A, B2, C, z2, m, z1s);
        for (const Int& z1 : z1s) {
          if (abs(z1) > bound) continue;
          if (!congruence_ok(congruences, s, z1)) continue;
          out.push_back({t, {z1, z2}});
        }
      }
      return;
    }
    // Generic box enumeration over z.
    std::vector<Int> z(n, -bound);
    std::vector<Rat> zr(n);
    for (;;) {
      charge(1);
      bool ok = true;
      for (size_t i = 0; i < n && ok; ++i) ok = congruence_ok(congruences, s + i, z[i]);
      if (ok) {
        for (size_t i = 0; i < n; ++i) zr[i] = Rat(z[i]);
        if (V.eval_norm(zr) == Rat(m)) out.push_back({t, z});
      }
      size_t i = 0;
      while (i < n && ++z[i] > bound) z[i++] = -bound;
      if (i == n) break;
    }
  };

  // Iterate t over the box, respecting congruences.
  std::vector<Int> cur(s, -bound);
  for (;;) {
    charge(1);
    bool ok = true;
    for (size_t i = 0; i < s && ok; ++i) ok = congruence_ok(congruences, i, cur[i]);
    if (ok) {
      t = cur;
      for (size_t i = 0; i < s; ++i) tr[i] = Rat(cur[i]);
      Rat mp = V.eval_P(tr);
      if (mp.get_den() == 1) solve_z(Int(mp.get_num()));
    }
    size_t i = 0;
    while (i < s && ++cur[i] > bound) cur[i++] = -bound;
    if (i == s) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

// Integer model of F(t,z) = L*(P(t) - N(z)) with its partials, for
// p-adic enumeration.
struct IntModel {
  size_t s, n;
  std::vector<std::pair<Exponents, Int>> F;  // terms over combined coords
  std::vector<std::vector<std::pair<Exponents, Int>>> dF;

  Int eval_mod(const std::vector<Int>& x, const Int& mod) const {
    return eval_terms(F, x, mod);
  }
  Int eval_partial_mod(size_t j, const std::vector<Int>& x, const Int& mod) const {
    return eval_terms(dF[j], x, mod);
  }

  static Int eval_terms(const std::vector<std::pair<Exponents, Int>>& terms,
                        const std::vector<Int>& x, const Int& mod) {
    Int acc = 0;
    for (const auto& [e, c] : terms) {
      Int t = c;
      for (size_t i = 0; i < e.size(); ++i)
        for (unsigned k = 0; k < e[i]; ++k) t = mod_floor(t * x[i], mod);
      acc += t;
    }
    return mod_floor(acc, mod);
  }
};

Poly norm_as_poly(const NormVariety& V, const std::vector<std::string>& zvars) {
  if (const auto* qf = std::get_if<QuadraticField>(&V.field()))
    return quadform_to_poly(qf->norm_form(), zvars);
  if (const auto* q = std::get_if<QuadForm>(&V.field()))
    return quadform_to_poly(*q, zvars);
  const auto& tw = std::get<QuarticTower>(V.field());
  auto [g0, g1] = tw.g_forms();
  Poly G0 = quadform_to_poly(g0, zvars), G1 = quadform_to_poly(g1, zvars);
  return G0 * G0 - G1 * G1 * tw.a();
}

IntModel build_int_model(const NormVariety& V, const Int& p) {
  size_t s = V.s(), n = V.n();
  std::vector<std::string> vars;
  for (size_t i = 0; i < s; ++i) vars.push_back("t" + std::to_string(i + 1));
  for (size_t i = 0; i < n; ++i) vars.push_back("z" + std::to_string(i + 1));

  // Lift P and N into the combined variable list.
  Poly P = V.P_poly();
  Poly full(vars);
  for (const auto& [e, c] : P.terms()) {
    Exponents ext(vars.size(), 0);
    for (size_t i = 0; i < e.size(); ++i) ext[i] = e[i];
    full.set_coefficient(ext, c);
  }
  std::vector<std::string> zvars(vars.begin() + s, vars.end());
  Poly N = norm_as_poly(V, zvars);
  for (const auto& [e, c] : N.terms()) {
    Exponents ext(vars.size(), 0);
    for (size_t i = 0; i < e.size(); ++i) ext[s + i] = e[i];
    full.set_coefficient(ext, full.coefficient(ext) - c);
  }

  Int lcm = 1;
  for (const auto& [e, c] : full.terms()) {
    Int d(c.get_den());
    Int g;
    mpz_gcd(g.get_mpz_t(), lcm.get_mpz_t(), d.get_mpz_t());
    lcm = lcm / g * d;
  }
  if (mod_floor(lcm, p) == 0)
    throw domain_error("local_integral_points: model not integral at p");

  IntModel mdl;
  mdl.s = s;
  mdl.n = n;
  for (const auto& [e, c] : full.terms()) {
    Rat sc = c * Rat(lcm);
    mdl.F.emplace_back(e, Int(sc.get_num()));
  }
  mdl.dF.resize(vars.size());
  for (size_t j = 0; j < vars.size(); ++j) {
    for (const auto& [e, c] : mdl.F) {
      if (e[j] == 0) continue;
      Exponents d = e;
      d[j] -= 1;
      mdl.dF[j].emplace_back(d, c * Int(e[j]));
    }
  }
  return mdl;
}

// Newton certificate for a residue mod p^k: some partial with valuation
// e satisfying k >= 2e+1.
std::optional<std::pair<int, long>> certificate(const IntModel& mdl,
                                                const std::vector<Int>& x,
                                                const Int& p, unsigned k) {
  Int mod = pow_int(p, k);
  std::optional<std::pair<int, long>> best;
  for (size_t j = 0; j < mdl.s + mdl.n; ++j) {
    Int d = mdl.eval_partial_mod(j, x, mod);
    if (d == 0) continue;  // valuation >= k; useless at this precision
    long e = valuation(d, p);
    if (k >= 2 * static_cast<unsigned long>(e) + 1)
      if (!best || e < best->second) best = {static_cast<int>(j), e};
  }
  return best;
}

LocalPoint make_local_point(const IntModel& mdl, const std::vector<Int>& x,
                            const Int& p, unsigned m,
                            const std::pair<int, long>& cert) {
  LocalPoint q;
  q.place = Place::finite(p);
  q.precision = m;
  q.t_res.assign(x.begin(), x.begin() + mdl.s);
  q.z_res.assign(x.begin() + mdl.s, x.end());
  q.cert_coord = cert.first;
  q.cert_valuation = cert.second;
  return q;
}

enum class LocalSearchOutcome { Found, Empty, Budget };

// BFS over residue levels. In enumerate mode, collects certified points
// at the target precision; in existence mode, returns on the first
// certified residue at any level (or Empty when no residues survive).
LocalSearchOutcome local_bfs(const NormVariety& V, const Int& p, unsigned m,
                             bool existence, size_t max_points, uint64_t budget,
                             std::vector<LocalPoint>& out) {
  IntModel mdl = build_int_model(V, p);
  size_t ncoords = mdl.s + mdl.n;
  uint64_t used = 0;
  auto charge = [&](uint64_t k) {
    used += k;
    return used <= budget;
  };

  std::vector<std::vector<Int>> level;
  {
    std::vector<Int> x(ncoords, Int(0));
    for (;;) {
      if (!charge(1)) return LocalSearchOutcome::Budget;
      if (mdl.eval_mod(x, p) == 0) level.push_back(x);
      size_t i = 0;
      while (i < ncoords && ++x[i] == p) x[i++] = 0;
      if (i == ncoords) break;
    }
  }

  for (unsigned k = 1; k <= m; ++k) {
    if (level.empty()) return LocalSearchOutcome::Empty;
    if (existence) {
      for (const auto& x : level) {
        if (!charge(ncoords)) return LocalSearchOutcome::Budget;
        if (auto cert = certificate(mdl, x, p, k)) {
          out.push_back(make_local_point(mdl, x, p, k, *cert));
          return LocalSearchOutcome::Found;
        }
      }
    }
    if (k == m) break;
    Int pk1 = pow_int(p, k + 1), step = pow_int(p, k);
    std::vector<std::vector<Int>> next;
    for (const auto& x : level) {
      std::vector<Int> d(ncoords, Int(0));
      for (;;) {
        if (!charge(1)) return LocalSearchOutcome::Budget;
        std::vector<Int> y(ncoords);
        for (size_t i = 0; i < ncoords; ++i) y[i] = x[i] + d[i] * step;
        if (mdl.eval_mod(y, pk1) == 0) next.push_back(std::move(y));
        size_t i = 0;
        while (i < ncoords && ++d[i] == p) d[i++] = 0;
        if (i == ncoords) break;
      }
    }
    level = std::move(next);
  }

  if (existence) return level.empty() ? LocalSearchOutcome::Empty
                                      : LocalSearchOutcome::Budget;

  for (const auto& x : level) {
    if (!charge(ncoords)) return LocalSearchOutcome::Budget;
    if (auto cert = certificate(mdl, x, p, m)) {
      out.push_back(make_local_point(mdl, x, p, m, *cert));
      if (out.size() >= max_points) break;
    }
  }
  return out.empty() ? LocalSearchOutcome::Empty : LocalSearchOutcome::Found;
}

}  // namespace

std::vector<LocalPoint> local_integral_points(const NormVariety& V, const Int& p,
                                              unsigned m, size_t max_points,
                                              uint64_t budget) {
  if (m < 1) throw domain_error("local_integral_points: m >= 1 required");
  std::vector<LocalPoint> out;
  auto res = local_bfs(V, p, m, /*existence=*/false, max_points, budget, out);
  if (res == LocalSearchOutcome::Budget && out.empty())
    throw budget_exceeded("local_integral_points: budget exceeded");
  return out;
}

bool check_local_point(const NormVariety& V, const LocalPoint& q) {
  if (q.place.is_infinite()) {
    Rat p = V.eval_P(q.t_real), nv = V.eval_norm(q.z_real);
    return p == nv;
  }
  IntModel mdl = build_int_model(V, q.place.prime());
  std::vector<Int> x = q.t_res;
  x.insert(x.end(), q.z_res.begin(), q.z_res.end());
  Int mod = pow_int(q.place.prime(), q.precision);
  if (mdl.eval_mod(x, mod) != 0) return false;
  return certificate(mdl, x, q.place.prime(), q.precision).has_value();
}

bool is_smooth_point(const NormVariety& V, const std::vector<Rat>& t,
                     const std::vector<Rat>& z) {
  if (V.eval_P(t) != V.eval_norm(z))
    throw domain_error("is_smooth_point: point not on the variety");
  Poly P = V.P_poly();
  for (size_t i = 0; i < V.s(); ++i)
    if (P.derivative(i).eval(t) != 0) return true;
  std::vector<std::string> zvars;
  for (size_t i = 0; i < V.n(); ++i) zvars.push_back("z" + std::to_string(i + 1));
  Poly N = norm_as_poly(V, zvars);
  for (size_t i = 0; i < V.n(); ++i)
    if (N.derivative(i).eval(z) != 0) return true;
  return false;
}

namespace {

void add_primes_of(std::set<Int>& acc, const Rat& x) {
  if (x == 0) return;
  for (const auto& [p, e] : factor(Int(x.get_num()))) acc.insert(p);
  for (const auto& [p, e] : factor(Int(x.get_den()))) acc.insert(p);
}

std::set<Int> finite_bad_primes(const NormVariety& V, bool for_solubility) {
  std::set<Int> ps;
  ps.insert(Int(2));
  if (const auto* sp = std::get_if<SplitSpec>(&V.poly())) {
    add_primes_of(ps, sp->c);
    if (sp->s == 1 && !sp->factors.empty()) {
      auto roots = V.split_roots();
      for (size_t i = 0; i < roots.size(); ++i)
        for (size_t j = i + 1; j < roots.size(); ++j)
          add_primes_of(ps, roots[i] - roots[j]);
      for (const Rat& a : roots) add_primes_of(ps, a);
    }
  } else {
    const auto& qs = std::get<QuadraticSpec>(V.poly());
    add_primes_of(ps, qs.c);
    add_primes_of(ps, qs.a);
  }
  if (const auto* qf = std::get_if<QuadraticField>(&V.field())) {
    add_primes_of(ps, Rat(qf->discriminant()));
  } else if (const auto* q = std::get_if<QuadForm>(&V.field())) {
    add_primes_of(ps, q->det());
    for (const auto& row : q->gram())
      for (const Rat& e : row) add_primes_of(ps, Rat(e.get_den()));
  } else {
    const auto& tw = std::get<QuarticTower>(V.field());
    add_primes_of(ps, tw.a());
    add_primes_of(ps, tw.v());
    add_primes_of(ps, tw.u() * tw.u() - tw.a() * tw.v() * tw.v());
  }
  if (for_solubility) {
    // Small primes where the generic-fiber argument needs p > deg P.
    unsigned deg = V.P_poly().total_degree();
    for (Int p = 2; p <= Int(deg); ++p)
      if (is_prime(p)) ps.insert(p);
  }
  return ps;
}

}  // namespace

std::vector<Place> bad_places(const NormVariety& V) {
  std::vector<Place> out{Place::infinite()};
  for (const Int& p : finite_bad_primes(V, /*for_solubility=*/false))
    out.push_back(Place::finite(p));
  return out;
}

SolubilityReport everywhere_locally_soluble(const NormVariety& V,
                                            unsigned max_precision,
                                            uint64_t budget) {
  SolubilityReport rep;
  auto comps = real_components(V);
  if (comps.empty()) {
    rep.failure = Place::infinite();
    return rep;
  }
  rep.witnesses.emplace_back(Place::infinite(),
                             "real component " + comps.front().str());

  for (const Int& p : finite_bad_primes(V, /*for_solubility=*/true)) {
    std::vector<LocalPoint> found;
    auto res = local_bfs(V, p, max_precision, /*existence=*/true, 1, budget, found);
    if (res == LocalSearchOutcome::Empty) {
      rep.failure = Place::finite(p);
      return rep;
    }
    if (res == LocalSearchOutcome::Budget) {
      rep.inconclusive = true;
      rep.failure = Place::finite(p);
      return rep;
    }
    std::ostringstream os;
    os << "certified residue mod " << p.get_str() << "^" << found.front().precision;
    rep.witnesses.emplace_back(Place::finite(p), os.str());
  }
  rep.soluble = true;
  return rep;
}

}  // namespace normct
