#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "normct/descent.hpp"
#include "normct/variety.hpp"

using namespace normct;

namespace {

QuarticTorsorSpec basic_spec() {
  QuarticTorsorSpec spec{QuarticTower(Rat(2), Rat(3), Rat(1)), Rat(1), Rat(1),
                         Rat(0), {Rat(1), Rat(0), Rat(0), Rat(0)}};
  return spec;
}

std::mt19937_64 rng(29);

Rat small_rat() {
  long num = long(rng() % 9) - 4;
  long den = 1 + long(rng() % 3);
  Rat q(num, den);
  q.canonicalize();
  return q;
}

QuarticTower random_tower() {
  while (true) {
    try {
      Rat a = small_rat(), u = small_rat(), v = small_rat();
      return QuarticTower(a, u, v);
    } catch (const domain_error&) {
    }
  }
}

QuarticTorsorSpec random_torsor_spec() {
  while (true) {
    QuarticTower K = random_tower();
    Rat r0 = small_rat(), r1 = small_rat();
    if (r0 == 0 && r1 == 0) continue;
    std::vector<Rat> xi{small_rat(), small_rat(), small_rat(), small_rat()};
    Rat nxi = K.norm(xi);
    if (nxi == 0) continue;
    Rat nrho = r0 * r0 - K.a() * r1 * r1;
    if (nrho == 0) continue;
    return {K, nxi / nrho, r0, r1, xi};
  }
}

}  // namespace

TEST_CASE("quartic torsor construction and validation") {
  TorsorVariety Y = build_quartic_torsor(basic_spec());
  CHECK(Y.spec().c == Rat(1));

  QuarticTorsorSpec bad = basic_spec();
  bad.c = Rat(2);
  CHECK_THROWS_AS(build_quartic_torsor(bad), domain_error);
  bad = basic_spec();
  bad.rho0 = bad.rho1 = Rat(0);
  CHECK_THROWS_AS(build_quartic_torsor(bad), domain_error);
  bad = basic_spec();
  bad.xi = {Rat(1), Rat(0)};
  CHECK_THROWS_AS(build_quartic_torsor(bad), domain_error);
}

TEST_CASE("torsor point maps onto X") {
  TorsorVariety Y = build_quartic_torsor(basic_spec());
  std::vector<Rat> x{Rat(1), Rat(0), Rat(0), Rat(0)};
  std::vector<Rat> y{Rat(1), Rat(1), Rat(1), Rat(0)};
  REQUIRE(Y.on_torsor(x, y));
  auto [t, z] = Y.map_to_X(x, y);
  CHECK(t == Rat(0));
  CHECK(z == std::vector<Rat>{Rat(1), Rat(1), Rat(1), Rat(0)});
  CHECK(Y.spec().tower.norm(z) == Rat(-2));

  CHECK(!Y.on_torsor(y, x));
  CHECK_THROWS_AS(Y.map_to_X(y, x), domain_error);
}

TEST_CASE("random torsor points land on X") {
  // Rescaling rho by -1/s turns any (x, y) with
  // s = g_0(x) lambda_1(y) + g_1(x) lambda_0(y) nonzero into a torsor point.
  for (int trial = 0; trial < 40; ++trial) {
    QuarticTorsorSpec spec = random_torsor_spec();
    TorsorVariety Y0 = build_quartic_torsor(spec);
    std::vector<Rat> x, y;
    Rat s;
    do {
      x = {small_rat(), small_rat(), small_rat(), small_rat()};
      y = {small_rat(), small_rat(), small_rat(), small_rat()};
      s = Y0.g0().eval(x) * Y0.l1().eval(y) + Y0.g1().eval(x) * Y0.l0().eval(y);
    } while (s == 0 || spec.tower.norm(y) == 0);
    spec.rho0 /= -s;
    spec.rho1 /= -s;
    spec.c = spec.tower.norm(spec.xi) / spec.norm_rho();
    TorsorVariety Y = build_quartic_torsor(spec);
    REQUIRE(Y.on_torsor(x, y));
    auto [t, z] = Y.map_to_X(x, y);
    CHECK(spec.c * (t * t - spec.tower.a()) == spec.tower.norm(z));
  }
}

TEST_CASE("fiber quadric discriminants") {
  TorsorVariety Y = build_quartic_torsor(basic_spec());
  std::vector<Rat> y{Rat(1), Rat(1), Rat(1), Rat(0)};
  FiberQuadric f = fiber_quadric(Y, y);
  CHECK(f.disc0 == Rat(2));
  CHECK(f.disc1 == Rat(14));
  CHECK(f.q.dim() == 4);
  CHECK(f.q0.entry(0, 0) == Rat(-1));  // lambda_1(y)
  CHECK(f.q1.entry(0, 0) == Rat(3));   // -(u lambda_1 + v lambda_0)

  // The known torsor point x solves q(x) = -1 on this fiber.
  std::vector<Rat> x{Rat(1), Rat(0), Rat(0), Rat(0)};
  CHECK(f.q.eval(x) == Rat(-1));

  CHECK_THROWS_AS(fiber_quadric(Y, {Rat(0), Rat(0), Rat(0), Rat(0)}), domain_error);

  // Both discriminant identities across random towers and fibers.
  for (int trial = 0; trial < 50; ++trial) {
    QuarticTorsorSpec spec = random_torsor_spec();
    TorsorVariety R = build_quartic_torsor(spec);
    std::vector<Rat> w;
    do {
      w = {small_rat(), small_rat(), small_rat(), small_rat()};
    } while (spec.tower.norm(w) == 0);
    FiberQuadric g = fiber_quadric(R, w);
    CHECK(g.disc0 == -spec.norm_rho() * spec.tower.norm(w));
    Rat n = spec.tower.u() * spec.tower.u() -
            spec.tower.a() * spec.tower.v() * spec.tower.v();
    CHECK(g.disc1 == n * g.disc0);
    CHECK(g.q0.det() == g.disc0);
    CHECK(g.q1.det() == g.disc1);
  }
}

TEST_CASE("real fiber compactness") {
  TorsorVariety Y = build_quartic_torsor(basic_spec());
  std::vector<Rat> y{Rat(1), Rat(1), Rat(1), Rat(0)};
  auto rep = fiber_real_noncompact(Y, y);
  CHECK(rep.noncompact);
  CHECK(rep.branch == "opposite definite");

  CHECK(fiber_real_noncompact(Y, y, true).branch == "complex place");

  // Over an imaginary L every disc0 is negative: always indefinite.
  QuarticTorsorSpec im{QuarticTower(Rat(-1), Rat(1), Rat(1)), Rat(4), Rat(1),
                       Rat(0), {Rat(1), Rat(1), Rat(0), Rat(0)}};
  TorsorVariety Yi = build_quartic_torsor(im);
  auto ri = fiber_real_noncompact(Yi, {Rat(1), Rat(0), Rat(0), Rat(0)});
  CHECK(ri.noncompact);
  CHECK(ri.branch == "indefinite");

  // Verdicts agree with the sign data of the two blocks.
  for (int trial = 0; trial < 60; ++trial) {
    QuarticTorsorSpec spec = random_torsor_spec();
    TorsorVariety R = build_quartic_torsor(spec);
    std::vector<Rat> w;
    do {
      w = {small_rat(), small_rat(), small_rat(), small_rat()};
    } while (spec.tower.norm(w) == 0);
    auto v = fiber_real_noncompact(R, w);
    FiberQuadric f = fiber_quadric(R, w);
    auto [p0, m0] = signature(f.q0);
    auto [p1, m1] = signature(f.q1);
    bool indef = (p0 > 0 && m0 > 0) || (p1 > 0 && m1 > 0);
    bool opposite = !indef && (p0 == 2) != (p1 == 2);
    CHECK(v.noncompact == (indef || opposite));
    if (!v.noncompact) CHECK(v.branch == (p0 == 2 ? "empty" : "compact"));
  }
}

namespace {

// Brute-force Newton-certified witness of q(x) = -1 over Z_p, on a
// diagonalization of q with entries reduced modulo squares so that each
// has valuation 0 or 1; residues mod p^m are sampled for growing m.
bool witness_minus_one(const QuadForm& q, const Int& p) {
  std::vector<Rat> diag;
  for (const Rat& d : diagonalize(q)) {
    long v = valuation(d, p);
    Rat r = unit_part(d, p) * (v % 2 ? Rat(p) : Rat(1));
    diag.push_back(r);
  }
  Int scale(1);
  for (const Rat& d : diag) {
    Int den(d.get_den()), g;
    mpz_gcd(g.get_mpz_t(), scale.get_mpz_t(), den.get_mpz_t());
    scale = scale / g * den;
  }
  size_t n = diag.size();
  std::vector<Int> c(n);
  for (size_t i = 0; i < n; ++i) c[i] = Int(Rat(diag[i] * scale).get_num());

  // B = 1 covers witnesses with denominator p (x = y/p), needed when all
  // diagonal valuations are 1.
  for (unsigned B = 0; B <= 1; ++B)
    for (unsigned m = 3; m <= 8; ++m) {
      Int pk = pow_int(p, m);
      Int target = scale * pow_int(p, 2 * B);
      for (int tries = 0; tries < 30000; ++tries) {
        std::vector<Int> x(n);
        for (auto& xc : x) xc = mod_floor(Int(static_cast<unsigned long>(rng())), pk);
        Int val = target;  // scale * p^{2B} * (q(x / p^B) + 1) on the diagonal form
        for (size_t i = 0; i < n; ++i) val += c[i] * x[i] * x[i];
        if (mod_floor(val, pk) != 0) continue;
        for (size_t i = 0; i < n; ++i) {
          Int ge = 2 * c[i] * x[i];
          if (ge == 0) continue;
          long e = valuation(ge, p);
          if (m >= 2 * static_cast<unsigned>(e) + 1) return true;
        }
      }
    }
  return false;
}

}  // namespace

TEST_CASE("fiber local solubility against witness search") {
  int agreed = 0;
  for (int trial = 0; trial < 50; ++trial) {
    QuarticTorsorSpec spec = random_torsor_spec();
    TorsorVariety R = build_quartic_torsor(spec);
    std::vector<Rat> w;
    do {
      w = {small_rat(), small_rat(), small_rat(), small_rat()};
    } while (spec.tower.norm(w) == 0);
    FiberQuadric f = fiber_quadric(R, w);
    for (Int p : {Int(2), Int(3), Int(5), Int(7)}) {
      bool criterion = fiber_locally_soluble(R, w, p);
      bool oracle = witness_minus_one(f.q, p);
      CHECK(criterion == oracle);
      ++agreed;
    }
  }
  CHECK(agreed == 200);
}

TEST_CASE("split torsor existence and mapping") {
  // P = t1 t2 over Q(i).
  std::vector<std::string> vars{"t1", "t2"};
  SplitSpec sp;
  sp.c = Rat(1);
  sp.s = 2;
  sp.factors.push_back({Poly::variable(0, vars), 1});
  sp.factors.push_back({Poly::variable(1, vars), 1});
  NormVariety V(QuadraticField(Int(-1)), sp);

  auto found = split_torsor_existence(V, 3);
  REQUIRE(found);
  CHECK(found->lambdas == std::vector<Rat>{Rat(1), Rat(1)});
  CHECK(found->xi == std::vector<Rat>{Rat(1), Rat(0)});

  SplitTorsor T = build_split_torsor(V, *found);
  std::vector<Rat> t{Rat(2), Rat(5)};
  std::vector<std::vector<Rat>> zs{{Rat(1), Rat(1)}, {Rat(2), Rat(1)}};
  REQUIRE(T.on_torsor(t, zs));
  auto [ti, z] = T.map_to_X(t, zs);
  CHECK(ti == t);
  CHECK(z == std::vector<Rat>{Rat(1), Rat(3)});
  CHECK(V.eval_P(t) == Rat(10));

  CHECK(!T.on_torsor({Rat(3), Rat(5)}, zs));
  CHECK_THROWS_AS(T.map_to_X({Rat(3), Rat(5)}, zs), domain_error);

  // c = 2 forces a nontrivial xi; c = -1 a negative lambda.
  SplitSpec sp2 = sp;
  sp2.c = Rat(2);
  auto f2 = split_torsor_existence(NormVariety(QuadraticField(Int(-1)), sp2), 3);
  REQUIRE(f2);
  CHECK(QuadraticField(Int(-1)).norm(f2->xi[0], f2->xi[1]) ==
        Rat(2) * f2->lambdas[0] * f2->lambdas[1]);

  std::vector<std::string> one{"t"};
  SplitSpec neg;
  neg.c = Rat(-1);
  neg.s = 1;
  neg.factors.push_back({Poly::variable(0, one), 1});
  auto f3 = split_torsor_existence(NormVariety(QuadraticField(Int(-1)), neg), 3);
  REQUIRE(f3);
  CHECK(f3->lambdas[0] < 0);

  SplitTorsorSpec badspec{{Rat(1), Rat(1)}, {Rat(1), Rat(1)}};
  CHECK_THROWS_AS(build_split_torsor(V, badspec), domain_error);
}

TEST_CASE("split torsor with exponents") {
  std::vector<std::string> one{"t"};
  SplitSpec sp;
  sp.c = Rat(1);
  sp.s = 1;
  sp.factors.push_back({Poly::variable(0, one), 2});
  sp.factors.push_back({Poly::variable(0, one) - Poly::constant(Rat(1), one), 1});
  NormVariety V(QuadraticField(Int(-1)), sp);

  SplitTorsorSpec spec{{Rat(1), Rat(1)}, {Rat(1), Rat(0)}};
  SplitTorsor T = build_split_torsor(V, spec);
  // t = 5: N(z1) = 5, N(z2) = 4.
  std::vector<Rat> t{Rat(5)};
  std::vector<std::vector<Rat>> zs{{Rat(2), Rat(1)}, {Rat(2), Rat(0)}};
  REQUIRE(T.on_torsor(t, zs));
  auto [ti, z] = T.map_to_X(t, zs);
  CHECK(QuadraticField(Int(-1)).norm(z[0], z[1]) == Rat(100));
  CHECK(V.eval_P(t) == Rat(100));
}
