#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "normct/brauer.hpp"

using namespace normct;

namespace {

NormVariety make_split(const Int& d, const Rat& c, const std::vector<long>& roots,
                       const std::vector<unsigned>& exps = {}) {
  std::vector<std::string> vars{"t"};
  SplitSpec sp;
  sp.c = c;
  sp.s = 1;
  for (size_t i = 0; i < roots.size(); ++i) {
    Poly g = Poly::variable(0, vars) - Poly::constant(Rat(roots[i]), vars);
    sp.factors.push_back({g, exps.empty() ? 1 : exps[i]});
  }
  return NormVariety(QuadraticField(d), sp);
}

NormVariety ex62() { return make_split(Int(-1), Rat(1), {0, 2, 10}); }

LocalPoint rational_point(const Place& v, const Rat& t, const std::vector<Rat>& z,
                          unsigned prec = 6) {
  LocalPoint q;
  q.place = v;
  if (v.is_infinite()) {
    q.t_real = {t};
    q.z_real = z;
  } else {
    Int mod = pow_int(v.prime(), prec);
    q.precision = prec;
    Rat tc = t;
    tc.canonicalize();
    REQUIRE(tc.get_den() == 1);
    q.t_res = {mod_floor(Int(tc.get_num()), mod)};
    for (const Rat& zi : z) {
      Rat zc = zi;
      zc.canonicalize();
      REQUIRE(zc.get_den() == 1);
      q.z_res.push_back(mod_floor(Int(zc.get_num()), mod));
    }
  }
  return q;
}

AdelicPointSpec ex62_adelic() {
  AdelicPointSpec spec;
  spec.default_t = {Rat(1)};
  spec.default_z = {Rat(3), Rat(0)};
  LocalPoint q5;
  q5.place = Place::finite(Int(5));
  q5.t_res = {Int(5)};
  q5.z_res = {Int(55), Int(5)};
  q5.precision = 4;
  spec.explicit_points.push_back(q5);
  return spec;
}

}  // namespace

TEST_CASE("standard generators") {
  auto gens = standard_generators(ex62());
  REQUIRE(gens.size() == 2);
  CHECK(gens[0].numerator.eval({Rat(7)}) == Rat(7));       // t
  CHECK(gens[1].numerator.eval({Rat(7)}) == Rat(5));       // t - 2
  CHECK(gens[0].d == Rat(-1));
  CHECK(gens[0].complement.eval({Rat(7)}) == Rat(5 * -3)); // (t-2)(t-10)
  CHECK(standard_generators(make_split(Int(-1), Rat(2), {4})).empty());
  auto one = standard_generators(make_split(Int(5), Rat(1), {-1, 1}));
  REQUIRE(one.size() == 1);
  CHECK(one[0].numerator.eval({Rat(0)}) == Rat(1));  // t + 1
  CHECK_THROWS_AS(standard_generators(make_split(Int(-1), Rat(1), {3, 3})),
                  domain_error);
}

TEST_CASE("local invariants at the example points") {
  NormVariety V = ex62();
  auto gens = standard_generators(V);

  LocalPoint p2 = rational_point(Place::finite(Int(2)), Rat(1), {Rat(3), Rat(0)});
  CHECK(local_invariant(V, gens[0], p2) == InvariantValue::zero());   // (1,-1)_2
  CHECK(local_invariant(V, gens[1], p2) == InvariantValue::half());   // (-1,-1)_2

  LocalPoint pinf = rational_point(Place::infinite(), Rat(10), {Rat(0), Rat(0)});
  CHECK(local_invariant(V, gens[0], pinf) == InvariantValue::zero());

  // At t = 0 the first numerator vanishes exactly: the complement
  // representative (t-2)(t-10) = 20 takes over.
  LocalPoint zero = rational_point(Place::infinite(), Rat(0), {Rat(0), Rat(0)});
  CHECK(local_invariant(V, gens[0], zero) == InvariantValue::zero());

  // Insufficient p-adic precision near a root is refused, not guessed.
  LocalPoint shallow = rational_point(Place::finite(Int(2)), Rat(2), {Rat(0), Rat(0)}, 1);
  CHECK_THROWS_AS(local_invariant(V, gens[1], shallow), domain_error);
}

TEST_CASE("bad places") {
  auto gens = standard_generators(ex62());
  auto bp = bad_places(ex62(), gens[0]);
  std::vector<std::string> strs;
  for (const auto& v : bp) strs.push_back(v.str());
  CHECK(strs == std::vector<std::string>{"inf", "2", "5"});

  NormVariety W = make_split(Int(-5), Rat(1), {0, 3});
  auto bw = bad_places(W, standard_generators(W)[0]);
  strs.clear();
  for (const auto& v : bw) strs.push_back(v.str());
  CHECK(strs == std::vector<std::string>{"inf", "2", "3", "5"});
}

TEST_CASE("pairing on the example adelic point") {
  NormVariety V = ex62();
  auto rep = bm_pairing(V, ex62_adelic());
  REQUIRE(rep.totals.size() == 2);
  CHECK(rep.totals[0] == InvariantValue::zero());
  CHECK(rep.totals[1] == InvariantValue::zero());
  CHECK(rep.orthogonal());
  CHECK(rep.subset_totals.size() == 4);
  for (const auto& [idx, sum] : rep.subset_totals) CHECK(sum.is_zero());

  // Rational point everywhere: the product formula forces totals 0.
  AdelicPointSpec diag;
  diag.default_t = {Rat(1)};
  diag.default_z = {Rat(3), Rat(0)};
  CHECK(bm_pairing(V, diag).orthogonal());

  // Swap in a real point on the unbounded component: beta_2 obstructs.
  AdelicPointSpec swapped = ex62_adelic();
  swapped.explicit_points.push_back(
      rational_point(Place::infinite(), Rat(10), {Rat(0), Rat(0)}));
  auto rep2 = bm_pairing(V, swapped);
  CHECK(rep2.totals[0] == InvariantValue::zero());
  CHECK(rep2.totals[1] == InvariantValue::half());
  CHECK(!rep2.orthogonal());

  // A bogus local point is rejected.
  AdelicPointSpec bogus = ex62_adelic();
  bogus.explicit_points[0].z_res = {Int(54), Int(5)};
  CHECK_THROWS_AS(bm_pairing(V, bogus), domain_error);
}

TEST_CASE("relation check at points of five varieties") {
  // The symbol relation holds at points of X, where P(t) is a norm: the
  // sample pool is drawn from genuine rational points.
  std::mt19937_64 rng(11);
  std::vector<NormVariety> vars;
  vars.push_back(ex62());
  vars.push_back(make_split(Int(-1), Rat(3), {1}));
  vars.push_back(make_split(Int(-5), Rat(1), {0, 3}));
  vars.push_back(make_split(Int(2), Rat(-2), {-1, 4, 5}));
  vars.push_back(make_split(Int(-3), Rat(1), {0, 1, 2, 7}));
  std::vector<Place> places{Place::infinite(), Place::finite(Int(2)),
                            Place::finite(Int(3)), Place::finite(Int(5)),
                            Place::finite(Int(7)), Place::finite(Int(11))};
  struct Sample {
    const NormVariety* V;
    IntegralPoint pt;
  };
  std::vector<Sample> pool;
  for (const auto& V : vars) {
    bool any = false;
    for (const auto& pt : search_points(V, Int(20))) {
      std::vector<Rat> tr{Rat(pt.t[0])};
      if (V.eval_P(tr) == 0) continue;
      pool.push_back({&V, pt});
      any = true;
    }
    CHECK(any);
  }
  REQUIRE(!pool.empty());
  for (int samples = 0; samples < 500; ++samples) {
    const Sample& s = pool[rng() % pool.size()];
    const Place& v = places[rng() % places.size()];
    std::vector<Rat> z;
    for (const Int& zi : s.pt.z) z.emplace_back(zi);
    LocalPoint q = rational_point(v, Rat(s.pt.t[0]), z, 16);
    auto [lhs, rhs] = relation_check(*s.V, q);
    CHECK(lhs == rhs);
  }
}

TEST_CASE("representative independence") {
  NormVariety V = ex62();
  auto gens = standard_generators(V);
  std::vector<Place> places{Place::infinite(), Place::finite(Int(2)),
                            Place::finite(Int(5)), Place::finite(Int(13))};
  // Off the variety, the two representatives differ exactly by the
  // class of (P(t), d).
  for (long t = -20; t <= 20; ++t) {
    if (t == 0 || t == 2 || t == 10) continue;
    Rat P = V.eval_P({Rat(t)});
    for (const auto& g : gens) {
      Rat f = g.numerator.eval({Rat(t)});
      Rat comp = g.complement.eval({Rat(t)});
      for (const Place& v : places)
        CHECK(hilbert_symbol(f, g.d, v) + hilbert_symbol(comp, g.d, v) ==
              hilbert_symbol(P, g.d, v));
    }
  }
  // At points of X where both values are nonzero, they agree.
  for (const auto& pt : search_points(V, Int(60))) {
    Rat t(pt.t[0]);
    if (V.eval_P({t}) == 0) continue;
    for (const auto& g : gens) {
      Rat f = g.numerator.eval({t});
      Rat comp = g.complement.eval({t});
      if (f == 0 || comp == 0) continue;
      for (const Place& v : places)
        CHECK(hilbert_symbol(f, g.d, v) == hilbert_symbol(comp, g.d, v));
    }
  }
}

TEST_CASE("invariants vanish at good places") {
  NormVariety V = ex62();
  auto gens = standard_generators(V);
  int checked = 0;
  for (Int p : {Int(3), Int(7), Int(11), Int(13)}) {
    auto pts = local_integral_points(V, p, 2, 30);
    for (const auto& q : pts) {
      for (const auto& g : gens)
        CHECK(local_invariant(V, g, q) == InvariantValue::zero());
      ++checked;
    }
  }
  CHECK(checked >= 100);
}

TEST_CASE("product formula certificate") {
  std::vector<ResidueClass> c58{{Int(1), Int(8)}, {Int(5), Int(25)}};
  CHECK(product_formula_certificate(Rat(0), Rat(2), {{Int(5), Int(25)}}) ==
        CertVerdict::Impossible);
  CHECK(product_formula_certificate(Rat(0), Rat(2), {{Int(1), Int(8)}}) ==
        CertVerdict::Unknown);
  CHECK(product_formula_certificate(Rat(0), Rat(2), c58) == CertVerdict::Impossible);
  CHECK(product_formula_certificate(Rat(3), Rat(2), {}) == CertVerdict::Impossible);
  CHECK(product_formula_certificate(Rat(100), Rat(110), c58) ==
        CertVerdict::Unknown);  // 105 qualifies
}

TEST_CASE("obstruction pipeline") {
  NormVariety V = ex62();
  std::vector<ResidueClass> cong{{Int(1), Int(8)}, {Int(5), Int(25)}};

  auto full = obstruction_demo(V, ex62_adelic(), cong, Int(3000));
  CHECK(full.orthogonal);
  CHECK(full.forced_components == std::vector<std::string>{"[0, 2]"});
  CHECK(full.certificate == CertVerdict::Impossible);
  CHECK(full.found_points.empty());
  CHECK(full.verdict == "counterexample confirmed");

  auto relaxed = obstruction_demo(V, ex62_adelic(), {{Int(1), Int(8)}}, Int(100));
  CHECK(relaxed.verdict.substr(0, 11) == "point found");

  AdelicPointSpec swapped = ex62_adelic();
  swapped.explicit_points.push_back(
      rational_point(Place::infinite(), Rat(10), {Rat(0), Rat(0)}));
  auto obstructed = obstruction_demo(V, swapped, cong, Int(100));
  CHECK(!obstructed.orthogonal);
  CHECK(obstructed.verdict.substr(0, 15) == "pairing nonzero");
}
