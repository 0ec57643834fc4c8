#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "normct/counting.hpp"

using namespace normct;

namespace {

std::mt19937_64 rng(41);

const std::vector<std::string> kVars{"t1", "t2"};

CountingProblem gauss_2d() {
  return CountingProblem{QuadraticField(Int(-1)),
                         {Poly::variable(0, kVars), Poly::variable(1, kVars)},
                         Int(1),
                         {Int(0), Int(0)},
                         {{Int(0), Int(0)}, {Int(0), Int(0)}},
                         {{Rat(1, 10), Rat(9, 10)}, {Rat(1, 10), Rat(9, 10)}}};
}

Int naive_rep(const QuadraticField& K, long m, long z0, long z1, long M) {
  if (m <= 0) return Int(0);
  long count = 0;
  for (long x = -m; x <= m; ++x)
    for (long y = -m; y <= m; ++y) {
      if (K.norm(Rat(x), Rat(y)) != Rat(m)) continue;
      if (mod_floor(Int(x - z0), Int(M)) != 0) continue;
      if (mod_floor(Int(y - z1), Int(M)) != 0) continue;
      ++count;
    }
  return Int(count);
}

Int naive_N(const CountingProblem& P, long T) {
  Int total(0);
  std::vector<long> t(P.s());
  std::vector<long> lo(P.s(), -T), hi(P.s(), T);
  t = lo;
  for (;;) {
    bool inside = true;
    for (size_t j = 0; j < P.s() && inside; ++j) {
      Rat q(t[j], T);
      q.canonicalize();
      inside = q >= P.box[j].first && q <= P.box[j].second &&
               mod_floor(Int(t[j]) - P.t_prime[j], P.M) == 0;
    }
    if (inside) {
      Int prod(1);
      std::vector<Rat> tr;
      for (long c : t) tr.emplace_back(c);
      for (size_t i = 0; i < P.r() && prod != 0; ++i) {
        Rat v = P.f[i].eval(tr);
        v.canonicalize();
        prod *= rep_count(P.field, Int(v.get_num()), P.z_prime[i], P.M);
      }
      total += prod;
    }
    size_t j = 0;
    while (j < P.s() && ++t[j] > hi[j]) t[j++] = lo[j];
    if (j == P.s()) break;
  }
  return total;
}

Rat naive_beta(const CountingProblem& P, const Int& p, unsigned m) {
  long e = valuation(P.M, p);
  Int pm = pow_int(p, m), pe = pow_int(p, e);
  Int per = pm / pe;
  std::vector<std::map<Int, Int>> cache(P.r());
  Int sum(0);
  std::vector<Int> k(P.s(), Int(0));
  for (;;) {
    std::vector<Rat> t;
    for (size_t j = 0; j < P.s(); ++j)
      t.emplace_back(mod_floor(P.t_prime[j], pe) + pe * k[j]);
    Int prod(1);
    for (size_t i = 0; i < P.r() && prod != 0; ++i) {
      Rat v = P.f[i].eval(t);
      v.canonicalize();
      Int A = mod_floor(Int(v.get_num()), pm);
      auto it = cache[i].find(A);
      if (it == cache[i].end())
        it = cache[i].emplace(A, rho_count(P.field, p, m, A, P.z_prime[i], e)).first;
      prod *= it->second;
    }
    sum += prod;
    size_t j = 0;
    while (j < P.s() && ++k[j] == per) k[j++] = Int(0);
    if (j == P.s()) break;
  }
  Rat out(sum, pow_int(p, m * (P.s() + P.r())));
  out.canonicalize();
  return out;
}

}  // namespace

TEST_CASE("representation counts") {
  QuadraticField gauss(Int(-1));
  CHECK(rep_count(gauss, Int(1), {Int(0), Int(0)}, Int(1)) == 4);
  CHECK(rep_count(gauss, Int(3), {Int(0), Int(0)}, Int(1)) == 0);
  CHECK(rep_count(gauss, Int(25), {Int(3), Int(4)}, Int(5)) == 1);
  CHECK(rep_count(gauss, Int(0), {Int(0), Int(0)}, Int(1)) == 0);
  CHECK(rep_count(gauss, Int(-5), {Int(0), Int(0)}, Int(1)) == 0);

  QuadraticField eis(Int(-3), BasisMode::Maximal);
  CHECK(rep_count(eis, Int(1), {Int(0), Int(0)}, Int(1)) == 6);

  // Partition over residues, and agreement with the naive double loop.
  for (int trial = 0; trial < 60; ++trial) {
    const QuadraticField& K = trial % 2 ? eis : gauss;
    long m = 1 + long(rng() % 400);
    long M = 1 + long(rng() % 5);
    Int total(0);
    for (long z0 = 0; z0 < M; ++z0)
      for (long z1 = 0; z1 < M; ++z1)
        total += rep_count(K, Int(m), {Int(z0), Int(z1)}, Int(M));
    CHECK(total == rep_count(K, Int(m), {Int(0), Int(0)}, Int(1)));
    long z0 = long(rng() % M), z1 = long(rng() % M);
    CHECK(rep_count(K, Int(m), {Int(z0), Int(z1)}, Int(M)) ==
          naive_rep(K, m, z0, z1, M));
  }
}

TEST_CASE("problem validation") {
  CHECK_NOTHROW(validate_problem(gauss_2d()));

  CountingProblem bad = gauss_2d();
  bad.field = QuadraticField(Int(2));
  CHECK_THROWS_AS(validate_problem(bad), domain_error);

  bad = gauss_2d();
  bad.box[0] = {Rat(1, 10), Rat(11, 10)};
  CHECK_THROWS_AS(validate_problem(bad), domain_error);

  bad = gauss_2d();  // f_2 - f_1 constant: affinely dependent
  bad.f[1] = Poly::variable(0, kVars) + Poly::constant(Rat(1, 2), kVars);
  CHECK_THROWS_AS(validate_problem(bad), domain_error);

  bad = gauss_2d();  // box sticks out of {f_2(t) < 1}
  bad.f[1] = Poly::variable(0, kVars) + Poly::variable(1, kVars);
  CHECK_THROWS_AS(validate_problem(bad), domain_error);
}

TEST_CASE("counting function") {
  CountingProblem P = gauss_2d();
  CHECK(count_N(P, Int(10)) == 784);
  CHECK(count_N(P, Int(1)) == 0);
  CHECK(count_N(P, Int(10)) == naive_N(P, 10));

  CountingProblem Pc = gauss_2d();
  Pc.M = Int(2);
  Pc.t_prime = {Int(1), Int(1)};
  Pc.z_prime = {{Int(1), Int(0)}, {Int(1), Int(0)}};
  CHECK(count_N(Pc, Int(10)) == naive_N(Pc, 10));
  CHECK(count_N(Pc, Int(25)) == naive_N(Pc, 25));

  // Random small problems against the naive oracle.
  std::vector<std::vector<Poly>> palettes{
      {Poly::variable(0, kVars), Poly::variable(1, kVars)},
      {Poly::variable(0, kVars),
       Poly::variable(0, kVars) + Poly::variable(1, kVars) * Rat(2)},
      {Poly::variable(0, kVars), Poly::variable(1, kVars),
       Poly::variable(0, kVars) + Poly::variable(1, kVars) -
           Poly::constant(Rat(1), kVars)}};
  int compared = 0;
  while (compared < 10) {
    CountingProblem Q{
        rng() % 2 ? QuadraticField(Int(-1)) : QuadraticField(Int(-7), BasisMode::Maximal),
        palettes[rng() % palettes.size()],
        Int(1 + long(rng() % 3)),
        {Int(long(rng() % 4)), Int(long(rng() % 4))},
        {},
        {}};
    for (size_t i = 0; i < Q.f.size(); ++i)
      Q.z_prime.push_back({Int(long(rng() % 3)), Int(long(rng() % 3))});
    for (size_t j = 0; j < 2; ++j) {
      long a = 1 + long(rng() % 5), b = a + 1 + long(rng() % 3);
      Q.box.push_back({Rat(a, 20), Rat(b, 20)});
    }
    try {
      validate_problem(Q);
    } catch (const domain_error&) {
      continue;
    }
    long T = 15 + long(rng() % 20);
    CHECK(count_N(Q, Int(T)) == naive_N(Q, T));
    ++compared;
  }
}

TEST_CASE("rho counts and mass identities") {
  QuadraticField gauss(Int(-1));
  CHECK(rho_count(gauss, Int(5), 1, Int(1), {Int(0), Int(0)}, 0) == 4);
  CHECK(rho_count(gauss, Int(3), 1, Int(0), {Int(0), Int(0)}, 0) == 1);
  // m = e pins the residue entirely.
  CHECK(rho_count(gauss, Int(5), 2, Int(gauss.norm(Rat(3), Rat(4)).get_num()),
                  {Int(3), Int(4)}, 2) == 1);
  CHECK_THROWS_AS(rho_count(gauss, Int(5), 1, Int(0), {Int(0), Int(0)}, 2),
                  domain_error);

  QuadraticField eis(Int(-3), BasisMode::Maximal);
  for (const QuadraticField& K : {gauss, eis})
    for (long p : {2L, 3L, 5L, 7L})
      for (unsigned m = 1; m <= 3; ++m)
        for (unsigned e = 0; e <= (m > 1 ? 1u : 0u); ++e) {
          Int pm = pow_int(Int(p), m);
          Int total(0);
          for (Int A(0); A < pm; ++A)
            total += rho_count(K, Int(p), m, A, {Int(1), Int(2)}, e);
          CHECK(total == pow_int(Int(p), 2 * (m - e)));
        }
}

TEST_CASE("rho stabilization past the threshold") {
  QuadraticField gauss(Int(-1));
  QuadraticField eis(Int(-3), BasisMode::Maximal);
  int checked = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const QuadraticField& K = trial % 2 ? eis : gauss;
    long p = std::vector<long>{2, 3, 5}[trial % 3];
    long v = long(rng() % 2);
    long unit = 1 + long(rng() % (p - 1 ? p - 1 : 1));
    if (unit % p == 0) unit = 1;
    Int A = Int(unit) * pow_int(Int(p), v);
    unsigned e = rng() % 2;
    std::vector<Int> zp{Int(long(rng() % 7)), Int(long(rng() % 7))};
    unsigned m_prime = 2 * (e + v + (p == 2 ? 1 : 0)) + 1;
    for (unsigned m = m_prime; m <= m_prime + 1; ++m) {
      if (std::pow(double(p), 2.0 * (m + 1 - e)) > 2e7) continue;
      Int lhs = rho_count(K, Int(p), m + 1, A, zp, e);
      Int rhs = rho_count(K, Int(p), m, A, zp, e) * Int(p);
      CHECK(lhs == rhs);
      ++checked;
    }
  }
  CHECK(checked >= 20);
}

TEST_CASE("local densities") {
  CountingProblem P = gauss_2d();
  for (long p : {2L, 3L, 5L, 7L, 11L, 13L}) {
    BetaResult b = beta_p(P, Int(p), 8);
    CHECK(b.stabilized);
    CHECK(b.value == 1);
  }

  CountingProblem skew = gauss_2d();
  skew.f[1] = Poly::variable(0, kVars) + Poly::variable(1, kVars) * Rat(2);
  skew.box = {{Rat(1, 10), Rat(3, 10)}, {Rat(1, 20), Rat(5, 20)}};
  for (long p : {3L, 5L, 7L}) {
    BetaResult b = beta_p(skew, Int(p), 8);
    CHECK(b.stabilized);
    CHECK(b.value == 1);
  }
  BetaResult b2 = beta_p(skew, Int(2), 8);
  CHECK(b2.stabilized);
  CHECK(b2.value == naive_beta(skew, Int(2), b2.m_used));

  CountingProblem three = gauss_2d();
  three.f.push_back(Poly::variable(0, kVars) + Poly::variable(1, kVars) -
                    Poly::constant(Rat(1), kVars));
  three.z_prime.push_back({Int(0), Int(0)});
  three.t_prime = {Int(1), Int(1)};
  three.box = {{Rat(1, 10), Rat(4, 10)}, {Rat(1, 10), Rat(4, 10)}};
  BetaResult b5 = beta_p(three, Int(5), 6);
  CHECK(b5.stabilized);
  CHECK(b5.value == naive_beta(three, Int(5), b5.m_used));

  // Congruence-restricted problem against the naive oracle.
  CountingProblem cong = gauss_2d();
  cong.M = Int(2);
  cong.t_prime = {Int(1), Int(1)};
  cong.z_prime = {{Int(1), Int(0)}, {Int(0), Int(1)}};
  BetaResult bc = beta_p(cong, Int(2), 9);
  CHECK(bc.stabilized);
  CHECK(bc.value == naive_beta(cong, Int(2), bc.m_used));

  CountingProblem degenerate = gauss_2d();
  degenerate.M = Int(2);
  CHECK_THROWS_AS(beta_p(degenerate, Int(2), 8), domain_error);  // f_i(t') = 0
}

TEST_CASE("c_K calibration") {
  // pi and 2*pi/sqrt(3) pinned to 14 places.
  Rat pi_lo(Int("314159265358979"), Int("100000000000000"));
  Rat pi_hi(Int("314159265358980"), Int("100000000000000"));
  CkCalibration gauss = calibrate_ck(QuadraticField(Int(-1)), Int(1000000));
  CHECK(gauss.lo < pi_lo);
  CHECK(gauss.hi > pi_hi);
  CHECK(gauss.hi - gauss.lo < pi_lo * Rat(2, 100));
  CHECK(gauss.confident);

  Rat c3_lo(Int("362759872846843"), Int("100000000000000"));
  Rat c3_hi(Int("362759872846844"), Int("100000000000000"));
  CkCalibration eis = calibrate_ck(QuadraticField(Int(-3), BasisMode::Maximal),
                                   Int(1000000));
  CHECK(eis.lo < c3_lo);
  CHECK(eis.hi > c3_hi);
  CHECK(eis.hi - eis.lo < c3_lo * Rat(2, 100));
  CHECK(eis.confident);

  CkCalibration tiny = calibrate_ck(QuadraticField(Int(-1)), Int(1));
  CHECK(!tiny.confident);
  CHECK(tiny.hi - tiny.lo > 1);
}

TEST_CASE("beta infinity") {
  CountingProblem P = gauss_2d();
  P.field.ck_interval = {{Rat(3), Rat(4)}};
  auto [lo, hi] = beta_infinity(P);
  CHECK(lo == Rat(16, 25) * 9);
  CHECK(hi == Rat(16, 25) * 16);

  CountingProblem flat = gauss_2d();
  flat.box[0] = {Rat(1, 2), Rat(1, 2)};
  flat.field.ck_interval = {{Rat(3), Rat(4)}};
  auto [flo, fhi] = beta_infinity(flat);
  CHECK(flo == 0);
  CHECK(fhi == 0);

  CHECK_THROWS_AS(beta_infinity(gauss_2d()), domain_error);
}

TEST_CASE("asymptotic verification") {
  CountingProblem P = gauss_2d();
  DensityReport rep = verify_asymptotic(P, {Int(10), Int(500), Int(1000), Int(2000)},
                                        Int(13));
  for (const auto& [p, b] : rep.beta_p) {
    CHECK(b == 1);
    CHECK(rep.beta_p_stable.at(p));
  }
  CHECK(rep.N_samples.at(Int(10)) == 784);
  for (Int T : {Int(500), Int(1000), Int(2000)}) {
    auto [rlo, rhi] = rep.ratios.at(T);
    CHECK(rlo > Rat(9, 10));
    CHECK(rhi < Rat(11, 10));
  }
  // Small-T sample sits outside the tolerance band.
  CHECK(rep.ratios.at(Int(10)).first > Rat(11, 10));
  CHECK(!rep.empty_box);
  CHECK(rep.converging);

  std::string csv = report_csv(rep);
  CHECK(csv.substr(0, 8) == "T,N,beta");
  size_t lines = std::count(csv.begin(), csv.end(), '\n');
  CHECK(lines == 5);
}
