#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "normct/numbers.hpp"

using namespace normct;

TEST_CASE("valuations") {
  CHECK(valuation(Int(40), Int(2)) == 3);
  CHECK(valuation(Int(40), Int(5)) == 1);
  CHECK(valuation(Int(-9), Int(3)) == 2);
  CHECK(valuation(Rat(5, 8), Int(2)) == -3);
  CHECK(valuation(Rat(5, 8), Int(5)) == 1);
  CHECK_THROWS_AS(valuation(Int(0), Int(3)), domain_error);
  CHECK(unit_part(Rat(40), Int(2)) == Rat(5));
  CHECK(unit_part(Rat(5, 8), Int(2)) == Rat(5));
}

TEST_CASE("legendre symbol against brute-force squares") {
  for (Int p : {Int(3), Int(5), Int(7), Int(11), Int(13), Int(101)}) {
    std::vector<bool> sq(mpz_get_ui(p.get_mpz_t()), false);
    for (Int x = 0; x < p; ++x) sq[mpz_get_ui(Int(x * x % p).get_mpz_t())] = true;
    for (Int a = 1; a < p; ++a)
      CHECK(legendre(a, p) == (sq[mpz_get_ui(a.get_mpz_t())] ? 1 : -1));
  }
}

TEST_CASE("squares in completions against enumeration") {
  // Oracle: x in Z_p^* is a square iff it is one mod p^3 (p odd) or mod
  // 2^{v+3}; test over integer samples by direct residue enumeration.
  for (Int p : {Int(2), Int(3), Int(5), Int(7)}) {
    unsigned k = p == 2 ? 5 : 3;
    Int pk = pow_int(p, k);
    std::vector<bool> sq(mpz_get_ui(pk.get_mpz_t()), false);
    for (Int x = 0; x < pk; ++x)
      sq[mpz_get_ui(Int(x * x % pk).get_mpz_t())] = true;
    for (int a = 1; a < 200; ++a) {
      if (valuation(Int(a), p) > 0) continue;  // units only in this oracle
      bool oracle = sq[mpz_get_ui(mod_floor(Int(a), pk).get_mpz_t())];
      CHECK(is_square_in_Qp(Rat(a), Place::finite(p)) == oracle);
    }
  }
  CHECK(is_square_in_Qp(Rat(2), Place::infinite()));
  CHECK(!is_square_in_Qp(Rat(-2), Place::infinite()));
  CHECK(is_square_in_Qp(Rat(4, 9), Place::finite(Int(7))));
  CHECK(is_square_in_Qp(Rat(36), Place::finite(Int(3))));
  CHECK(!is_square_in_Qp(Rat(3), Place::finite(Int(3))));   // odd valuation
  CHECK(is_square_in_Qp(Rat(1, 4), Place::finite(Int(2))));
  CHECK(!is_square_in_Qp(Rat(5), Place::finite(Int(2))));   // 5 = 5 mod 8
  CHECK(is_square_in_Qp(Rat(17), Place::finite(Int(2))));   // 1 mod 8
}

TEST_CASE("crt") {
  auto r = solve_congruences({{Int(1), Int(8)}, {Int(5), Int(25)}});
  CHECK(r.modulus == 200);
  CHECK(r.value == 105);
  auto m = solve_congruences({{Int(3), Int(6)}, {Int(1), Int(4)}});
  CHECK(m.modulus == 12);
  CHECK(m.value == 9);
  CHECK_THROWS_AS(solve_congruences({{Int(0), Int(4)}, {Int(1), Int(2)}}),
                  domain_error);
}

TEST_CASE("hensel lifting and root enumeration") {
  // f = x^2 + 1 over Z_5
  std::vector<Int> f{1, 0, 1};
  auto r = hensel_root(f, Int(2), Int(5), 6);
  CHECK(r.modulus == pow_int(Int(5), 6));
  CHECK(mod_floor(eval_poly(f, r.value), r.modulus) == 0);
  CHECK(mod_floor(r.value, Int(5)) == 2);

  for (unsigned m : {1u, 2u, 3u, 4u}) {
    Int mod = pow_int(Int(5), m);
    std::vector<Int> brute;
    for (Int x = 0; x < mod; ++x)
      if (mod_floor(eval_poly(f, x), mod) == 0) brute.push_back(x);
    auto got = roots_mod_prime_power(f, Int(5), m);
    std::sort(got.begin(), got.end());
    CHECK(got == brute);
  }

  // Non-simple root branching: x^2 mod 3^m
  std::vector<Int> g{0, 0, 1};
  for (unsigned m : {2u, 3u, 4u}) {
    Int mod = pow_int(Int(3), m);
    std::vector<Int> brute;
    for (Int x = 0; x < mod; ++x)
      if (mod_floor(eval_poly(g, x), mod) == 0) brute.push_back(x);
    auto got = roots_mod_prime_power(g, Int(3), m);
    std::sort(got.begin(), got.end());
    CHECK(got == brute);
  }
}

TEST_CASE("factor and square detection") {
  auto f = factor(Int(360));
  REQUIRE(f.size() == 3);
  CHECK(f[0] == std::pair<Int, unsigned>{Int(2), 3u});
  CHECK(f[1] == std::pair<Int, unsigned>{Int(3), 2u});
  CHECK(f[2] == std::pair<Int, unsigned>{Int(5), 1u});
  CHECK(exact_sqrt(Int(144)) == Int(12));
  CHECK(!exact_sqrt(Int(145)));
  CHECK(is_rational_square(Rat(49, 64)));
  CHECK(!is_rational_square(Rat(-4)));
  CHECK(is_rational_square(Rat(8, 2)));  // = 4 after reduction
  CHECK(!is_rational_square(Rat(2)));
}

TEST_CASE("primality and places") {
  CHECK(is_prime(Int(2)));
  CHECK(is_prime(Int(101)));
  CHECK(!is_prime(Int(1)));
  CHECK(!is_prime(Int(91)));
  CHECK_THROWS_AS(Place::finite(Int(6)), domain_error);
  CHECK(Place::finite(Int(7)).str() == "7");
  CHECK(Place::infinite().str() == "inf");
}
