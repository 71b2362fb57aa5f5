#include <random>

#include "acyc/group_algebra.hpp"
#include "acyc/qexp.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace acyc;

namespace {

const GrossenChar& d7() {
  static GrossenChar g = GrossenChar::from_file(oracle::data_path("chars/d7_k2.json"));
  return g;
}
const GrossenChar& d23() {
  static GrossenChar g = GrossenChar::from_file(oracle::data_path("chars/d23_k2.json"));
  return g;
}

NumGroupAlg random_elem(std::mt19937_64& rng, const NumCoeffs& C, const AbelianGroup& G) {
  auto x = NumGroupAlg::zero(C, G);
  auto els = G.elements();
  for (int t = 0; t < 4; ++t) {
    std::vector<Rat> c;
    for (size_t i = 0; i < C.R.degree(); ++i) c.emplace_back(static_cast<long>(rng() % 11) - 5);
    x.add_term(els[rng() % els.size()], C.R.from_coeffs(c));
  }
  return x;
}

}  // namespace

TEST_CASE("group algebra ring identities") {
  NumCoeffs Z{NumberRing(std::vector<BigInt>{0, 1})};
  AbelianGroup G({3, 9});
  auto one = NumGroupAlg::one(Z, G);
  AbelianGroup::Elem g{1, 4};
  auto bg = one.basis(g, Z.one());
  auto x = one.basis({2, 7}, Z.R.from_int(5)) + bg;
  CHECK(x * one == x);
  CHECK(bg * one.basis(G.neg(g), Z.one()) == one);
  CHECK((one + bg) * (one - bg) == one - one.basis(G.add(g, g), Z.one()));
  CHECK(bg.pow(9) == one);
  CHECK(bg.pow(3) != one);
  CHECK((x - x).is_zero());
  CHECK_THROWS_AS(x * NumGroupAlg::one(Z, AbelianGroup({3})), DomainError);
  CHECK_THROWS_AS(one.basis({3, 0}, Z.one()), DomainError);

  std::mt19937_64 rng(3);
  NumCoeffs Q7{NumberRing(std::vector<BigInt>{7, 0, 1}, "s")};
  for (int t = 0; t < 60; ++t) {
    auto a = random_elem(rng, Q7, G), b = random_elem(rng, Q7, G), c = random_elem(rng, Q7, G);
    CHECK(a * b == b * a);
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK((a * b).augmentation() == a.augmentation() * b.augmentation());
    CHECK((a * b).involution() == a.involution() * b.involution());
  }
}

TEST_CASE("reduction modulo m") {
  NumCoeffs Z{NumberRing(std::vector<BigInt>{0, 1})};
  AbelianGroup G({3});
  std::mt19937_64 rng(11);
  auto x = random_elem(rng, Z, G);
  CHECK(reduce_mod(x, 1).is_zero());
  CHECK_THROWS_AS(reduce_mod(x, 0), DomainError);
  for (i64 q : {7, 13, 31}) {
    auto e = NumGroupAlg::one(Z, G) * Z.R.from_int(q + 1);
    CHECK(reduce_mod(e, q - 1) == NumGroupAlg::one(Z, G) * Z.R.from_int(2));
  }
  for (int t = 0; t < 50; ++t) {
    auto a = random_elem(rng, Z, G), b = random_elem(rng, Z, G);
    for (i64 m : {2, 6, 9}) {
      CHECK(reduce_mod(a * b, m) == reduce_mod(reduce_mod(a, m) * reduce_mod(b, m), m));
      CHECK(reduce_mod(a + b, m) == reduce_mod(reduce_mod(a, m) + reduce_mod(b, m), m));
    }
  }
  auto half = NumGroupAlg::one(Z, G) * Z.R.from_rat(frac(1, 2));
  CHECK(reduce_mod(half, 9) == NumGroupAlg::one(Z, G) * Z.R.from_int(5));
  CHECK_THROWS_AS(reduce_mod(half, 4), DomainError);
}

TEST_CASE("Frobenius of ideals agrees with the prime Frobenius") {
  for (i64 n : {1, 2, 5}) {
    auto r = ring_class_group(Discriminant(-23), n, 3);
    IdealArith I(-23);
    for (i64 q : primes_up_to(200)) {
      auto s = splitting_type(Discriminant(-23), q);
      if (s.tag != SplitTag::Split || gcd64(q, 3 * n * 23) != 1) continue;
      CHECK(frobenius_of_ideal(I.from_form(s.prime), I, r) == frobenius_class(s, r));
      CHECK(frobenius_of_ideal(I.from_form(s.conj), I, r) == frobenius_class(s, r, true));
    }
    // homomorphism on products of ideals
    for (i64 m = 1; m <= 60; ++m)
      for (i64 m2 = 1; m2 <= 30; ++m2) {
        if (gcd64(m * m2, n) != 1) continue;
        auto A = I.ideals_of_norm(m), B = I.ideals_of_norm(m2);
        if (A.empty() || B.empty()) continue;
        CHECK(frobenius_of_ideal(I.mul(A[0], B.back()), I, r) ==
              r.p_part.add(frobenius_of_ideal(A[0], I, r), frobenius_of_ideal(B.back(), I, r)));
      }
  }
}

TEST_CASE("phi(T_q) augments to theta coefficients") {
  struct Case {
    const GrossenChar* g;
    i64 n, p;
  };
  for (auto c : {Case{&d7(), 1, 5}, Case{&d7(), 2, 3}, Case{&d23(), 1, 3}, Case{&d23(), 2, 3}, Case{&d23(), 5, 3}}) {
    const auto& psi = *c.g;
    auto r = ring_class_group(Discriminant(psi.D()), c.n, c.p);
    auto th = theta_series(psi, 900);
    NumCoeffs C{psi.ring()};
    for (i64 q : primes_up_to(100)) {
      if (gcd64(q, c.n) != 1) continue;
      auto x = phi_T(q, psi, r);
      CHECK_MESSAGE(x.augmentation() == th[q], "q=" << q);
      auto s = splitting_type(Discriminant(psi.D()), q);
      if (s.tag == SplitTag::Inert) CHECK(x.is_zero());
      if (r.p_part.is_trivial()) CHECK(x == NumGroupAlg::one(C, r.p_part) * th[q]);
      if (s.tag == SplitTag::Split && gcd64(q, c.p * psi.D()) == 1) {
        auto expect = NumGroupAlg::zero(C, r.p_part).basis(frobenius_class(s, r), psi.eval(psi.ideals().from_form(s.prime))) +
                      NumGroupAlg::zero(C, r.p_part).basis(frobenius_class(s, r, true), psi.eval(psi.ideals().from_form(s.conj)));
        CHECK(x == expect);
      }
    }
    // T_q' T_q'' = T_{q q''}' for distinct primes
    auto ps = primes_up_to(30);
    for (i64 q : ps)
      for (i64 q2 : ps) {
        if (q >= q2 || gcd64(q * q2, c.n) != 1) continue;
        auto prod = phi_T(q, psi, r) * phi_T(q2, psi, r);
        CHECK(prod == phi_T_composite(q * q2, psi, r));
        CHECK(prod.augmentation() == th[q * q2]);
      }
  }
}

TEST_CASE("phi of diamond operators") {
  for (i64 n : {1, 2}) {
    const auto& psi = d23();
    auto r = ring_class_group(Discriminant(-23), n, 3);
    NumCoeffs C{psi.ring()};
    auto one = NumGroupAlg::one(C, r.p_part);
    CHECK(phi_diamond(1, psi, r) == one);
    std::vector<i64> ds;
    for (i64 d = -40; d <= 40; ++d)
      if (gcd64(d, 23 * n) == 1) ds.push_back(d);
    for (i64 d : ds) {
      auto x = phi_diamond(d, psi, r);
      CHECK(x * monomial_inverse(x) == one);
      CHECK(x == one * (psi.chi(d) * Rat(kronecker(-23, d))));
      for (i64 d2 : {-1, 3, 7, 13})
        if (gcd64(d2, 23 * n) == 1) CHECK(phi_diamond(d * d2, psi, r) == x * phi_diamond(d2, psi, r));
    }
    CHECK_THROWS_AS(phi_diamond(23, psi, r), PreconditionError);
  }
  // nontrivial chi eps_K: D = -7, eps of order 2, chi eps_K on -1
  auto r7 = ring_class_group(Discriminant(-7), 1, 5);
  CHECK(phi_diamond(-1, d7(), r7) == NumGroupAlg::one(NumCoeffs{d7().ring()}, r7.p_part) * (d7().chi(-1) * Rat(-1)));
}

TEST_CASE("Artin normalization flips Frobenius in phi") {
  auto rg = ring_class_group(Discriminant(-23), 1, 3);
  auto ra = ring_class_group(Discriminant(-23), 1, 3, ArtinNormalization::Arithmetic);
  for (i64 q : primes_up_to(80)) CHECK(phi_T(q, d23(), ra) == phi_T(q, d23(), rg).involution());
}
