#include <map>
#include <random>

#include "acyc/quadfield.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace acyc;

namespace {

// number of x with m x = 0, from the multiplication table
i64 torsion_count_by_table(const ClassGroup& cg, i64 m) {
  i64 cnt = 0;
  for (const auto& f : cg.forms)
    if (form_pow(f, m) == principal_form(cg.disc)) ++cnt;
  return cnt;
}

}  // namespace

TEST_CASE("reduction and composition basics") {
  CHECK(reduce(QuadForm{3, 1, 2}) == QuadForm{2, -1, 3});
  CHECK(reduce(QuadForm{2, -1, 3}).is_reduced());
  CHECK(principal_form(-23) == QuadForm{1, 1, 6});
  CHECK(principal_form(-4) == QuadForm{1, 0, 1});
  auto f = QuadForm{2, 1, 3};
  CHECK(compose(f, form_inverse(f)) == principal_form(-23));
  CHECK(compose(f, f) == QuadForm{2, -1, 3});
  CHECK(form_pow(f, 3) == principal_form(-23));
  CHECK_THROWS_AS(reduced_forms(-5), InputError);
  CHECK_THROWS_AS(class_group(5), InputError);
}

TEST_CASE("class group examples") {
  CHECK(class_group(-23).invariants() == std::vector<i64>{3});
  CHECK(class_group(-4).is_trivial());
  CHECK(class_group(-3).is_trivial());
  CHECK(reduced_forms(-23) == std::vector<QuadForm>{{1, 1, 6}, {2, -1, 3}, {2, 1, 3}});
}

TEST_CASE("class group orders match brute force for |disc| <= 500") {
  for (i64 disc = -3; disc >= -500; --disc) {
    if (mod64(disc, 4) > 1) continue;
    auto cg = class_group_data(disc);
    CHECK_MESSAGE(cg.group.order() == oracle::brute_reduced_count(disc), "disc=" << disc);
  }
}

TEST_CASE("class group structure agrees with torsion counts from the table") {
  for (i64 disc : {-84, -420, -231, -1155, -3 * 49, -23 * 81, -56, -4 * 25 * 9, -7 * 64}) {
    auto cg = class_group_data(disc);
    for (i64 m = 1; m <= 12; ++m) {
      i64 from_inv = 1;
      for (i64 d : cg.group.invariants()) from_inv *= gcd64(m, d);
      CHECK_MESSAGE(from_inv == torsion_count_by_table(cg, m), "disc=" << disc << " m=" << m);
    }
  }
}

TEST_CASE("class map is a homomorphism; composition axioms") {
  for (i64 disc : {-23 * 4, -84, -420, -47, -7 * 121}) {
    auto cg = class_group_data(disc);
    const auto& G = cg.group;
    for (const auto& f : cg.forms)
      for (const auto& g : cg.forms) {
        CHECK(cg.class_of(compose(f, g)) == G.add(cg.class_of(f), cg.class_of(g)));
        CHECK(compose(f, g) == compose(g, f));
        for (const auto& h : cg.forms) CHECK(compose(compose(f, g), h) == compose(f, compose(g, h)));
      }
    for (const auto& f : cg.forms) {
      CHECK(compose(f, principal_form(disc)) == f);
      CHECK(form_pow(f, G.order()) == principal_form(disc));
    }
  }
}

TEST_CASE("ring class group orders: fundamental |D| <= 300, n <= 10") {
  for (i64 D = -3; D >= -300; --D) {
    if (!is_fundamental_discriminant(D)) continue;
    for (i64 n = 1; n <= 10; ++n) {
      auto cg = class_group_data(D * n * n);
      CHECK(cg.group.order() == oracle::brute_reduced_count(D * n * n));
      CHECK(cg.group.order() == oracle::class_number_formula(D, n));
    }
  }
}

TEST_CASE("ring class group p-parts") {
  CHECK(ring_class_group(Discriminant(-7), 1, 5).p_part.is_trivial());
  CHECK(ring_class_group(Discriminant(-23), 1, 3).p_part.invariants() == std::vector<i64>{3});
  CHECK(ring_class_group(Discriminant(-23), 1, 5).p_part.is_trivial());
  CHECK_THROWS_AS(ring_class_group(Discriminant(-23), 3, 3), PreconditionError);
  CHECK_THROWS_AS(Discriminant(-12), InputError);
  // |p_part| is the p-part of |full| and projection is a surjective homomorphism
  for (i64 D : {-23, -31, -7, -4, -3, -87}) {
    for (i64 n : {1, 2, 4, 5, 7, 8}) {
      for (i64 p : {3, 5, 7}) {
        if (n % p == 0) continue;
        auto r = ring_class_group(Discriminant(D), n, p);
        i64 h = r.full_group().order(), pp = 1;
        while (h % p == 0) {
          h /= p;
          pp *= p;
        }
        CHECK(r.p_part.order() == pp);
        std::map<AbelianGroup::Elem, int> hit;
        for (const auto& f : r.full.forms) {
          hit[r.form_to_class.at(f)]++;
          for (const auto& g : r.full.forms)
            CHECK(r.class_of_form(compose(f, g)) == r.p_part.add(r.class_of_form(f), r.class_of_form(g)));
        }
        CHECK(static_cast<i64>(hit.size()) == r.p_part.order());
      }
    }
  }
}

TEST_CASE("splitting type") {
  CHECK(splitting_type(Discriminant(-7), 2).tag == SplitTag::Split);
  CHECK(splitting_type(Discriminant(-7), 7).tag == SplitTag::Ramified);
  CHECK(splitting_type(Discriminant(-7), 5).tag == SplitTag::Inert);
  CHECK_THROWS_AS(splitting_type(Discriminant(-7), 9), InputError);
  for (i64 D : {-3, -4, -7, -8, -23, -47, -84, -163}) {
    for (i64 q : primes_up_to(200)) {
      auto s = splitting_type(Discriminant(D), q);
      int sols = 0;
      for (i64 x = 0; x < 4 * q; ++x)
        if (mod64(x * x - D, 4 * q) == 0) ++sols;
      if (D % q == 0)
        CHECK(s.tag == SplitTag::Ramified);
      else
        CHECK((s.tag == SplitTag::Split) == (sols > 0));
      if (s.tag != SplitTag::Inert) {
        CHECK(s.prime.disc() == D);
        CHECK(s.conj.disc() == D);
        CHECK(compose(s.prime, s.conj) == principal_form(D));
      }
    }
  }
}

TEST_CASE("frobenius classes") {
  auto r = ring_class_group(Discriminant(-23), 1, 3);
  auto s2 = splitting_type(Discriminant(-23), 2);
  auto f2 = frobenius_class(s2, r);
  CHECK(f2 == r.class_of_form(QuadForm{2, 1, 3}));
  CHECK(r.p_part.element_order(f2) == 3);
  auto sq = r.class_of_form(compose(QuadForm{2, 1, 3}, QuadForm{2, 1, 3}));
  CHECK(r.p_part.add(f2, f2) == sq);
  CHECK_THROWS(frobenius_class(splitting_type(Discriminant(-23), 5), r));
  CHECK_THROWS(frobenius_class(splitting_type(Discriminant(-23), 23), r));
  auto ra = ring_class_group(Discriminant(-23), 1, 3, ArtinNormalization::Arithmetic);
  CHECK(frobenius_class(s2, ra) == r.p_part.neg(f2));
  // principal split primes: represented by x^2 + xy + 6y^2
  for (i64 q : primes_up_to(300)) {
    auto s = splitting_type(Discriminant(-23), q);
    if (s.tag != SplitTag::Split || q == 3) continue;
    bool principal = false;
    for (i64 x = -40; x <= 40; ++x)
      for (i64 y = -40; y <= 40; ++y)
        if (x * x + x * y + 6 * y * y == q) principal = true;
    CHECK((frobenius_class(s, r) == r.p_part.identity()) == principal);
  }
}

TEST_CASE("Fr * Frbar = 1 on 50 random split primes") {
  std::mt19937_64 rng(20261014);
  auto primes = primes_up_to(3000);
  int done = 0;
  std::vector<i64> Ds;
  for (i64 D = -3; D >= -300; --D)
    if (is_fundamental_discriminant(D)) Ds.push_back(D);
  while (done < 50) {
    i64 D = Ds[rng() % Ds.size()];
    i64 n = 1 + static_cast<i64>(rng() % 10);
    i64 p = std::vector<i64>{3, 5, 7}[rng() % 3];
    if (n % p == 0) continue;
    i64 q = primes[rng() % primes.size()];
    auto s = splitting_type(Discriminant(D), q);
    if (s.tag != SplitTag::Split || gcd64(q, n * p * D) != 1) continue;
    auto r = ring_class_group(Discriminant(D), n, p);
    CHECK(r.p_part.add(frobenius_class(s, r), frobenius_class(s, r, true)) == r.p_part.identity());
    // and the full Pic class of q-meet-O_n times its conjugate is trivial
    auto a = r.full.class_of(prime_form_in_order(s, n, false));
    auto b = r.full.class_of(prime_form_in_order(s, n, true));
    CHECK(r.full_group().add(a, b) == r.full_group().identity());
    ++done;
  }
}
