#include "acyc/euler_checks.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace acyc;
using namespace acyc::euler;

namespace {

Sym P(const std::string& s, int k = 2, int l = 2, int m = 2) {
  SymParseOptions o;
  o.constants = {{"k", Rat(k)}, {"l", Rat(l)}, {"m", Rat(m)}};
  return parse_sym(s, o);
}

NewformData newform(const std::string& label) {
  return NewformData::from_json(oracle::load_json("newforms/" + label + ".json"), "fixture");
}

std::string mutated_split_display() {
  std::string s = displayed_factor(PrimeCase::Split, Mode::Tame, Variant::Literal);
  auto pos = s.find("q^2+1");
  REQUIRE(pos != std::string::npos);
  return s.replace(pos, 5, "q^2+2");
}

}  // namespace

TEST_CASE("split Euler factor coefficients") {
  auto E = euler_factor_split(2, 2, 2);
  CHECK(E.c[0] == Sym(1));
  CHECK(E.c[1] == P("-ag*ah*s*q^-2"));
  CHECK(E.c[4] == P("ug^2*uh^2*s^4*q^-4"));
  // c4 = (ug uh s^2/q^2)^2 and c3 = c1 * ug uh s^2/q^2 for every weight pair
  for (auto [l, m] : std::vector<std::pair<int, int>>{{2, 2}, {4, 2}, {5, 3}, {6, 6}}) {
    auto F = euler_factor_split(2, l, m);
    Sym root = P("ug*uh*s^2*q^-2");
    CHECK(F.c[4] == root * root);
    CHECK(F.c[3] == F.c[1] * root);
    CHECK(F.c[1] * F.c[1] * F.c[4] == F.c[3] * F.c[3]);
  }
  CHECK(E.eval(Sym(0)) == Sym(1));
  CHECK_THROWS_AS(euler_factor_split(2, 3, 2), PreconditionError);
  CHECK_THROWS_AS(euler_factor_split(3, 2, 2), PreconditionError);
  CHECK_THROWS_AS(euler_factor_inert(2, 4, 3), PreconditionError);
}

TEST_CASE("lambda-adic split factor specializes at k = 2") {
  auto L = euler_factor_split(2, 4, 4, Mode::LambdaAdic);
  auto T = euler_factor_split(2, 4, 4, Mode::Tame);
  for (size_t i = 0; i < 5; ++i) CHECK(L.c[i].subst("A", Sym::var("s")) == T.c[i]);
  auto L4 = euler_factor_split(4, 4, 2, Mode::LambdaAdic);
  CHECK(L4.c[1] == P("-ag*ah*q^-2*A*q^-3"));
}

TEST_CASE("inert Euler factor coefficients") {
  auto E = euler_factor_inert(2, 2, 2);
  CHECK(E.c[0] == Sym(1));
  CHECK(E.c[1] == P("-(ag^2/q - 2*ug)*(ah^2/q - 2*uh)*psi/q^2"));
  // a_g = a_h = 0: the odd coefficients become -4 ug uh psi/q^2 and -4 ug^3 uh^3 psi^3/q^6 (not zero)
  auto zero = [](const Sym& x) { return x.subst("ag", Sym(0)).subst("ah", Sym(0)); };
  CHECK(zero(E.c[1]) == P("-4*ug*uh*psi*q^-2"));
  CHECK(zero(E.c[3]) == P("-4*ug^3*uh^3*psi^3*q^-6"));
  CHECK(zero(E.c[2]) == P("6*ug^2*uh^2*psi^2*q^-4"));
}

TEST_CASE("split tame congruence certificates") {
  for (int l : {2, 4, 6}) {
    CAPTURE(l);
    auto c = verify_congruence(PrimeCase::Split, Mode::Tame, {2, l, l});
    CHECK(c.certified);
    CHECK(c.variant == Variant::Literal);
    CHECK(c.residue.is_zero());
    CHECK(c.engine_agrees == true);
    auto j = c.to_json();
    CHECK(j["variant"] == "literal");
    for (uint64_t seed = 0; seed < 4; ++seed) {
      CHECK(replay(j, seed));
      CHECK(oracle::certificate_vanishes(j, seed));
    }
    // the difference itself is not zero: the statement is a congruence
    CHECK(!c.difference.is_zero());
  }
  CHECK_THROWS_AS(verify_congruence(PrimeCase::Split, Mode::Tame, {2, 6, 4}), PreconditionError);
  CHECK_THROWS_AS(verify_congruence(PrimeCase::Split, Mode::Tame, {4, 4, 4}), PreconditionError);
}

TEST_CASE("inert tame congruence certificates") {
  for (int l : {2, 4, 6}) {
    CAPTURE(l);
    auto c = verify_congruence(PrimeCase::Inert, Mode::Tame, {2, l, l});
    CHECK(c.certified);
    CHECK(c.modulus == "q^2 := 1");
    CHECK(c.remark_agrees == true);
    CHECK(c.engine_agrees == true);
    auto j = c.to_json();
    CHECK(replay(j, 11));
    CHECK(oracle::certificate_vanishes(j, 11));
    // the symmetrized display does not satisfy the square congruence
    VerifyOptions o;
    o.display_override = displayed_factor(PrimeCase::Inert, Mode::Tame, Variant::Symmetrized);
    auto s = verify_congruence(PrimeCase::Inert, Mode::Tame, {2, l, l}, o);
    CHECK(!s.certified);
    CHECK(!oracle::certificate_vanishes(s.to_json(), 3));
  }
}

TEST_CASE("lambda-adic certificates and the k = 2 specialization") {
  const std::vector<Weights> ws = {{2, 2, 2}, {2, 4, 4}, {2, 6, 4}, {4, 4, 2}, {6, 4, 4}};
  for (auto c : {PrimeCase::Split, PrimeCase::Inert})
    for (auto w : ws) {
      CAPTURE(w.k);
      CAPTURE(w.l);
      CAPTURE(w.m);
      auto x = verify_congruence(c, Mode::LambdaAdic, w);
      CHECK(x.certified);
      CHECK(x.variant == Variant::Literal);
      CHECK(!x.engine_agrees.has_value());
      CHECK(oracle::certificate_vanishes(x.to_json(), 5));
      if (w.k == 2 && w.l == w.m) {
        auto t = verify_congruence(c, Mode::Tame, w);
        CHECK(specialize_to_tame(x, t).ok());
      }
    }
  CHECK_THROWS_AS(verify_congruence(PrimeCase::Split, Mode::LambdaAdic, {2, 4, 6}), PreconditionError);
}

TEST_CASE("mutation gives a nonzero residue") {
  VerifyOptions o;
  o.display_override = mutated_split_display();
  auto c = verify_congruence(PrimeCase::Split, Mode::Tame, {2, 4, 4}, o);
  CHECK(!c.certified);
  CHECK(c.variant == Variant::Custom);
  CHECK(c.attempts.size() == 1);
  CHECK(c.residue == Sym(1));
  auto j = c.to_json();
  CHECK(j["variant"] == "none");
  CHECK(replay(j, 2));
  CHECK(!oracle::certificate_vanishes(j, 2));
}

TEST_CASE("batch verification preserves order") {
  auto rs = verify_batch({{PrimeCase::Split, Mode::Tame, {2, 2, 2}}, {PrimeCase::Inert, Mode::LambdaAdic, {2, 6, 4}}});
  REQUIRE(rs.size() == 2);
  CHECK(rs[0].prime_case == PrimeCase::Split);
  CHECK(rs[1].w.l == 6);
  CHECK(rs[0].certified);
  CHECK(rs[1].certified);
}

TEST_CASE("numeric instantiation over Q(sqrt(-23)) with R_1 of order 3") {
  auto psi = GrossenChar::from_file(oracle::data_path("chars/d23_k2.json"));
  auto g = newform("11.2.a.a");
  auto cert = verify_congruence(PrimeCase::Split, Mode::Tame, {2, 2, 2});
  RingClassData rcd = ring_class_group(Discriminant(-23), 1, 3);
  REQUIRE(rcd.p_part.order() == 3);
  for (i64 q : {13, 31}) {
    CAPTURE(q);
    auto sp = splitting_type(Discriminant(-23), q);
    REQUIRE(sp.tag == SplitTag::Split);
    // Frobenius is a generator of R_1
    CHECK(frobenius_class(sp, rcd) != rcd.p_part.identity());
    auto r = numeric_instantiate(cert, psi, g, g, q, 3, 1, 8);
    CHECK(r.equal);
    CHECK(r.v == Rat(1));
    CHECK(r.warnings.empty());
    CHECK(r.lhs != r.rhs);
  }
  auto vac = numeric_instantiate(cert, psi, g, g, 2, 3, 1, 8);
  CHECK(vac.equal);
  CHECK(vac.v == Rat(0));
  CHECK(vac.warnings.size() == 1);
  // a perturbed display is detected numerically
  VerifyOptions o;
  o.display_override = "q^(l+m-4)*( ug*uh*q*(s/q)^2*F^-2 - ag*ah/q^((l+m-4)/2)*(s/q)*F^-1 + ug^-1*ag^2/q^(l-1)"
                       " + uh^-1*ah^2/q^(m-2) - (q^2+2)/q - ag*ah/q^((l+m-4)/2)*(sb/q)*F + ug*uh*q*(sb/q)^2*F^2 )";
  auto bad = verify_congruence(PrimeCase::Split, Mode::Tame, {2, 2, 2}, o);
  CHECK(!numeric_instantiate(bad, psi, g, g, 13, 3, 1, 8).equal);
  CHECK_THROWS_AS(numeric_instantiate(cert, psi, g, g, 5, 3, 1, 8), PreconditionError);  // 5 inert in Q(sqrt(-23))
}
