#include "acyc/group_algebra.hpp"

namespace acyc {

NumGroupAlg reduce_mod(const NumGroupAlg& x, i64 m) {
  if (m <= 0) throw DomainError("reduce_mod: modulus must be >= 1");
  const NumberRing& R = x.ring().R;
  NumGroupAlg r = NumGroupAlg::zero(x.ring(), x.group());
  const BigInt M = m;
  for (auto& [g, a] : x.terms()) {
    std::vector<Rat> c;
    for (auto& q : a.coeffs()) {
      BigInt den = q.get_den(), inv;
      if (mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), M.get_mpz_t()) == 0 && m > 1)
        throw DomainError("reduce_mod: denominator not invertible mod " + std::to_string(m));
      BigInt v = (q.get_num() * inv) % M;
      if (v < 0) v += M;
      if (m == 1) v = 0;
      c.emplace_back(v);
    }
    r.add_term(g, R.from_coeffs(c));
  }
  return r;
}

NumGroupAlg monomial_inverse(const NumGroupAlg& x) {
  if (x.terms().size() != 1) throw DomainError("monomial_inverse: not a monomial");
  auto& [g, a] = *x.terms().begin();
  return x.basis(x.group().neg(g), a.inverse());
}

AbelianGroup::Elem frobenius_of_ideal(const Ideal& a, const IdealArith& I, const RingClassData& rcd) {
  if (I.order().D() != rcd.D.D) throw DomainError("frobenius_of_ideal: field mismatch");
  if (gcd64(a.norm(), rcd.n) != 1) throw PreconditionError("frobenius_of_ideal: ideal must be prime to the conductor n");
  // the rational content is principal in O_n; the primitive part a = [A, (-b + sqrt D)/2]
  // meets O_n in [A, (-n b + n sqrt D)/2]
  QuadForm f = I.primitive_form(a);
  const i64 n = rcd.n;
  QuadForm g{f.a, n * f.b, n * n * f.c};
  auto e = rcd.class_of_form(g);
  if (rcd.artin == ArtinNormalization::Arithmetic) e = rcd.p_part.neg(e);
  return e;
}

namespace {

void check_same_field(const GrossenChar& psi, const RingClassData& rcd) {
  if (psi.D() != rcd.D.D) throw DomainError("phi: character and ring class group over different fields");
}

}  // namespace

NumGroupAlg phi_T_composite(i64 m, const GrossenChar& psi, const RingClassData& rcd) {
  check_same_field(psi, rcd);
  if (m < 1) throw InputError("phi: index must be >= 1");
  if (gcd64(m, rcd.n) != 1) throw PreconditionError("phi: index must be prime to n");
  NumCoeffs C{psi.ring()};
  NumGroupAlg r = NumGroupAlg::zero(C, rcd.p_part);
  const auto& I = psi.ideals();
  for (const auto& a : I.ideals_of_norm(m))
    if (psi.coprime_to_conductor(a)) r.add_term(frobenius_of_ideal(a, I, rcd), psi.eval(a));
  return r;
}

NumGroupAlg phi_T(i64 q, const GrossenChar& psi, const RingClassData& rcd) {
  if (!is_prime(q)) throw InputError("phi_T: q must be prime");
  check_same_field(psi, rcd);
  if (gcd64(q, rcd.n) != 1) throw PreconditionError("phi_T: q must be prime to n");
  NumCoeffs C{psi.ring()};
  NumGroupAlg r = NumGroupAlg::zero(C, rcd.p_part);
  const auto& I = psi.ideals();
  auto s = splitting_type(Discriminant(psi.D()), q);
  std::vector<Ideal> primes;
  if (s.tag == SplitTag::Split) {
    primes = {I.from_form(s.prime), I.from_form(s.conj)};
  } else if (s.tag == SplitTag::Ramified) {
    primes = {I.from_form(s.prime)};
  }  // inert: no ideal of norm q
  for (const auto& P : primes)
    if (psi.coprime_to_conductor(P)) r.add_term(frobenius_of_ideal(P, I, rcd), psi.eval(P));
  return r;
}

NumGroupAlg phi_diamond(i64 d, const GrossenChar& psi, const RingClassData& rcd) {
  check_same_field(psi, rcd);
  if (gcd64(d, psi.conductor_norm() * psi.D() * rcd.n) != 1) throw PreconditionError("phi_diamond: d must be prime to the modulus");
  NumCoeffs C{psi.ring()};
  const auto& I = psi.ideals();
  Num v = psi.chi(d) * Rat(kronecker(psi.D(), d));
  i64 ad = d < 0 ? -d : d;
  return NumGroupAlg::zero(C, rcd.p_part).basis(frobenius_of_ideal(I.principal(QElt{ad, 0}), I, rcd), v);
}

}  // namespace acyc
