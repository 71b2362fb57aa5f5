#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "acyc/ideal.hpp"
#include "acyc/local.hpp"
#include "acyc/numring.hpp"
#include "acyc/quadfield.hpp"
#include "json.hpp"

namespace acyc {

// Character of (Z/N)^x with values zeta_m^e; stored as exponent per residue (-1 if not a unit).
class DirichletChar {
 public:
  DirichletChar() = default;
  static DirichletChar trivial(i64 N);
  // generators with exponents; validates well-definedness and that they generate
  static DirichletChar from_generators(i64 N, i64 order, const std::vector<std::pair<i64, i64>>& gens);
  i64 modulus() const { return N_; }
  i64 order() const { return m_; }
  std::optional<i64> exponent(i64 n) const;  // nullopt when gcd(n, N) > 1
  bool is_trivial() const;
  i64 conductor() const;
  DirichletChar inverse() const;

 private:
  i64 N_ = 1, m_ = 1;
  std::vector<i64> e_{0};
};

struct ClassValue {
  QuadForm form;
  Num value;
};

// psi((a)) = eps(a) a^{k-1} on principal ideals prime to f; psi on class generators given explicitly.
class GrossenChar {
 public:
  static GrossenChar from_json(const nlohmann::json& j);
  static GrossenChar from_file(const std::string& path);
  nlohmann::json to_json() const;

  i64 D() const { return D_; }
  int k() const { return k_; }
  const QuadForm& conductor_form() const { return cond_; }
  const Ideal& conductor() const { return f_; }
  i64 conductor_norm() const { return f_.norm(); }
  i64 level() const { return f_.norm() * (-D_); }
  const DirichletChar& finite_part() const { return eps_; }
  const DirichletChar& central_character() const { return eps_; }  // chi(n) = eps(n mod N f)
  const Cyclo& cyclo() const { return cyc_; }
  const NumberRing& ring() const { return cyc_.R; }
  const Num& sqrtD() const { return sqrtD_; }
  const IdealArith& ideals() const { return I_; }
  const ClassGroup& class_group() const { return cg_; }
  const std::vector<ClassValue>& class_values() const { return cv_; }

  bool coprime_to_conductor(const Ideal& a) const { return I_.coprime(a, f_); }
  Num eval(const Ideal& a) const;            // DomainError if not prime to f
  Num eval_principal(const QElt& a) const;   // eps(a) a^{k-1}
  Num chi(i64 n) const;                      // 0 when not coprime to N f
  Num eps_value(const QElt& a) const;        // DomainError when not prime to f
  i64 eps_residue(const QElt& a) const;      // a mod f in Z/N

  // a * prod conj(g_i)^{e_i} = (delta)
  struct Principalization {
    QElt delta;
    std::vector<i64> exps;
  };
  Principalization principalize(const Ideal& a) const;

 private:
  i64 D_ = -3;
  int k_ = 2;
  QuadForm cond_;
  Ideal f_;
  i64 wf_ = 0;  // w mod f
  DirichletChar eps_;
  Cyclo cyc_;
  Num sqrtD_;
  IdealArith I_{-3};
  ClassGroup cg_;
  std::vector<ClassValue> cv_;
  std::vector<Ideal> gen_ideals_, gen_conj_;
  std::vector<i64> gen_orders_;
  std::map<AbelianGroup::Elem, std::vector<i64>> exps_of_class_;
  nlohmann::json source_;
  void validate() const;
};

// iota o psi for a place of the value ring above the designated prime over p
class PAdicAvatar {
 public:
  PAdicAvatar(const GrossenChar& psi, i64 p, int precision);
  const Place& place() const { return place_; }
  const PrimeSplit& split() const { return sp_; }
  Ideal prime() const;      // the designated prime above p
  Ideal prime_bar() const;  // its conjugate
  LElem eval(const Ideal& a) const;
  std::optional<Rat> ord(const Ideal& a) const;

 private:
  const GrossenChar* psi_;
  PrimeSplit sp_;
  Place place_;
};

// psi = alpha * psi0^{k-1}, psi0((b)) = <iota(b)>, alpha((b)) = eps(b) omega(iota b)^{k-1}
class CMDecomposition {
 public:
  CMDecomposition(const GrossenChar& psi, i64 p, int precision, ArtinNormalization artin = ArtinNormalization::Geometric);
  const GrossenChar& psi() const { return *psi_; }
  const PAdicAvatar& avatar() const { return av_; }
  const LocalRing& local() const { return av_.place().local(); }
  i64 p() const { return p_; }
  int k() const { return psi_->k(); }
  ArtinNormalization artin() const { return artin_; }
  LElem iota(const QElt& a) const;
  LElem teich(const LElem& u) const;         // omega
  LElem one_unit_part(const LElem& u) const;  // <u> = u / omega(u)
  LElem psi0(const Ideal& a) const;           // a prime to P
  LElem alpha(const Ideal& a) const;          // a prime to f P
  LElem alpha_principal(const QElt& b) const;
  LElem recombine(const Ideal& a, int kprime) const;  // alpha * psi0^{k'-1}
  // restriction of alpha*psi0 to local units at P, evaluated at an integer unit g (mod P)
  LElem local_unit_restriction(i64 g) const;

 private:
  const GrossenChar* psi_;
  i64 p_;
  ArtinNormalization artin_;
  PAdicAvatar av_;
  std::vector<LElem> psi0_gen_, alpha_gen_;
};

bool is_non_eisenstein_p_distinguished(const CMDecomposition& dec, i64 p);

struct GoodPrimeReport {
  bool good = false;
  std::vector<std::pair<std::string, bool>> conditions;
  nlohmann::json to_json() const;
};

GoodPrimeReport is_good_prime(i64 conductor_norm, i64 g_level, i64 h_level, i64 p, bool quaternion_unramified,
                              bool adelic_image);

}  // namespace acyc
