#pragma once

#include <map>
#include <string>
#include <vector>

#include "acyc/hecke.hpp"
#include "json.hpp"

namespace acyc {

// Dirichlet character mod N with values in a number ring; zero away from units.
struct Nebentypus {
  i64 modulus = 1;
  std::vector<Num> values;  // indexed by n mod N
  std::string descriptor;
  Num at(i64 n) const;
  Nebentypus lift(i64 M) const;  // same character viewed mod M (N | M)
  static Nebentypus from_dirichlet(const DirichletChar& c, const Cyclo& cyc, std::string descriptor);
};

struct QExpansion {
  NumberRing ring;
  std::vector<Num> a;  // a[0..B]
  i64 level = 1;
  int weight = 2;
  Nebentypus neb;
  i64 bound() const { return static_cast<i64>(a.size()) - 1; }
  const Num& operator[](i64 m) const;
  nlohmann::json to_json() const;
};

// a_m = sum over ideals prime to f of norm m of psi; computed through the Euler product.
QExpansion theta_series(const GrossenChar& psi, i64 B);

// a_m(f) - beta a_{m/p}(f); requires p prime to the level and beta a root of X^2 - a_p X + neb(p) p^{k-1}.
QExpansion p_stabilize(const QExpansion& f, const Num& beta, i64 p);

// a_q a_m = a_{qm} + neb(q) q^{k-1} a_{m/q} for all qm <= B; needs B >= q^2.
bool hecke_eigen_check(const QExpansion& f, i64 q);

// q^{sum d r / 24} prod_d prod_n (1 - q^{dn})^{r}; integer coefficients a_0..a_B
std::vector<BigInt> eta_product(const std::vector<std::pair<i64, i64>>& factors, i64 B);

// Specializations a_m(f_{k'}) = sum over ideals of norm m prime to f P of alpha psi0^{k'-1}.
class CMFamily {
 public:
  explicit CMFamily(const CMDecomposition& dec) : dec_(&dec) {}
  const CMDecomposition& decomposition() const { return *dec_; }
  i64 tame_level() const { return dec_->psi().level(); }
  LElem coeff(int kprime, i64 m) const;
  std::vector<LElem> expansion(int kprime, i64 B) const;  // index 0..B

 private:
  const CMDecomposition* dec_;
};

LElem cm_family_coeff(const CMDecomposition& dec, int kprime, i64 q);

// Root bound |sigma(x)| <= bound for every complex embedding, via the characteristic polynomial.
bool all_embeddings_bounded(const Num& x, double bound);

struct NewformData {
  std::string label;
  i64 level = 1;
  int weight = 2;
  DirichletChar chi;
  Cyclo field;  // coefficient field; zeta generates the character values
  std::map<i64, Num> ap;
  std::vector<Num> an;  // optional a_1..a_B (index 0 unused)
  std::string source;   // lmfdb | fixture

  Num a(i64 q) const;  // a_q for prime q, or a_n from an
  Num chi_value(i64 n) const;
  i64 bound() const;
  QExpansion expansion() const;  // requires an
  nlohmann::json to_json() const;
  // Schema: label, level, weight, char_order, char_values [N, order, gens, exps], field_poly,
  // optional zeta, an or ap as coefficient lists (optionally in a hecke_ring basis).
  static NewformData from_json(const nlohmann::json& j, const std::string& source);
  // Ramanujan bound and character parity; throws InputError naming the check.
  void validate() const;
};

}  // namespace acyc
