#pragma once

#include <compare>
#include <map>
#include <string>
#include <vector>

#include "acyc/arith.hpp"

namespace acyc {

bool is_fundamental_discriminant(i64 D);

// Fundamental negative discriminant of K = Q(sqrt D).
struct Discriminant {
  i64 D = -3;
  explicit Discriminant(i64 d);
  i64 value() const { return D; }
  int units() const { return D == -3 ? 6 : (D == -4 ? 4 : 2); }
};

// a x^2 + b x y + c y^2, identified with the ideal [a, (-b + sqrt(disc))/2].
struct QuadForm {
  i64 a = 1, b = 0, c = 1;
  i64 disc() const { return b * b - 4 * a * c; }
  bool is_primitive() const;
  bool is_reduced() const;
  auto operator<=>(const QuadForm&) const = default;
  std::string str() const;
};

QuadForm reduce(QuadForm f);
QuadForm compose(const QuadForm& f, const QuadForm& g);  // reduced result
QuadForm form_inverse(const QuadForm& f);                 // reduced result
QuadForm form_pow(const QuadForm& f, i64 e);
QuadForm principal_form(i64 disc);
std::vector<QuadForm> reduced_forms(i64 disc);  // primitive, sorted

// Finite abelian group Z/d1 x ... x Z/dk with d1 | d2 | ... and all di > 1.
class AbelianGroup {
 public:
  using Elem = std::vector<i64>;
  AbelianGroup() = default;
  explicit AbelianGroup(std::vector<i64> invariants);
  const std::vector<i64>& invariants() const { return inv_; }
  i64 order() const;
  size_t rank() const { return inv_.size(); }
  bool is_trivial() const { return inv_.empty(); }
  bool is_cyclic() const { return inv_.size() <= 1; }
  Elem identity() const { return Elem(inv_.size(), 0); }
  Elem add(const Elem& x, const Elem& y) const;
  Elem neg(const Elem& x) const;
  Elem scale(const Elem& x, i64 k) const;
  i64 element_order(const Elem& x) const;
  bool contains(const Elem& x) const;
  std::vector<Elem> elements() const;  // lexicographic enumeration
  size_t index_of(const Elem& x) const;
  bool operator==(const AbelianGroup& o) const { return inv_ == o.inv_; }
  std::string str() const;

 private:
  std::vector<i64> inv_;
};

// Pic of the order of discriminant disc, presented by reduced forms.
struct ClassGroup {
  i64 disc = -3;
  AbelianGroup group;
  std::vector<QuadForm> forms;
  std::map<QuadForm, AbelianGroup::Elem> coords;
  std::map<AbelianGroup::Elem, QuadForm> form_at;

  AbelianGroup::Elem class_of(const QuadForm& f) const;  // reduces first
  const QuadForm& form_of(const AbelianGroup::Elem& e) const;
};

ClassGroup class_group_data(i64 disc);
AbelianGroup class_group(i64 disc);

enum class ArtinNormalization { Geometric, Arithmetic };
std::string to_string(ArtinNormalization a);
ArtinNormalization artin_from_string(const std::string& s);

struct RingClassData {
  Discriminant D{-3};
  i64 n = 1, p = 3;
  ArtinNormalization artin = ArtinNormalization::Geometric;
  ClassGroup full;          // Pic(O_n)
  AbelianGroup p_part;      // R_n
  std::vector<size_t> p_slots;  // which invariant factors of full carry p-torsion
  std::map<QuadForm, AbelianGroup::Elem> form_to_class;

  const AbelianGroup& full_group() const { return full.group; }
  AbelianGroup::Elem project(const AbelianGroup::Elem& x) const;
  AbelianGroup::Elem class_of_form(const QuadForm& f) const;  // into p_part
};

RingClassData ring_class_group(const Discriminant& D, i64 n, i64 p,
                               ArtinNormalization artin = ArtinNormalization::Geometric);

enum class SplitTag { Split, Inert, Ramified };
std::string to_string(SplitTag t);

struct PrimeSplit {
  SplitTag tag = SplitTag::Inert;
  i64 q = 2;
  i64 D = -3;
  i64 b = 0;          // sqrt(D) = b mod the designated prime; b^2 = D mod 4q
  QuadForm prime;     // designated prime above q (split or ramified)
  QuadForm conj;      // its conjugate
};

PrimeSplit splitting_type(const Discriminant& D, i64 q);

// Form of discriminant D n^2 attached to (designated prime above q) meet O_n.
QuadForm prime_form_in_order(const PrimeSplit& s, i64 n, bool conjugate);

AbelianGroup::Elem frobenius_class(const PrimeSplit& s, const RingClassData& rcd, bool conjugate = false);

}  // namespace acyc
