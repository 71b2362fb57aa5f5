#pragma once

#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "acyc/hecke.hpp"
#include "acyc/local.hpp"
#include "acyc/numring.hpp"
#include "acyc/quadfield.hpp"

namespace acyc {

// Coefficient rings. Each exposes T, zero, one, add, mul, neg, is_zero, str.
struct NumCoeffs {
  NumberRing R;
  using T = Num;
  T zero() const { return R.zero(); }
  T one() const { return R.one(); }
  T add(const T& a, const T& b) const { return a + b; }
  T mul(const T& a, const T& b) const { return a * b; }
  T neg(const T& a) const { return -a; }
  bool is_zero(const T& a) const { return a.is_zero(); }
  std::string str(const T& a) const { return a.str(); }
};

struct LocalCoeffs {
  const LocalRing* L;
  using T = LElem;
  T zero() const { return L->zero(); }
  T one() const { return L->one(); }
  T add(const T& a, const T& b) const { return L->add(a, b); }
  T mul(const T& a, const T& b) const { return L->mul(a, b); }
  T neg(const T& a) const { return L->neg(a); }
  bool is_zero(const T& a) const { return L->is_zero(a); }
  std::string str(const T& a) const { return L->str(a); }
};

// Element of Coeffs[G] for a finite abelian group G; zero coefficients are never stored.
template <class Coeffs>
class GroupAlgElem {
 public:
  using T = typename Coeffs::T;
  using G = AbelianGroup::Elem;

  GroupAlgElem(Coeffs ring, AbelianGroup group) : ctx_(std::make_shared<Ctx>(Ctx{std::move(ring), std::move(group)})) {}

  static GroupAlgElem zero(Coeffs ring, AbelianGroup group) { return GroupAlgElem(std::move(ring), std::move(group)); }
  static GroupAlgElem one(Coeffs ring, AbelianGroup group) {
    GroupAlgElem x(std::move(ring), std::move(group));
    x.add_term(x.group().identity(), x.ring().one());
    return x;
  }
  GroupAlgElem basis(const G& g, const T& c) const {
    GroupAlgElem x = empty_like();
    x.add_term(g, c);
    return x;
  }
  GroupAlgElem scalar(const T& c) const { return basis(group().identity(), c); }

  const Coeffs& ring() const { return ctx_->ring; }
  const AbelianGroup& group() const { return ctx_->group; }
  const std::map<G, T>& terms() const { return c_; }
  bool is_zero() const { return c_.empty(); }
  T coeff(const G& g) const {
    auto it = c_.find(g);
    return it == c_.end() ? ring().zero() : it->second;
  }

  void add_term(const G& g, const T& a) {
    if (!group().contains(g)) throw DomainError("group algebra: element outside the group");
    auto it = c_.find(g);
    T v = it == c_.end() ? a : ring().add(it->second, a);
    if (ring().is_zero(v)) {
      if (it != c_.end()) c_.erase(it);
    } else {
      c_[g] = v;
    }
  }

  GroupAlgElem operator+(const GroupAlgElem& o) const {
    check(o);
    GroupAlgElem r = *this;
    for (auto& [g, a] : o.c_) r.add_term(g, a);
    return r;
  }
  GroupAlgElem operator-() const {
    GroupAlgElem r = empty_like();
    for (auto& [g, a] : c_) r.add_term(g, ring().neg(a));
    return r;
  }
  GroupAlgElem operator-(const GroupAlgElem& o) const { return *this + (-o); }
  GroupAlgElem operator*(const GroupAlgElem& o) const {
    check(o);
    GroupAlgElem r = empty_like();
    for (auto& [g, a] : c_)
      for (auto& [h, b] : o.c_) r.add_term(group().add(g, h), ring().mul(a, b));
    return r;
  }
  GroupAlgElem operator*(const T& s) const {
    GroupAlgElem r = empty_like();
    for (auto& [g, a] : c_) r.add_term(g, ring().mul(a, s));
    return r;
  }
  GroupAlgElem pow(i64 e) const {
    if (e < 0) throw DomainError("group algebra: negative power");
    GroupAlgElem r = one(ring(), group()), b = *this;
    while (e > 0) {
      if (e & 1) r = r * b;
      e >>= 1;
      if (e) b = b * b;
    }
    return r;
  }
  // [g] -> [-g]
  GroupAlgElem involution() const {
    GroupAlgElem r = empty_like();
    for (auto& [g, a] : c_) r.add_term(group().neg(g), a);
    return r;
  }
  T augmentation() const {
    T s = ring().zero();
    for (auto& [g, a] : c_) s = ring().add(s, a);
    return s;
  }
  bool operator==(const GroupAlgElem& o) const {
    check(o);
    return (*this - o).is_zero();
  }
  bool operator!=(const GroupAlgElem& o) const { return !(*this == o); }

  std::string str() const {
    if (c_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& [g, a] : c_) {
      if (!first) os << " + ";
      first = false;
      os << "(" << ring().str(a) << ")[";
      for (size_t i = 0; i < g.size(); ++i) os << (i ? "," : "") << g[i];
      os << "]";
    }
    return os.str();
  }

 private:
  struct Ctx {
    Coeffs ring;
    AbelianGroup group;
  };
  std::shared_ptr<const Ctx> ctx_;
  std::map<G, T> c_;

  GroupAlgElem empty_like() const {
    GroupAlgElem r = *this;
    r.c_.clear();
    return r;
  }
  void check(const GroupAlgElem& o) const {
    if (!(group() == o.group())) throw DomainError("group algebra: group mismatch");
  }
};

using NumGroupAlg = GroupAlgElem<NumCoeffs>;
using LocalGroupAlg = GroupAlgElem<LocalCoeffs>;

// Coefficientwise reduction mod m of integral coefficients; canonical representatives in [0, m).
NumGroupAlg reduce_mod(const NumGroupAlg& x, i64 m);

// Inverse of c[g] with c a unit of the value ring; DomainError for non-monomials.
NumGroupAlg monomial_inverse(const NumGroupAlg& x);

// Class in R_n of an ideal of O_K prime to n, oriented by the Artin flag of rcd.
AbelianGroup::Elem frobenius_of_ideal(const Ideal& a, const IdealArith& I, const RingClassData& rcd);

// phi(T_q') = sum over N(Q) = q, (Q, f) = 1 of psi(Q)[Fr_Q] in O[R_n]
NumGroupAlg phi_T(i64 q, const GrossenChar& psi, const RingClassData& rcd);
// image of T_m': sum over ideals of norm m prime to f
NumGroupAlg phi_T_composite(i64 m, const GrossenChar& psi, const RingClassData& rcd);
// phi(<d>') = chi(d) eps_K(d) [(d)]
NumGroupAlg phi_diamond(i64 d, const GrossenChar& psi, const RingClassData& rcd);

}  // namespace acyc
