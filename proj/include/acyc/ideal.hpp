#pragma once

#include <optional>
#include <string>
#include <vector>

#include "acyc/numring.hpp"
#include "acyc/quadfield.hpp"

namespace acyc {

// x + y*w in O_K, w = (D + sqrt D)/2, w^2 = D w - (D^2 - D)/4
struct QElt {
  i64 x = 0, y = 0;
  auto operator<=>(const QElt&) const = default;
};

class QuadOrder {
 public:
  explicit QuadOrder(i64 D) : D_(D), n0_((D * D - D) / 4) {}
  i64 D() const { return D_; }
  QElt mul(const QElt& a, const QElt& b) const;
  QElt add(const QElt& a, const QElt& b) const { return {a.x + b.x, a.y + b.y}; }
  QElt sub(const QElt& a, const QElt& b) const { return {a.x - b.x, a.y - b.y}; }
  QElt conj(const QElt& a) const { return {a.x + a.y * D_, -a.y}; }
  QElt pow(const QElt& a, i64 e) const;
  i64 norm(const QElt& a) const;
  i64 trace(const QElt& a) const { return 2 * a.x + a.y * D_; }
  std::vector<QElt> units() const;
  // image in a number ring where sqrtD is given
  Num embed(const QElt& a, const Num& sqrtD) const;
  std::string str(const QElt& a) const;

 private:
  i64 D_, n0_;
};

// Z-lattice {A, B + C w} with C | A, C | B, 0 <= B < A; norm A*C
struct Ideal {
  i64 A = 1, B = 0, C = 1;
  auto operator<=>(const Ideal&) const = default;
  i64 norm() const { return A * C; }
  bool is_unit() const { return A == 1 && C == 1; }
  std::string str() const;
};

class IdealArith {
 public:
  explicit IdealArith(i64 D) : O_(D) {}
  const QuadOrder& order() const { return O_; }
  Ideal unit() const { return Ideal{}; }
  Ideal from_generators(const std::vector<QElt>& gens) const;  // O-ideal generated
  Ideal principal(const QElt& a) const;
  Ideal from_form(const QuadForm& f) const;  // [a, (-b + sqrt D)/2]
  Ideal mul(const Ideal& I, const Ideal& J) const;
  Ideal sum(const Ideal& I, const Ideal& J) const;
  Ideal pow(const Ideal& I, i64 e) const;
  Ideal conj(const Ideal& I) const;
  bool contains(const Ideal& I, const QElt& a) const;
  bool coprime(const Ideal& I, const Ideal& J) const { return sum(I, J).is_unit(); }
  bool divides(const Ideal& I, const Ideal& J) const;  // I | J
  i64 content(const Ideal& I) const;
  QuadForm primitive_form(const Ideal& I) const;  // form of I / content
  // generator of I if principal (shortest vector for the norm form)
  std::optional<QElt> generator(const Ideal& I) const;
  // all ideals of norm m
  std::vector<Ideal> ideals_of_norm(i64 m) const;

 private:
  QuadOrder O_;
  Ideal hnf(std::vector<QElt> v) const;
};

}  // namespace acyc
