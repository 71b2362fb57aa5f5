#include "acyc/ideal.hpp"

#include <algorithm>
#include <sstream>

namespace acyc {

namespace {
using i128 = __int128;
i64 narrow(i128 v) {
  if (v > INT64_MAX || v < INT64_MIN) throw RangeError("ideal arithmetic overflow");
  return static_cast<i64>(v);
}
}  // namespace

QElt QuadOrder::mul(const QElt& a, const QElt& b) const {
  i128 yy = static_cast<i128>(a.y) * b.y;
  i128 x = static_cast<i128>(a.x) * b.x - yy * n0_;
  i128 y = static_cast<i128>(a.x) * b.y + static_cast<i128>(a.y) * b.x + yy * D_;
  return {narrow(x), narrow(y)};
}

QElt QuadOrder::pow(const QElt& a, i64 e) const {
  if (e < 0) throw DomainError("QElt pow: negative exponent");
  QElt r{1, 0}, b = a;
  while (e > 0) {
    if (e & 1) r = mul(r, b);
    e >>= 1;
    if (e) b = mul(b, b);
  }
  return r;
}

i64 QuadOrder::norm(const QElt& a) const {
  i128 v = static_cast<i128>(a.x) * a.x + static_cast<i128>(D_) * a.x * a.y + static_cast<i128>(n0_) * a.y * a.y;
  return narrow(v);
}

std::vector<QElt> QuadOrder::units() const {
  std::vector<QElt> u;
  for (i64 y = -1; y <= 1; ++y)
    for (i64 x = D_ - 2; x <= 2 - D_; ++x) {
      QElt e{x, y};
      if (norm(e) == 1) u.push_back(e);
    }
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end()), u.end());
  return u;
}

Num QuadOrder::embed(const QElt& a, const Num& sqrtD) const {
  // x + y (D + sqrtD)/2
  NumberRing R = sqrtD.ring();
  return R.from_rat(frac(2 * a.x + a.y * D_, 2)) + sqrtD * frac(a.y, 2);
}

std::string QuadOrder::str(const QElt& a) const {
  std::ostringstream os;
  os << a.x << (a.y < 0 ? "-" : "+") << (a.y < 0 ? -a.y : a.y) << "w";
  return os.str();
}

std::string Ideal::str() const {
  std::ostringstream os;
  os << "[" << A << ", " << B << "+" << C << "w]";
  return os.str();
}

Ideal IdealArith::hnf(std::vector<QElt> v) const {
  // Euclid on the w-coordinates
  while (true) {
    size_t nz = 0, i0 = 0, i1 = 0;
    for (size_t i = 0; i < v.size(); ++i)
      if (v[i].y != 0) {
        if (nz == 0) i0 = i;
        if (nz == 1) i1 = i;
        ++nz;
      }
    if (nz <= 1) break;
    if (std::abs(v[i0].y) > std::abs(v[i1].y)) std::swap(i0, i1);
    i64 q = v[i1].y / v[i0].y;
    v[i1] = O_.sub(v[i1], QElt{narrow(static_cast<i128>(q) * v[i0].x), narrow(static_cast<i128>(q) * v[i0].y)});
  }
  i64 A = 0;
  QElt piv{0, 0};
  for (auto& e : v) {
    if (e.y != 0)
      piv = e;
    else
      A = gcd64(A, e.x);
  }
  if (A == 0 || piv.y == 0) throw DomainError("hnf: lattice not of full rank");
  if (piv.y < 0) piv = QElt{-piv.x, -piv.y};
  return Ideal{A, mod64(piv.x, A), piv.y};
}

Ideal IdealArith::from_generators(const std::vector<QElt>& gens) const {
  std::vector<QElt> v;
  const QElt w{0, 1};
  for (auto& g : gens) {
    v.push_back(g);
    v.push_back(O_.mul(g, w));
  }
  return hnf(v);
}

Ideal IdealArith::principal(const QElt& a) const {
  if (a.x == 0 && a.y == 0) throw DomainError("principal ideal of zero");
  return from_generators({a});
}

Ideal IdealArith::from_form(const QuadForm& f) const {
  if (f.disc() != O_.D()) throw DomainError("from_form: discriminant mismatch");
  // (-b + sqrt D)/2 = (-b - D)/2 + w
  i64 t = (-f.b - O_.D()) / 2;
  Ideal I = hnf({QElt{f.a, 0}, QElt{t, 1}});
  if (!(from_generators({QElt{f.a, 0}, QElt{t, 1}}) == I)) throw DomainError("from_form: lattice is not an ideal");
  return I;
}

Ideal IdealArith::mul(const Ideal& I, const Ideal& J) const {
  QElt a1{I.A, 0}, a2{I.B, I.C}, b1{J.A, 0}, b2{J.B, J.C};
  return hnf({O_.mul(a1, b1), O_.mul(a1, b2), O_.mul(a2, b1), O_.mul(a2, b2)});
}

Ideal IdealArith::sum(const Ideal& I, const Ideal& J) const { return hnf({{I.A, 0}, {I.B, I.C}, {J.A, 0}, {J.B, J.C}}); }

Ideal IdealArith::pow(const Ideal& I, i64 e) const {
  if (e < 0) throw DomainError("ideal pow: negative exponent");
  Ideal r = unit(), b = I;
  while (e > 0) {
    if (e & 1) r = mul(r, b);
    e >>= 1;
    if (e) b = mul(b, b);
  }
  return r;
}

Ideal IdealArith::conj(const Ideal& I) const { return hnf({O_.conj({I.A, 0}), O_.conj({I.B, I.C})}); }

bool IdealArith::contains(const Ideal& I, const QElt& a) const {
  if (a.y % I.C != 0) return false;
  i128 x = static_cast<i128>(a.x) - static_cast<i128>(a.y / I.C) * I.B;
  return x % I.A == 0;
}

bool IdealArith::divides(const Ideal& I, const Ideal& J) const {
  return contains(I, QElt{J.A, 0}) && contains(I, QElt{J.B, J.C});
}

i64 IdealArith::content(const Ideal& I) const { return gcd64(gcd64(I.A, I.B), I.C); }

QuadForm IdealArith::primitive_form(const Ideal& I) const {
  i64 c = content(I);
  i64 a = I.A / c, Bp = I.B / c;
  if (I.C / c != 1) throw DomainError("primitive_form: unexpected HNF");
  i64 b = mod64(-O_.D() - 2 * Bp, 2 * a);
  if (b > a) b -= 2 * a;
  return QuadForm{a, b, (b * b - O_.D()) / (4 * a)};
}

std::optional<QElt> IdealArith::generator(const Ideal& I) const {
  QElt u{I.A, 0}, v{I.B, I.C};
  auto N = [&](const QElt& e) { return static_cast<i128>(O_.norm(e)); };
  auto ip = [&](const QElt& a, const QElt& b) { return N(O_.add(a, b)) - N(a) - N(b); };
  for (int it = 0; it < 10000; ++it) {
    if (N(v) < N(u)) std::swap(u, v);
    i128 nu = N(u), t = ip(u, v);
    // nearest integer to t / (2 nu)
    i128 m = t >= 0 ? (t + nu) / (2 * nu) : -((-t + nu) / (2 * nu));
    if (m == 0) break;
    v = O_.sub(v, QElt{narrow(m * u.x), narrow(m * u.y)});
  }
  if (N(v) < N(u)) std::swap(u, v);
  if (N(u) == I.norm()) return u;
  return std::nullopt;
}

std::vector<Ideal> IdealArith::ideals_of_norm(i64 m) const {
  std::vector<Ideal> out;
  for (i64 C : divisors(m)) {
    i64 A = m / C;
    if (A % C != 0) continue;
    for (i64 B = 0; B < A; B += C) {
      Ideal I{A, B, C};
      // closed under multiplication by w
      if (contains(I, O_.mul(QElt{A, 0}, {0, 1})) && contains(I, O_.mul(QElt{B, C}, {0, 1}))) out.push_back(I);
    }
  }
  return out;
}

}  // namespace acyc
