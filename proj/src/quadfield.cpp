#include "acyc/quadfield.hpp"

#include <algorithm>
#include <sstream>

namespace acyc {

bool is_fundamental_discriminant(i64 D) {
  if (D >= 0) return false;
  i64 r = mod64(D, 4);
  if (r == 1) return is_squarefree(D);
  if (r != 0) return false;
  i64 m = D / 4;
  i64 mr = mod64(m, 4);
  return (mr == 2 || mr == 3) && is_squarefree(m);
}

Discriminant::Discriminant(i64 d) : D(d) {
  if (!is_fundamental_discriminant(d))
    throw InputError("not a negative fundamental discriminant: " + std::to_string(d));
}

bool QuadForm::is_primitive() const { return gcd64(gcd64(a, b), c) == 1; }

bool QuadForm::is_reduced() const {
  if (a <= 0) return false;
  if (std::abs(b) > a || a > c) return false;
  if ((std::abs(b) == a || a == c) && b < 0) return false;
  return true;
}

std::string QuadForm::str() const {
  std::ostringstream os;
  os << "(" << a << "," << b << "," << c << ")";
  return os.str();
}

namespace {

using i128 = __int128;

// b into (-a, a]
void normalize(i128& a, i128& b, i128& c) {
  i128 two_a = 2 * a;
  i128 r = b % two_a;
  if (r < 0) r += two_a;
  if (r > a) r -= two_a;
  i128 k = (r - b) / two_a;  // b' = b + 2ak
  c = a * k * k + b * k + c;
  b = r;
}

i64 narrow(i128 x) {
  if (x > INT64_MAX || x < INT64_MIN) throw RangeError("form coefficient overflow");
  return static_cast<i64>(x);
}

// returns g = gcd(a, b) >= 0 and x, y with a x + b y = g
i128 xgcd(i128 a, i128 b, i128& x, i128& y) {
  i128 x0 = 1, y0 = 0, x1 = 0, y1 = 1;
  while (b != 0) {
    i128 q = a / b;
    std::tie(a, b) = std::make_pair(b, a - q * b);
    std::tie(x0, x1) = std::make_pair(x1, x0 - q * x1);
    std::tie(y0, y1) = std::make_pair(y1, y0 - q * y1);
  }
  if (a < 0) {
    a = -a;
    x0 = -x0;
    y0 = -y0;
  }
  x = x0;
  y = y0;
  return a;
}

i128 mod128(i128 a, i128 m) {
  i128 r = a % m;
  return r < 0 ? r + m : r;
}

}  // namespace

QuadForm reduce(QuadForm f) {
  if (f.a <= 0 || f.disc() >= 0) throw DomainError("reduce: positive definite form expected, got " + f.str());
  i128 a = f.a, b = f.b, c = f.c;
  normalize(a, b, c);
  while (a > c) {
    std::swap(a, c);
    b = -b;
    normalize(a, b, c);
  }
  if ((a == c || b == a || b == -a) && b < 0) b = -b;
  return QuadForm{narrow(a), narrow(b), narrow(c)};
}

QuadForm compose(const QuadForm& f1, const QuadForm& f2) {
  if (f1.disc() != f2.disc()) throw DomainError("compose: discriminant mismatch");
  const i128 disc = f1.disc();
  i128 a1 = f1.a, b1 = f1.b, a2 = f2.a, b2 = f2.b, c2 = f2.c;
  if (a1 > a2) {
    std::swap(a1, a2);
    std::swap(b1, b2);
    c2 = f1.c;
  }
  // Dirichlet composition, Shanks style
  i128 s = (b1 + b2) / 2;
  i128 n = b2 - s;
  i128 u, v, d, y1;
  if (a2 % a1 == 0) {
    y1 = 0;
    d = a1;
  } else {
    d = xgcd(a2, a1, u, v);
    y1 = u;
  }
  i128 x2, y2, d1;
  if (s % d == 0) {
    y2 = -1;
    x2 = 0;
    d1 = d;
  } else {
    d1 = xgcd(s, d, x2, y2);
    y2 = -y2;
  }
  i128 v1 = a1 / d1, v2 = a2 / d1;
  i128 r = mod128(y1 * y2 % v1 * n - x2 * c2, v1);
  i128 b3 = b2 + 2 * v2 * r;
  i128 a3 = v1 * v2;
  i128 c3 = (b3 * b3 - disc) / (4 * a3);
  if ((b3 * b3 - disc) % (4 * a3) != 0) throw DomainError("compose: internal error");
  return reduce(QuadForm{narrow(a3), narrow(b3), narrow(c3)});
}

QuadForm form_inverse(const QuadForm& f) { return reduce(QuadForm{f.a, -f.b, f.c}); }

QuadForm principal_form(i64 disc) {
  if (disc >= 0 || (mod64(disc, 4) != 0 && mod64(disc, 4) != 1))
    throw InputError("invalid discriminant " + std::to_string(disc));
  i64 b = mod64(disc, 4) == 0 ? 0 : 1;
  return QuadForm{1, b, (b * b - disc) / 4};
}

QuadForm form_pow(const QuadForm& f, i64 e) {
  QuadForm base = e < 0 ? form_inverse(f) : reduce(f);
  if (e < 0) e = -e;
  QuadForm r = principal_form(f.disc());
  while (e > 0) {
    if (e & 1) r = compose(r, base);
    base = compose(base, base);
    e >>= 1;
  }
  return r;
}

std::vector<QuadForm> reduced_forms(i64 disc) {
  principal_form(disc);  // validates
  std::vector<QuadForm> out;
  const i64 N = -disc;
  // a <= sqrt(|disc|/3)
  for (i64 a = 1; 3 * a * a <= N; ++a) {
    for (i64 b = -a + 1; b <= a; ++b) {
      i64 num = b * b - disc;
      if (num % (4 * a) != 0) continue;
      i64 c = num / (4 * a);
      QuadForm f{a, b, c};
      if (f.is_reduced() && f.is_primitive()) out.push_back(f);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---- AbelianGroup ----

AbelianGroup::AbelianGroup(std::vector<i64> invariants) : inv_(std::move(invariants)) {
  for (size_t i = 0; i < inv_.size(); ++i) {
    if (inv_[i] <= 1) throw InputError("invariant factors must exceed 1");
    if (i + 1 < inv_.size() && inv_[i + 1] % inv_[i] != 0) throw InputError("invariant factors must divide");
  }
}

i64 AbelianGroup::order() const {
  i64 o = 1;
  for (i64 d : inv_) o *= d;
  return o;
}

bool AbelianGroup::contains(const Elem& x) const {
  if (x.size() != inv_.size()) return false;
  for (size_t i = 0; i < x.size(); ++i)
    if (x[i] < 0 || x[i] >= inv_[i]) return false;
  return true;
}

AbelianGroup::Elem AbelianGroup::add(const Elem& x, const Elem& y) const {
  if (x.size() != inv_.size() || y.size() != inv_.size()) throw DomainError("group element size mismatch");
  Elem z(inv_.size());
  for (size_t i = 0; i < z.size(); ++i) z[i] = mod64(x[i] + y[i], inv_[i]);
  return z;
}

AbelianGroup::Elem AbelianGroup::neg(const Elem& x) const { return scale(x, -1); }

AbelianGroup::Elem AbelianGroup::scale(const Elem& x, i64 k) const {
  if (x.size() != inv_.size()) throw DomainError("group element size mismatch");
  Elem z(inv_.size());
  for (size_t i = 0; i < z.size(); ++i) z[i] = mulmod(x[i], mod64(k, inv_[i]), inv_[i]);
  return z;
}

i64 AbelianGroup::element_order(const Elem& x) const {
  i64 o = 1;
  for (size_t i = 0; i < x.size(); ++i) o = lcm64(o, inv_[i] / gcd64(x[i], inv_[i]));
  return o;
}

std::vector<AbelianGroup::Elem> AbelianGroup::elements() const {
  std::vector<Elem> out;
  Elem cur(inv_.size(), 0);
  while (true) {
    out.push_back(cur);
    size_t i = inv_.size();
    while (i > 0) {
      --i;
      if (++cur[i] < inv_[i]) goto next;
      cur[i] = 0;
    }
    break;
  next:;
  }
  return out;
}

size_t AbelianGroup::index_of(const Elem& x) const {
  if (!contains(x)) throw DomainError("element not in group");
  size_t idx = 0;
  for (size_t i = 0; i < x.size(); ++i) idx = idx * static_cast<size_t>(inv_[i]) + static_cast<size_t>(x[i]);
  return idx;
}

std::string AbelianGroup::str() const {
  if (inv_.empty()) return "trivial";
  std::ostringstream os;
  for (size_t i = 0; i < inv_.size(); ++i) os << (i ? " x " : "") << "Z/" << inv_[i];
  return os.str();
}

// ---- class groups ----

AbelianGroup::Elem ClassGroup::class_of(const QuadForm& f) const {
  if (f.disc() != disc) throw DomainError("class_of: discriminant mismatch");
  auto it = coords.find(reduce(f));
  if (it == coords.end()) throw DomainError("class_of: form not primitive " + f.str());
  return it->second;
}

const QuadForm& ClassGroup::form_of(const AbelianGroup::Elem& e) const {
  auto it = form_at.find(e);
  if (it == form_at.end()) throw DomainError("form_of: element not in group");
  return it->second;
}

ClassGroup class_group_data(i64 disc) {
  if (disc >= 0) throw InputError("class_group: discriminant must be negative");
  if (mod64(disc, 4) != 0 && mod64(disc, 4) != 1) throw InputError("class_group: discriminant must be 0 or 1 mod 4");
  ClassGroup cg;
  cg.disc = disc;
  cg.forms = reduced_forms(disc);
  const QuadForm id = principal_form(disc);

  // greedy generators; coordinates relative to them (mixed radix)
  std::vector<QuadForm> gens;
  std::vector<i64> orders;
  std::vector<std::vector<i64>> rel_rows;  // relation e_j g_j - (coords of g_j^{e_j}) = 0
  std::map<QuadForm, std::vector<i64>> sub{{id, {}}};
  for (const auto& f : cg.forms) {
    if (sub.count(f)) continue;
    size_t j = gens.size();
    gens.push_back(f);
    for (auto& [k, v] : sub) v.push_back(0);
    i64 e = 1;
    QuadForm pw = f;
    while (!sub.count(pw)) {
      pw = compose(pw, f);
      ++e;
    }
    std::vector<i64> row = sub.at(pw);
    for (auto& x : row) x = -x;
    row[j] += e;
    rel_rows.push_back(row);
    orders.push_back(e);
    std::map<QuadForm, std::vector<i64>> next;
    for (const auto& [h, c] : sub) {
      QuadForm cur = h;
      for (i64 i = 0; i < e; ++i) {
        auto cc = c;
        cc[j] = i;
        next.emplace(cur, cc);
        cur = compose(cur, f);
      }
    }
    sub = std::move(next);
  }
  if (sub.size() != cg.forms.size()) throw DomainError("class_group: internal enumeration mismatch");

  const size_t r = gens.size();
  if (r == 0) {
    cg.group = AbelianGroup{};
    for (const auto& f : cg.forms) {
      cg.coords[f] = {};
      cg.form_at[{}] = f;
    }
    return cg;
  }
  for (auto& row : rel_rows) row.resize(r, 0);
  std::vector<std::vector<BigInt>> R(r, std::vector<BigInt>(r));
  for (size_t i = 0; i < r; ++i)
    for (size_t j = 0; j < r; ++j) R[i][j] = BigInt(static_cast<long>(rel_rows[i][j]));
  SmithForm sf = smith_normal_form(R);
  std::vector<i64> inv;
  std::vector<size_t> keep;
  for (size_t i = 0; i < sf.diag.size(); ++i) {
    i64 d = sf.diag[i].get_si();
    if (d == 0) throw DomainError("class_group: infinite relation lattice");
    if (d > 1) {
      inv.push_back(d);
      keep.push_back(i);
    }
  }
  cg.group = AbelianGroup(inv);
  for (const auto& [f, c] : sub) {
    AbelianGroup::Elem y(keep.size());
    for (size_t t = 0; t < keep.size(); ++t) {
      BigInt acc = 0;
      for (size_t i = 0; i < r; ++i) acc += BigInt(static_cast<long>(c[i])) * sf.V[i][keep[t]];
      BigInt m;
      mpz_fdiv_r(m.get_mpz_t(), acc.get_mpz_t(), BigInt(static_cast<long>(inv[t])).get_mpz_t());
      y[t] = m.get_si();
    }
    cg.coords[f] = y;
    cg.form_at[y] = f;
  }
  if (cg.form_at.size() != cg.forms.size()) throw DomainError("class_group: coordinate map not bijective");
  return cg;
}

AbelianGroup class_group(i64 disc) { return class_group_data(disc).group; }

std::string to_string(ArtinNormalization a) { return a == ArtinNormalization::Geometric ? "geometric" : "arithmetic"; }

ArtinNormalization artin_from_string(const std::string& s) {
  if (s == "geometric") return ArtinNormalization::Geometric;
  if (s == "arithmetic") return ArtinNormalization::Arithmetic;
  throw InputError("artin_normalization must be geometric or arithmetic, got " + s);
}

AbelianGroup::Elem RingClassData::project(const AbelianGroup::Elem& x) const {
  AbelianGroup::Elem y(p_slots.size());
  for (size_t t = 0; t < p_slots.size(); ++t) y[t] = mod64(x.at(p_slots[t]), p_part.invariants()[t]);
  return y;
}

AbelianGroup::Elem RingClassData::class_of_form(const QuadForm& f) const { return project(full.class_of(f)); }

RingClassData ring_class_group(const Discriminant& D, i64 n, i64 p, ArtinNormalization artin) {
  if (n < 1) throw InputError("conductor must be positive");
  if (p < 3 || !is_prime(p)) throw InputError("p must be an odd prime");
  if (n % p == 0) throw PreconditionError("ring_class_group: p divides the conductor");
  RingClassData rcd;
  rcd.D = D;
  rcd.n = n;
  rcd.p = p;
  rcd.artin = artin;
  rcd.full = class_group_data(D.D * n * n);
  std::vector<i64> pinv;
  const auto& inv = rcd.full.group.invariants();
  for (size_t i = 0; i < inv.size(); ++i) {
    i64 d = inv[i], pk = 1;
    while (d % p == 0) {
      d /= p;
      pk *= p;
    }
    if (pk > 1) {
      pinv.push_back(pk);
      rcd.p_slots.push_back(i);
    }
  }
  rcd.p_part = AbelianGroup(pinv);
  for (const auto& f : rcd.full.forms) rcd.form_to_class[f] = rcd.class_of_form(f);
  return rcd;
}

std::string to_string(SplitTag t) {
  switch (t) {
    case SplitTag::Split:
      return "split";
    case SplitTag::Inert:
      return "inert";
    default:
      return "ramified";
  }
}

PrimeSplit splitting_type(const Discriminant& D, i64 q) {
  if (!is_prime(q)) throw InputError("splitting_type: " + std::to_string(q) + " is not prime");
  PrimeSplit s;
  s.q = q;
  s.D = D.D;
  int kr = kronecker(D.D, q);
  s.tag = kr == 0 ? SplitTag::Ramified : (kr > 0 ? SplitTag::Split : SplitTag::Inert);
  if (s.tag == SplitTag::Inert) return s;
  // smallest b in [0, q] with b = D mod 2 and b^2 = D mod 4q
  i64 b = -1;
  for (i64 t = 0; t <= q; ++t) {
    if (mod64(t - D.D, 2) != 0) continue;
    if (mod64(t * t - D.D, 4 * q) == 0) {
      b = t;
      break;
    }
  }
  if (b < 0) throw DomainError("splitting_type: no square root found");
  s.b = b;
  s.prime = QuadForm{q, b, (b * b - D.D) / (4 * q)};
  i64 bb = mod64(-b, 2 * q);
  s.conj = s.tag == SplitTag::Split ? QuadForm{q, bb, (bb * bb - D.D) / (4 * q)} : s.prime;
  return s;
}

QuadForm prime_form_in_order(const PrimeSplit& s, i64 n, bool conjugate) {
  if (s.tag == SplitTag::Inert) throw DomainError("inert prime has no prime form");
  const QuadForm& f = conjugate ? s.conj : s.prime;
  i64 disc = s.D * n * n;
  i64 b = mod64(n * f.b, 2 * s.q);
  return QuadForm{s.q, b, (b * b - disc) / (4 * s.q)};
}

AbelianGroup::Elem frobenius_class(const PrimeSplit& s, const RingClassData& rcd, bool conjugate) {
  if (s.tag != SplitTag::Split) throw DomainError("frobenius_class: split prime required, got " + to_string(s.tag));
  if (s.D != rcd.D.D) throw DomainError("frobenius_class: field mismatch");
  if (gcd64(s.q, rcd.n * rcd.p * s.D) != 1) throw PreconditionError("frobenius_class: q must be coprime to n p D");
  auto e = rcd.class_of_form(prime_form_in_order(s, rcd.n, conjugate));
  if (rcd.artin == ArtinNormalization::Arithmetic) e = rcd.p_part.neg(e);
  return e;
}

}  // namespace acyc
