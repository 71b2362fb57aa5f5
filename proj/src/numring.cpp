#include "acyc/numring.hpp"

#include <sstream>

namespace acyc {

namespace {

using QPoly = std::vector<Rat>;

void trim(QPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

QPoly reduce_mod(QPoly a, const std::vector<BigInt>& f) {
  const size_t d = f.size() - 1;
  for (size_t i = a.size(); i-- > d;) {
    if (a[i] == 0) continue;
    Rat c = a[i];
    for (size_t j = 0; j <= d; ++j) a[i - d + j] -= c * Rat(f[j]);
  }
  a.resize(d, Rat(0));
  for (auto& x : a) x.canonicalize();
  return a;
}

QPoly qmul(const QPoly& a, const QPoly& b) {
  if (a.empty() || b.empty()) return {};
  QPoly r(a.size() + b.size() - 1, Rat(0));
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  }
  return r;
}

QPoly qsub(QPoly a, const QPoly& b) {
  if (a.size() < b.size()) a.resize(b.size(), Rat(0));
  for (size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
  trim(a);
  return a;
}

// a = q*b + r
void qdivmod(QPoly a, const QPoly& b, QPoly& q, QPoly& r) {
  trim(a);
  q.assign(a.size() >= b.size() ? a.size() - b.size() + 1 : 0, Rat(0));
  while (!a.empty() && a.size() >= b.size()) {
    size_t sh = a.size() - b.size();
    Rat c = a.back() / b.back();
    q[sh] = c;
    for (size_t j = 0; j < b.size(); ++j) a[sh + j] -= c * b[j];
    trim(a);
  }
  r = a;
}

}  // namespace

NumberRing::NumberRing(std::vector<BigInt> monic, std::string name) {
  if (monic.size() < 2) throw InputError("number ring polynomial must have degree >= 1");
  if (monic.back() != 1) throw InputError("number ring polynomial must be monic");
  auto d = std::make_shared<RingData>();
  d->f = std::move(monic);
  d->name = std::move(name);
  d_ = d;
}

Num NumberRing::zero() const { return Num(d_, QPoly(degree(), Rat(0))); }
Num NumberRing::one() const { return from_int(1); }
Num NumberRing::from_int(const BigInt& n) const { return from_rat(Rat(n)); }
Num NumberRing::from_rat(const Rat& r) const {
  QPoly c(degree(), Rat(0));
  c[0] = r;
  return Num(d_, c);
}
Num NumberRing::gen() const { return from_coeffs({Rat(0), Rat(1)}); }
Num NumberRing::from_coeffs(const std::vector<Rat>& c) const { return Num(d_, reduce_mod(c, d_->f)); }

std::string NumberRing::poly_str() const {
  std::vector<Rat> c(d_->f.begin(), d_->f.end());
  std::ostringstream os;
  bool first = true;
  for (size_t i = c.size(); i-- > 0;) {
    if (c[i] == 0) continue;
    Rat a = c[i];
    bool neg = a < 0;
    if (neg) a = -a;
    os << (first ? (neg ? "-" : "") : (neg ? " - " : " + "));
    if (i == 0 || a != 1) os << a.get_str() << (i ? "*" : "");
    if (i > 0) os << d_->name << (i > 1 ? "^" + std::to_string(i) : "");
    first = false;
  }
  return os.str();
}

Num::Num(std::shared_ptr<const RingData> r, std::vector<Rat> c) : r_(std::move(r)), c_(std::move(c)) {
  c_.resize(r_->f.size() - 1, Rat(0));
  for (auto& x : c_) x.canonicalize();
}

NumberRing Num::ring() const { return NumberRing(r_); }

void Num::check_same(const Num& o) const {
  if (!r_ || !o.r_) throw DomainError("uninitialized number");
  if (r_ != o.r_ && r_->f != o.r_->f) throw DomainError("number ring mismatch");
}

bool Num::is_zero() const {
  for (auto& x : c_)
    if (x != 0) return false;
  return true;
}

bool Num::is_rational() const {
  for (size_t i = 1; i < c_.size(); ++i)
    if (c_[i] != 0) return false;
  return true;
}

Rat Num::rational() const {
  if (!is_rational()) throw DomainError("not rational: " + str());
  return c_[0];
}

Num Num::operator+(const Num& o) const {
  check_same(o);
  QPoly c = c_;
  for (size_t i = 0; i < c.size(); ++i) c[i] += o.c_[i];
  return Num(r_, c);
}
Num Num::operator-(const Num& o) const {
  check_same(o);
  QPoly c = c_;
  for (size_t i = 0; i < c.size(); ++i) c[i] -= o.c_[i];
  return Num(r_, c);
}
Num Num::operator-() const {
  QPoly c = c_;
  for (auto& x : c) x = -x;
  return Num(r_, c);
}
Num Num::operator*(const Num& o) const {
  check_same(o);
  return Num(r_, reduce_mod(qmul(c_, o.c_), r_->f));
}
Num Num::operator*(const Rat& r) const {
  QPoly c = c_;
  for (auto& x : c) x *= r;
  return Num(r_, c);
}
bool Num::operator==(const Num& o) const {
  check_same(o);
  return c_ == o.c_;
}

Num Num::pow(i64 e) const {
  if (e < 0) return inverse().pow(-e);
  Num r(r_, QPoly(c_.size(), Rat(0)));
  QPoly one(c_.size(), Rat(0));
  one[0] = 1;
  r = Num(r_, one);
  Num b = *this;
  while (e > 0) {
    if (e & 1) r = r * b;
    b = b * b;
    e >>= 1;
  }
  return r;
}

Num Num::inverse() const {
  // extended Euclid in Q[x]: s*a + t*f = g
  QPoly f(r_->f.begin(), r_->f.end());
  QPoly a = c_;
  trim(a);
  if (a.empty()) throw DomainError("inverse of zero");
  QPoly r0 = f, r1 = a, s0{}, s1{Rat(1)};
  while (!r1.empty()) {
    QPoly q, r;
    qdivmod(r0, r1, q, r);
    QPoly s2 = qsub(s0, qmul(q, s1));
    r0 = r1;
    r1 = r;
    s0 = s1;
    s1 = s2;
  }
  if (r0.size() != 1) throw DomainError("not invertible in " + ring().poly_str() + ": " + str());
  Rat g = r0[0];
  for (auto& x : s0) x /= g;
  return Num(r_, reduce_mod(s0, r_->f));
}

BigInt Num::denominator() const {
  BigInt d = 1;
  for (auto& x : c_) mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), x.get_den_mpz_t());
  return d;
}

std::vector<Rat> Num::charpoly() const {
  // matrix of multiplication, then Faddeev-LeVerrier
  const size_t n = c_.size();
  std::vector<std::vector<Rat>> M(n, std::vector<Rat>(n, Rat(0)));
  for (size_t j = 0; j < n; ++j) {
    QPoly xj(n, Rat(0));
    xj[j] = 1;
    QPoly col = reduce_mod(qmul(c_, xj), r_->f);
    for (size_t i = 0; i < n; ++i) M[i][j] = col[i];
  }
  std::vector<Rat> cp(n + 1, Rat(0));
  cp[n] = 1;
  std::vector<std::vector<Rat>> Mk(n, std::vector<Rat>(n, Rat(0)));
  for (size_t k = 1; k <= n; ++k) {
    // Mk = M * (Mk_prev + c_{n-k+1} I)
    std::vector<std::vector<Rat>> A = Mk;
    for (size_t i = 0; i < n; ++i) A[i][i] += cp[n - k + 1];
    std::vector<std::vector<Rat>> P(n, std::vector<Rat>(n, Rat(0)));
    for (size_t i = 0; i < n; ++i)
      for (size_t l = 0; l < n; ++l) {
        if (M[i][l] == 0) continue;
        for (size_t j = 0; j < n; ++j) P[i][j] += M[i][l] * A[l][j];
      }
    Mk = P;
    Rat tr = 0;
    for (size_t i = 0; i < n; ++i) tr += Mk[i][i];
    cp[n - k] = -tr / Rat(static_cast<long>(k));
  }
  return cp;
}

bool Num::is_integral() const {
  for (auto& x : charpoly())
    if (x.get_den() != 1) return false;
  return true;
}

std::string Num::str() const {
  std::ostringstream os;
  bool first = true;
  for (size_t i = c_.size(); i-- > 0;) {
    if (c_[i] == 0) continue;
    Rat a = c_[i];
    bool neg = a < 0;
    if (neg) a = -a;
    os << (first ? (neg ? "-" : "") : (neg ? " - " : " + "));
    if (i == 0 || a != 1) os << a.get_str() << (i ? "*" : "");
    if (i > 0) os << r_->name << (i > 1 ? "^" + std::to_string(i) : "");
    first = false;
  }
  return first ? "0" : os.str();
}

std::vector<std::string> Num::to_strings() const {
  std::vector<std::string> out;
  for (auto& x : c_) out.push_back(x.get_str());
  return out;
}

Num parse_num(const NumberRing& R, const std::vector<std::string>& coeffs) {
  std::vector<Rat> c;
  for (auto& s : coeffs) {
    Rat r;
    if (r.set_str(s, 10) != 0) throw InputError("bad rational coefficient: " + s);
    r.canonicalize();
    c.push_back(r);
  }
  return R.from_coeffs(c);
}

Num Cyclo::value(i64 e) const { return zeta.pow(mod64(e, order)); }

}  // namespace acyc
