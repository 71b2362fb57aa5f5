#include "acyc/local.hpp"

#include <numeric>
#include <sstream>

namespace acyc {

namespace {

BigInt modp(const BigInt& a, const BigInt& m) {
  BigInt r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

BigInt binom(int n, int k) {
  BigInt r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return r;
}

BigInt poly_eval_mod(const std::vector<BigInt>& f, const BigInt& x, const BigInt& m) {
  BigInt acc = 0;
  for (size_t i = f.size(); i-- > 0;) acc = modp(acc * x + f[i], m);
  return acc;
}

std::vector<BigInt> derivative(const std::vector<BigInt>& f) {
  std::vector<BigInt> d;
  for (size_t i = 1; i < f.size(); ++i) d.push_back(f[i] * static_cast<long>(i));
  if (d.empty()) d.push_back(0);
  return d;
}

// Hensel lift of a simple root r mod p to mod p^N
BigInt hensel(const std::vector<BigInt>& f, i64 r, i64 p, int N) {
  BigInt pN;
  mpz_ui_pow_ui(pN.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(N));
  auto df = derivative(f);
  BigInt x = r;
  for (int it = 0; it < 2 * N + 4; ++it) {
    BigInt fx = poly_eval_mod(f, x, pN), dx = poly_eval_mod(df, x, pN);
    BigInt inv;
    if (mpz_invert(inv.get_mpz_t(), dx.get_mpz_t(), pN.get_mpz_t()) == 0) throw DomainError("hensel: derivative not a unit");
    BigInt nx = modp(x - fx * inv, pN);
    if (nx == x) break;
    x = nx;
  }
  if (poly_eval_mod(f, x, pN) != 0) throw DomainError("hensel: lift failed");
  return x;
}

}  // namespace

LocalRing::LocalRing(i64 p, std::vector<BigInt> E, int N) : p_(p), e_(static_cast<int>(E.size()) - 1), N_(N), E_(std::move(E)) {
  if (!is_prime(p)) throw InputError("local ring: p must be prime");
  if (N < 1) throw InputError("local ring: precision must be positive");
  if (e_ < 1 || E_.back() != 1) throw InputError("local ring: E must be monic of degree >= 1");
  for (int i = 0; i < e_; ++i)
    if (E_[i] % p != 0) throw InputError("local ring: E is not Eisenstein");
  if ((E_[0] / p) % p == 0) throw InputError("local ring: E is not Eisenstein (constant term)");
  mpz_ui_pow_ui(pN_.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(N));
}

LElem LocalRing::normalize(std::vector<BigInt> c) const {
  for (size_t i = c.size(); i-- > static_cast<size_t>(e_);) {
    BigInt t = modp(c[i], pN_);
    if (t == 0) continue;
    for (int j = 0; j <= e_; ++j) c[i - e_ + j] -= t * E_[j];
  }
  c.resize(static_cast<size_t>(e_), BigInt(0));
  for (auto& x : c) x = modp(x, pN_);
  return LElem{c};
}

LElem LocalRing::zero() const { return LElem{std::vector<BigInt>(static_cast<size_t>(e_), BigInt(0))}; }
LElem LocalRing::one() const { return from_int(1); }
LElem LocalRing::from_int(const BigInt& n) const {
  LElem z = zero();
  z.c[0] = modp(n, pN_);
  return z;
}
LElem LocalRing::from_rat(const Rat& r) const {
  BigInt den = r.get_den(), inv;
  if (mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), pN_.get_mpz_t()) == 0)
    throw DomainError("local ring: denominator divisible by p");
  return from_int(r.get_num() * inv);
}
LElem LocalRing::uniformizer() const {
  std::vector<BigInt> c(2, BigInt(0));
  c[1] = 1;
  return normalize(c);
}

LElem LocalRing::add(const LElem& a, const LElem& b) const {
  std::vector<BigInt> c(static_cast<size_t>(e_));
  for (int i = 0; i < e_; ++i) c[i] = a.c[i] + b.c[i];
  return normalize(c);
}
LElem LocalRing::sub(const LElem& a, const LElem& b) const {
  std::vector<BigInt> c(static_cast<size_t>(e_));
  for (int i = 0; i < e_; ++i) c[i] = a.c[i] - b.c[i];
  return normalize(c);
}
LElem LocalRing::neg(const LElem& a) const { return sub(zero(), a); }
LElem LocalRing::mul(const LElem& a, const LElem& b) const {
  std::vector<BigInt> c(static_cast<size_t>(2 * e_ - 1), BigInt(0));
  for (int i = 0; i < e_; ++i) {
    if (a.c[i] == 0) continue;
    for (int j = 0; j < e_; ++j) c[i + j] += a.c[i] * b.c[j];
  }
  return normalize(c);
}
LElem LocalRing::pow(const LElem& a, const BigInt& e) const {
  if (e < 0) return pow(inverse(a), -e);
  LElem r = one(), b = a;
  BigInt k = e;
  while (k > 0) {
    if (mpz_odd_p(k.get_mpz_t())) r = mul(r, b);
    b = mul(b, b);
    k >>= 1;
  }
  return r;
}
LElem LocalRing::inverse(const LElem& a) const {
  i64 r = residue(a);
  if (r == 0) throw DomainError("local ring: inverse of a non-unit");
  LElem x = from_int(invmod(r, p_));
  LElem two = from_int(2);
  for (int it = 0; it < 64; ++it) {
    LElem nx = mul(x, sub(two, mul(a, x)));
    if (equal(nx, x)) break;
    x = nx;
  }
  if (!equal(mul(a, x), one())) throw DomainError("local ring: Newton inversion failed");
  return x;
}
bool LocalRing::equal(const LElem& a, const LElem& b) const { return a.c == b.c; }
bool LocalRing::is_zero(const LElem& a) const {
  for (auto& x : a.c)
    if (x != 0) return false;
  return true;
}
std::optional<int> LocalRing::ord(const LElem& a) const {
  std::optional<int> best;
  for (int i = 0; i < e_; ++i) {
    if (a.c[i] == 0) continue;
    int v = e_ * vp(a.c[i], p_) + i;
    if (!best || v < *best) best = v;
  }
  return best;
}
bool LocalRing::congruent(const LElem& a, const LElem& b, int v) const {
  if (v > precision()) throw RangeError("local ring: congruence beyond working precision");
  auto o = ord(sub(a, b));
  return !o || *o >= v;
}
i64 LocalRing::residue(const LElem& a) const { return mod64(modp(a.c[0], BigInt(static_cast<long>(p_))).get_si(), p_); }
LElem LocalRing::teichmuller(i64 r) const {
  BigInt t = mod64(r, p_);
  for (int i = 0; i < N_ + 1; ++i) mpz_powm_ui(t.get_mpz_t(), t.get_mpz_t(), static_cast<unsigned long>(p_), pN_.get_mpz_t());
  return from_int(t);
}
std::string LocalRing::str(const LElem& a) const {
  std::ostringstream os;
  os << "[";
  for (int i = 0; i < e_; ++i) os << (i ? "," : "") << a.c[i].get_str();
  os << "] mod " << p_ << "^" << N_;
  return os.str();
}

// ---- Place ----

Place Place::make(const NumberRing& R, i64 p, const Num& sqrtD, i64 b, int N) {
  if (!is_prime(p)) throw InputError("place: p must be prime");
  const auto& f = R.poly();
  BigInt bp = p;
  auto compatible = [&](const LocalRing& L, const LElem& X) {
    // evaluate sqrtD at X
    LElem acc = L.zero();
    const auto& c = sqrtD.coeffs();
    for (size_t i = c.size(); i-- > 0;) acc = L.add(L.mul(acc, X), L.from_rat(c[i]));
    return L.residue(acc) == mod64(b, p);
  };
  // unramified: a simple root of f mod p
  auto df = derivative(f);
  for (i64 r = 0; r < p; ++r) {
    if (poly_eval_mod(f, r, bp) != 0 || poly_eval_mod(df, r, bp) == 0) continue;
    LocalRing L(p, {BigInt(-p), BigInt(1)}, N);
    LElem X = L.from_int(hensel(f, r, p, N));
    if (compatible(L, X)) return Place(R, L, X, sqrtD, b);
  }
  // Kummer: f(x) = g(x^e) and x^e = W with (z + t)^e - W Eisenstein
  int e = 0;
  for (size_t i = 1; i < f.size(); ++i)
    if (f[i] != 0) e = std::gcd(e, static_cast<int>(i));
  if (e > 1) {
    std::vector<BigInt> g;
    for (size_t i = 0; i < f.size(); i += static_cast<size_t>(e)) g.push_back(f[i]);
    auto dg = derivative(g);
    BigInt pN;
    mpz_ui_pow_ui(pN.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(N));
    for (i64 w = 0; w < p; ++w) {
      if (poly_eval_mod(g, w, bp) != 0 || poly_eval_mod(dg, w, bp) == 0) continue;
      BigInt W = hensel(g, w, p, N + 1);
      for (i64 t = 0; t < p; ++t) {
        if (powmod(t, e, p) != mod64(w, p)) continue;
        std::vector<BigInt> E(static_cast<size_t>(e + 1));
        BigInt tp = 1;
        for (int i = e; i >= 0; --i) {
          E[i] = binom(e, i) * tp;
          tp *= t;
        }
        E[0] -= W;
        bool eis = true;
        for (int i = 0; i < e; ++i)
          if (E[i] % bp != 0) eis = false;
        if (!eis || (E[0] / bp) % bp == 0) continue;
        for (auto& x : E) x = modp(x, pN * bp);
        E[e] = 1;
        LocalRing L(p, E, N);
        LElem X = L.add(L.uniformizer(), L.from_int(t));
        LElem fx = L.zero();
        for (size_t i = f.size(); i-- > 0;) fx = L.add(L.mul(fx, X), L.from_int(f[i]));
        if (!L.is_zero(fx)) throw DomainError("place: Kummer root check failed");
        if (compatible(L, X)) return Place(R, L, X, sqrtD, b);
      }
    }
  }
  throw DomainError("place: no supported embedding of " + R.poly_str() + " at p=" + std::to_string(p));
}

Place Place::with_precision(int N) const { return make(R_, L_.p(), sqrtD_, b_, N); }

LElem Place::map(const Num& a) const {
  LElem acc = L_.zero();
  const auto& c = a.coeffs();
  for (size_t i = c.size(); i-- > 0;) acc = L_.add(L_.mul(acc, x_), L_.from_rat(c[i]));
  return acc;
}

std::optional<Rat> Place::ord(const Num& a) const {
  if (a.is_zero()) return std::nullopt;
  BigInt den = a.denominator();
  int vden = den == 1 ? 0 : vp(den, L_.p());
  Num num = a * Rat(den);
  Place cur = *this;
  for (int N = L_.N(); N <= 1 << 14; N *= 2) {
    if (N != cur.L_.N()) cur = with_precision(N);
    auto o = cur.L_.ord(cur.map(num));
    if (o) return frac(*o - L_.e() * vden, L_.e());
  }
  throw RangeError("place: valuation exceeds maximal precision");
}

bool Place::congruent(const Num& a, const Num& b, const Rat& v) const {
  auto o = ord(a - b);
  return !o || *o >= v;
}

std::string Place::describe() const {
  std::ostringstream os;
  os << "p=" << L_.p() << " e=" << L_.e() << " E=";
  const auto& E = L_.eisenstein();
  for (size_t i = 0; i < E.size(); ++i) os << (i ? "," : "[") << E[i].get_str();
  os << "] x->" << L_.str(x_);
  return os.str();
}

}  // namespace acyc
