#pragma once

#include <memory>
#include <string>
#include <vector>

#include "acyc/arith.hpp"

namespace acyc {

// Q[x]/(f) for a monic integer polynomial f. Coefficient vectors are low degree first.
struct RingData {
  std::vector<BigInt> f;  // length deg+1, f.back() == 1
  std::string name;
};

class Num;

class NumberRing {
 public:
  NumberRing() = default;
  explicit NumberRing(std::vector<BigInt> monic, std::string name = "x");
  explicit NumberRing(std::shared_ptr<const RingData> d) : d_(std::move(d)) {}
  size_t degree() const { return d_->f.size() - 1; }
  const std::vector<BigInt>& poly() const { return d_->f; }
  const std::string& var() const { return d_->name; }
  Num zero() const;
  Num one() const;
  Num from_int(const BigInt& n) const;
  Num from_rat(const Rat& r) const;
  Num gen() const;
  Num from_coeffs(const std::vector<Rat>& c) const;  // reduces mod f
  bool operator==(const NumberRing& o) const { return d_ == o.d_ || d_->f == o.d_->f; }
  std::string poly_str() const;
  const std::shared_ptr<const RingData>& data() const { return d_; }

 private:
  std::shared_ptr<const RingData> d_;
};

class Num {
 public:
  Num() = default;
  Num(std::shared_ptr<const RingData> r, std::vector<Rat> c);
  const std::vector<Rat>& coeffs() const { return c_; }
  NumberRing ring() const;
  bool is_zero() const;
  bool is_rational() const;
  Rat rational() const;  // throws unless rational
  Num operator+(const Num& o) const;
  Num operator-(const Num& o) const;
  Num operator-() const;
  Num operator*(const Num& o) const;
  Num operator*(const Rat& r) const;
  Num& operator+=(const Num& o) { return *this = *this + o; }
  Num& operator-=(const Num& o) { return *this = *this - o; }
  Num& operator*=(const Num& o) { return *this = *this * o; }
  bool operator==(const Num& o) const;
  bool operator!=(const Num& o) const { return !(*this == o); }
  Num pow(i64 e) const;  // negative exponents invert
  Num inverse() const;   // DomainError on zero divisors
  BigInt denominator() const;  // lcm of coefficient denominators
  // characteristic polynomial of multiplication; monic, low degree first
  std::vector<Rat> charpoly() const;
  bool is_integral() const;  // charpoly has integer coefficients
  std::string str() const;
  std::vector<std::string> to_strings() const;

 private:
  std::shared_ptr<const RingData> r_;
  std::vector<Rat> c_;
  void check_same(const Num& o) const;
};

Num parse_num(const NumberRing& R, const std::vector<std::string>& coeffs);

// Root of unity exponents: value zeta^e with zeta of order m.
struct Cyclo {
  NumberRing R;
  i64 order = 2;
  Num zeta;                      // primitive root of unity of exact order `order`
  Num value(i64 e) const;        // zeta^e
};

}  // namespace acyc
