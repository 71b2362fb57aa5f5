#pragma once

#include <optional>
#include <vector>

#include "acyc/numring.hpp"

namespace acyc {

class LocalRing;

// element of Z_p[w]/(E(w)) modulo p^N, coefficients in the w-power basis
struct LElem {
  std::vector<BigInt> c;
};

// O_L = Z_p[w]/(E) with E Eisenstein of degree e, truncated at p^N.
class LocalRing {
 public:
  LocalRing(i64 p, std::vector<BigInt> eisenstein, int N);
  i64 p() const { return p_; }
  int e() const { return e_; }
  int N() const { return N_; }
  int precision() const { return e_ * N_; }  // in units of ord_w
  const BigInt& modulus() const { return pN_; }
  const std::vector<BigInt>& eisenstein() const { return E_; }

  LElem zero() const;
  LElem one() const;
  LElem from_int(const BigInt& n) const;
  LElem from_rat(const Rat& r) const;  // denominator must be prime to p
  LElem uniformizer() const;
  LElem add(const LElem& a, const LElem& b) const;
  LElem sub(const LElem& a, const LElem& b) const;
  LElem neg(const LElem& a) const;
  LElem mul(const LElem& a, const LElem& b) const;
  LElem pow(const LElem& a, const BigInt& e) const;
  LElem inverse(const LElem& a) const;  // units only
  bool equal(const LElem& a, const LElem& b) const;
  bool is_zero(const LElem& a) const;
  std::optional<int> ord(const LElem& a) const;  // nullopt when zero to precision
  bool congruent(const LElem& a, const LElem& b, int v) const;  // ord(a-b) >= v
  i64 residue(const LElem& a) const;
  LElem teichmuller(i64 r) const;  // in Z_p
  std::string str(const LElem& a) const;

 private:
  i64 p_;
  int e_, N_;
  BigInt pN_;
  std::vector<BigInt> E_;  // monic, length e+1
  LElem normalize(std::vector<BigInt> c) const;
};

// An embedding of a number ring into a local ring L.
class Place {
 public:
  // Selects iota: R -> L with iota(sqrtD) = b mod w (the prime above p with sqrt D = b).
  static Place make(const NumberRing& R, i64 p, const Num& sqrtD, i64 b, int N);
  const NumberRing& ring() const { return R_; }
  const LocalRing& local() const { return L_; }
  i64 p() const { return L_.p(); }
  int e() const { return L_.e(); }
  const LElem& image_of_gen() const { return x_; }
  Place with_precision(int N) const;
  LElem map(const Num& a) const;  // p-integral a only
  // ord_P(a) as a rational (ord_w / e); raises precision internally; nullopt for a = 0
  std::optional<Rat> ord(const Num& a) const;
  bool congruent(const Num& a, const Num& b, const Rat& v) const;  // ord_P(a - b) >= v
  std::string describe() const;

 private:
  Place(NumberRing R, LocalRing L, LElem x, Num sqrtD, i64 b) : R_(std::move(R)), L_(std::move(L)), x_(std::move(x)), sqrtD_(std::move(sqrtD)), b_(b) {}
  NumberRing R_;
  LocalRing L_;
  LElem x_;
  Num sqrtD_;
  i64 b_;
};

}  // namespace acyc
