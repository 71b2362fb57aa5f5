#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "acyc/arith.hpp"
#include "json.hpp"

namespace acyc {

// Affine form c0 + sum c_i * r_i with rational coefficients; the key "" holds c0.
class Expo {
 public:
  Expo() = default;
  Expo(const Rat& c);  // NOLINT: constants convert implicitly
  static Expo param(const std::string& name);
  const std::map<std::string, Rat>& terms() const { return t_; }
  bool is_const() const;
  bool is_zero() const { return t_.empty(); }
  Rat constant() const;  // c0
  Rat coeff(const std::string& name) const;
  // integer value; throws DomainError otherwise
  i64 as_int() const;
  Expo operator+(const Expo& o) const;
  Expo operator-(const Expo& o) const;
  Expo operator-() const;
  Expo operator*(const Rat& r) const;
  Expo eval(const std::map<std::string, Rat>& vals) const;  // substitute known parameters
  bool operator<(const Expo& o) const { return t_ < o.t_; }
  bool operator==(const Expo& o) const { return t_ == o.t_; }
  std::string str() const;

 private:
  std::map<std::string, Rat> t_;
  void add(const std::string& k, const Rat& v);
};

using Mono = std::map<std::string, Expo>;  // variable -> exponent, no zero exponents

// Laurent polynomial over Q in named variables with affine exponents.
class Sym {
 public:
  Sym() = default;
  Sym(const Rat& c);  // NOLINT
  static Sym var(const std::string& name, const Expo& e = Expo(1));
  static Sym mono(const Mono& m, const Rat& c);

  const std::map<Mono, Rat>& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }
  bool is_const() const;
  Rat const_value() const;  // throws unless constant
  bool is_monomial() const { return t_.size() == 1; }
  std::set<std::string> variables() const;

  Sym operator+(const Sym& o) const;
  Sym operator-(const Sym& o) const;
  Sym operator-() const;
  Sym operator*(const Sym& o) const;
  Sym& operator+=(const Sym& o) { return *this = *this + o; }
  Sym& operator-=(const Sym& o) { return *this = *this - o; }
  Sym& operator*=(const Sym& o) { return *this = *this * o; }
  bool operator==(const Sym& o) const { return t_ == o.t_; }
  bool operator!=(const Sym& o) const { return t_ != o.t_; }
  bool operator<(const Sym& o) const { return t_ < o.t_; }

  Sym pow(i64 e) const;        // negative exponents only for monomials
  Sym pow(const Expo& e) const;  // symbolic exponent: monomials with coefficient 1 only
  Sym inverse() const;         // monomials only
  Sym operator/(const Sym& o) const;  // division by a monomial

  // var^e -> value^e; e must be an integer after evaluation
  Sym subst(const std::string& var, const Sym& value) const;
  Sym eval_params(const std::map<std::string, Rat>& vals) const;
  // var^e -> var^(e mod n); used for q^n := 1
  Sym reduce_exponent_mod(const std::string& var, i64 n) const;

  std::string str() const;
  nlohmann::json to_json() const;
  static Sym from_json(const nlohmann::json& j);

 private:
  std::map<Mono, Rat> t_;
  void add_term(const Mono& m, const Rat& c);
};

struct SymParseOptions {
  std::map<std::string, Rat> constants;  // e.g. l, m, k
  std::set<std::string> params;          // allowed only inside exponents
  // "r" expands to (r1 + r2 + r3)/2 when listed in params
  bool balanced_r = false;
};

// Grammar: sums, products, quotients by monomials, powers; ^ binds tighter than unary minus.
Sym parse_sym(const std::string& src, const SymParseOptions& opt = {});

}  // namespace acyc
