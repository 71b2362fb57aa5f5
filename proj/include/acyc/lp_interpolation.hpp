#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "acyc/hecke.hpp"
#include "acyc/local.hpp"
#include "acyc/qexp.hpp"
#include "json.hpp"

namespace acyc::interp {

struct WeightTriple {
  int k = 2, l = 2, m = 2;
  WeightTriple() = default;
  WeightTriple(int k_, int l_, int m_);  // PreconditionError unless k even, l, m >= 2 of equal parity
  int c() const { return (k + l + m - 2) / 2; }
};

// (c-1)! (c-m)! (c-l)! (c+1-l-m)!; RangeError when k < l + m
BigInt gamma_factor(const WeightTriple& w);

enum class Regime { Balanced, FUnbalanced };
std::string to_string(Regime r);
// l and m are ordered so that l >= m first; DomainError when k <= |l - m|
Regime regime(const WeightTriple& w);

// Frobenius eigenvalues at p, all in the same truncated local ring. chi[i] is the image of chi_phi(p)
// for phi = f_k, g, h when known; the products alpha*beta are then checked exactly.
struct FrobeniusData {
  LocalRing L{3, {BigInt(-3), BigInt(1)}, 20};
  LElem alpha_k, beta_k, alpha_g, beta_g, alpha_h, beta_h;
  std::array<std::optional<LElem>, 3> chi;
  std::string origin;

  i64 p() const { return L.p(); }
  // empty when every invariant holds
  std::vector<std::string> violations(const WeightTriple& w) const;
  nlohmann::json to_json() const;
};

// unit root and its partner of x^2 - a x + c with a a unit; PreconditionError when a is not a unit
std::pair<LElem, LElem> hecke_roots(const LocalRing& L, const LElem& a, const LElem& c);

// alpha_k = psi(pbar), beta_k = psi(p) at the designated prime; alpha, beta of g and h from a_p, chi(p) p^(w-1).
// g and h must have rational Hecke eigenvalue at p.
FrobeniusData frobenius_from_cm(const GrossenChar& psi, const NewformData& g, const NewformData& h, i64 p,
                                int precision);

// JSON input: either {"cm": char file, "g": label or file, "h": ..., "p", "precision"} resolved by the caller,
// or explicit {"p", "precision", "eisenstein"?, "alpha_k", ..., "chi"?} with integer or rational entries
// (w-power coefficient lists allowed).
FrobeniusData frobenius_from_json(const nlohmann::json& j);

// x = num / p^den; v = nullopt means the numerator vanishes to working precision
struct LocalValue {
  LElem num;
  int den = 0;
  std::optional<Rat> v;
  bool vanishes() const { return !v.has_value(); }
};

struct Factor {
  std::string label;
  LocalValue value;
};

struct EulerProduct {
  std::string name;
  std::vector<Factor> factors;
  std::optional<Rat> v;  // sum of factor valuations; nullopt if some factor vanishes
};

struct EulerFactors {
  EulerProduct E_interp;  // four factors, each with beta_k
  EulerProduct E_bound;   // first factor with alpha_k
  LocalValue E0, E1;
  bool normalizations_differ = false;
  std::string discrepancy;
  nlohmann::json to_json(const LocalRing& L) const;
};

struct EulerOptions {
  bool check_invariants = true;  // PreconditionError on violations
};

EulerFactors euler_factors(const FrobeniusData& fd, const WeightTriple& w, const EulerOptions& opt = {});

enum class Normalization { Bound, Interp };
std::string to_string(Normalization n);

struct LengthBound {
  Rat bound;
  Rat v_factorial, v_E1, v_E, v_L;
  Normalization normalization = Normalization::Bound;
  std::vector<std::string> warnings;
  nlohmann::json to_json() const;
};

// 2 (v((l+m-4)!) + v(E1) - v(E) + v(L)); RangeError when k < l+m, DomainError when E vanishes
LengthBound length_bound(const FrobeniusData& fd, const WeightTriple& w, const Rat& lp_valuation,
                         Normalization n = Normalization::Bound, const EulerOptions& opt = {});
LengthBound length_bound(const EulerFactors& ef, i64 p, const WeightTriple& w, const Rat& lp_valuation,
                         Normalization n = Normalization::Bound);

// v_p(n!) by Legendre
i64 vp_factorial(i64 n, i64 p);

}  // namespace acyc::interp
