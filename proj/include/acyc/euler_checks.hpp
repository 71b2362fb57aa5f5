#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "acyc/group_algebra.hpp"
#include "acyc/hecke.hpp"
#include "acyc/operator_calculus.hpp"
#include "acyc/qexp.hpp"
#include "acyc/symbolic.hpp"
#include "json.hpp"

namespace acyc::euler {

using opcalc::PrimeCase;

enum class Mode { Tame, LambdaAdic };
std::string to_string(PrimeCase c);
std::string to_string(Mode m);
PrimeCase parse_case(const std::string& s);  // InputError
Mode parse_mode(const std::string& s);       // "tame" | "lambda"/"lambda_adic"

struct Weights {
  int k = 2, l = 2, m = 2;
};

// Variables: q, ag, ah, ug, uh; s, sb (split, tame), A, Ab (split, lambda-adic), psi (inert).
struct EulerFactorPoly {
  PrimeCase prime_case = PrimeCase::Split;
  Mode mode = Mode::Tame;
  Weights w;
  std::array<Sym, 5> c;
  Sym eval(const Sym& x) const;  // sum c_i x^i, x a monomial
  std::string str() const;
  nlohmann::json to_json() const;
};

// l, m of the same parity, k even and >= 2; PreconditionError otherwise
EulerFactorPoly euler_factor_split(int k, int l, int m, Mode mode = Mode::Tame);
EulerFactorPoly euler_factor_inert(int k, int l, int m, Mode mode = Mode::Tame);

// the displayed corestriction factor (with its q^(l+m-4) prefactor)
enum class Variant { Literal, Symmetrized, Custom };
std::string to_string(Variant v);
std::string displayed_factor(PrimeCase c, Mode mode, Variant v);
// the congruence stated in the remark on inert primes, mod q^2 - 1
std::string inert_remark_congruence();

struct Step {
  enum class Op { Subst, Mod } op;
  std::string var;
  Sym value;    // Subst
  i64 n = 0;    // Mod: var^n := 1
  std::string str() const;
  nlohmann::json to_json() const;
  static Step from_json(const nlohmann::json& j);
};

Sym apply_steps(const Sym& x, const std::vector<Step>& steps);

struct Attempt {
  Variant variant;
  std::string display;
  Sym rhs, residue;
};

struct CongruenceCertificate {
  PrimeCase prime_case = PrimeCase::Split;
  Mode mode = Mode::Tame;
  Weights w;
  std::string modulus;  // "q := 1" or "q^2 := 1"
  Sym lhs, rhs, difference;
  std::vector<Step> steps;
  Sym reduced_lhs, reduced_rhs, residue;
  Variant variant = Variant::Literal;  // the variant of the final attempt
  bool certified = false;
  std::vector<Attempt> attempts;
  // second route: the factor computed by the rewrite engine, compared before the modulus step
  std::optional<bool> engine_agrees;
  std::optional<bool> remark_agrees;  // inert only
  nlohmann::json to_json() const;
};

struct VerifyOptions {
  std::optional<std::string> display_override;  // mutation tests; disables the symmetrized retry
  bool engine_route = true;
};

CongruenceCertificate verify_congruence(PrimeCase c, Mode mode, Weights w, const VerifyOptions& opt = {});
// several requests in parallel; results in input order
std::vector<CongruenceCertificate> verify_batch(const std::vector<std::tuple<PrimeCase, Mode, Weights>>& reqs);

// re-applies the recorded steps to the recorded difference, processing terms in a seeded random order;
// true when the recorded residue is reproduced
bool replay(const nlohmann::json& certificate, uint64_t seed);

// A -> s, Ab -> sb at k = 2; compares lhs exactly and the reduced sides and residue exactly
struct SpecializationReport {
  bool lhs_equal = false, reduced_lhs_equal = false, reduced_rhs_equal = false, residue_equal = false;
  bool ok() const { return lhs_equal && reduced_lhs_equal && reduced_rhs_equal && residue_equal; }
  nlohmann::json to_json() const;
};
SpecializationReport specialize_to_tame(const CongruenceCertificate& lambda, const CongruenceCertificate& tame);

struct NumericReport {
  bool equal = false;
  Rat v;  // v_P(q - 1), normalized so that v_P(p) = 1
  i64 q = 0, p = 0;
  std::vector<std::string> warnings;
  std::string lhs, rhs;  // group algebra elements
  nlohmann::json to_json() const;
};

// Evaluates both sides of a split tame certificate in (O/P^v)[R_n] with actual character values.
NumericReport numeric_instantiate(const CongruenceCertificate& cert, const GrossenChar& psi, const NewformData& g,
                                  const NewformData& h, i64 q, i64 p, i64 n, int precision);

}  // namespace acyc::euler
