#pragma once

#include <array>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "acyc/symbolic.hpp"
#include "json.hpp"

namespace acyc {

struct StructuralError : DomainError {
  using DomainError::DomainError;
};

namespace opcalc {

enum class Kind { Hecke, Base, Degeneracy };

// alphabet in index order; the index order is the lexicographic component of the term order
enum Symbol : int { T = 0, Tp, D, Dp, Dn, P1, P2, p1, p2, kSymbols };
Kind kind(int s);
const std::string& name(int s);
int symbol_of(const std::string& s);  // InputError for unknown names

using Word = std::vector<int>;  // left to right; the rightmost symbol acts first
std::string word_str(const Word& w);
Word parse_word(const std::string& s);

// n^2 q^j, or the level-one curve
struct Level {
  bool base = false;
  int j = 0;
  bool operator==(const Level& o) const { return base == o.base && j == o.j; }
  std::string str() const { return base ? "B" : std::to_string(j); }
};

// kappa^(1) at n^2 q^j (kind 1) or kappa^(2) at n q^j (kind 2)
struct ClassSym {
  int kind = 1;
  int j = 0;
  Level slot_level(int slot) const;
  auto tie() const { return std::tie(kind, j); }
  bool operator==(const ClassSym& o) const { return tie() == o.tie(); }
  std::string str() const { return "K" + std::to_string(kind) + "[" + std::to_string(j) + "]"; }
};

struct Triple {
  std::array<Word, 3> w;
  ClassSym cls;
  size_t length() const { return w[0].size() + w[1].size() + w[2].size(); }
  bool operator==(const Triple& o) const { return w == o.w && cls == o.cls; }
  std::string str() const;
};

// term order: level height, then total word length, then lexicographic
bool term_less(const Triple& a, const Triple& b);
struct TermLess {
  bool operator()(const Triple& a, const Triple& b) const { return term_less(a, b); }
};

class TripleTerm {
 public:
  TripleTerm() = default;
  static TripleTerm single(const Triple& t, const Sym& c = Sym(1));
  const std::map<Triple, Sym, TermLess>& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }
  void add(const Triple& t, const Sym& c);
  TripleTerm operator+(const TripleTerm& o) const;
  TripleTerm operator-(const TripleTerm& o) const;
  TripleTerm operator*(const Sym& c) const;
  // (u1, u2, u3) composed on the left of every triple
  TripleTerm apply(const std::array<Word, 3>& ops) const;
  bool operator==(const TripleTerm& o) const { return t_ == o.t_; }
  bool operator!=(const TripleTerm& o) const { return !(*this == o); }
  std::string str() const;
  nlohmann::json to_json() const;

 private:
  std::map<Triple, Sym, TermLess> t_;
};

// {scalar} (w1, w2, w3) K.. [+ ...]
TripleTerm parse_term(const std::string& s);

struct TripleAxiom {
  std::array<int, 3> lhs{};
  std::optional<int> only_j;
  Sym scalar;
  std::array<Word, 3> rhs;
  std::string src;
};

struct WordRule {
  int slot = 0;  // 0: any slot
  std::vector<std::string> guard;  // level tags at which the left side may act; empty = all
  Word lhs;
  std::vector<std::pair<Sym, Word>> rhs;
  std::string src;
};

struct Definition {
  ClassSym cls;
  Sym scalar;
  std::array<Word, 3> w;
  ClassSym inner;
  std::string src;
};

struct CriticalPair {
  std::string rule_a, rule_b, word, level;
  std::string result_a, result_b;
};

struct Strategy {
  bool randomized = false;
  uint64_t seed = 0;
  size_t max_steps = 200000;
};

struct NormalFormStats {
  size_t steps = 0;
  std::map<std::string, size_t> rule_uses;
};

class RuleSet {
 public:
  static RuleSet parse(const std::string& text, const std::string& origin = "<string>");
  static RuleSet load(const std::string& path);
  static RuleSet bundled(const std::string& name);  // tame_axioms or lambda_axioms

  const std::vector<TripleAxiom>& axioms() const { return axioms_; }
  const std::vector<WordRule>& word_rules() const { return word_rules_; }
  const std::vector<Definition>& definitions() const { return defs_; }
  bool commutes(int s) const { return commuting_[static_cast<size_t>(s)]; }
  Word canonical(const Word& w) const;  // sorts maximal runs of commuting symbols

  // throws StructuralError when some slot word is level-inconsistent
  void check_levels(const Triple& t) const;
  // expands definitions of kappa^(2) at positive level
  TripleTerm unfold(const TripleTerm& t) const;
  // recognizes kappa^(2) at level 0 on the normal form
  TripleTerm fold(const TripleTerm& t) const;
  TripleTerm normal_form(const TripleTerm& t, const Strategy& st = {}, NormalFormStats* stats = nullptr) const;
  // normal form of a single slot word with only word rules, at input level `lv`
  std::vector<std::pair<Sym, Word>> normalize_word(const Word& w, int slot, Level lv) const;
  std::vector<CriticalPair> critical_pairs() const;

 private:
  std::vector<TripleAxiom> axioms_;
  std::vector<WordRule> word_rules_;
  std::vector<Definition> defs_;
  std::array<bool, kSymbols> commuting_{};

  struct Match {
    size_t rule;
    size_t begin, end;  // positions in the canonical word, the matched symbols are rearranged into [begin, end)
    Word rearranged;
  };
  std::vector<Match> matches(const Word& w, int slot, Level class_level) const;
  std::optional<TripleTerm> step(const Triple& t, const Sym& c, std::mt19937_64* rng, std::string* used) const;
  void check_orientation() const;
};

// (pi_ij, 1, 1) applied to kappa^(2) at nq; variant "11", "21" or "22"
TripleTerm derive_level_two(const std::string& variant, const RuleSet& rules, const Strategy& st = {});
// the displayed right-hand sides, read through the same DSL
TripleTerm expected_level_two(const std::string& variant, bool lambda_adic);

enum class PrimeCase { Split, Inert };
// N applied to kappa^(2) at nq, with s = psi(q), sb = psi(qbar), G = [q], Gb = [qbar], chi = chi(q)
TripleTerm corestriction_operator(PrimeCase c);
TripleTerm corestriction_expansion(PrimeCase c, const RuleSet& rules, const Strategy& st = {});

// Images under the Hecke actions on the three slots, in weights (k, l, m) = (2, l, m):
// slot 1 through phi, slots 2 and 3 through the eigenvalues of g and h.
// Variables: q, ag, ah, ug, uh, s, sb, F (F = Fr_q, [q] = F^-1, [qbar] = F).
Sym evaluate_factor(const TripleTerm& t, PrimeCase c, int l, int m);

// tame -> lambda-adic: T <-> Tp, D <-> Dp, q^(r1) -> kh^2, then multiply by chi kh^-2
TripleTerm tame_to_lambda(const TripleTerm& t, const RuleSet& lambda_rules);

}  // namespace opcalc
}  // namespace acyc
