#include "acyc/operator_calculus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace acyc::opcalc {

namespace {

const std::array<std::string, kSymbols> kNames = {"T", "Tp", "D", "Dp", "Dn", "P1", "P2", "p1", "p2"};

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

SymParseOptions scalar_options() {
  SymParseOptions o;
  o.params = {"r", "r1", "r2", "r3"};
  o.balanced_r = true;
  return o;
}

// split at top-level '+'/'-' (outside braces and parentheses); each piece keeps its sign
std::vector<std::pair<int, std::string>> split_signed(const std::string& s) {
  std::vector<std::pair<int, std::string>> out;
  int depth = 0, sign = 1;
  std::string cur;
  auto flush = [&] {
    std::string t = trim(cur);
    if (!t.empty()) out.emplace_back(sign, t);
    cur.clear();
  };
  for (char c : s) {
    if (c == '{' || c == '(') ++depth;
    if (c == '}' || c == ')') --depth;
    if (depth == 0 && (c == '+' || c == '-')) {
      if (trim(cur).empty()) {
        if (c == '-') sign = -sign;
        continue;
      }
      flush();
      sign = c == '-' ? -1 : 1;
      continue;
    }
    cur += c;
  }
  if (depth != 0) throw InputError("unbalanced brackets in '" + s + "'");
  flush();
  return out;
}

// leading {scalar}, returns the rest
std::pair<Sym, std::string> take_scalar(const std::string& s) {
  std::string t = trim(s);
  if (t.empty() || t[0] != '{') return {Sym(1), t};
  int depth = 0;
  for (size_t i = 0; i < t.size(); ++i) {
    if (t[i] == '{') ++depth;
    if (t[i] == '}' && --depth == 0) return {parse_sym(t.substr(1, i - 1), scalar_options()), trim(t.substr(i + 1))};
  }
  throw InputError("unterminated scalar in '" + s + "'");
}

ClassSym parse_class(const std::string& s) {
  std::string t = trim(s);
  if (t.size() < 5 || t[0] != 'K' || (t[1] != '1' && t[1] != '2') || t[2] != '[' || t.back() != ']')
    throw InputError("bad class symbol '" + s + "'");
  ClassSym c;
  c.kind = t[1] - '0';
  try {
    c.j = std::stoi(t.substr(3, t.size() - 4));
  } catch (const std::exception&) {
    throw InputError("bad class level in '" + s + "'");
  }
  if (c.j < 0) throw InputError("negative class level in '" + s + "'");
  return c;
}

// "(a, b, c)" -> three words; returns the remainder after ')'
std::pair<std::array<Word, 3>, std::string> take_triple(const std::string& s) {
  std::string t = trim(s);
  if (t.empty() || t[0] != '(') throw InputError("expected '(' in '" + s + "'");
  size_t close = t.find(')');
  if (close == std::string::npos) throw InputError("expected ')' in '" + s + "'");
  std::string inner = t.substr(1, close - 1);
  std::array<Word, 3> w;
  size_t start = 0;
  for (int i = 0; i < 3; ++i) {
    size_t comma = inner.find(',', start);
    if ((comma == std::string::npos) != (i == 2)) throw InputError("expected three slots in '" + s + "'");
    w[static_cast<size_t>(i)] = parse_word(inner.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    start = comma + 1;
  }
  return {w, trim(t.substr(close + 1))};
}

struct Block {
  bool run;
  int sym;                             // when !run
  std::array<int, kSymbols> count{};  // when run
  size_t size() const {
    if (!run) return 1;
    size_t n = 0;
    for (int c : count) n += static_cast<size_t>(c);
    return n;
  }
  void emit(Word& w) const {
    if (!run) {
      w.push_back(sym);
      return;
    }
    for (int s = 0; s < kSymbols; ++s)
      for (int k = 0; k < count[static_cast<size_t>(s)]; ++k) w.push_back(s);
  }
};

bool contains(const Block& big, const Block& small) {
  for (size_t s = 0; s < kSymbols; ++s)
    if (big.count[s] < small.count[s]) return false;
  return true;
}

Block minus(const Block& big, const Block& small) {
  Block r = big;
  for (size_t s = 0; s < kSymbols; ++s) r.count[s] -= small.count[s];
  return r;
}

Level step_level(Level lv, int s, bool* ok) {
  switch (kind(s)) {
    case Kind::Hecke:
      return lv;
    case Kind::Degeneracy:
      if (lv.base || lv.j < 1) *ok = false;
      return Level{false, lv.j - 1};
    case Kind::Base:
      if (lv.base || lv.j != 0) *ok = false;
      return Level{true, 0};
  }
  return lv;
}

// level at which the symbol at position `pos` acts, given the input level of the whole word
Level level_before(const Word& w, size_t pos, Level input) {
  bool ok = true;
  Level lv = input;
  for (size_t i = w.size(); i > pos + 1; --i) lv = step_level(lv, w[i - 1], &ok);
  return lv;
}

bool word_consistent(const Word& w, Level input) {
  bool ok = true;
  Level lv = input;
  for (size_t i = w.size(); i > 0 && ok; --i) lv = step_level(lv, w[i - 1], &ok);
  return ok;
}

bool guard_allows(const WordRule& r, Level lv) {
  if (r.guard.empty()) return true;
  return std::find(r.guard.begin(), r.guard.end(), lv.str()) != r.guard.end();
}

Sym swap_r1_to_kh(const Sym& s) {
  Sym out;
  for (auto& [m, c] : s.terms()) {
    Mono m2;
    Expo kh;
    for (auto& [v, e] : m) {
      if (v == "q") {
        Rat a = e.coeff("r1");
        kh = kh + Expo(a * 2);
        Expo rest = e - Expo::param("r1") * a;
        if (!rest.is_zero()) m2[v] = rest;
      } else if (v == "kh") {
        kh = kh + e;
      } else {
        m2[v] = e;
      }
    }
    if (!kh.is_zero()) m2["kh"] = kh;
    out += Sym::mono(m2, c);
  }
  return out;
}

}  // namespace

Kind kind(int s) {
  if (s == P1 || s == P2) return Kind::Base;
  if (s == p1 || s == p2) return Kind::Degeneracy;
  return Kind::Hecke;
}

const std::string& name(int s) { return kNames.at(static_cast<size_t>(s)); }

int symbol_of(const std::string& s) {
  for (int i = 0; i < kSymbols; ++i)
    if (kNames[static_cast<size_t>(i)] == s) return i;
  throw InputError("unknown operator symbol '" + s + "'");
}

std::string word_str(const Word& w) {
  if (w.empty()) return "1";
  std::string s;
  for (size_t i = 0; i < w.size(); ++i) s += (i ? " " : "") + name(w[i]);
  return s;
}

Word parse_word(const std::string& s) {
  std::istringstream is(s);
  std::string tok;
  Word w;
  while (is >> tok)
    if (tok != "1") w.push_back(symbol_of(tok));
  return w;
}

Level ClassSym::slot_level(int slot) const {
  if (kind == 1) return Level{false, j};
  if (slot == 0) return Level{false, 2 * j};
  return Level{true, 0};
}

std::string Triple::str() const {
  return "(" + word_str(w[0]) + ", " + word_str(w[1]) + ", " + word_str(w[2]) + ") " + cls.str();
}

bool term_less(const Triple& a, const Triple& b) {
  auto height = [](const ClassSym& c) { return c.kind == 1 ? c.j : 2 * c.j; };
  if (height(a.cls) != height(b.cls)) return height(a.cls) < height(b.cls);
  if (a.length() != b.length()) return a.length() < b.length();
  if (a.cls.kind != b.cls.kind) return a.cls.kind < b.cls.kind;
  for (size_t i = 0; i < 3; ++i) {
    if (a.w[i].size() != b.w[i].size()) {
      // equal totals: compare the concatenation with slot separators (-1)
      Word x, y;
      for (size_t k = 0; k < 3; ++k) {
        x.insert(x.end(), a.w[k].begin(), a.w[k].end());
        x.push_back(-1);
        y.insert(y.end(), b.w[k].begin(), b.w[k].end());
        y.push_back(-1);
      }
      return x < y;
    }
    if (a.w[i] != b.w[i]) return a.w[i] < b.w[i];
  }
  return false;
}

// ---- TripleTerm ----

TripleTerm TripleTerm::single(const Triple& t, const Sym& c) {
  TripleTerm r;
  r.add(t, c);
  return r;
}

void TripleTerm::add(const Triple& t, const Sym& c) {
  if (c.is_zero()) return;
  auto it = t_.find(t);
  if (it == t_.end()) {
    t_.emplace(t, c);
    return;
  }
  it->second += c;
  if (it->second.is_zero()) t_.erase(it);
}

TripleTerm TripleTerm::operator+(const TripleTerm& o) const {
  TripleTerm r = *this;
  for (auto& [t, c] : o.t_) r.add(t, c);
  return r;
}
TripleTerm TripleTerm::operator-(const TripleTerm& o) const { return *this + o * Sym(-1); }
TripleTerm TripleTerm::operator*(const Sym& s) const {
  TripleTerm r;
  for (auto& [t, c] : t_) r.add(t, c * s);
  return r;
}

TripleTerm TripleTerm::apply(const std::array<Word, 3>& ops) const {
  TripleTerm r;
  for (auto& [t, c] : t_) {
    Triple u = t;
    for (size_t i = 0; i < 3; ++i) {
      Word w = ops[i];
      w.insert(w.end(), t.w[i].begin(), t.w[i].end());
      u.w[i] = w;
    }
    r.add(u, c);
  }
  return r;
}

std::string TripleTerm::str() const {
  if (t_.empty()) return "0";
  std::string s;
  bool first = true;
  // largest terms first
  for (auto it = t_.rbegin(); it != t_.rend(); ++it) {
    if (!first) s += " + ";
    first = false;
    s += "{" + it->second.str() + "} " + it->first.str();
  }
  return s;
}

nlohmann::json TripleTerm::to_json() const {
  auto j = nlohmann::json::array();
  for (auto it = t_.rbegin(); it != t_.rend(); ++it) {
    j.push_back({{"scalar", it->second.str()},
                 {"scalar_terms", it->second.to_json()},
                 {"slots", {word_str(it->first.w[0]), word_str(it->first.w[1]), word_str(it->first.w[2])}},
                 {"class", it->first.cls.str()}});
  }
  return j;
}

TripleTerm parse_term(const std::string& s) {
  TripleTerm r;
  for (auto& [sign, piece] : split_signed(s)) {
    auto [c, rest] = take_scalar(piece);
    auto [w, cls] = take_triple(rest);
    Triple t{w, parse_class(cls)};
    r.add(t, c * Sym(sign));
  }
  return r;
}

// ---- RuleSet ----

RuleSet RuleSet::parse(const std::string& text, const std::string& origin) {
  RuleSet rs;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    try {
      if (line.rfind("commute ", 0) == 0) {
        std::istringstream ws(line.substr(8));
        std::string tok;
        while (ws >> tok) {
          int sidx = symbol_of(tok);
          if (kind(sidx) != Kind::Hecke) throw InputError("only Hecke symbols may commute: " + tok);
          rs.commuting_[static_cast<size_t>(sidx)] = true;
        }
        continue;
      }
      if (line.rfind("def ", 0) == 0) {
        auto eq = line.find('=');
        if (eq == std::string::npos) throw InputError("definition needs '='");
        Definition d;
        d.cls = parse_class(line.substr(4, eq - 4));
        if (d.cls.kind != 2) throw InputError("only K2 classes are defined");
        auto [c, rest] = take_scalar(line.substr(eq + 1));
        auto [w, inner] = take_triple(rest);
        d.scalar = c;
        d.w = w;
        d.inner = parse_class(inner);
        if (d.inner.kind != 1) throw InputError("definitions unfold to K1 classes");
        d.src = line;
        rs.defs_.push_back(d);
        continue;
      }
      auto arrow = line.find("->");
      if (arrow == std::string::npos) throw InputError("expected '->'");
      std::string lhs = trim(line.substr(0, arrow)), rhs = trim(line.substr(arrow + 2));
      if (!lhs.empty() && lhs[0] == '(') {
        TripleAxiom ax;
        ax.src = line;
        auto [w, rest] = take_triple(lhs);
        if (!rest.empty()) throw InputError("unexpected text after axiom pattern");
        for (size_t i = 0; i < 3; ++i) {
          if (w[i].size() != 1 || kind(w[i][0]) != Kind::Degeneracy) throw InputError("axiom patterns are single degeneracies");
          ax.lhs[i] = w[i][0];
        }
        auto when = rhs.find(" when ");
        if (when != std::string::npos) {
          std::string cond = trim(rhs.substr(when + 6));
          if (cond.rfind("j=", 0) != 0) throw InputError("condition must read j=<n>");
          ax.only_j = std::stoi(cond.substr(2));
          rhs = trim(rhs.substr(0, when));
        }
        auto [c, r2] = take_scalar(rhs);
        auto [rw, tail] = take_triple(r2);
        if (!tail.empty()) throw InputError("unexpected text after axiom result");
        ax.scalar = c;
        ax.rhs = rw;
        rs.axioms_.push_back(ax);
        continue;
      }
      if (lhs.empty() || lhs[0] != '@') throw InputError("word rules start with @<slot>");
      WordRule wr;
      wr.src = line;
      size_t sp = lhs.find(' ');
      std::string slot = lhs.substr(1, sp == std::string::npos ? std::string::npos : sp - 1);
      if (slot == "*")
        wr.slot = 0;
      else if (slot == "1" || slot == "2" || slot == "3")
        wr.slot = slot[0] - '0';
      else
        throw InputError("bad slot '" + slot + "'");
      std::string pat = sp == std::string::npos ? "" : trim(lhs.substr(sp));
      if (!pat.empty() && pat[0] == '[') {
        auto close = pat.find(']');
        if (close == std::string::npos) throw InputError("unterminated guard");
        std::string g = pat.substr(1, close - 1);
        std::replace(g.begin(), g.end(), ',', ' ');
        std::istringstream gs(g);
        std::string tag;
        while (gs >> tag) wr.guard.push_back(tag);
        pat = trim(pat.substr(close + 1));
      }
      wr.lhs = parse_word(pat);
      if (wr.lhs.empty()) throw InputError("empty left side");
      for (auto& [sign, piece] : split_signed(rhs)) {
        auto [c, w] = take_scalar(piece);
        wr.rhs.emplace_back(c * Sym(sign), parse_word(w));
      }
      rs.word_rules_.push_back(wr);
    } catch (const InputError& e) {
      throw InputError(where + ": " + e.what());
    }
  }
  for (auto& wr : rs.word_rules_) {
    wr.lhs = rs.canonical(wr.lhs);
    for (auto& [c, w] : wr.rhs) w = rs.canonical(w);
  }
  rs.check_orientation();
  return rs;
}

RuleSet RuleSet::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open rule file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

RuleSet RuleSet::bundled(const std::string& nm) { return load(std::string(ACYC_DATA_DIR) + "/rules/" + nm + ".rules"); }

Word RuleSet::canonical(const Word& w) const {
  Word r = w;
  size_t i = 0;
  while (i < r.size()) {
    if (!commutes(r[i])) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j < r.size() && commutes(r[j])) ++j;
    std::sort(r.begin() + static_cast<long>(i), r.begin() + static_cast<long>(j));
    i = j;
  }
  return r;
}

void RuleSet::check_orientation() const {
  auto word_less = [](const Word& a, const Word& b) { return a.size() != b.size() ? a.size() < b.size() : a < b; };
  for (auto& r : word_rules_)
    for (auto& [c, w] : r.rhs)
      if (!word_less(w, r.lhs))
        throw InputError("rule '" + r.src + "' does not decrease the term order (" + word_str(w) + " vs " + word_str(r.lhs) + ")");
}

void RuleSet::check_levels(const Triple& t) const {
  for (int s = 0; s < 3; ++s) {
    const Word& w = t.w[static_cast<size_t>(s)];
    if (!word_consistent(w, t.cls.slot_level(s)))
      throw StructuralError("level-inconsistent slot " + std::to_string(s + 1) + " in " + t.str());
  }
}

namespace {

std::vector<Block> blocks_of(const Word& w, const std::array<bool, kSymbols>& comm) {
  std::vector<Block> b;
  for (int s : w) {
    if (comm[static_cast<size_t>(s)]) {
      if (b.empty() || !b.back().run) b.push_back(Block{true, -1, {}});
      b.back().count[static_cast<size_t>(s)]++;
    } else {
      b.push_back(Block{false, s, {}});
    }
  }
  return b;
}

}  // namespace

std::vector<RuleSet::Match> RuleSet::matches(const Word& w, int slot, Level input) const {
  std::vector<Match> out;
  auto wb = blocks_of(w, commuting_);
  for (size_t ri = 0; ri < word_rules_.size(); ++ri) {
    const WordRule& r = word_rules_[ri];
    if (r.slot != 0 && r.slot != slot + 1) continue;
    auto pb = blocks_of(r.lhs, commuting_);
    const size_t k = pb.size();
    if (k > wb.size()) continue;
    for (size_t i = 0; i + k <= wb.size(); ++i) {
      bool ok = true;
      for (size_t t = 0; t < k && ok; ++t) {
        const Block &p = pb[t], &x = wb[i + t];
        if (p.run != x.run) {
          ok = false;
        } else if (!p.run) {
          ok = p.sym == x.sym;
        } else if (t == 0 || t + 1 == k) {
          ok = contains(x, p);
        } else {
          ok = x.count == p.count;
        }
      }
      if (!ok) continue;
      // rearranged word: prefix, lhs, suffix
      Word pre, suf;
      for (size_t t = 0; t < i; ++t) wb[t].emit(pre);
      if (pb[0].run) minus(wb[i], pb[0]).emit(pre);
      if (k > 1 && pb[k - 1].run) minus(wb[i + k - 1], pb[k - 1]).emit(suf);
      if (k == 1 && pb[0].run) {
        // single run: leftovers stay on the left
      }
      for (size_t t = i + k; t < wb.size(); ++t) wb[t].emit(suf);
      Word re = pre;
      re.insert(re.end(), r.lhs.begin(), r.lhs.end());
      re.insert(re.end(), suf.begin(), suf.end());
      size_t begin = pre.size(), end = pre.size() + r.lhs.size();
      Level lv = level_before(re, end - 1, input);
      if (!guard_allows(r, lv)) continue;
      out.push_back(Match{ri, begin, end, re});
    }
  }
  return out;
}

std::vector<std::pair<Sym, Word>> RuleSet::normalize_word(const Word& w0, int slot, Level lv) const {
  std::map<Word, Sym> cur;
  cur[canonical(w0)] = Sym(1);
  std::set<Word> done;
  size_t steps = 0;
  while (true) {
    auto it = std::find_if(cur.rbegin(), cur.rend(), [&](auto& e) { return !done.count(e.first); });
    if (it == cur.rend()) break;
    Word w = it->first;
    Sym c = it->second;
    auto ms = matches(w, slot, lv);
    if (ms.empty()) {
      done.insert(w);
      continue;
    }
    if (++steps > 100000) throw DomainError("word normalization did not terminate");
    cur.erase(w);
    const Match& m = ms.front();
    for (auto& [rc, rw] : word_rules_[m.rule].rhs) {
      Word nw(m.rearranged.begin(), m.rearranged.begin() + static_cast<long>(m.begin));
      nw.insert(nw.end(), rw.begin(), rw.end());
      nw.insert(nw.end(), m.rearranged.begin() + static_cast<long>(m.end), m.rearranged.end());
      nw = canonical(nw);
      auto& slotc = cur[nw];
      slotc += c * rc;
      if (slotc.is_zero()) cur.erase(nw);
      done.erase(nw);
    }
  }
  std::vector<std::pair<Sym, Word>> out;
  for (auto& [w, c] : cur) out.emplace_back(c, w);
  return out;
}

std::optional<TripleTerm> RuleSet::step(const Triple& t, const Sym& c, std::mt19937_64* rng, std::string* used) const {
  struct Cand {
    int kind;  // 0 axiom, 1 word rule
    size_t idx;
    int slot;
    Match m;
  };
  std::vector<Cand> cands;
  if (t.cls.kind == 1 && t.cls.j >= 1) {
    bool all = true;
    std::array<int, 3> last{};
    for (size_t s = 0; s < 3; ++s) {
      if (t.w[s].empty() || kind(t.w[s].back()) != Kind::Degeneracy) {
        all = false;
        break;
      }
      last[s] = t.w[s].back();
    }
    if (all)
      for (size_t a = 0; a < axioms_.size(); ++a)
        if (axioms_[a].lhs == last && (!axioms_[a].only_j || *axioms_[a].only_j == t.cls.j)) {
          cands.push_back(Cand{0, a, -1, {}});
          if (!rng) break;
        }
  }
  if (cands.empty() || rng) {
    for (int s = 0; s < 3; ++s) {
      for (auto& m : matches(t.w[static_cast<size_t>(s)], s, t.cls.slot_level(s))) {
        cands.push_back(Cand{1, m.rule, s, m});
        if (!rng) break;
      }
      if (!rng && !cands.empty()) break;
    }
  }
  if (cands.empty()) return std::nullopt;
  const Cand& ch = rng ? cands[(*rng)() % cands.size()] : cands.front();
  TripleTerm out;
  if (ch.kind == 0) {
    const TripleAxiom& ax = axioms_[ch.idx];
    Triple u = t;
    for (size_t s = 0; s < 3; ++s) {
      u.w[s].pop_back();
      u.w[s].insert(u.w[s].end(), ax.rhs[s].begin(), ax.rhs[s].end());
      u.w[s] = canonical(u.w[s]);
    }
    u.cls.j -= 1;
    out.add(u, c * ax.scalar);
    if (used) *used = ax.src;
  } else {
    const WordRule& r = word_rules_[ch.idx];
    for (auto& [rc, rw] : r.rhs) {
      Triple u = t;
      Word nw(ch.m.rearranged.begin(), ch.m.rearranged.begin() + static_cast<long>(ch.m.begin));
      nw.insert(nw.end(), rw.begin(), rw.end());
      nw.insert(nw.end(), ch.m.rearranged.begin() + static_cast<long>(ch.m.end), ch.m.rearranged.end());
      u.w[static_cast<size_t>(ch.slot)] = canonical(nw);
      out.add(u, c * rc);
    }
    if (used) *used = r.src;
  }
  for (auto& [u, uc] : out.terms()) {
    if (!term_less(u, t)) throw DomainError("term order violated: " + t.str() + " -> " + u.str());
    check_levels(u);
  }
  return out;
}

TripleTerm RuleSet::unfold(const TripleTerm& t) const {
  TripleTerm out;
  for (auto& [tr, c] : t.terms()) {
    if (tr.cls.kind != 2) {
      out.add(tr, c);
      continue;
    }
    auto d = std::find_if(defs_.begin(), defs_.end(), [&](const Definition& x) { return x.cls == tr.cls; });
    if (d == defs_.end()) throw StructuralError("no definition for " + tr.cls.str());
    Triple u;
    for (size_t s = 0; s < 3; ++s) {
      u.w[s] = tr.w[s];
      u.w[s].insert(u.w[s].end(), d->w[s].begin(), d->w[s].end());
      u.w[s] = canonical(u.w[s]);
    }
    u.cls = d->inner;
    out.add(u, c * d->scalar);
  }
  return out;
}

TripleTerm RuleSet::fold(const TripleTerm& t) const {
  TripleTerm out;
  for (auto& [tr, c] : t.terms()) {
    bool folded = false;
    for (auto& d : defs_) {
      if (!(d.inner == tr.cls)) continue;
      Triple u;
      bool ok = true;
      for (size_t s = 0; s < 3 && ok; ++s) {
        auto wb = blocks_of(tr.w[s], commuting_);
        auto pb = blocks_of(canonical(d.w[s]), commuting_);
        if (pb.size() > wb.size()) {
          ok = false;
          break;
        }
        size_t off = wb.size() - pb.size();
        for (size_t i = 0; i < pb.size() && ok; ++i) {
          const Block &p = pb[i], &x = wb[off + i];
          if (p.run != x.run)
            ok = false;
          else if (!p.run)
            ok = p.sym == x.sym;
          else
            ok = i == 0 ? contains(x, p) : x.count == p.count;
        }
        if (!ok) break;
        Word pre;
        for (size_t i = 0; i < off; ++i) wb[i].emit(pre);
        if (!pb.empty() && pb[0].run) minus(wb[off], pb[0]).emit(pre);
        u.w[s] = canonical(pre);
      }
      if (!ok) continue;
      u.cls = d.cls;
      out.add(u, c / d.scalar);
      folded = true;
      break;
    }
    if (!folded) out.add(tr, c);
  }
  return out;
}

TripleTerm RuleSet::normal_form(const TripleTerm& input, const Strategy& st, NormalFormStats* stats) const {
  TripleTerm cur;
  const TripleTerm unfolded = unfold(input);
  for (auto& [tr, c] : unfolded.terms()) {
    Triple u = tr;
    for (auto& w : u.w) w = canonical(w);
    check_levels(u);
    cur.add(u, c);
  }
  std::mt19937_64 rng(st.seed);
  std::set<Triple, TermLess> normal;
  size_t steps = 0;
  while (true) {
    std::vector<Triple> open;
    for (auto& [tr, c] : cur.terms())
      if (!normal.count(tr)) open.push_back(tr);
    if (open.empty()) break;
    // deterministic: largest open triple; randomized: any
    Triple pick = st.randomized ? open[rng() % open.size()] : open.back();
    Sym c = cur.terms().at(pick);
    std::string used;
    auto res = step(pick, c, st.randomized ? &rng : nullptr, &used);
    if (!res) {
      normal.insert(pick);
      continue;
    }
    if (++steps > st.max_steps) throw DomainError("rewriting exceeded " + std::to_string(st.max_steps) + " steps");
    if (stats) stats->rule_uses[used]++;
    cur.add(pick, -c);
    for (auto& [u, uc] : res->terms()) {
      cur.add(u, uc);
      normal.erase(u);
    }
  }
  if (stats) stats->steps = steps;
  return fold(cur);
}

std::vector<CriticalPair> RuleSet::critical_pairs() const {
  std::vector<CriticalPair> out;
  std::set<std::string> seen;
  const std::vector<Level> levels = {{false, 0}, {false, 1}, {false, 2}, {true, 0}};
  auto merge = [&](const Block& a, const Block& b, Block* r) {
    if (a.run != b.run) return false;
    if (!a.run) {
      *r = a;
      return a.sym == b.sym;
    }
    *r = a;
    for (size_t s = 0; s < kSymbols; ++s) r->count[s] = std::max(a.count[s], b.count[s]);
    return true;
  };
  for (size_t ia = 0; ia < word_rules_.size(); ++ia)
    for (size_t ib = 0; ib < word_rules_.size(); ++ib) {
      const WordRule &A = word_rules_[ia], &B = word_rules_[ib];
      auto ab = blocks_of(A.lhs, commuting_), bb = blocks_of(B.lhs, commuting_);
      std::vector<Word> cands;
      for (size_t o = 1; o <= std::min(ab.size(), bb.size()); ++o) {
        std::vector<Block> merged(ab.begin(), ab.end() - static_cast<long>(o));
        bool ok = true;
        for (size_t t = 0; t < o && ok; ++t) {
          Block r;
          ok = merge(ab[ab.size() - o + t], bb[t], &r);
          merged.push_back(r);
        }
        if (!ok) continue;
        merged.insert(merged.end(), bb.begin() + static_cast<long>(o), bb.end());
        Word w;
        for (auto& b : merged) b.emit(w);
        cands.push_back(canonical(w));
      }
      for (const Word& w : cands)
        for (int slot = 0; slot < 3; ++slot) {
          if ((A.slot && A.slot != slot + 1) || (B.slot && B.slot != slot + 1)) continue;
          for (const Level& lv : levels) {
            if (!word_consistent(w, lv)) continue;
            auto ms = matches(w, slot, lv);
            std::vector<Match> ma, mb;
            for (auto& m : ms) (m.rule == ia ? ma : mb).push_back(m);
            for (auto& m : ms)
              if (m.rule == ib && ia == ib) mb.push_back(m);
            if (ma.empty() || mb.empty()) continue;
            auto apply_one = [&](const Match& m) {
              std::map<Word, Sym> acc;
              for (auto& [rc, rw] : word_rules_[m.rule].rhs) {
                Word nw(m.rearranged.begin(), m.rearranged.begin() + static_cast<long>(m.begin));
                nw.insert(nw.end(), rw.begin(), rw.end());
                nw.insert(nw.end(), m.rearranged.begin() + static_cast<long>(m.end), m.rearranged.end());
                for (auto& [c2, w2] : normalize_word(nw, slot, lv)) {
                  acc[w2] += rc * c2;
                  if (acc[w2].is_zero()) acc.erase(w2);
                }
              }
              return acc;
            };
            auto show = [](const std::map<Word, Sym>& m) {
              if (m.empty()) return std::string("0");
              std::string s;
              for (auto& [w2, c2] : m) s += (s.empty() ? "" : " + ") + ("{" + c2.str() + "} " + word_str(w2));
              return s;
            };
            auto ra = apply_one(ma.front());
            for (auto& m : mb) {
              auto rb = apply_one(m);
              if (ra == rb) continue;
              std::string key = A.src + "|" + B.src + "|" + word_str(w) + "|" + lv.str();
              if (!seen.insert(key).second) continue;
              out.push_back(CriticalPair{A.src, B.src, word_str(w), lv.str(), show(ra), show(rb)});
            }
          }
        }
    }
  return out;
}

// ---- derivations ----

namespace {

Word variant_word(const std::string& v) {
  if (v == "11") return {p1, p1};
  if (v == "21") return {p1, p2};
  if (v == "22") return {p2, p2};
  throw InputError("variant must be 11, 21 or 22, got '" + v + "'");
}

}  // namespace

TripleTerm derive_level_two(const std::string& variant, const RuleSet& rules, const Strategy& st) {
  Triple t{{variant_word(variant), Word{}, Word{}}, ClassSym{2, 1}};
  return rules.normal_form(TripleTerm::single(t), st);
}

TripleTerm expected_level_two(const std::string& v, bool lambda_adic) {
  static const std::map<std::string, std::string> tame = {
      {"11", "{q^r2} (1,1,T Tp) K2[0] - {(q+1)*q^(r2+r3)} (1,1,1) K2[0]"},
      {"21", "{q^r} (1,Tp,Tp) K2[0] - {q^(r2+r3)} (Tp,Dp,Dp) K2[0]"},
      {"22", "{q^(r1+r3)} (1,Tp Tp,Dp) K2[0] - {(q+1)*q^(2*r)} (1,Dp,Dp) K2[0]"}};
  static const std::map<std::string, std::string> lambda = {
      {"11", "{chi*kh^-2*q^r2} (1,1,Dp T T) K2[0] - {chi*kh^-2*(q+1)*q^(r2+r3)} (1,1,1) K2[0]"},
      {"21", "{chi*kh^-1*q^((r2+r3)/2)} (1,T,T) K2[0] - {chi*kh^-2*q^(r2+r3)} (D Tp,D,D) K2[0]"},
      {"22", "{chi*q^r3} (1,T T,D) K2[0] - {chi*(q+1)*q^(r2+r3)} (1,D,D) K2[0]"}};
  const auto& tbl = lambda_adic ? lambda : tame;
  auto it = tbl.find(v);
  if (it == tbl.end()) throw InputError("variant must be 11, 21 or 22, got '" + v + "'");
  return parse_term(it->second);
}

TripleTerm corestriction_operator(PrimeCase c) {
  if (c == PrimeCase::Split)
    return parse_term("(p1 p1,1,1) K2[1] - {(s*G + sb*Gb)/q} (p1 p2,1,1) K2[1] + {chi/q} (p2 p2,1,1) K2[1]");
  return parse_term("(p1 p1,1,1) K2[1] - {chi/q} (p2 p2,1,1) K2[1]");
}

TripleTerm corestriction_expansion(PrimeCase c, const RuleSet& rules, const Strategy& st) {
  return rules.normal_form(corestriction_operator(c), st);
}

Sym evaluate_factor(const TripleTerm& t, PrimeCase c, int l, int m) {
  const Sym q = Sym::var("q"), F = Sym::var("F");
  const Sym ug = Sym::var("ug"), uh = Sym::var("uh");
  const Sym eps = c == PrimeCase::Split ? Sym(1) : Sym(-1);
  // chi eps_K chi_g chi_h = 1
  const Sym chi = eps * (ug * uh).inverse();
  // slot images of T, Tp, D, Dp; Dn never survives the fold
  std::array<std::array<Sym, 4>, 3> img;
  {
    Sym tp = c == PrimeCase::Split ? Sym::var("s") * F.inverse() + Sym::var("sb") * F : Sym(0);
    Sym dp = chi * eps;  // phi(<q>') = chi(q) eps_K(q) [(q)], and [(q)] = 1
    img[0] = {dp.inverse() * tp, tp, dp.inverse(), dp};
    Sym ag = Sym::var("ag"), ah = Sym::var("ah");
    img[1] = {ug.inverse() * ag, ag, ug.inverse(), ug};
    img[2] = {uh.inverse() * ah, ah, uh.inverse(), uh};
  }
  const std::map<std::string, Rat> params = {{"r1", Rat(0)}, {"r2", Rat(l - 2)}, {"r3", Rat(m - 2)}};
  Sym out;
  for (auto& [tr, coef] : t.terms()) {
    if (!(tr.cls == ClassSym{2, 0})) throw StructuralError("evaluation needs terms on K2[0], got " + tr.str());
    Sym v = coef.eval_params(params).subst("chi", chi).subst("G", F.inverse()).subst("Gb", F);
    for (size_t s = 0; s < 3; ++s)
      for (int sym : tr.w[s]) {
        if (sym > Dp) throw StructuralError("cannot evaluate " + name(sym) + " in " + tr.str());
        v *= img[s][static_cast<size_t>(sym)];
      }
    out += v;
  }
  return out;
}

TripleTerm tame_to_lambda(const TripleTerm& t, const RuleSet& lambda_rules) {
  static const std::array<int, kSymbols> swap = {Tp, T, Dp, D, Dn, P1, P2, p1, p2};
  const Sym factor = Sym::var("chi") * Sym::var("kh", Expo(-2));
  TripleTerm out;
  for (auto& [tr, c] : t.terms()) {
    Triple u = tr;
    for (auto& w : u.w)
      for (auto& s : w) s = swap[static_cast<size_t>(s)];
    out.add(u, swap_r1_to_kh(c) * factor);
  }
  return lambda_rules.normal_form(out);
}

}  // namespace acyc::opcalc
