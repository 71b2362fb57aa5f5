#include "acyc/symbolic.hpp"

#include <cctype>
#include <sstream>

#include "acyc/jsonutil.hpp"

namespace acyc {

// ---- Expo ----

Expo::Expo(const Rat& c) { add("", c); }

Expo Expo::param(const std::string& name) {
  Expo e;
  e.add(name, 1);
  return e;
}

void Expo::add(const std::string& k, const Rat& v) {
  if (v == 0) return;
  auto it = t_.find(k);
  if (it == t_.end()) {
    t_.emplace(k, v);
    return;
  }
  it->second += v;
  if (it->second == 0) t_.erase(it);
}

bool Expo::is_const() const { return t_.empty() || (t_.size() == 1 && t_.begin()->first.empty()); }

Rat Expo::constant() const {
  auto it = t_.find("");
  return it == t_.end() ? Rat(0) : it->second;
}

Rat Expo::coeff(const std::string& name) const {
  auto it = t_.find(name);
  return it == t_.end() ? Rat(0) : it->second;
}

i64 Expo::as_int() const {
  if (!is_const()) throw DomainError("exponent " + str() + " is symbolic");
  Rat c = constant();
  if (c.get_den() != 1 || !c.get_num().fits_slong_p()) throw DomainError("exponent " + str() + " is not an integer");
  return c.get_num().get_si();
}

Expo Expo::operator+(const Expo& o) const {
  Expo r = *this;
  for (auto& [k, v] : o.t_) r.add(k, v);
  return r;
}
Expo Expo::operator-(const Expo& o) const { return *this + (-o); }
Expo Expo::operator-() const { return *this * Rat(-1); }
Expo Expo::operator*(const Rat& s) const {
  Expo r;
  for (auto& [k, v] : t_) r.add(k, v * s);
  return r;
}

Expo Expo::eval(const std::map<std::string, Rat>& vals) const {
  Expo r;
  for (auto& [k, v] : t_) {
    auto it = k.empty() ? vals.end() : vals.find(k);
    if (it == vals.end())
      r.add(k, v);
    else
      r.add("", v * it->second);
  }
  return r;
}

std::string Expo::str() const {
  if (t_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  auto emit = [&](const std::string& k, const Rat& v) {
    Rat a = abs(v);
    if (!first || v < 0) os << (v < 0 ? "-" : "+");
    first = false;
    if (k.empty()) {
      os << a.get_str();
    } else {
      if (a.get_num() != 1) os << a.get_num().get_str() << "*";
      os << k;
      if (a.get_den() != 1) os << "/" << a.get_den().get_str();
    }
  };
  for (auto& [k, v] : t_)
    if (!k.empty()) emit(k, v);
  if (t_.count("")) emit("", t_.at(""));
  return os.str();
}

// ---- Sym ----

Sym::Sym(const Rat& c) {
  if (c != 0) t_.emplace(Mono{}, c);
}

Sym Sym::var(const std::string& name, const Expo& e) {
  Sym s;
  Mono m;
  if (!e.is_zero()) m.emplace(name, e);
  s.t_.emplace(m, Rat(1));
  return s;
}

Sym Sym::mono(const Mono& m, const Rat& c) {
  Sym s;
  Mono clean;
  for (auto& [v, e] : m)
    if (!e.is_zero()) clean.emplace(v, e);
  s.add_term(clean, c);
  return s;
}

void Sym::add_term(const Mono& m, const Rat& c) {
  if (c == 0) return;
  auto it = t_.find(m);
  if (it == t_.end()) {
    t_.emplace(m, c);
    return;
  }
  it->second += c;
  if (it->second == 0) t_.erase(it);
}

bool Sym::is_const() const { return t_.empty() || (t_.size() == 1 && t_.begin()->first.empty()); }

Rat Sym::const_value() const {
  if (!is_const()) throw DomainError("not a constant: " + str());
  return t_.empty() ? Rat(0) : t_.begin()->second;
}

std::set<std::string> Sym::variables() const {
  std::set<std::string> v;
  for (auto& [m, c] : t_)
    for (auto& [x, e] : m) v.insert(x);
  return v;
}

Sym Sym::operator+(const Sym& o) const {
  Sym r = *this;
  for (auto& [m, c] : o.t_) r.add_term(m, c);
  return r;
}
Sym Sym::operator-() const {
  Sym r;
  for (auto& [m, c] : t_) r.t_.emplace(m, -c);
  return r;
}
Sym Sym::operator-(const Sym& o) const { return *this + (-o); }

static Mono mono_mul(const Mono& a, const Mono& b) {
  Mono r = a;
  for (auto& [v, e] : b) {
    auto it = r.find(v);
    if (it == r.end()) {
      r.emplace(v, e);
    } else {
      it->second = it->second + e;
      if (it->second.is_zero()) r.erase(it);
    }
  }
  return r;
}

Sym Sym::operator*(const Sym& o) const {
  Sym r;
  for (auto& [m, c] : t_)
    for (auto& [m2, c2] : o.t_) r.add_term(mono_mul(m, m2), c * c2);
  return r;
}

Sym Sym::inverse() const {
  if (!is_monomial()) throw DomainError("inverse of a non-monomial: " + str());
  auto& [m, c] = *t_.begin();
  Mono mi;
  for (auto& [v, e] : m) mi.emplace(v, -e);
  Sym r;
  r.t_.emplace(mi, 1 / c);
  return r;
}

Sym Sym::pow(i64 e) const {
  if (e < 0) return inverse().pow(-e);
  Sym r(1), b = *this;
  while (e > 0) {
    if (e & 1) r = r * b;
    e >>= 1;
    if (e) b = b * b;
  }
  return r;
}

Sym Sym::pow(const Expo& e) const {
  if (e.is_const() && e.constant().get_den() == 1) return pow(e.as_int());
  if (!is_monomial() || t_.begin()->second != 1) throw DomainError("symbolic power of " + str());
  Mono m;
  for (auto& [v, x] : t_.begin()->first) {
    if (!x.is_const()) throw DomainError("nested symbolic exponent in " + str());
    Expo y = e * x.constant();
    if (!y.is_zero()) m.emplace(v, y);
  }
  Sym r;
  r.t_.emplace(m, Rat(1));
  return r;
}

Sym Sym::operator/(const Sym& o) const {
  if (o.is_zero()) throw DomainError("division by zero");
  return *this * o.inverse();
}

Sym Sym::subst(const std::string& var, const Sym& value) const {
  Sym r;
  std::map<i64, Sym> cache;
  for (auto& [m, c] : t_) {
    auto it = m.find(var);
    if (it == m.end()) {
      r.add_term(m, c);
      continue;
    }
    i64 n = it->second.as_int();
    auto ci = cache.find(n);
    if (ci == cache.end()) ci = cache.emplace(n, value.pow(n)).first;
    Mono rest = m;
    rest.erase(var);
    r += Sym::mono(rest, c) * ci->second;
  }
  return r;
}

Sym Sym::eval_params(const std::map<std::string, Rat>& vals) const {
  Sym r;
  for (auto& [m, c] : t_) {
    Mono m2;
    for (auto& [v, e] : m) {
      Expo e2 = e.eval(vals);
      if (!e2.is_zero()) m2.emplace(v, e2);
    }
    r.add_term(m2, c);
  }
  return r;
}

Sym Sym::reduce_exponent_mod(const std::string& var, i64 n) const {
  Sym r;
  for (auto& [m, c] : t_) {
    Mono m2 = m;
    auto it = m2.find(var);
    if (it != m2.end()) {
      i64 e = mod64(it->second.as_int(), n);
      if (e == 0)
        m2.erase(it);
      else
        it->second = Expo(e);
    }
    r.add_term(m2, c);
  }
  return r;
}

static std::string expo_str(const Expo& e) {
  std::string s = e.str();
  if (e.is_const() && e.constant().get_den() == 1 && e.constant() > 0) return s;
  return "(" + s + ")";
}

std::string Sym::str() const {
  if (t_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto& [m, c] : t_) {
    Rat a = abs(c);
    os << (c < 0 ? (first ? "-" : " - ") : (first ? "" : " + "));
    first = false;
    bool need_star = false;
    if (a != 1 || m.empty()) {
      os << a.get_str();
      need_star = true;
    }
    for (auto& [v, e] : m) {
      if (need_star) os << "*";
      os << v;
      if (!(e.is_const() && e.constant() == 1)) os << "^" << expo_str(e);
      need_star = true;
    }
  }
  return os.str();
}

nlohmann::json Sym::to_json() const {
  auto j = nlohmann::json::array();
  for (auto& [m, c] : t_) {
    nlohmann::json mj = nlohmann::json::object();
    for (auto& [v, e] : m) {
      if (e.is_const()) {
        mj[v] = rat_json(e.constant());
      } else {
        nlohmann::json ej = nlohmann::json::object();
        for (auto& [k, x] : e.terms()) ej[k.empty() ? "1" : k] = rat_json(x);
        mj[v] = ej;
      }
    }
    j.push_back({rat_json(c), mj});
  }
  return j;
}

Sym Sym::from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw InputError("polynomial JSON must be an array of [coeff, monomial]");
  Sym r;
  for (auto& t : j) {
    if (!t.is_array() || t.size() != 2 || !t[1].is_object()) throw InputError("bad polynomial term " + t.dump());
    Mono m;
    for (auto& [v, ej] : t[1].items()) {
      Expo e;
      if (ej.is_object()) {
        for (auto& [k, x] : ej.items()) e = e + (k == "1" ? Expo(rat_of(x)) : Expo::param(k) * rat_of(x));
      } else {
        e = Expo(rat_of(ej));
      }
      if (!e.is_zero()) m.emplace(v, e);
    }
    r.add_term(m, rat_of(t[0]));
  }
  return r;
}

// ---- parser ----

namespace {

struct Parser {
  const std::string& s;
  const SymParseOptions& opt;
  size_t i = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw InputError("expression '" + s + "' at " + std::to_string(i) + ": " + msg);
  }
  void skip() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool eat(char c) {
    skip();
    if (i < s.size() && s[i] == c) {
      ++i;
      return true;
    }
    return false;
  }

  Sym expr(bool in_expo) {
    Sym r = term(in_expo);
    while (true) {
      if (eat('+'))
        r += term(in_expo);
      else if (eat('-'))
        r -= term(in_expo);
      else
        return r;
    }
  }
  Sym term(bool in_expo) {
    Sym r = unary(in_expo);
    while (true) {
      if (eat('*')) {
        r *= unary(in_expo);
      } else if (eat('/')) {
        Sym d = unary(in_expo);
        if (!d.is_monomial()) fail("division by a non-monomial");
        r = r / d;
      } else {
        return r;
      }
    }
  }
  Sym unary(bool in_expo) {
    if (eat('-')) return -unary(in_expo);
    if (eat('+')) return unary(in_expo);
    return power(in_expo);
  }
  Sym power(bool in_expo) {
    Sym b = atom(in_expo);
    if (!eat('^')) return b;
    bool neg = eat('-');
    Sym ex = atom(true);
    Expo e = to_expo(ex);
    if (neg) e = -e;
    if (in_expo) {
      if (!e.is_const()) fail("symbolic exponent inside an exponent");
      return b.pow(e.as_int());
    }
    try {
      return b.pow(e);
    } catch (const DomainError& err) {
      fail(err.what());
    }
  }
  Sym atom(bool in_expo) {
    skip();
    if (i >= s.size()) fail("unexpected end");
    char c = s[i];
    if (c == '(' || c == '{') {
      ++i;
      Sym r = expr(in_expo);
      if (!eat(c == '(' ? ')' : '}')) fail("unbalanced bracket");
      return r;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      BigInt n(s.substr(i, j - i));
      i = j;
      return Sym(Rat(n));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_' || s[j] == '\'')) ++j;
      std::string id = s.substr(i, j - i);
      i = j;
      if (auto it = opt.constants.find(id); it != opt.constants.end()) return Sym(it->second);
      if (opt.params.count(id)) {
        if (!in_expo) fail("parameter " + id + " outside an exponent");
        if (id == "r" && opt.balanced_r)
          return (Sym::var("r1") + Sym::var("r2") + Sym::var("r3")) * Sym(frac(1, 2));
        return Sym::var(id);
      }
      if (in_expo) fail("unknown exponent symbol " + id);
      return Sym::var(id);
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  Expo to_expo(const Sym& x) const {
    Expo e;
    for (auto& [m, c] : x.terms()) {
      if (m.empty()) {
        e = e + Expo(c);
      } else if (m.size() == 1 && m.begin()->second == Expo(1)) {
        e = e + Expo::param(m.begin()->first) * c;
      } else {
        throw InputError("expression '" + s + "': exponent must be affine in the parameters");
      }
    }
    return e;
  }
};

}  // namespace

Sym parse_sym(const std::string& src, const SymParseOptions& opt) {
  Parser p{src, opt};
  Sym r = p.expr(false);
  p.skip();
  if (p.i != src.size()) p.fail("trailing input");
  return r;
}

}  // namespace acyc
