#include "acyc/euler_checks.hpp"

#include <algorithm>
#include <future>
#include <random>

namespace acyc::euler {

namespace {

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
  for (size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size()) s.replace(pos, from.size(), to);
  return s;
}

void check_weights(const Weights& w) {
  if (w.l < 2 || w.m < 2) throw PreconditionError("weights l, m must be at least 2");
  if ((w.l - w.m) % 2 != 0) throw PreconditionError("weights l and m must have the same parity");
  if (w.k < 2 || w.k % 2 != 0) throw PreconditionError("weight k must be even and at least 2");
}

Sym parse_w(const std::string& s, const Weights& w) {
  SymParseOptions o;
  o.constants = {{"k", Rat(w.k)}, {"l", Rat(w.l)}, {"m", Rat(w.m)}};
  return parse_sym(s, o);
}

// psi(q)/q in tame mode, its lambda-adic counterpart otherwise
std::string s_token(Mode m, bool bar) {
  if (m == Mode::Tame) return bar ? "(sb/q)" : "(s/q)";
  return bar ? "(Ab/q^(k-1))" : "(A/q^(k-1))";
}

std::vector<Step> relation_steps(PrimeCase c, Mode mode, const Weights& w) {
  std::vector<Step> st;
  if (c == PrimeCase::Split) {
    // psi(q) psi(qbar) = chi(q) q^(k-1), chi(q) = (chi_g chi_h)(q)^-1
    if (mode == Mode::Tame)
      st.push_back(Step{Step::Op::Subst, "sb", parse_w("ug^-1*uh^-1*q^(k-1)*s^-1", w)});
    else
      st.push_back(Step{Step::Op::Subst, "Ab", parse_w("ug^-1*uh^-1*q^(k-1)*A^-1", w)});
  } else {
    // Fr of a rational principal ideal is trivial; psi((q)) = chi(q) q^(k-1) with chi(q) = -(chi_g chi_h)(q)^-1
    st.push_back(Step{Step::Op::Subst, "F", Sym(1)});
    st.push_back(Step{Step::Op::Subst, "psi", parse_w("-ug^-1*uh^-1*q^(k-1)", w)});
  }
  return st;
}

Step modulus_step(PrimeCase c) {
  if (c == PrimeCase::Split) return Step{Step::Op::Subst, "q", Sym(1)};
  return Step{Step::Op::Mod, "q", Sym(), 2};
}

Sym apply_step(const Sym& x, const Step& s) {
  return s.op == Step::Op::Subst ? x.subst(s.var, s.value) : x.reduce_exponent_mod(s.var, s.n);
}

}  // namespace

std::string to_string(PrimeCase c) { return c == PrimeCase::Split ? "split" : "inert"; }
std::string to_string(Mode m) { return m == Mode::Tame ? "tame" : "lambda_adic"; }
std::string to_string(Variant v) {
  switch (v) {
    case Variant::Literal:
      return "literal";
    case Variant::Symmetrized:
      return "symmetrized";
    case Variant::Custom:
      return "custom";
  }
  return "?";
}

PrimeCase parse_case(const std::string& s) {
  if (s == "split") return PrimeCase::Split;
  if (s == "inert") return PrimeCase::Inert;
  throw InputError("case must be split or inert, got '" + s + "'");
}

Mode parse_mode(const std::string& s) {
  if (s == "tame") return Mode::Tame;
  if (s == "lambda" || s == "lambda_adic" || s == "lambda-adic") return Mode::LambdaAdic;
  throw InputError("mode must be tame or lambda_adic, got '" + s + "'");
}

// ---- Euler factors ----

Sym EulerFactorPoly::eval(const Sym& x) const {
  Sym r;
  for (size_t i = 0; i < c.size(); ++i) r += c[i] * x.pow(static_cast<i64>(i));
  return r;
}

std::string EulerFactorPoly::str() const {
  std::string s;
  for (size_t i = 0; i < c.size(); ++i) {
    if (c[i].is_zero()) continue;
    if (!s.empty()) s += " + ";
    s += "(" + c[i].str() + ")" + (i ? "*X^" + std::to_string(i) : "");
  }
  return s;
}

nlohmann::json EulerFactorPoly::to_json() const {
  nlohmann::json j;
  j["case"] = to_string(prime_case);
  j["mode"] = to_string(mode);
  j["weights"] = {w.k, w.l, w.m};
  for (size_t i = 0; i < c.size(); ++i) j["coefficients"].push_back(c[i].str());
  return j;
}

EulerFactorPoly euler_factor_split(int k, int l, int m, Mode mode) {
  Weights w{k, l, m};
  check_weights(w);
  const std::string S = s_token(mode, false);
  const std::array<std::string, 5> src = {
      "1",
      "-ag*ah/q^((l+m-2)/2)*{S}",
      "(ug*ah^2/q^(m-1) + uh*ag^2/q^(l-1) - 2*ug*uh)*{S}^2",
      "-ug*uh*ag*ah/q^((l+m-2)/2)*{S}^3",
      "ug^2*uh^2*{S}^4",
  };
  EulerFactorPoly P;
  P.prime_case = PrimeCase::Split;
  P.mode = mode;
  P.w = w;
  for (size_t i = 0; i < 5; ++i) P.c[i] = parse_w(replace_all(src[i], "{S}", S), w);
  return P;
}

EulerFactorPoly euler_factor_inert(int k, int l, int m, Mode mode) {
  Weights w{k, l, m};
  check_weights(w);
  const std::string G = "(ag^2/q^(l-1) - 2*ug)", H = "(ah^2/q^(m-1) - 2*uh)";
  const std::array<std::string, 5> src = {
      "1",
      "-{G}*{H}*psi/q^2",
      "(uh^2*{G}^2 + ug^2*{H}^2 - 2*ug^2*uh^2)*psi^2/q^4",
      "-ug^2*uh^2*{G}*{H}*psi^3/q^6",
      "ug^4*uh^4*psi^4/q^8",
  };
  EulerFactorPoly P;
  P.prime_case = PrimeCase::Inert;
  P.mode = mode;
  P.w = w;
  for (size_t i = 0; i < 5; ++i) P.c[i] = parse_w(replace_all(replace_all(src[i], "{G}", G), "{H}", H), w);
  return P;
}

std::string displayed_factor(PrimeCase c, Mode mode, Variant v) {
  if (v == Variant::Custom) throw InputError("custom displays are supplied by the caller");
  std::string g, h;
  if (v == Variant::Symmetrized) {
    g = "l-1";
    h = "m-1";
  } else if (mode == Mode::Tame) {
    g = "l-1";
    h = "m-2";
  } else {
    g = "l-2";
    h = "m-1";
  }
  std::string t;
  if (c == PrimeCase::Split)
    t = "q^(l+m-4)*( ug*uh*q*{S}^2*F^-2 - ag*ah/q^((l+m-4)/2)*{S}*F^-1"
        " + ug^-1*ag^2/q^({G}) + uh^-1*ah^2/q^({H}) - (q^2+1)/q"
        " - ag*ah/q^((l+m-4)/2)*{Sb}*F + ug*uh*q*{Sb}^2*F^2 )";
  else
    t = "q^(l+m-4)*( ug^-1*ag^2/q^({G}) + uh^-1*ah^2/q^({H}) - (q+1)^2/q )";
  t = replace_all(t, "{Sb}", s_token(mode, true));
  t = replace_all(t, "{S}", s_token(mode, false));
  t = replace_all(t, "{G}", g);
  return replace_all(t, "{H}", h);
}

std::string inert_remark_congruence() {
  return "ug^-2*ag^4 + uh^-2*ah^4 + 2*ug^-1*uh^-1*ag^2*ah^2*q"
         " - 4*ug^-1*ag^2*(q+1)/q^(l-1) - 4*uh^-1*ah^2*(q+1)/q^(m-1) + 8*(q+1)";
}

// ---- steps ----

std::string Step::str() const {
  if (op == Op::Mod) return var + "^" + std::to_string(n) + " := 1";
  return var + " := " + value.str();
}

nlohmann::json Step::to_json() const {
  if (op == Op::Mod) return {{"op", "mod"}, {"var", var}, {"n", n}, {"text", str()}};
  return {{"op", "subst"}, {"var", var}, {"value", value.to_json()}, {"text", str()}};
}

Step Step::from_json(const nlohmann::json& j) {
  Step s{Op::Subst, j.at("var").get<std::string>(), Sym()};
  const std::string op = j.at("op").get<std::string>();
  if (op == "mod") {
    s.op = Op::Mod;
    s.n = j.at("n").get<i64>();
  } else if (op == "subst") {
    s.value = Sym::from_json(j.at("value"));
  } else {
    throw InputError("unknown certificate step '" + op + "'");
  }
  return s;
}

Sym apply_steps(const Sym& x, const std::vector<Step>& steps) {
  Sym r = x;
  for (auto& s : steps) r = apply_step(r, s);
  return r;
}

// ---- certificates ----

nlohmann::json CongruenceCertificate::to_json() const {
  nlohmann::json j;
  j["case"] = to_string(prime_case);
  j["mode"] = to_string(mode);
  j["weights"] = {w.k, w.l, w.m};
  j["modulus"] = modulus;
  j["lhs"] = lhs.to_json();
  j["lhs_str"] = lhs.str();
  j["rhs"] = rhs.to_json();
  j["rhs_str"] = rhs.str();
  j["difference"] = difference.to_json();
  j["steps"] = nlohmann::json::array();
  for (auto& s : steps) j["steps"].push_back(s.to_json());
  j["reduced_lhs"] = reduced_lhs.str();
  j["reduced_rhs"] = reduced_rhs.str();
  j["residue"] = residue.to_json();
  j["residue_str"] = residue.str();
  j["certified"] = certified;
  j["variant"] = certified ? to_string(variant) : "none";
  j["attempts"] = nlohmann::json::array();
  for (auto& a : attempts)
    j["attempts"].push_back({{"variant", to_string(a.variant)}, {"display", a.display}, {"residue", a.residue.str()},
                             {"zero", a.residue.is_zero()}});
  j["engine_route"] = engine_agrees ? nlohmann::json(*engine_agrees) : nlohmann::json("unavailable");
  if (remark_agrees) j["remark_agrees"] = *remark_agrees;
  return j;
}

CongruenceCertificate verify_congruence(PrimeCase c, Mode mode, Weights w, const VerifyOptions& opt) {
  check_weights(w);
  if (mode == Mode::Tame && w.k != 2) throw PreconditionError("tame mode has k = 2");
  if (mode == Mode::Tame && w.l != w.m) throw PreconditionError("tame mode requires l = m; use lambda_adic for l != m");
  if (mode == Mode::LambdaAdic && w.l < w.m) throw PreconditionError("lambda_adic mode requires l >= m");

  CongruenceCertificate cert;
  cert.prime_case = c;
  cert.mode = mode;
  cert.w = w;
  cert.modulus = c == PrimeCase::Split ? "q := 1" : "q^2 := 1";
  const std::vector<Step> rel = relation_steps(c, mode, w);
  cert.steps = rel;
  cert.steps.push_back(modulus_step(c));

  if (c == PrimeCase::Split) {
    auto P = euler_factor_split(w.k, w.l, w.m, mode);
    const std::string bar = mode == Mode::Tame ? "sb" : "Ab";
    cert.lhs = P.eval(Sym::var("F", Expo(-1))) * parse_w("ug*uh*" + bar + "^2*F^2", w);
  } else {
    auto P = euler_factor_inert(w.k, w.l, w.m, mode);
    cert.lhs = P.eval(Sym::var("F", Expo(-1)));
  }
  cert.reduced_lhs = apply_steps(cert.lhs, cert.steps);

  auto square = [&](const Sym& f) { return c == PrimeCase::Inert ? f * f : f; };
  std::vector<std::pair<Variant, std::string>> plan;
  if (opt.display_override)
    plan.emplace_back(Variant::Custom, *opt.display_override);
  else
    for (Variant v : {Variant::Literal, Variant::Symmetrized}) plan.emplace_back(v, displayed_factor(c, mode, v));
  for (auto& [v, text] : plan) {
    Attempt a{v, text, square(parse_w(text, w)), Sym()};
    a.residue = apply_steps(cert.lhs - a.rhs, cert.steps);
    cert.attempts.push_back(a);
    if (a.residue.is_zero()) break;
  }
  const Attempt& last = cert.attempts.back();
  cert.variant = last.variant;
  cert.rhs = last.rhs;
  cert.difference = cert.lhs - cert.rhs;
  cert.reduced_rhs = apply_steps(cert.rhs, cert.steps);
  cert.residue = last.residue;
  cert.certified = cert.residue.is_zero();

  if (mode == Mode::Tame && opt.engine_route) {
    static const opcalc::RuleSet rules = opcalc::RuleSet::bundled("tame_axioms");
    Sym engine = opcalc::evaluate_factor(opcalc::corestriction_expansion(c, rules), c, w.l, w.m);
    Sym shown = parse_w(displayed_factor(c, mode, Variant::Literal), w);
    // split: compare modulo the relation only; inert: exactly
    cert.engine_agrees = c == PrimeCase::Split ? apply_steps(engine, rel) == apply_steps(shown, rel) : engine == shown;
  }
  if (c == PrimeCase::Inert) cert.remark_agrees = apply_steps(parse_w(inert_remark_congruence(), w), cert.steps) == cert.reduced_lhs;
  return cert;
}

std::vector<CongruenceCertificate> verify_batch(const std::vector<std::tuple<PrimeCase, Mode, Weights>>& reqs) {
  std::vector<std::future<CongruenceCertificate>> fs;
  for (auto& [c, m, w] : reqs) fs.push_back(std::async(std::launch::async, [c = c, m = m, w = w] { return verify_congruence(c, m, w); }));
  std::vector<CongruenceCertificate> out;
  for (auto& f : fs) out.push_back(f.get());
  return out;
}

bool replay(const nlohmann::json& cert, uint64_t seed) {
  std::mt19937_64 rng(seed);
  Sym cur = Sym::from_json(cert.at("difference"));
  for (auto& sj : cert.at("steps")) {
    Step s = Step::from_json(sj);
    std::vector<std::pair<Mono, Rat>> terms(cur.terms().begin(), cur.terms().end());
    std::shuffle(terms.begin(), terms.end(), rng);
    Sym next;
    for (auto& [m, c] : terms) next += apply_step(Sym::mono(m, c), s);
    cur = next;
  }
  return cur == Sym::from_json(cert.at("residue"));
}

nlohmann::json SpecializationReport::to_json() const {
  return {{"lhs_equal", lhs_equal}, {"reduced_lhs_equal", reduced_lhs_equal}, {"reduced_rhs_equal", reduced_rhs_equal},
          {"residue_equal", residue_equal}, {"ok", ok()}};
}

SpecializationReport specialize_to_tame(const CongruenceCertificate& lam, const CongruenceCertificate& tame) {
  if (lam.mode != Mode::LambdaAdic || tame.mode != Mode::Tame) throw PreconditionError("need a lambda-adic and a tame certificate");
  if (lam.prime_case != tame.prime_case) throw PreconditionError("certificates for different cases");
  if (lam.w.k != 2 || lam.w.l != tame.w.l || lam.w.m != tame.w.m) throw PreconditionError("specialization needs k = 2 and equal (l, m)");
  auto map = [](const Sym& x) { return x.subst("A", Sym::var("s")).subst("Ab", Sym::var("sb")); };
  SpecializationReport r;
  r.lhs_equal = map(lam.lhs) == tame.lhs;
  r.reduced_lhs_equal = map(lam.reduced_lhs) == tame.reduced_lhs;
  r.reduced_rhs_equal = map(lam.reduced_rhs) == tame.reduced_rhs;
  r.residue_equal = map(lam.residue) == tame.residue;
  return r;
}

// ---- numeric instantiation ----

nlohmann::json NumericReport::to_json() const {
  return {{"equal", equal}, {"v", v.get_str()}, {"q", q}, {"p", p}, {"warnings", warnings}, {"lhs", lhs}, {"rhs", rhs}};
}

NumericReport numeric_instantiate(const CongruenceCertificate& cert, const GrossenChar& psi, const NewformData& g,
                                  const NewformData& h, i64 q, i64 p, i64 n, int precision) {
  if (cert.prime_case != PrimeCase::Split || cert.mode != Mode::Tame)
    throw PreconditionError("numeric instantiation is defined for split tame certificates");
  if (cert.w.l != g.weight || cert.w.m != h.weight) throw PreconditionError("certificate weights do not match g and h");
  const Discriminant D(psi.D());
  PrimeSplit sp = splitting_type(D, q);
  if (sp.tag != SplitTag::Split) throw PreconditionError("q must split in K");
  if (q % p == 0 || g.level % q == 0 || h.level % q == 0 || psi.level() % q == 0 || n % q == 0)
    throw PreconditionError("q must be coprime to p, the levels and n");

  NumericReport rep;
  rep.q = q;
  rep.p = p;
  const NumberRing& R = psi.ring();
  const IdealArith& I = psi.ideals();
  RingClassData rcd = ring_class_group(D, n, p);
  Ideal Q = I.from_form(sp.prime), Qb = I.conj(Q);
  AbelianGroup::Elem fr = frobenius_of_ideal(Q, I, rcd);

  auto rational = [](const Num& x, const std::string& what) {
    if (!x.is_rational()) throw PreconditionError(what + " is not rational; only rational eigenvalue data is supported");
    return x.rational();
  };
  std::map<std::string, Num> val = {
      {"q", R.from_int(q)},
      {"ag", R.from_rat(rational(g.a(q), "a_q(g)"))},
      {"ah", R.from_rat(rational(h.a(q), "a_q(h)"))},
      {"ug", R.from_rat(rational(g.chi_value(q), "chi_g(q)"))},
      {"uh", R.from_rat(rational(h.chi_value(q), "chi_h(q)"))},
      {"s", psi.eval(Q)},
      {"sb", psi.eval(Qb)},
  };
  // the relation used by the certificate must hold for the actual values
  Num u = (val["ug"] * val["uh"]).inverse();
  if (val["s"] * val["sb"] != u * R.from_int(q).pow(cert.w.k - 1))
    throw PreconditionError("psi(q) psi(qbar) != chi(q) q^(k-1) for these data (chi = (chi_g chi_h)^-1)");

  NumCoeffs C{R};
  auto evaluate = [&](const Sym& x) {
    auto r = NumGroupAlg::zero(C, rcd.p_part);
    for (auto& [m, c] : x.terms()) {
      Num coef = R.from_rat(c);
      AbelianGroup::Elem e = rcd.p_part.identity();
      for (auto& [var, ex] : m) {
        i64 k = ex.as_int();
        if (var == "F") {
          for (i64 t = 0; t < std::abs(k); ++t) e = rcd.p_part.add(e, k > 0 ? fr : rcd.p_part.neg(fr));
          continue;
        }
        auto it = val.find(var);
        if (it == val.end()) throw DomainError("no numeric value for variable " + var);
        coef *= it->second.pow(k);
      }
      r.add_term(e, coef);
    }
    return r;
  };
  NumGroupAlg L = evaluate(cert.lhs), Rh = evaluate(cert.rhs);
  rep.lhs = L.str();
  rep.rhs = Rh.str();

  PAdicAvatar av(psi, p, precision);
  if ((q - 1) % p != 0) {
    rep.warnings.push_back("q is not 1 mod p: the congruence is vacuous in O (v = 0)");
    rep.v = 0;
  } else {
    rep.v = *av.place().ord(R.from_int(q - 1));
  }
  rep.equal = true;
  const NumGroupAlg diff = L - Rh;
  for (auto& [e, c] : diff.terms())
    if (!av.place().congruent(c, R.zero(), rep.v)) rep.equal = false;
  return rep;
}

}  // namespace acyc::euler
