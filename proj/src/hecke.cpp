#include "acyc/hecke.hpp"

#include <fstream>

#include "acyc/jsonutil.hpp"

namespace acyc {

using nlohmann::json;

// ---- DirichletChar ----

DirichletChar DirichletChar::trivial(i64 N) {
  if (N < 1) throw InputError("Dirichlet modulus must be positive");
  DirichletChar c;
  c.N_ = N;
  c.m_ = 1;
  c.e_.assign(static_cast<size_t>(N), -1);
  for (i64 r = 0; r < N; ++r)
    if (gcd64(r, N) == 1) c.e_[r] = 0;
  if (N == 1) c.e_[0] = 0;
  return c;
}

DirichletChar DirichletChar::from_generators(i64 N, i64 order, const std::vector<std::pair<i64, i64>>& gens) {
  if (order < 1) throw InputError("character order must be positive");
  DirichletChar c = trivial(N);
  c.m_ = order;
  if (N == 1) return c;
  for (auto& x : c.e_)
    if (x == 0) x = -2;  // unassigned unit
  c.e_[1] = 0;
  std::vector<i64> frontier{1};
  for (auto& [g, e] : gens)
    if (gcd64(g, N) != 1) throw InputError("character generator " + std::to_string(g) + " not a unit mod " + std::to_string(N));
  while (!frontier.empty()) {
    std::vector<i64> next;
    for (i64 r : frontier)
      for (auto& [g, e] : gens) {
        i64 s = mulmod(r, g, N);
        i64 v = mod64(c.e_[r] + e, order);
        if (c.e_[s] == -2) {
          c.e_[s] = v;
          next.push_back(s);
        } else if (c.e_[s] != v) {
          throw InputError("finite part values are not a well-defined character mod " + std::to_string(N));
        }
      }
    frontier = std::move(next);
  }
  for (auto x : c.e_)
    if (x == -2) throw InputError("finite part generators do not generate (Z/" + std::to_string(N) + ")^x");
  return c;
}

std::optional<i64> DirichletChar::exponent(i64 n) const {
  i64 r = mod64(n, N_);
  if (e_[r] < 0) return std::nullopt;
  return e_[r];
}

bool DirichletChar::is_trivial() const {
  for (auto x : e_)
    if (x > 0) return false;
  return true;
}

i64 DirichletChar::conductor() const {
  for (i64 d : divisors(N_)) {
    bool ok = true;
    for (i64 r = 1; r < N_ && ok; r += d)
      if (e_[r] > 0) ok = false;
    if (ok) return d;
  }
  return N_;
}

DirichletChar DirichletChar::inverse() const {
  DirichletChar c = *this;
  for (auto& x : c.e_)
    if (x > 0) x = m_ - x;
  return c;
}

// ---- helpers ----

namespace {

i64 get_i64(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer()) throw InputError(std::string("character spec: missing integer field ") + key);
  return j[key].get<i64>();
}

QuadForm form_of_json(const json& v, i64 D) {
  if (!v.is_array() || v.size() < 2) throw InputError("form must be [a, b] or [a, b, c]");
  i64 a = v[0].get<i64>(), b = v[1].get<i64>();
  if (a <= 0 || (b * b - D) % (4 * a) != 0) throw InputError("no form of discriminant " + std::to_string(D) + " with a=" + std::to_string(a) + ", b=" + std::to_string(b));
  QuadForm f{a, b, (b * b - D) / (4 * a)};
  if (v.size() >= 3 && v[2].get<i64>() != f.c) throw InputError("form coefficient c inconsistent with discriminant");
  return f;
}

}  // namespace

// ---- GrossenChar ----

GrossenChar GrossenChar::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open character file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError("character file " + path + ": " + e.what());
  }
  return from_json(j);
}

GrossenChar GrossenChar::from_json(const json& j) {
  GrossenChar g;
  g.source_ = j;
  g.D_ = get_i64(j, "D");
  Discriminant disc(g.D_);
  g.k_ = static_cast<int>(get_i64(j, "k"));
  if (g.k_ < 2 || g.k_ % 2 != 0) throw InputError("k must be an even integer >= 2");
  g.I_ = IdealArith(g.D_);
  g.cg_ = class_group_data(g.D_);

  // conductor: primitive ideal [a, (-b + sqrt D)/2]
  QuadForm cf = j.contains("conductor") ? form_of_json(j["conductor"], g.D_) : principal_form(g.D_);
  g.cond_ = cf;
  g.f_ = g.I_.from_form(cf);
  if (g.f_.C != 1) throw InputError("conductor must be a primitive ideal");
  const i64 N = g.f_.norm();
  g.wf_ = mod64(-g.f_.B, N);

  i64 m = j.contains("cyclotomic_order") ? get_i64(j, "cyclotomic_order") : 1;
  std::vector<std::pair<i64, i64>> gens;
  if (j.contains("finite_part_values"))
    for (auto& e : j["finite_part_values"]) gens.emplace_back(e.at("gen").get<i64>(), e.at("exp").get<i64>());
  g.eps_ = DirichletChar::from_generators(N, m, gens);

  // value ring
  if (j.contains("value_ring")) {
    const auto& vr = j["value_ring"];
    std::vector<Rat> pc = rats_of(vr.at("poly"));
    std::vector<BigInt> f;
    for (auto& r : pc) {
      if (r.get_den() != 1) throw InputError("value ring polynomial must have integer coefficients");
      f.push_back(r.get_num());
    }
    NumberRing R(f, vr.value("var", std::string("x")));
    g.cyc_.R = R;
    g.sqrtD_ = R.from_coeffs(rats_of(vr.at("sqrtD")));
    g.cyc_.zeta = vr.contains("zeta") ? R.from_coeffs(rats_of(vr["zeta"])) : R.from_int(m == 2 ? -1 : 1);
  } else {
    if (!g.cg_.group.is_trivial()) throw InputError("value_ring is required when the class group is nontrivial");
    if (m > 2) throw InputError("value_ring is required for cyclotomic order > 2");
    NumberRing R({BigInt(-g.D_), BigInt(0), BigInt(1)}, "s");
    g.cyc_.R = R;
    g.sqrtD_ = R.gen();
    g.cyc_.zeta = R.from_int(m == 2 ? -1 : 1);
  }
  g.cyc_.order = m;

  if (j.contains("class_values"))
    for (auto& e : j["class_values"]) {
      QuadForm f = form_of_json(e.at("form"), g.D_);
      g.cv_.push_back({f, g.cyc_.R.from_coeffs(rats_of(e.at("value")))});
    }

  // exponent box over the class generators
  const auto& G = g.cg_.group;
  std::vector<AbelianGroup::Elem> cls;
  for (auto& cv : g.cv_) {
    Ideal a = g.I_.from_form(cv.form);
    if (!g.coprime_to_conductor(a)) throw InputError("class value form " + cv.form.str() + " not prime to the conductor");
    g.gen_ideals_.push_back(a);
    g.gen_conj_.push_back(g.I_.conj(a));
    cls.push_back(g.cg_.class_of(cv.form));
    g.gen_orders_.push_back(G.element_order(cls.back()));
  }
  std::vector<i64> e(cls.size(), 0);
  while (true) {
    AbelianGroup::Elem c = G.identity();
    for (size_t i = 0; i < e.size(); ++i) c = G.add(c, G.scale(cls[i], e[i]));
    g.exps_of_class_.emplace(c, e);
    size_t i = e.size();
    bool done = true;
    while (i > 0) {
      --i;
      if (++e[i] < g.gen_orders_[i]) {
        done = false;
        break;
      }
      e[i] = 0;
    }
    if (done) break;
  }
  if (static_cast<i64>(g.exps_of_class_.size()) != G.order())
    throw InputError("class_values forms do not generate the class group (" + G.str() + ")");
  g.validate();
  return g;
}

json GrossenChar::to_json() const { return source_; }

i64 GrossenChar::eps_residue(const QElt& a) const {
  i64 N = f_.norm();
  return mod64(mod64(a.x, N) + mulmod(mod64(a.y, N), wf_, N), N);
}

Num GrossenChar::eps_value(const QElt& a) const {
  auto e = eps_.exponent(eps_residue(a));
  if (!e) throw DomainError("element " + I_.order().str(a) + " is not prime to the conductor");
  return cyc_.value(*e);
}

Num GrossenChar::eval_principal(const QElt& a) const {
  return eps_value(a) * I_.order().embed(a, sqrtD_).pow(k_ - 1);
}

Num GrossenChar::chi(i64 n) const {
  auto e = eps_.exponent(n);
  if (!e) return ring().zero();
  return cyc_.value(*e);
}

GrossenChar::Principalization GrossenChar::principalize(const Ideal& a) const {
  AbelianGroup::Elem c = cg_.class_of(I_.primitive_form(a));
  const auto& exps = exps_of_class_.at(c);
  Ideal b = a;
  for (size_t i = 0; i < exps.size(); ++i) b = I_.mul(b, I_.pow(gen_conj_[i], exps[i]));
  auto d = I_.generator(b);
  if (!d) throw DomainError("principalize: expected principal ideal " + b.str());
  return {*d, exps};
}

Num GrossenChar::eval(const Ideal& a) const {
  if (!coprime_to_conductor(a)) throw DomainError("eval: ideal " + a.str() + " not prime to the conductor");
  auto pr = principalize(a);
  Num v = eval_principal(pr.delta);
  for (size_t i = 0; i < pr.exps.size(); ++i) {
    if (pr.exps[i] == 0) continue;
    // psi(g) / psi(g gbar), psi(g gbar) = chi(N g) (N g)^{k-1}
    i64 n = gen_ideals_[i].norm();
    BigInt npow;
    mpz_ui_pow_ui(npow.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k_ - 1));
    Num fac = cv_[i].value * chi(n).inverse() * frac(1, npow);
    v = v * fac.pow(pr.exps[i]);
  }
  return v;
}

void GrossenChar::validate() const {
  const auto& R = ring();
  if (!(sqrtD_ * sqrtD_ == R.from_int(D_))) throw InputError("value ring: sqrtD does not square to D");
  const i64 m = cyc_.order;
  if (!(cyc_.zeta.pow(m) == R.one())) throw InputError("value ring: zeta^m != 1");
  for (auto& [l, e] : factorize(m))
    if (cyc_.zeta.pow(m / l) == R.one()) throw InputError("value ring: zeta is not a primitive root of unity");
  for (auto& u : I_.order().units())
    if (!(eval_principal(u) == R.one()))
      throw InputError("finite part incompatible with units: eps(u) u^{k-1} != 1 at u = " + I_.order().str(u));
  // every relation prod g_i^{e_i} = (gamma) in the exponent box must hold for the given values
  if (cv_.empty()) return;
  std::vector<i64> e(cv_.size(), 0);
  const auto& G = cg_.group;
  std::vector<AbelianGroup::Elem> cls;
  for (auto& cv : cv_) cls.push_back(cg_.class_of(cv.form));
  // box [0, ord_i] inclusive so that each g_i^{ord_i} relation is covered
  while (true) {
    AbelianGroup::Elem c = G.identity();
    for (size_t i = 0; i < e.size(); ++i) c = G.add(c, G.scale(cls[i], e[i]));
    if (c == G.identity()) {
      Ideal b = I_.unit();
      Num lhs = R.one();
      for (size_t i = 0; i < e.size(); ++i) {
        b = I_.mul(b, I_.pow(gen_ideals_[i], e[i]));
        lhs = lhs * cv_[i].value.pow(e[i]);
      }
      auto d = I_.generator(b);
      if (!d) throw DomainError("validate: expected principal ideal " + b.str());
      if (!(lhs == eval_principal(*d)))
        throw InputError("class_values inconsistent with psi((a)) = eps(a) a^{k-1} on a principal product of generators");
    }
    size_t i = e.size();
    bool done = true;
    while (i > 0) {
      --i;
      if (++e[i] <= gen_orders_[i]) {
        done = false;
        break;
      }
      e[i] = 0;
    }
    if (done) break;
  }
}

// ---- PAdicAvatar ----

PAdicAvatar::PAdicAvatar(const GrossenChar& psi, i64 p, int precision)
    : psi_(&psi), sp_(splitting_type(Discriminant(psi.D()), p)), place_([&] {
        if (p == 2) throw PreconditionError("p-adic avatar: p must be odd");
        if (sp_.tag != SplitTag::Split) throw PreconditionError("p-adic avatar: p must split in K (got " + to_string(sp_.tag) + ")");
        return Place::make(psi.ring(), p, psi.sqrtD(), sp_.b, precision);
      }()) {}

Ideal PAdicAvatar::prime() const { return psi_->ideals().from_form(sp_.prime); }
Ideal PAdicAvatar::prime_bar() const { return psi_->ideals().from_form(sp_.conj); }

LElem PAdicAvatar::eval(const Ideal& a) const { return place_.map(psi_->eval(a)); }

std::optional<Rat> PAdicAvatar::ord(const Ideal& a) const { return place_.ord(psi_->eval(a)); }

// ---- CMDecomposition ----

CMDecomposition::CMDecomposition(const GrossenChar& psi, i64 p, int precision, ArtinNormalization artin)
    : psi_(&psi), p_(p), artin_(artin), av_(psi, p, precision) {
  const i64 h = psi.class_group().group.order();
  if (h % p == 0) throw PreconditionError("CM decomposition: p divides the class number");
  if (psi.conductor_norm() % p == 0) throw PreconditionError("CM decomposition: p divides N(f)");
  const auto& L = local();
  const auto& I = psi.ideals();
  BigInt pN = L.modulus(), hinv;
  if (mpz_invert(hinv.get_mpz_t(), BigInt(static_cast<long>(h)).get_mpz_t(), pN.get_mpz_t()) == 0)
    throw PreconditionError("CM decomposition: h not invertible mod p");
  for (size_t i = 0; i < psi.class_values().size(); ++i) {
    const auto& cv = psi.class_values()[i];
    if (cv.form.a % p == 0) throw PreconditionError("CM decomposition: class generator not prime to p");
    Ideal g = I.from_form(cv.form);
    auto gam = I.generator(I.pow(g, h));
    if (!gam) throw DomainError("CM decomposition: g^h not principal");
    LElem v0 = L.pow(one_unit_part(iota(*gam)), hinv);  // unique h-th root in 1 + pZ_p
    psi0_gen_.push_back(v0);
    LElem ps = av_.place().map(cv.value);
    alpha_gen_.push_back(L.mul(ps, L.pow(v0, BigInt(1 - psi.k()))));
  }
}

LElem CMDecomposition::iota(const QElt& a) const {
  return av_.place().map(psi_->ideals().order().embed(a, psi_->sqrtD()));
}

LElem CMDecomposition::teich(const LElem& u) const { return local().teichmuller(local().residue(u)); }

LElem CMDecomposition::one_unit_part(const LElem& u) const {
  const auto& L = local();
  return L.mul(u, L.inverse(teich(u)));
}

LElem CMDecomposition::psi0(const Ideal& a) const {
  const auto& I = psi_->ideals();
  const auto& L = local();
  if (!I.coprime(a, av_.prime())) throw DomainError("psi0: ideal not prime to P");
  auto pr = psi_->principalize(a);
  LElem v = one_unit_part(iota(pr.delta));
  for (size_t i = 0; i < pr.exps.size(); ++i) {
    if (pr.exps[i] == 0) continue;
    LElem n = L.from_int(psi_->class_values()[i].form.a);
    LElem fac = L.mul(psi0_gen_[i], L.inverse(one_unit_part(n)));
    v = L.mul(v, L.pow(fac, BigInt(static_cast<long>(pr.exps[i]))));
  }
  return v;
}

LElem CMDecomposition::alpha_principal(const QElt& b) const {
  const auto& L = local();
  LElem e = av_.place().map(psi_->eps_value(b));
  return L.mul(e, L.pow(teich(iota(b)), BigInt(psi_->k() - 1)));
}

LElem CMDecomposition::alpha(const Ideal& a) const {
  const auto& I = psi_->ideals();
  const auto& L = local();
  if (!psi_->coprime_to_conductor(a) || !I.coprime(a, av_.prime())) throw DomainError("alpha: ideal not prime to fP");
  auto pr = psi_->principalize(a);
  LElem v = alpha_principal(pr.delta);
  for (size_t i = 0; i < pr.exps.size(); ++i) {
    if (pr.exps[i] == 0) continue;
    i64 n = psi_->class_values()[i].form.a;
    LElem fac = L.mul(alpha_gen_[i], L.inverse(alpha_principal(QElt{n, 0})));
    v = L.mul(v, L.pow(fac, BigInt(static_cast<long>(pr.exps[i]))));
  }
  return v;
}

LElem CMDecomposition::recombine(const Ideal& a, int kprime) const {
  const auto& L = local();
  return L.mul(alpha(a), L.pow(psi0(a), BigInt(kprime - 1)));
}

LElem CMDecomposition::local_unit_restriction(i64 g) const {
  // rational b = g mod p, b = 1 mod N(f); then restriction(g) = alpha((b))^{-1} <b>^{-1}
  const auto& L = local();
  if (mod64(g, p_) == 0) throw DomainError("local_unit_restriction: g must be a unit mod p");
  i64 N = psi_->conductor_norm();
  i64 s = N == 1 ? 0 : invmod(p_, N);
  i64 b = mod64(g, p_) + s * p_ * (1 - mod64(g, p_));
  if (N > 1 && mod64(b, N) != 1 % N) throw DomainError("local_unit_restriction: CRT failed");
  QElt beta{b, 0};
  LElem v = L.inverse(L.mul(alpha_principal(beta), one_unit_part(iota(beta))));
  if (artin_ == ArtinNormalization::Arithmetic) v = L.inverse(v);
  return v;
}

bool is_non_eisenstein_p_distinguished(const CMDecomposition& dec, i64 p) {
  if (p != dec.p()) throw PreconditionError("non-Eisenstein check: p does not match the decomposition");
  const auto& L = dec.local();
  i64 g = primitive_root(p);
  // both sides are characters of the cyclic group (O/P)^x: compare on a generator mod P
  return L.residue(dec.local_unit_restriction(g)) != mod64(g, p);
}

json GoodPrimeReport::to_json() const {
  json j;
  j["good"] = good;
  json c = json::array();
  for (auto& [name, ok] : conditions) c.push_back({{"condition", name}, {"holds", ok}});
  j["conditions"] = c;
  return j;
}

GoodPrimeReport is_good_prime(i64 conductor_norm, i64 g_level, i64 h_level, i64 p, bool quaternion_unramified,
                              bool adelic_image) {
  GoodPrimeReport r;
  r.conditions = {{"p prime", is_prime(p)},
                  {"p >= 7", p >= 7},
                  {"p prime to N(f)", gcd64(p, conductor_norm) == 1},
                  {"p prime to N_g", gcd64(p, g_level) == 1},
                  {"p prime to N_h", gcd64(p, h_level) == 1},
                  {"p unramified in the quaternion algebra (attested)", quaternion_unramified},
                  {"adelic image condition (attested)", adelic_image}};
  r.good = true;
  for (auto& [n, ok] : r.conditions) r.good = r.good && ok;
  return r;
}

}  // namespace acyc
