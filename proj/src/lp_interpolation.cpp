#include "acyc/lp_interpolation.hpp"

#include <algorithm>
#include <cstdlib>

#include "acyc/jsonutil.hpp"

namespace acyc::interp {

WeightTriple::WeightTriple(int k_, int l_, int m_) : k(k_), l(l_), m(m_) {
  if (k < 2 || k % 2 != 0) throw PreconditionError("weights: k must be even and >= 2");
  if (l < 2 || m < 2) throw PreconditionError("weights: l and m must be >= 2");
  if ((l - m) % 2 != 0) throw PreconditionError("weights: l and m must have the same parity");
}

namespace {

BigInt factorial(i64 n) {
  BigInt r;
  mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(n));
  return r;
}

BigInt ppow(i64 p, int e) {
  BigInt r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(e));
  return r;
}

std::optional<Rat> ord(const LocalRing& L, const LElem& x) {
  auto o = L.ord(x);
  if (!o) return std::nullopt;
  return frac(*o, L.e());
}

LocalValue value(const LocalRing& L, LElem num, int den) {
  LocalValue v;
  v.v = ord(L, num);
  if (v.v) *v.v -= den;
  v.num = std::move(num);
  v.den = den;
  return v;
}

// 1 - x / p^c  =  (p^c - x) / p^c
Factor one_minus(const LocalRing& L, const std::string& label, const LElem& x, int c) {
  return {label, value(L, L.sub(L.from_int(ppow(L.p(), c)), x), c)};
}

EulerProduct product(std::string name, std::vector<Factor> fs) {
  EulerProduct e{std::move(name), std::move(fs), Rat(0)};
  for (auto& f : e.factors) {
    if (f.value.vanishes()) {
      e.v.reset();
      break;
    }
    *e.v += *f.value.v;
  }
  return e;
}

nlohmann::json val_json(const std::optional<Rat>& v) { return v ? rat_json(*v) : nlohmann::json("inf"); }

nlohmann::json local_json(const LocalRing& L, const LocalValue& x) {
  nlohmann::json j;
  std::vector<std::string> c;
  for (auto& a : x.num.c) c.push_back(a.get_str());
  j["numerator"] = c;
  j["denominator"] = "p^" + std::to_string(x.den);
  j["valuation"] = val_json(x.v);
  j["unit"] = x.v && *x.v == 0;
  (void)L;
  return j;
}

nlohmann::json product_json(const LocalRing& L, const EulerProduct& e) {
  nlohmann::json j;
  j["name"] = e.name;
  j["valuation"] = val_json(e.v);
  j["factors"] = nlohmann::json::array();
  for (auto& f : e.factors) {
    auto x = local_json(L, f.value);
    x["label"] = f.label;
    j["factors"].push_back(x);
  }
  return j;
}

LElem lelem_of(const LocalRing& L, const nlohmann::json& v) {
  if (v.is_array()) {
    LElem x = L.zero();
    LElem w = L.one();
    for (auto& c : v) {
      x = L.add(x, L.mul(L.from_rat(rat_of(c)), w));
      w = L.mul(w, L.uniformizer());
    }
    return x;
  }
  return L.from_rat(rat_of(v));
}

}  // namespace

BigInt gamma_factor(const WeightTriple& w) {
  if (w.k < w.l + w.m) throw RangeError("gamma: k < l + m is outside the interpolation range");
  const int c = w.c();
  return factorial(c - 1) * factorial(c - w.m) * factorial(c - w.l) * factorial(c + 1 - w.l - w.m);
}

std::string to_string(Regime r) { return r == Regime::Balanced ? "balanced" : "f-unbalanced"; }

Regime regime(const WeightTriple& w) {
  const int l = std::max(w.l, w.m), m = std::min(w.l, w.m);
  if (w.k <= l - m)
    throw DomainError("regime: k <= l - m; the triple is " + std::string(w.l >= w.m ? "g" : "h") +
                      "-unbalanced, which is neither the balanced nor the f-unbalanced branch");
  return w.k < l + m ? Regime::Balanced : Regime::FUnbalanced;
}

std::vector<std::string> FrobeniusData::violations(const WeightTriple& w) const {
  std::vector<std::string> out;
  const int N = L.N();
  if (N <= w.c() + 1) out.push_back("working precision p^" + std::to_string(N) + " does not exceed p^(c+1)");
  if (ord(L, alpha_g) != Rat(0)) out.push_back("g is not ordinary: alpha_g is not a unit");
  if (ord(L, alpha_h) != Rat(0)) out.push_back("h is not ordinary: alpha_h is not a unit");
  const std::array<std::pair<const LElem*, const LElem*>, 3> ab = {{{&alpha_k, &beta_k}, {&alpha_g, &beta_g}, {&alpha_h, &beta_h}}};
  const std::array<int, 3> wt = {w.k, w.l, w.m};
  const std::array<const char*, 3> name = {"f_k", "g", "h"};
  for (size_t i = 0; i < 3; ++i) {
    if (!chi[i]) continue;
    LElem want = L.mul(*chi[i], L.from_int(ppow(L.p(), wt[i] - 1)));
    if (!L.equal(L.mul(*ab[i].first, *ab[i].second), want))
      out.push_back(std::string("alpha*beta != chi(p) p^(w-1) for ") + name[i]);
  }
  return out;
}

nlohmann::json FrobeniusData::to_json() const {
  auto el = [](const LElem& x) {
    std::vector<std::string> c;
    for (auto& a : x.c) c.push_back(a.get_str());
    return c;
  };
  nlohmann::json j;
  j["p"] = L.p();
  j["precision"] = L.N();
  std::vector<std::string> E;
  for (auto& a : L.eisenstein()) E.push_back(a.get_str());
  j["eisenstein"] = E;
  j["alpha_k"] = el(alpha_k);
  j["beta_k"] = el(beta_k);
  j["alpha_g"] = el(alpha_g);
  j["beta_g"] = el(beta_g);
  j["alpha_h"] = el(alpha_h);
  j["beta_h"] = el(beta_h);
  j["origin"] = origin;
  return j;
}

std::pair<LElem, LElem> hecke_roots(const LocalRing& L, const LElem& a, const LElem& c) {
  if (ord(L, a) != Rat(0)) throw PreconditionError("hecke roots: a_p is not a unit (not ordinary)");
  // both roots would be units
  if (ord(L, c) == Rat(0)) throw PreconditionError("hecke roots: constant term is a unit");
  // Newton from the residue of a; f'(x) = 2x - a stays a unit along the way
  LElem x = a;
  for (int it = 0; it < 4 * L.precision() + 8; ++it) {
    LElem f = L.add(L.sub(L.mul(x, x), L.mul(a, x)), c);
    if (L.is_zero(f)) break;
    LElem df = L.sub(L.mul(L.from_int(2), x), a);
    x = L.sub(x, L.mul(f, L.inverse(df)));
  }
  return {x, L.sub(a, x)};
}

FrobeniusData frobenius_from_cm(const GrossenChar& psi, const NewformData& g, const NewformData& h, i64 p,
                                int precision) {
  PAdicAvatar av(psi, p, precision);
  const Place& pl = av.place();
  FrobeniusData fd;
  fd.L = pl.local();
  const LocalRing& L = fd.L;
  fd.alpha_k = av.eval(av.prime_bar());
  fd.beta_k = av.eval(av.prime());
  fd.chi[0] = pl.map(psi.chi(p));
  auto form = [&](const NewformData& f, LElem& alpha, LElem& beta, std::optional<LElem>& chi) {
    if (f.level % p == 0) throw PreconditionError("frobenius: p divides the level of " + f.label);
    Num ap = f.a(p), cp = f.chi_value(p);
    if (!ap.is_rational() || !cp.is_rational())
      throw PreconditionError("frobenius: a_p(" + f.label + ") is not rational; supply explicit values");
    LElem a = L.from_rat(ap.rational());
    chi = L.from_rat(cp.rational());
    auto [x, y] = hecke_roots(L, a, L.mul(*chi, L.from_int(ppow(p, f.weight - 1))));
    alpha = x;
    beta = y;
  };
  form(g, fd.alpha_g, fd.beta_g, fd.chi[1]);
  form(h, fd.alpha_h, fd.beta_h, fd.chi[2]);
  fd.origin = "cm D=" + std::to_string(psi.D()) + " k=" + std::to_string(psi.k()) + " g=" + g.label + " h=" + h.label +
              " p=" + std::to_string(p);
  return fd;
}

FrobeniusData frobenius_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("p")) throw InputError("frobenius data: expected an object with p");
  const i64 p = j.at("p").get<i64>();
  const int N = j.value("precision", 20);
  std::vector<BigInt> E = j.contains("eisenstein") ? int_poly_of(j.at("eisenstein")) : std::vector<BigInt>{BigInt(-p), BigInt(1)};
  FrobeniusData fd;
  fd.L = LocalRing(p, E, N);
  for (const char* key : {"alpha_k", "beta_k", "alpha_g", "beta_g", "alpha_h", "beta_h"})
    if (!j.contains(key)) throw InputError(std::string("frobenius data: missing ") + key);
  fd.alpha_k = lelem_of(fd.L, j["alpha_k"]);
  fd.beta_k = lelem_of(fd.L, j["beta_k"]);
  fd.alpha_g = lelem_of(fd.L, j["alpha_g"]);
  fd.beta_g = lelem_of(fd.L, j["beta_g"]);
  fd.alpha_h = lelem_of(fd.L, j["alpha_h"]);
  fd.beta_h = lelem_of(fd.L, j["beta_h"]);
  if (j.contains("chi")) {
    const auto& c = j["chi"];
    if (!c.is_array() || c.size() != 3) throw InputError("frobenius data: chi must list three values (or null)");
    for (size_t i = 0; i < 3; ++i)
      if (!c[i].is_null()) fd.chi[i] = lelem_of(fd.L, c[i]);
  }
  fd.origin = j.value("origin", std::string("explicit"));
  return fd;
}

EulerFactors euler_factors(const FrobeniusData& fd, const WeightTriple& w, const EulerOptions& opt) {
  if (opt.check_invariants) {
    auto bad = fd.violations(w);
    if (!bad.empty()) throw PreconditionError("euler factors: " + bad.front());
  }
  const LocalRing& L = fd.L;
  const int c = w.c();
  auto m3 = [&](const LElem& a, const LElem& b, const LElem& d) { return L.mul(L.mul(a, b), d); };
  const Factor bgh_ab = one_minus(L, "1 - beta_k beta_g alpha_h / p^c", m3(fd.beta_k, fd.beta_g, fd.alpha_h), c);
  const Factor bgh_ba = one_minus(L, "1 - beta_k alpha_g beta_h / p^c", m3(fd.beta_k, fd.alpha_g, fd.beta_h), c);
  const Factor bgh_bb = one_minus(L, "1 - beta_k beta_g beta_h / p^c", m3(fd.beta_k, fd.beta_g, fd.beta_h), c);
  EulerFactors ef;
  ef.E_interp = product("interpolation", {one_minus(L, "1 - beta_k alpha_g alpha_h / p^c", m3(fd.beta_k, fd.alpha_g, fd.alpha_h), c),
                                          bgh_ab, bgh_ba, bgh_bb});
  ef.E_bound = product("bound", {one_minus(L, "1 - alpha_k alpha_g alpha_h / p^c", m3(fd.alpha_k, fd.alpha_g, fd.alpha_h), c),
                                 bgh_ab, bgh_ba, bgh_bb});
  if (ord(L, fd.alpha_k) != Rat(0)) throw PreconditionError("euler factors: alpha_k is not a unit");
  const LElem ainv = L.inverse(fd.alpha_k);
  // 1 - beta/alpha and 1 - beta/(p alpha) = (p alpha - beta) / (p alpha), alpha a unit
  ef.E0 = value(L, L.sub(L.one(), L.mul(fd.beta_k, ainv)), 0);
  ef.E1 = value(L, L.sub(L.from_int(BigInt(static_cast<long>(L.p()))), L.mul(fd.beta_k, ainv)), 1);
  ef.normalizations_differ = ef.E_interp.v != ef.E_bound.v ||
                             !L.equal(ef.E_interp.factors[0].value.num, ef.E_bound.factors[0].value.num);
  std::string vi = val_json(ef.E_interp.v).dump(), vb = val_json(ef.E_bound.v).dump();
  ef.discrepancy = "first factor 1 - beta_k alpha_g alpha_h / p^c (interpolation, v = " + vi +
                   ") versus 1 - alpha_k alpha_g alpha_h / p^c (bound, v = " + vb + ")";
  return ef;
}

nlohmann::json EulerFactors::to_json(const LocalRing& L) const {
  nlohmann::json j;
  j["interpolation"] = product_json(L, E_interp);
  j["bound"] = product_json(L, E_bound);
  j["E0"] = local_json(L, E0);
  j["E1"] = local_json(L, E1);
  j["normalizations_differ"] = normalizations_differ;
  j["discrepancy"] = discrepancy;
  return j;
}

std::string to_string(Normalization n) { return n == Normalization::Bound ? "bound" : "interpolation"; }

i64 vp_factorial(i64 n, i64 p) {
  i64 v = 0;
  for (i64 q = p; q <= n; q *= p) {
    v += n / q;
    if (q > n / p) break;
  }
  return v;
}

LengthBound length_bound(const EulerFactors& ef, i64 p, const WeightTriple& w, const Rat& lp_valuation, Normalization n) {
  if (w.k < w.l + w.m) throw RangeError("length bound: requires k >= l + m");
  const EulerProduct& E = n == Normalization::Bound ? ef.E_bound : ef.E_interp;
  if (!E.v) throw DomainError("length bound: an Euler factor vanishes, the bound is undefined");
  if (ef.E1.vanishes()) throw DomainError("length bound: E1 vanishes to working precision");
  LengthBound b;
  b.normalization = n;
  b.v_factorial = Rat(static_cast<long>(vp_factorial(w.l + w.m - 4, p)));
  b.v_E1 = *ef.E1.v;
  b.v_E = *E.v;
  b.v_L = lp_valuation;
  b.bound = 2 * (b.v_factorial + b.v_E1 - b.v_E + b.v_L);
  if (b.bound < 0) b.warnings.push_back("negative bound " + b.bound.get_str() + "; returned as computed");
  if (ef.normalizations_differ) b.warnings.push_back("the two normalizations of E differ: " + ef.discrepancy);
  return b;
}

LengthBound length_bound(const FrobeniusData& fd, const WeightTriple& w, const Rat& lp_valuation, Normalization n,
                         const EulerOptions& opt) {
  if (w.k < w.l + w.m) throw RangeError("length bound: requires k >= l + m");
  return length_bound(euler_factors(fd, w, opt), fd.p(), w, lp_valuation, n);
}

nlohmann::json LengthBound::to_json() const {
  return {{"bound", rat_json(bound)},
          {"normalization", to_string(normalization)},
          {"v_factorial", rat_json(v_factorial)},
          {"v_E1", rat_json(v_E1)},
          {"v_E", rat_json(v_E)},
          {"v_L", rat_json(v_L)},
          {"warnings", warnings}};
}

}  // namespace acyc::interp
