#pragma once
// Brute-force reference computations shared by the unit and acceptance tests.

#include <cmath>
#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "acyc/hecke.hpp"
#include "acyc/ideal.hpp"
#include "acyc/quadfield.hpp"

namespace oracle {

using namespace acyc;

inline std::string data_path(const std::string& rel) { return std::string(ACYC_DATA_DIR) + "/" + rel; }

inline nlohmann::json load_json(const std::string& rel) {
  std::ifstream in(data_path(rel));
  nlohmann::json j;
  in >> j;
  return j;
}

// A bundled weight-2 character re-read at weight k. For the D=-23 fixture psi(g)^3 = gamma^{k-1}
// with x^3 = gamma, so the class value becomes x^{k-1}.
inline GrossenChar char_with_weight(const std::string& rel, int k) {
  nlohmann::json j = load_json(rel);
  j["k"] = k;
  if (j.contains("class_values")) {
    std::vector<int> v(static_cast<size_t>(k), 0);
    v.back() = 1;
    j["class_values"][0]["value"] = v;
  }
  return GrossenChar::from_json(j);
}

// ideals of norm m as c * [a, (-b + sqrt D)/2] with c^2 a = m, b mod 2a, b^2 = D mod 4a
inline std::vector<Ideal> ideals_of_norm(const IdealArith& I, i64 m) {
  const i64 D = I.order().D();
  std::set<Ideal> out;
  for (i64 c = 1; c * c <= m; ++c) {
    if (m % (c * c)) continue;
    i64 a = m / (c * c);
    for (i64 b = 0; b < 2 * a; ++b) {
      if (((b - D) % 2 + 2) % 2 != 0) continue;
      if ((((b * b - D) % (4 * a)) + 4 * a) % (4 * a) != 0) continue;
      i64 t = (-b - D) / 2;
      out.insert(I.from_generators({QElt{c * a, 0}, QElt{c * t, c}}));
    }
  }
  return {out.begin(), out.end()};
}

// number of ideals of norm m from the Dedekind zeta factorization
inline i64 ideal_count(i64 D, i64 m) {
  i64 s = 0;
  for (i64 d : divisors(m)) s += kronecker(D, d);
  return s;
}

// a_m as a direct sum over the form-parametrized ideals of norm m
inline Num theta_coeff_by_ideals(const GrossenChar& psi, i64 m) {
  Num s = psi.ring().zero();
  for (auto& a : ideals_of_norm(psi.ideals(), m))
    if (psi.coprime_to_conductor(a)) s += psi.eval(a);
  return s;
}

// For class number one: a_m = (1/|O^x|) sum_{N(alpha) = m, alpha prime to f} eps(alpha) alpha^{k-1}
inline Num theta_coeff_by_elements(const GrossenChar& psi, i64 m) {
  const auto& O = psi.ideals().order();
  const i64 D = psi.D();
  Num s = psi.ring().zero();
  // |Im| = |y| sqrt|D| / 2 <= sqrt m and |Re| = |x + y D / 2| <= sqrt m
  i64 ymax = static_cast<i64>(std::sqrt(static_cast<double>(4 * m) / static_cast<double>(-D))) + 1;
  i64 r = static_cast<i64>(std::sqrt(static_cast<double>(m))) + 1;
  for (i64 y = -ymax; y <= ymax; ++y)
    for (i64 x = -y * D / 2 - r - 1; x <= -y * D / 2 + r + 1; ++x) {
      QElt a{x, y};
      if (O.norm(a) != m) continue;
      if (!psi.finite_part().exponent(psi.eps_residue(a))) continue;
      s += psi.eval_principal(a);
    }
  return s * frac(1, static_cast<long>(O.units().size()));
}

// Independent count: primitive reduced triples by a plain triple loop over c.
inline i64 brute_reduced_count(i64 disc) {
  i64 N = -disc, cnt = 0;
  for (i64 a = 1; 3 * a * a <= N; ++a)  // a <= |b| is impossible otherwise
    for (i64 b = -a; b <= a; ++b)
      for (i64 c = a; 4 * a * c - b * b <= N; ++c) {
        if (b * b - 4 * a * c != disc) continue;
        if ((b == -a || a == c) && b < 0) continue;
        if (b == -a) continue;
        if (gcd64(gcd64(a, b), c) != 1) continue;
        ++cnt;
      }
  return cnt;
}

// h(D n^2) = h(D) n / [O^x : O_n^x] * prod_{l | n} (1 - (D/l)/l)
inline i64 class_number_formula(i64 D, i64 n) {
  i64 h = brute_reduced_count(D);
  Rat r(h * n);
  for (auto& [l, e] : factorize(n)) r *= Rat(l - kronecker(D, l), l);
  i64 units = D == -3 ? 6 : (D == -4 ? 4 : 2);
  if (n > 1) r /= units / 2;
  if (r.get_den() != 1) throw std::logic_error("class number formula: non-integral");
  return r.get_num().get_si();
}

// Evaluates a serialized certificate difference at random points compatible with its steps, summing the
// terms in a shuffled order. Substitutions are realized by evaluation, var^n := 1 by the n-th roots of
// unity in Q (n <= 2). Reads raw JSON only.
inline Rat json_rat(const nlohmann::json& v) {
  Rat r;
  if (v.is_number_integer())
    r = Rat(BigInt(std::to_string(v.get<long long>())));
  else
    r = Rat(v.get<std::string>());
  r.canonicalize();
  return r;
}

inline Rat json_poly_at(const nlohmann::json& poly, const std::map<std::string, Rat>& pt, std::mt19937_64& rng) {
  std::vector<size_t> order(poly.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  Rat sum = 0;
  for (size_t i : order) {
    const auto& t = poly[i];
    Rat v = json_rat(t[0]);
    for (auto& [var, e] : t[1].items()) {
      if (!e.is_number_integer()) throw std::logic_error("symbolic exponent in certificate");
      long long n = e.get<long long>();
      Rat x = pt.at(var), acc = 1;
      for (long long k = 0; k < std::llabs(n); ++k) acc *= x;
      v *= n < 0 ? Rat(1 / acc) : acc;
    }
    sum += v;
  }
  return sum;
}

inline bool certificate_vanishes(const nlohmann::json& cert, uint64_t seed, int points = 6) {
  std::mt19937_64 rng(seed);
  const auto& diff = cert.at("difference");
  std::set<std::string> vars;
  for (auto& t : diff)
    for (auto& [v, e] : t[1].items()) vars.insert(v);
  for (auto& st : cert.at("steps"))
    if (st.at("op") == "subst")
      for (auto& t : st.at("value"))
        for (auto& [v, e] : t[1].items()) vars.insert(v);
  std::vector<Rat> roots = {1};
  for (auto& st : cert.at("steps"))
    if (st.at("op") == "mod") {
      if (st.at("n").get<int>() != 2) throw std::logic_error("only var^2 := 1 is supported");
      roots = {1, -1};
    }
  for (int k = 0; k < points; ++k)
    for (const Rat& root : roots) {
      std::map<std::string, Rat> pt;
      for (auto& v : vars) {
        long num = static_cast<long>(rng() % 37) + 1, den = static_cast<long>(rng() % 11) + 1;
        Rat r(num, den);
        r.canonicalize();
        pt[v] = (rng() & 1) ? r : Rat(-r);
      }
      const auto& steps = cert.at("steps");
      for (size_t i = steps.size(); i > 0; --i) {
        const auto& st = steps[i - 1];
        const std::string var = st.at("var");
        pt[var] = st.at("op") == "mod" ? root : json_poly_at(st.at("value"), pt, rng);
      }
      if (json_poly_at(diff, pt, rng) != 0) return false;
    }
  return true;
}

}  // namespace oracle
