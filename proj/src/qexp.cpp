#include "acyc/qexp.hpp"

#include <cmath>
#include <complex>

#include "acyc/jsonutil.hpp"

namespace acyc {

using nlohmann::json;

namespace {

json num_json(const Num& x) {
  json c = json::array();
  for (auto& r : x.coeffs()) c.push_back(rat_json(r));
  return c;
}

Num pow_int(const NumberRing& R, i64 q, int e) {
  BigInt v = 1;
  for (int i = 0; i < e; ++i) v *= q;
  return R.from_int(v);
}

}  // namespace

// ---- Nebentypus ----

Num Nebentypus::at(i64 n) const { return values.at(static_cast<size_t>(mod64(n, modulus))); }

Nebentypus Nebentypus::lift(i64 M) const {
  if (M <= 0 || M % modulus != 0) throw DomainError("nebentypus lift: modulus must be a multiple");
  Nebentypus r;
  r.modulus = M;
  r.descriptor = descriptor;
  const NumberRing R = values.front().ring();
  for (i64 n = 0; n < M; ++n) r.values.push_back(gcd64(n, M) == 1 ? at(n) : R.zero());
  return r;
}

Nebentypus Nebentypus::from_dirichlet(const DirichletChar& c, const Cyclo& cyc, std::string descriptor) {
  Nebentypus r;
  r.modulus = c.modulus();
  r.descriptor = std::move(descriptor);
  for (i64 n = 0; n < r.modulus; ++n) {
    auto e = c.exponent(n);
    r.values.push_back(e ? cyc.value(*e) : cyc.R.zero());
  }
  return r;
}

// ---- QExpansion ----

const Num& QExpansion::operator[](i64 m) const {
  if (m < 0 || m > bound()) throw RangeError("coefficient index " + std::to_string(m) + " beyond bound");
  return a[static_cast<size_t>(m)];
}

json QExpansion::to_json() const {
  json j;
  j["level"] = level;
  j["weight"] = weight;
  j["bound"] = bound();
  j["nebentypus"] = neb.descriptor;
  j["ring"] = ring.poly_str();
  json c = json::array();
  for (i64 m = 1; m <= bound(); ++m) c.push_back(num_json(a[static_cast<size_t>(m)]));
  j["coefficients"] = c;
  return j;
}

QExpansion theta_series(const GrossenChar& psi, i64 B) {
  if (B < 1) throw InputError("theta_series: bound must be >= 1");
  const NumberRing& R = psi.ring();
  const IdealArith& I = psi.ideals();
  const Discriminant disc(psi.D());
  QExpansion f;
  f.ring = R;
  f.level = psi.level();
  f.weight = psi.k();
  f.neb.modulus = f.level;
  f.neb.descriptor = "chi*eps_K mod " + std::to_string(f.level);
  for (i64 n = 0; n < f.level; ++n) f.neb.values.push_back(psi.chi(n) * Rat(kronecker(psi.D(), n)));

  // local factors: a_{q^e} from prod over primes P | q of 1/(1 - psi(P) X^{f_P})
  std::vector<i64> spf(static_cast<size_t>(B + 1), 0);
  for (i64 i = 2; i <= B; ++i)
    if (spf[static_cast<size_t>(i)] == 0)
      for (i64 j = i; j <= B; j += i)
        if (spf[static_cast<size_t>(j)] == 0) spf[static_cast<size_t>(j)] = i;

  std::map<i64, std::vector<Num>> local;
  for (i64 q : primes_up_to(B)) {
    int emax = 0;
    for (i64 t = q; t <= B; t *= q) {
      ++emax;
      if (t > B / q) break;
    }
    std::vector<std::pair<Num, int>> primes;
    auto s = splitting_type(disc, q);
    auto add = [&](const Ideal& P, int fdeg) {
      if (psi.coprime_to_conductor(P)) primes.emplace_back(psi.eval(P), fdeg);
    };
    if (s.tag == SplitTag::Split) {
      add(I.from_form(s.prime), 1);
      add(I.from_form(s.conj), 1);
    } else if (s.tag == SplitTag::Ramified) {
      add(I.from_form(s.prime), 1);
    } else {
      add(I.principal(QElt{q, 0}), 2);
    }
    std::vector<Num> c(static_cast<size_t>(emax + 1), R.zero());
    c[0] = R.one();
    for (auto& [v, d] : primes)
      for (int e = d; e <= emax; ++e) c[static_cast<size_t>(e)] += v * c[static_cast<size_t>(e - d)];
    local.emplace(q, std::move(c));
  }

  f.a.assign(static_cast<size_t>(B + 1), R.zero());
  f.a[1] = R.one();
  for (i64 m = 2; m <= B; ++m) {
    i64 q = spf[static_cast<size_t>(m)], rest = m;
    int e = 0;
    while (rest % q == 0) {
      rest /= q;
      ++e;
    }
    f.a[static_cast<size_t>(m)] = local.at(q)[static_cast<size_t>(e)] * f.a[static_cast<size_t>(rest)];
  }
  return f;
}

QExpansion p_stabilize(const QExpansion& f, const Num& beta, i64 p) {
  if (!is_prime(p)) throw InputError("p_stabilize: p must be prime");
  if (f.level % p == 0) throw PreconditionError("p_stabilize: level must be prime to p");
  if (f.bound() < p) throw PreconditionError("p_stabilize: bound below p");
  Num alpha = f[p] - beta;
  if (alpha * beta != f.neb.at(p) * pow_int(f.ring, p, f.weight - 1))
    throw DomainError("p_stabilize: beta is not a root of the Hecke polynomial at p");
  QExpansion g = f;
  for (i64 m = p; m <= f.bound(); m += p) g.a[static_cast<size_t>(m)] -= beta * f.a[static_cast<size_t>(m / p)];
  g.level = f.level * p;
  g.neb = f.neb.lift(g.level);
  return g;
}

bool hecke_eigen_check(const QExpansion& f, i64 q) {
  if (!is_prime(q)) throw InputError("hecke_eigen_check: q must be prime");
  if (q > f.bound() / q) throw PreconditionError("hecke_eigen_check: bound must be at least q^2");
  if (f[1] != f.ring.one()) return false;
  const Num c = f.neb.at(q) * pow_int(f.ring, q, f.weight - 1);
  const Num& aq = f[q];
  for (i64 m = 1; m * q <= f.bound(); ++m) {
    Num rhs = f[m * q];
    if (m % q == 0) rhs += c * f[m / q];
    if (aq * f[m] != rhs) return false;
  }
  return true;
}

std::vector<BigInt> eta_product(const std::vector<std::pair<i64, i64>>& factors, i64 B) {
  i64 s24 = 0;
  for (auto& [d, r] : factors) {
    if (d <= 0) throw InputError("eta_product: d must be positive");
    s24 += d * r;
  }
  if (s24 % 24 != 0) throw InputError("eta_product: order at infinity is not integral");
  const i64 s = s24 / 24;
  std::vector<BigInt> out(static_cast<size_t>(B + 1), 0);
  if (B < s) return out;
  const i64 M = B - s;
  std::vector<BigInt> c(static_cast<size_t>(M + 1), 0);
  c[0] = 1;
  for (auto& [d, r] : factors)
    for (i64 j = d; j <= M; j += d)
      for (i64 t = 0; t < (r < 0 ? -r : r); ++t) {
        if (r > 0) {
          for (i64 i = M; i >= j; --i) c[static_cast<size_t>(i)] -= c[static_cast<size_t>(i - j)];
        } else {
          for (i64 i = j; i <= M; ++i) c[static_cast<size_t>(i)] += c[static_cast<size_t>(i - j)];
        }
      }
  for (i64 i = 0; i <= M; ++i) out[static_cast<size_t>(i + s)] = c[static_cast<size_t>(i)];
  return out;
}

// ---- CM family ----

LElem CMFamily::coeff(int kprime, i64 m) const {
  if (m < 1) throw InputError("CM family coefficient index must be >= 1");
  const auto& psi = dec_->psi();
  const auto& I = psi.ideals();
  const auto& L = dec_->local();
  const Ideal P = dec_->avatar().prime();
  LElem s = L.zero();
  for (const auto& a : I.ideals_of_norm(m))
    if (psi.coprime_to_conductor(a) && I.coprime(a, P)) s = L.add(s, dec_->recombine(a, kprime));
  return s;
}

std::vector<LElem> CMFamily::expansion(int kprime, i64 B) const {
  std::vector<LElem> out{dec_->local().zero()};
  for (i64 m = 1; m <= B; ++m) out.push_back(coeff(kprime, m));
  return out;
}

LElem cm_family_coeff(const CMDecomposition& dec, int kprime, i64 q) { return CMFamily(dec).coeff(kprime, q); }

// ---- embeddings ----

bool all_embeddings_bounded(const Num& x, double bound) {
  std::vector<Rat> cp = x.charpoly();  // monic, low degree first
  const size_t n = cp.size() - 1;
  using C = std::complex<long double>;
  std::vector<C> c;
  for (auto& r : cp) c.push_back(C(static_cast<long double>(r.get_d()), 0));
  auto eval = [&](C z) {
    C v = 0;
    for (size_t i = n + 1; i-- > 0;) v = v * z + c[i];
    return v;
  };
  // Durand-Kerner
  long double rad = 1;
  for (size_t i = 0; i < n; ++i) rad = std::max(rad, 1 + std::abs(c[i]));
  std::vector<C> z(n);
  for (size_t i = 0; i < n; ++i) z[i] = std::polar(rad * 0.9L, 0.4L + 2 * 3.14159265358979323846L * static_cast<long double>(i) / static_cast<long double>(n));
  for (int it = 0; it < 2000; ++it) {
    long double delta = 0;
    for (size_t i = 0; i < n; ++i) {
      C den = 1;
      for (size_t j = 0; j < n; ++j)
        if (j != i) den *= z[i] - z[j];
      C step = eval(z[i]) / den;
      z[i] -= step;
      delta = std::max(delta, std::abs(step));
    }
    if (delta < 1e-15L * rad) break;
  }
  for (auto& r : z)
    if (std::abs(r) > static_cast<long double>(bound) * (1 + 1e-9L)) return false;
  return true;
}

// ---- NewformData ----

Num NewformData::a(i64 n) const {
  auto it = ap.find(n);
  if (it != ap.end()) return it->second;
  if (n >= 1 && n < static_cast<i64>(an.size())) return an[static_cast<size_t>(n)];
  throw RangeError(label + ": no coefficient a_" + std::to_string(n));
}

Num NewformData::chi_value(i64 n) const {
  auto e = chi.exponent(n);
  if (!e) return field.R.zero();
  return field.value(*e);
}

i64 NewformData::bound() const {
  i64 b = an.empty() ? 0 : static_cast<i64>(an.size()) - 1;
  if (!ap.empty()) b = std::max(b, ap.rbegin()->first);
  return b;
}

QExpansion NewformData::expansion() const {
  if (an.size() < 2) throw PreconditionError(label + ": full coefficient list not available");
  QExpansion f;
  f.ring = field.R;
  f.a = an;
  f.a[0] = field.R.zero();
  f.level = level;
  f.weight = weight;
  f.neb = Nebentypus::from_dirichlet(chi, field, label + " character");
  return f;
}

namespace {

std::vector<std::pair<i64, i64>> chi_generators(const DirichletChar& c) {
  // smallest generating set found greedily, with exponents
  std::vector<std::pair<i64, i64>> gens;
  const i64 N = c.modulus();
  std::vector<char> in(static_cast<size_t>(N), 0);
  in[static_cast<size_t>(1 % N)] = 1;
  auto closure_size = [&]() {
    i64 s = 0;
    for (char b : in) s += b;
    return s;
  };
  const i64 phi = euler_phi(N);
  for (i64 g = 2; g < N && closure_size() < phi; ++g) {
    if (gcd64(g, N) != 1 || in[static_cast<size_t>(g)]) continue;
    gens.emplace_back(g, *c.exponent(g));
    // close under multiplication by g
    bool grew = true;
    while (grew) {
      grew = false;
      for (i64 x = 0; x < N; ++x)
        if (in[static_cast<size_t>(x)] && !in[static_cast<size_t>(mulmod(x, g, N))]) {
          in[static_cast<size_t>(mulmod(x, g, N))] = 1;
          grew = true;
        }
    }
  }
  return gens;
}

}  // namespace

json NewformData::to_json() const {
  json j;
  j["label"] = label;
  j["level"] = level;
  j["weight"] = weight;
  j["char_order"] = chi.order();
  json gens = json::array(), exps = json::array();
  for (auto& [g, e] : chi_generators(chi)) {
    gens.push_back(g);
    exps.push_back(e);
  }
  j["char_values"] = json::array({level, chi.order(), gens, exps});
  json fp = json::array();
  for (auto& c : field.R.poly()) fp.push_back(rat_json(Rat(c)));
  j["field_poly"] = fp;
  j["zeta"] = num_json(field.zeta);
  if (an.size() > 1) {
    json a = json::array();
    for (size_t n = 1; n < an.size(); ++n) a.push_back(num_json(an[n]));
    j["an"] = a;
  } else {
    json a = json::array(), ps = json::array();
    for (auto& [q, v] : ap) {
      ps.push_back(q);
      a.push_back(num_json(v));
    }
    j["ap_primes"] = ps;
    j["ap"] = a;
  }
  j["source"] = source;
  return j;
}

NewformData NewformData::from_json(const json& jin, const std::string& source) {
  const json* jp = &jin;
  if (jin.contains("data")) {
    if (!jin["data"].is_array() || jin["data"].empty()) throw InputError("newform payload has no records");
    jp = &jin["data"][0];
  }
  const json& j = *jp;
  NewformData d;
  d.source = source;
  try {
    d.label = j.at("label").get<std::string>();
    d.level = j.at("level").get<i64>();
    d.weight = j.at("weight").get<int>();
  } catch (const json::exception& e) {
    throw InputError(std::string("newform record: ") + e.what());
  }
  if (d.level < 1 || d.weight < 1) throw InputError(d.label + ": level and weight must be positive");

  std::vector<BigInt> fpoly{0, 1};
  if (j.contains("field_poly")) fpoly = int_poly_of(j["field_poly"]);
  if (fpoly.size() < 2 || fpoly.back() != 1) throw InputError(d.label + ": field_poly must be monic of degree >= 1");
  NumberRing R(fpoly, "a");

  i64 order = j.value("char_order", static_cast<i64>(1));
  std::vector<std::pair<i64, i64>> gens;
  if (j.contains("char_values") && !j["char_values"].is_null()) {
    const auto& cv = j["char_values"];
    if (!cv.is_array() || cv.size() != 4) throw InputError(d.label + ": char_values must be [N, order, gens, exps]");
    if (cv[0].get<i64>() != d.level) throw InputError(d.label + ": character modulus differs from level");
    if (cv[1].get<i64>() != order) throw InputError(d.label + ": char_order inconsistent with char_values");
    if (cv[2].size() != cv[3].size()) throw InputError(d.label + ": char_values generator/exponent length mismatch");
    for (size_t i = 0; i < cv[2].size(); ++i) gens.emplace_back(cv[2][i].get<i64>(), cv[3][i].get<i64>());
  }
  d.chi = gens.empty() && order == 1 ? DirichletChar::trivial(d.level) : DirichletChar::from_generators(d.level, order, gens);

  d.field.R = R;
  d.field.order = order;
  if (j.contains("zeta")) {
    d.field.zeta = R.from_coeffs(rats_of(j["zeta"]));
  } else if (order <= 2) {
    d.field.zeta = order == 1 ? R.one() : -R.one();
  } else {
    throw InputError(d.label + ": character of order " + std::to_string(order) + " needs an explicit zeta");
  }

  // optional basis change from the Hecke ring to the power basis
  std::vector<Num> basis;
  if (j.contains("hecke_ring_numerators") && !j["hecke_ring_numerators"].is_null()) {
    const auto& nums = j["hecke_ring_numerators"];
    const auto& dens = j.at("hecke_ring_denominators");
    if (nums.size() != dens.size()) throw InputError(d.label + ": hecke ring numerators/denominators mismatch");
    for (size_t i = 0; i < nums.size(); ++i) basis.push_back(R.from_coeffs(rats_of(nums[i])) * frac(1, rat_of(dens[i]).get_num()));
  }
  auto to_num = [&](const json& v) {
    std::vector<Rat> c = v.is_array() ? rats_of(v) : std::vector<Rat>{rat_of(v)};
    if (basis.empty()) return R.from_coeffs(c);
    if (c.size() > basis.size()) throw InputError(d.label + ": coefficient longer than the Hecke ring basis");
    Num x = R.zero();
    for (size_t i = 0; i < c.size(); ++i) x += basis[i] * c[i];
    return x;
  };

  if (j.contains("an")) {
    d.an.push_back(R.zero());
    for (auto& v : j["an"]) d.an.push_back(to_num(v));
    for (i64 q : primes_up_to(static_cast<i64>(d.an.size()) - 1)) d.ap[q] = d.an[static_cast<size_t>(q)];
  } else if (j.contains("ap")) {
    std::vector<i64> ps;
    if (j.contains("ap_primes")) {
      for (auto& q : j["ap_primes"]) ps.push_back(q.get<i64>());
    } else {
      // consecutive primes from 2
      i64 q = 2;
      while (ps.size() < j["ap"].size()) {
        if (is_prime(q)) ps.push_back(q);
        ++q;
      }
    }
    if (ps.size() != j["ap"].size()) throw InputError(d.label + ": ap length mismatch");
    for (size_t i = 0; i < ps.size(); ++i) {
      if (!is_prime(ps[i])) throw InputError(d.label + ": ap index " + std::to_string(ps[i]) + " is not prime");
      d.ap[ps[i]] = to_num(j["ap"][i]);
    }
  } else {
    throw InputError(d.label + ": record has neither an nor ap");
  }
  d.validate();
  return d;
}

void NewformData::validate() const {
  const Num& z = field.zeta;
  if (z.pow(field.order) != field.R.one()) throw InputError(label + ": character check failed: zeta^order != 1");
  for (auto& [r, e] : factorize(field.order))
    if (z.pow(field.order / r) == field.R.one()) throw InputError(label + ": character check failed: zeta is not primitive");
  // parity chi(-1) = (-1)^weight
  if (level > 2) {
    Num s = chi_value(level - 1);
    if (s != (weight % 2 == 0 ? field.R.one() : -field.R.one())) throw InputError(label + ": character check failed: parity differs from weight");
  }
  for (auto& [q, v] : ap) {
    double b = 2 * std::pow(static_cast<double>(q), (weight - 1) / 2.0);
    if (!all_embeddings_bounded(v, b)) throw InputError(label + ": Ramanujan check failed at q=" + std::to_string(q));
  }
  if (an.size() > 1) {
    if (an[1] != field.R.one()) throw InputError(label + ": a_1 != 1");
    QExpansion f = expansion();
    const i64 B = f.bound();
    for (i64 q : primes_up_to(B))
      if (q <= B / q && !hecke_eigen_check(f, q)) throw InputError(label + ": Hecke recurrence check failed at q=" + std::to_string(q));
    for (i64 m = 2; m <= B; ++m)
      for (i64 n = 2; n * m <= B && n < m; ++n)
        if (gcd64(m, n) == 1 && f[m * n] != f[m] * f[n]) throw InputError(label + ": multiplicativity check failed");
  }
}

}  // namespace acyc
