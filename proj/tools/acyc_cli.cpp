#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "acyc/cli_ingest.hpp"
#include "acyc/euler_checks.hpp"
#include "acyc/group_algebra.hpp"
#include "acyc/jsonutil.hpp"
#include "acyc/lp_interpolation.hpp"
#include "acyc/operator_calculus.hpp"
#include "acyc/qexp.hpp"

using namespace acyc;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kVerification = 1, kUsage = 2, kData = 3 };

struct Globals {
  bool offline = false, as_json = false;
  std::optional<std::string> config;
};

void emit(const json& j, bool as_json) {
  if (as_json) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  for (auto& [k, v] : j.items()) {
    std::cout << k << ": ";
    if (v.is_string())
      std::cout << v.get<std::string>();
    else if (v.is_array() && v.size() > 12)
      std::cout << "[" << v.size() << " entries]";
    else
      std::cout << v.dump();
    std::cout << "\n";
  }
}

ingest::Config config_of(const Globals& g) {
  auto c = ingest::load_config(g.config);
  if (g.offline) c.offline = true;
  return c;
}

GrossenChar load_char(const std::string& path) {
  if (!fs::exists(path)) throw ingest::DataError("character file not found: " + path);
  try {
    return GrossenChar::from_file(path);
  } catch (const InputError& e) {
    throw ingest::DataError(e.what());
  }
}

json num_str(const Num& x) { return x.str(); }

// ---- classgroup ----

json cmd_classgroup(i64 D, i64 n, std::optional<i64> p, const ingest::Config& cfg) {
  Discriminant d(D);
  const i64 disc = D * n * n;
  ClassGroup cg = class_group_data(disc);
  json j;
  j["D"] = D;
  j["n"] = n;
  j["discriminant"] = disc;
  j["order"] = cg.group.order();
  j["invariants"] = cg.group.invariants();
  std::vector<std::string> forms;
  for (auto& f : cg.forms) forms.push_back(f.str());
  j["forms"] = forms;
  if (p) {
    auto rcd = ring_class_group(d, n, *p, cfg.artin);
    j["p"] = *p;
    j["p_part"] = {{"order", rcd.p_part.order()}, {"invariants", rcd.p_part.invariants()}};
  }
  return j;
}

// ---- theta ----

json cmd_theta(const std::string& file, i64 B, i64 shown) {
  GrossenChar psi = load_char(file);
  QExpansion f = theta_series(psi, B);
  json j;
  j["D"] = psi.D();
  j["k"] = psi.k();
  j["level"] = f.level;
  j["bound"] = B;
  json c = json::array();
  for (i64 m = 1; m <= std::min(B, shown); ++m) c.push_back(num_str(f[m]));
  j["coefficients"] = c;
  bool rec = true, inert = true, split = true;
  i64 checked = 0;
  for (i64 q : primes_up_to(97)) {
    if (q * q > B) break;
    ++checked;
    rec = rec && hecke_eigen_check(f, q);
    auto sp = splitting_type(Discriminant(psi.D()), q);
    if (sp.tag == SplitTag::Inert) inert = inert && f[q].is_zero();
    if (sp.tag != SplitTag::Split) continue;
    const Ideal P = psi.ideals().from_form(sp.prime), Pb = psi.ideals().from_form(sp.conj);
    if (psi.coprime_to_conductor(P) && psi.coprime_to_conductor(Pb)) split = split && f[q] == psi.eval(P) + psi.eval(Pb);
  }
  j["checks"] = {{"primes_checked", checked}, {"hecke_recurrence", rec}, {"inert_zero", inert}, {"split_sum", split}};
  return j;
}

// ---- phi ----

json cmd_phi(const std::string& file, i64 q, i64 n, i64 p, const ingest::Config& cfg) {
  GrossenChar psi = load_char(file);
  auto rcd = ring_class_group(Discriminant(psi.D()), n, p, cfg.artin);
  NumGroupAlg x = phi_T(q, psi, rcd);
  QExpansion f = theta_series(psi, q);
  json j;
  j["q"] = q;
  j["n"] = n;
  j["p"] = p;
  j["group"] = rcd.p_part.invariants();
  j["phi_T"] = x.str();
  j["augmentation"] = num_str(x.augmentation());
  j["a_q"] = num_str(f[q]);
  j["consistent"] = x.augmentation() == f[q];
  return j;
}

// ---- rewrite ----

opcalc::RuleSet load_rules(const std::string& spec) {
  if (spec == "tame_axioms" || spec == "lambda_axioms") return opcalc::RuleSet::bundled(spec);
  if (!fs::exists(spec)) throw ingest::DataError("rule file not found: " + spec);
  return opcalc::RuleSet::load(spec);
}

json cmd_rewrite(const std::string& rules_spec, const std::string& derive, std::string mode, int l, int m) {
  auto rules = load_rules(rules_spec);
  if (mode == "auto") mode = fs::path(rules_spec).filename().string().find("lambda") != std::string::npos ? "lambda" : "tame";
  const bool lambda = euler::parse_mode(mode) == euler::Mode::LambdaAdic;
  json j;
  j["rules"] = fs::path(rules_spec).filename().string();
  j["mode"] = lambda ? "lambda" : "tame";
  j["derive"] = derive;
  if (derive == "11" || derive == "21" || derive == "22") {
    auto d = opcalc::derive_level_two(derive, rules);
    j["normal_form"] = d.str();
    j["terms"] = d.terms().size();
    j["matches_display"] = d == rules.normal_form(opcalc::expected_level_two(derive, lambda));
    return j;
  }
  if (derive != "cor-split" && derive != "cor-inert") throw InputError("--derive must be 11, 21, 22, cor-split or cor-inert");
  if (lambda) throw PreconditionError("corestriction factors are derived from the tame rules only");
  const auto c = derive == "cor-split" ? opcalc::PrimeCase::Split : opcalc::PrimeCase::Inert;
  auto x = opcalc::corestriction_expansion(c, rules);
  Sym e = opcalc::evaluate_factor(x, c, l, m);
  SymParseOptions o;
  o.constants = {{"l", Rat(l)}, {"m", Rat(m)}};
  Sym shown = parse_sym(euler::displayed_factor(c, euler::Mode::Tame, euler::Variant::Literal), o);
  // split: compare after psi(q) psi(qbar) = chi(q) q
  auto rel = [&](const Sym& s) { return c == opcalc::PrimeCase::Split ? s.subst("sb", parse_sym("ug^-1*uh^-1*q*s^-1", o)) : s; };
  j["l"] = l;
  j["m"] = m;
  j["normal_form"] = x.str();
  j["terms"] = x.terms().size();
  j["factor"] = e.str();
  j["matches_display"] = rel(e) == rel(shown);
  return j;
}

// ---- verify-congruence ----

int cmd_verify(const std::string& cs, const std::string& ms, euler::Weights w, const std::optional<std::string>& display,
               std::optional<std::string> cert_path, const ingest::Config& cfg, bool as_json) {
  const auto c = euler::parse_case(cs);
  const auto mode = euler::parse_mode(ms);
  euler::VerifyOptions opt;
  opt.display_override = display;
  auto cert = euler::verify_congruence(c, mode, w, opt);
  json cj = cert.to_json();
  json j;
  j["certificate"] = cj;
  bool replay_ok = true;
  for (uint64_t seed = 0; seed < 4; ++seed) replay_ok = replay_ok && euler::replay(cj, seed);
  j["replay"] = replay_ok;
  if (mode == euler::Mode::LambdaAdic && w.k == 2 && w.l == w.m && !display) {
    auto tame = euler::verify_congruence(c, euler::Mode::Tame, w);
    j["specialization"] = euler::specialize_to_tame(cert, tame).to_json();
  }
  const bool ok = cert.certified && replay_ok;
  if (!ok) {
    fs::path p = cert_path ? fs::path(*cert_path)
                           : cfg.cache_dir / "certificates" /
                                 ("certificate-" + cs + "-" + ms + "-" + std::to_string(w.k) + "-" + std::to_string(w.l) + "-" +
                                  std::to_string(w.m) + ".json");
    ingest::atomic_write(p, cj.dump(2) + "\n");
    j["certificate_path"] = p.string();
    std::cerr << "verification failed; certificate written to " << p.string() << "\n";
  } else if (cert_path) {
    ingest::atomic_write(*cert_path, cj.dump(2) + "\n");
  }
  if (as_json) {
    emit(j, true);
  } else {
    std::cout << "case: " << cs << "\nmode: " << ms << "\nweights: " << w.k << " " << w.l << " " << w.m << "\n";
    std::cout << "certified: " << (cert.certified ? "yes" : "no") << " (" << euler::to_string(cert.variant) << ")\n";
    std::cout << "modulus: " << cert.modulus << "\nresidue: " << cert.residue.str() << "\nreplay: " << (replay_ok ? "ok" : "mismatch")
              << "\n";
    if (j.contains("specialization")) std::cout << "specialization: " << j["specialization"].dump() << "\n";
  }
  return ok ? kOk : kVerification;
}

// ---- interp ----

json cmd_interp(int k, int l, int m, const std::optional<std::string>& frob, std::optional<std::string> lp,
                const std::string& norm, ingest::NewformClient& client) {
  interp::WeightTriple w(k, l, m);
  json j;
  j["k"] = k;
  j["l"] = l;
  j["m"] = m;
  j["c"] = w.c();
  j["regime"] = interp::to_string(interp::regime(w));
  try {
    j["gamma"] = interp::gamma_factor(w).get_str();
    if (interp::gamma_factor(w).fits_slong_p()) j["gamma"] = interp::gamma_factor(w).get_si();
  } catch (const RangeError&) {
    j["gamma"] = nullptr;
  }
  j["E"] = nullptr;
  j["E0"] = nullptr;
  j["E1"] = nullptr;
  j["bound"] = nullptr;
  if (!frob) return j;
  auto in = ingest::load_frobenius(*frob, client, k);
  interp::EulerOptions opt{in.check_invariants};
  auto ef = interp::euler_factors(in.fd, w, opt);
  auto v = [](const std::optional<Rat>& x) { return x ? rat_json(*x) : json("inf"); };
  j["frobenius"] = in.fd.origin;
  j["p"] = in.fd.p();
  j["E"] = {{"bound", v(ef.E_bound.v)}, {"interpolation", v(ef.E_interp.v)}};
  j["E0"] = v(ef.E0.v);
  j["E1"] = v(ef.E1.v);
  j["factors"] = ef.to_json(in.fd.L);
  const auto n = norm == "interpolation" ? interp::Normalization::Interp : interp::Normalization::Bound;
  if (norm != "interpolation" && norm != "bound") throw InputError("--normalization must be bound or interpolation");
  Rat lv = lp ? rat_of(json(*lp)) : in.lp_valuation.value_or(Rat(0));
  j["lp_valuation"] = rat_json(lv);
  if (k >= l + m) {
    const auto other = n == interp::Normalization::Bound ? interp::Normalization::Interp : interp::Normalization::Bound;
    auto one = [&](interp::Normalization x) -> json {
      try {
        return interp::length_bound(ef, in.fd.p(), w, lv, x).to_json();
      } catch (const DomainError& e) {
        return {{"error", e.what()}, {"normalization", interp::to_string(x)}};
      }
    };
    j["bound"] = one(n);
    j["bound_alternative"] = one(other);
  }
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acyc: anticyclotomic Euler system computations"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_flag("--offline", g.offline, "never touch the network");
  app.add_flag("--json", g.as_json, "machine-readable output");
  app.add_option("--config", g.config, "configuration file (overrides CONFIG_PATH)");

  auto* cg = app.add_subcommand("classgroup", "Pic(O_n) and its p-part");
  i64 D = 0, n = 1;
  std::optional<i64> p_opt;
  cg->add_option("D", D, "fundamental discriminant")->required();
  cg->add_option("-n", n, "conductor")->check(CLI::PositiveNumber);
  cg->add_option("-p", p_opt, "prime for the p-part");

  auto* th = app.add_subcommand("theta", "theta series of a character");
  std::string char_file;
  i64 B = 100, shown = 30;
  th->add_option("--char", char_file, "character JSON")->required();
  th->add_option("-B", B, "bound")->check(CLI::PositiveNumber);
  th->add_option("--show", shown, "coefficients to print");

  auto* ph = app.add_subcommand("phi", "image of T_q' in O[R_n]");
  i64 q = 0, pn = 1, pp = 3;
  ph->add_option("--char", char_file, "character JSON")->required();
  ph->add_option("-q", q, "prime")->required();
  ph->add_option("-n", pn, "conductor")->check(CLI::PositiveNumber);
  ph->add_option("-p", pp, "prime for R_n")->required();

  auto* rw = app.add_subcommand("rewrite", "derive relations with the rewrite engine");
  std::string rules = "tame_axioms", derive, rmode = "auto";
  int rl = 2, rm = 2;
  rw->add_option("--rules", rules, "rule file or bundled name");
  rw->add_option("--derive", derive, "11 | 21 | 22 | cor-split | cor-inert")->required();
  rw->add_option("--mode", rmode, "tame | lambda | auto");
  rw->add_option("-l", rl);
  rw->add_option("-m", rm);

  auto* vc = app.add_subcommand("verify-congruence", "Euler factor congruence certificate");
  std::string vcase = "split", vmode = "tame";
  euler::Weights vw;
  std::optional<std::string> display, cert_path;
  vc->add_option("--case", vcase, "split | inert");
  vc->add_option("--mode", vmode, "tame | lambda");
  vc->add_option("-k", vw.k);
  vc->add_option("-l", vw.l);
  vc->add_option("-m", vw.m);
  vc->add_option("--display", display, "replace the displayed factor");
  vc->add_option("--certificate", cert_path, "where to write the certificate");

  auto* ip = app.add_subcommand("interp", "interpolation factors and the length bound");
  int ik = 4, il = 2, im = 2;
  std::optional<std::string> frob, lpv;
  std::string norm = "bound";
  ip->add_option("-k", ik)->required();
  ip->add_option("-l", il)->required();
  ip->add_option("-m", im)->required();
  ip->add_option("--frobenius", frob, "Frobenius data JSON");
  ip->add_option("--lp-valuation", lpv, "valuation of the p-adic L-value");
  ip->add_option("--normalization", norm, "bound | interpolation");

  auto* gp = app.add_subcommand("good-prime", "arithmetic conditions of a good prime");
  i64 cn = 1, gl = 1, hl = 1, gpp = 0;
  bool quat = false, adelic = false;
  gp->add_option("--conductor-norm", cn)->required();
  gp->add_option("--g-level", gl)->required();
  gp->add_option("--h-level", hl)->required();
  gp->add_option("-p", gpp)->required();
  gp->add_flag("--quaternion-unramified", quat, "attest the quaternion condition");
  gp->add_flag("--adelic-image", adelic, "attest the image condition");

  auto* fe = app.add_subcommand("fetch", "newform data (fixture.* labels are bundled)");
  std::string label;
  fe->add_option("label", label)->required();

  auto* cf = app.add_subcommand("config", "show the effective configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    const ingest::Config cfg = config_of(g);
    if (*cg) emit(cmd_classgroup(D, n, p_opt, cfg), g.as_json);
    if (*th) emit(cmd_theta(char_file, B, shown), g.as_json);
    if (*ph) emit(cmd_phi(char_file, q, pn, pp, cfg), g.as_json);
    if (*rw) emit(cmd_rewrite(rules, derive, rmode, rl, rm), g.as_json);
    if (*vc) return cmd_verify(vcase, vmode, vw, display, cert_path, cfg, g.as_json);
    if (*ip) {
      ingest::NewformClient client(cfg);
      emit(cmd_interp(ik, il, im, frob, lpv, norm, client), g.as_json);
    }
    if (*gp) emit(is_good_prime(cn, gl, hl, gpp, quat, adelic).to_json(), g.as_json);
    if (*fe) {
      ingest::NewformClient client(cfg);
      auto r = client.fetch(label);
      json j = r.data.to_json();
      j["payload_sha256"] = r.payload_sha256;
      j["fetched_at"] = r.fetched_at;
      emit(j, g.as_json);
    }
    if (*cf) emit(cfg.to_json(), g.as_json);
    return kOk;
  } catch (const ingest::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const ingest::CacheMissError& e) {
    std::cerr << "cache miss: " << e.what() << "\n";
    return kData;
  } catch (const ingest::NetworkError& e) {
    std::cerr << "network error" << (e.retryable ? " (retryable)" : "") << ": " << e.what() << "\n";
    return kData;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kUsage;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition: " << e.what() << "\n";
    return kUsage;
  } catch (const RangeError& e) {
    std::cerr << "out of range: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kUsage;
  }
}
