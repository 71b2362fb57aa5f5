#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "acyc/cli_ingest.hpp"

#include <openssl/evp.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <fstream>
#include <regex>
#include <sstream>

#include "acyc/jsonutil.hpp"
#include "httplib.h"

namespace acyc::ingest {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool parse_bool(const std::string& s, const std::string& what) {
  std::string t = s;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
  if (t.empty() || t == "0" || t == "false" || t == "no" || t == "off") return false;
  throw InputError(what + ": expected a boolean, got '" + s + "'");
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw InputError("cannot read " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string now_utc() {
  auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class HttpTransport : public Transport {
 public:
  explicit HttpTransport(const std::string& base) : cli_(base) {
    cli_.set_connection_timeout(10);
    cli_.set_read_timeout(30);
    cli_.set_follow_location(true);
  }
  std::string get(const std::string& path) override {
    auto res = cli_.Get(path);
    if (!res) throw NetworkError("GET " + path + ": " + httplib::to_string(res.error()), true);
    if (res->status >= 500 || res->status == 429)
      throw NetworkError("GET " + path + ": HTTP " + std::to_string(res->status), true);
    if (res->status != 200) throw NetworkError("GET " + path + ": HTTP " + std::to_string(res->status), false);
    return res->body;
  }

 private:
  httplib::Client cli_;
};

// the API returns {"data": [record]}; dimension-one records carry a_n as "traces"
json normalize_record(const json& raw) {
  json rec = raw;
  if (raw.contains("data")) {
    if (!raw["data"].is_array() || raw["data"].empty()) throw DataError("payload check failed: no record for label");
    rec = raw["data"][0];
  }
  if (!rec.contains("an") && !rec.contains("ap") && rec.contains("traces")) {
    if (rec.value("dim", 1) != 1) throw DataError("payload check failed: traces given for a form of dimension > 1");
    json an = json::array();
    for (auto& t : rec["traces"]) an.push_back(json::array({t}));
    rec["an"] = an;
  }
  return rec;
}

}  // namespace

json Config::to_json() const {
  return {{"cache_dir", cache_dir.string()},
          {"lmfdb_base_url", lmfdb_base_url},
          {"offline", offline},
          {"default_precision", default_precision},
          {"artin_normalization", acyc::to_string(artin)},
          {"fixture_dir", fixture_dir.string()},
          {"retries", retries}};
}

Config load_config(const std::optional<std::string>& path, const EnvLookup& env) {
  Config c;
  if (const char* x = env("XDG_CACHE_HOME"); x && *x)
    c.cache_dir = fs::path(x) / "acyc";
  else if (const char* h = env("HOME"); h && *h)
    c.cache_dir = fs::path(h) / ".cache" / "acyc";
  else
    c.cache_dir = ".acyc-cache";

  std::optional<std::string> file = path;
  if (!file) {
    if (const char* p = env("CONFIG_PATH"); p && *p) file = p;
  }
  if (file) {
    if (!fs::exists(*file)) throw InputError("config file not found: " + *file);
    json j;
    try {
      j = json::parse(read_file(*file));
    } catch (const json::parse_error& e) {
      throw InputError("config " + *file + ": " + e.what());
    }
    if (!j.is_object()) throw InputError("config " + *file + ": expected an object");
    for (auto& [k, v] : j.items()) {
      try {
        if (k == "cache_dir") {
          fs::path p = v.get<std::string>();
          c.cache_dir = p.is_relative() ? fs::path(*file).parent_path() / p : p;
        } else if (k == "lmfdb_base_url") {
          c.lmfdb_base_url = v.get<std::string>();
        } else if (k == "offline") {
          c.offline = v.get<bool>();
        } else if (k == "default_precision") {
          c.default_precision = v.get<int>();
          if (c.default_precision < 1) throw InputError("config: default_precision must be positive");
        } else if (k == "artin_normalization") {
          c.artin = artin_from_string(v.get<std::string>());
        } else if (k == "fixture_dir") {
          fs::path p = v.get<std::string>();
          c.fixture_dir = p.is_relative() ? fs::path(*file).parent_path() / p : p;
        } else if (k == "retries") {
          c.retries = std::max(0, v.get<int>());
        } else {
          throw InputError("config " + *file + ": unknown key '" + k + "'");
        }
      } catch (const json::type_error& e) {
        throw InputError("config " + *file + ": bad value for '" + k + "'");
      }
    }
    c.loaded_from = *file;
  }
  if (const char* o = env("OFFLINE"); o) c.offline = parse_bool(o, "OFFLINE");
  return c;
}

bool valid_label(const std::string& label) {
  static const std::regex re(R"(^(fixture\.)?[1-9][0-9]*\.[1-9][0-9]*\.[a-z]+\.[a-z]+$)");
  return std::regex_match(label, re);
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int n = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &n, EVP_sha256(), nullptr) != 1) throw DomainError("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < n; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 15]);
  }
  return out;
}

std::unique_ptr<Transport> make_http_transport(const std::string& base_url) { return std::make_unique<HttpTransport>(base_url); }

NewformData parse_newform_payload(const std::string& payload, const std::string& source) {
  json raw;
  try {
    raw = json::parse(payload);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("payload check failed: not JSON (") + e.what() + ")");
  }
  try {
    return NewformData::from_json(normalize_record(raw), source);
  } catch (const InputError& e) {
    throw DataError(std::string("validation failed: ") + e.what());
  } catch (const json::exception& e) {
    throw DataError(std::string("payload check failed: ") + e.what());
  }
}

void atomic_write(const fs::path& target, const std::string& bytes) {
  static std::atomic<unsigned> counter{0};
  fs::create_directories(target.parent_path());
  fs::path tmp = target.parent_path() /
                 ("." + target.filename().string() + ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cache: cannot write " + tmp.string());
    out << bytes;
    out.flush();
    if (!out) throw DataError("cache: short write to " + tmp.string());
  }
  fs::rename(tmp, target);
}

NewformClient::NewformClient(Config cfg, std::unique_ptr<Transport> transport) : cfg_(std::move(cfg)) {
  if (!cfg_.offline) transport_ = std::move(transport);
}

fs::path NewformClient::cache_file(const std::string& label) const { return cfg_.cache_dir / (label + ".json"); }

std::optional<FetchRecord> NewformClient::read_cache(const std::string& label) const {
  const fs::path f = cache_file(label);
  if (!fs::exists(f)) return std::nullopt;
  json j;
  try {
    j = json::parse(read_file(f));
  } catch (const json::parse_error&) {
    throw DataError("cache check failed: " + f.string() + " is not JSON");
  }
  const std::string payload = j.value("payload", std::string());
  if (j.value("payload_sha256", std::string()) != sha256_hex(payload))
    throw DataError("cache check failed: payload hash mismatch in " + f.string());
  FetchRecord r;
  r.label = label;
  r.fetched_at = j.value("fetched_at", std::string());
  r.payload_sha256 = j["payload_sha256"].get<std::string>();
  r.data = parse_newform_payload(payload, "lmfdb");
  r.origin = FetchRecord::Origin::Cache;
  return r;
}

void NewformClient::write_cache(const std::string& label, const std::string& payload, const std::string& when) const {
  json j = {{"label", label}, {"fetched_at", when}, {"payload_sha256", sha256_hex(payload)}, {"payload", payload}};
  atomic_write(cache_file(label), j.dump(1) + "\n");
}

std::string NewformClient::download(const std::string& label) {
  if (cfg_.offline) throw CacheMissError("offline: " + label + " is not in the cache at " + cfg_.cache_dir.string());
  if (!transport_) transport_ = make_http_transport(cfg_.lmfdb_base_url);
  const std::string path = "/api/mf_newforms/?label=" + label + "&_format=json";
  for (int attempt = 0;; ++attempt) {
    try {
      ++requests_;
      return transport_->get(path);
    } catch (const NetworkError& e) {
      if (!e.retryable || attempt >= cfg_.retries) throw;
    }
  }
}

FetchRecord NewformClient::fetch(const std::string& label) {
  if (!valid_label(label)) throw InputError("malformed newform label: '" + label + "'");
  if (label.rfind("fixture.", 0) == 0) {
    const std::string bare = label.substr(8);
    const fs::path f = cfg_.fixture_dir / (bare + ".json");
    if (!fs::exists(f)) throw DataError("no bundled fixture for " + bare + " in " + cfg_.fixture_dir.string());
    const std::string payload = read_file(f);
    FetchRecord r;
    r.label = label;
    r.fetched_at = "bundled";
    r.payload_sha256 = sha256_hex(payload);
    r.data = parse_newform_payload(payload, "fixture");
    r.origin = FetchRecord::Origin::Fixture;
    return r;
  }
  std::optional<FetchRecord> hit;
  try {
    hit = read_cache(label);
  } catch (const DataError&) {
    // a corrupt entry is refetched when possible
    if (cfg_.offline) throw;
  }
  if (hit) return *hit;
  const std::string payload = download(label);
  FetchRecord r;
  r.label = label;
  r.data = parse_newform_payload(payload, "lmfdb");
  if (r.data.label != label) throw DataError("payload check failed: record label " + r.data.label + " differs from " + label);
  r.fetched_at = now_utc();
  r.payload_sha256 = sha256_hex(payload);
  r.origin = FetchRecord::Origin::Network;
  write_cache(label, payload, r.fetched_at);
  return r;
}

FrobeniusInput load_frobenius(const std::string& path, NewformClient& client, int k) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw DataError("frobenius file " + path + ": " + e.what());
  } catch (const InputError& e) {
    throw DataError(e.what());
  }
  FrobeniusInput in;
  if (j.contains("lp_valuation")) in.lp_valuation = rat_of(j["lp_valuation"]);
  in.check_invariants = j.value("check_invariants", true);
  if (j.contains("cm")) {
    fs::path cf = j["cm"].get<std::string>();
    if (cf.is_relative()) cf = fs::path(path).parent_path() / cf;
    GrossenChar psi = GrossenChar::from_file(cf.string());
    if (psi.k() != k) throw InputError("frobenius file: character has weight " + std::to_string(psi.k()) + ", requested k=" + std::to_string(k));
    NewformData g = client.fetch_newform(j.at("g").get<std::string>());
    NewformData h = client.fetch_newform(j.at("h").get<std::string>());
    in.fd = interp::frobenius_from_cm(psi, g, h, j.at("p").get<i64>(), j.value("precision", client.config().default_precision));
  } else {
    in.fd = interp::frobenius_from_json(j);
  }
  return in;
}

}  // namespace acyc::ingest
