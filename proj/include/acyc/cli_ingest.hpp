#pragma once

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include "acyc/lp_interpolation.hpp"
#include "acyc/qexp.hpp"
#include "acyc/quadfield.hpp"
#include "json.hpp"

namespace acyc::ingest {

struct NetworkError : std::runtime_error {
  bool retryable = true;
  NetworkError(const std::string& what, bool r) : std::runtime_error(what), retryable(r) {}
};
// offline (or unreachable) and nothing in the cache
struct CacheMissError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// payload or cache entry failed a check; the message names it
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  std::filesystem::path cache_dir;
  std::string lmfdb_base_url = "https://www.lmfdb.org";
  bool offline = false;
  int default_precision = 20;
  ArtinNormalization artin = ArtinNormalization::Geometric;
  std::filesystem::path fixture_dir = std::filesystem::path(ACYC_DATA_DIR) / "newforms";
  int retries = 2;
  std::string loaded_from;  // config file actually read, empty if none
  nlohmann::json to_json() const;
};

using EnvLookup = std::function<const char*(const char*)>;
inline const char* real_env(const char* k) { return std::getenv(k); }

// defaults, then the file (explicit path, else $CONFIG_PATH), then $OFFLINE.
// A missing explicit file is an InputError; unknown keys are rejected.
Config load_config(const std::optional<std::string>& path, const EnvLookup& env = real_env);

// "11.2.a.a" or "fixture.11.2.a.a"
bool valid_label(const std::string& label);
std::string sha256_hex(const std::string& bytes);

// one GET against a base URL
class Transport {
 public:
  virtual ~Transport() = default;
  virtual std::string get(const std::string& path) = 0;  // NetworkError on failure
};
std::unique_ptr<Transport> make_http_transport(const std::string& base_url);

// raw API response (or a bare record) to validated data; DataError naming the failed check
NewformData parse_newform_payload(const std::string& payload, const std::string& source);

struct FetchRecord {
  std::string label;
  std::string fetched_at;  // ISO 8601 UTC; "bundled" for fixtures
  std::string payload_sha256;
  NewformData data;
  enum class Origin { Fixture, Cache, Network } origin = Origin::Network;
};

class NewformClient {
 public:
  // In offline mode no transport is ever created; a supplied one is ignored.
  explicit NewformClient(Config cfg, std::unique_ptr<Transport> transport = nullptr);
  FetchRecord fetch(const std::string& label);
  NewformData fetch_newform(const std::string& label) { return fetch(label).data; }
  const Config& config() const { return cfg_; }
  size_t network_requests() const { return requests_; }
  bool network_instantiated() const { return transport_ != nullptr; }

 private:
  Config cfg_;
  std::unique_ptr<Transport> transport_;
  size_t requests_ = 0;
  std::filesystem::path cache_file(const std::string& label) const;
  std::optional<FetchRecord> read_cache(const std::string& label) const;
  void write_cache(const std::string& label, const std::string& payload, const std::string& when) const;
  std::string download(const std::string& label);
};

// A Frobenius input file: explicit values, or {"cm": character file, "g", "h": labels, "p", "precision"}.
// Relative paths are resolved against the file's directory.
struct FrobeniusInput {
  interp::FrobeniusData fd;
  std::optional<Rat> lp_valuation;
  bool check_invariants = true;
};
FrobeniusInput load_frobenius(const std::string& path, NewformClient& client, int k);

// writes via a temporary in the same directory and renames over the target
void atomic_write(const std::filesystem::path& target, const std::string& bytes);

}  // namespace acyc::ingest
