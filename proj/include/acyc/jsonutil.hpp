#pragma once

#include <string>
#include <vector>

#include "acyc/arith.hpp"
#include "json.hpp"

namespace acyc {

// integers or "p/q" strings
inline Rat rat_of(const nlohmann::json& v) {
  Rat r;
  if (v.is_number_integer()) {
    r = Rat(BigInt(std::to_string(v.get<long long>())));
  } else if (v.is_string()) {
    if (r.set_str(v.get<std::string>(), 10) != 0) throw InputError("bad rational: " + v.get<std::string>());
    r.canonicalize();
  } else {
    throw InputError("expected integer or rational string, got " + v.dump());
  }
  return r;
}

inline std::vector<Rat> rats_of(const nlohmann::json& v) {
  if (!v.is_array()) throw InputError("expected coefficient array, got " + v.dump());
  std::vector<Rat> out;
  for (auto& x : v) out.push_back(rat_of(x));
  return out;
}

// small integers stay numbers, everything else becomes a string
inline nlohmann::json rat_json(const Rat& r) {
  if (r.get_den() == 1 && r.get_num().fits_slong_p()) return r.get_num().get_si();
  return r.get_str();
}

inline std::vector<BigInt> int_poly_of(const nlohmann::json& v) {
  std::vector<BigInt> f;
  for (auto& r : rats_of(v)) {
    if (r.get_den() != 1) throw InputError("polynomial must have integer coefficients");
    f.push_back(r.get_num());
  }
  return f;
}

}  // namespace acyc
