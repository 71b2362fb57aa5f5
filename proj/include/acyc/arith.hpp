#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace acyc {

using i64 = std::int64_t;
using BigInt = mpz_class;
using Rat = mpq_class;

// mpq_class(n, d) does not reduce; always build fractions through this
inline Rat frac(const BigInt& n, const BigInt& d) {
  Rat r(n, d);
  r.canonicalize();
  return r;
}

struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct PreconditionError : std::logic_error {
  using std::logic_error::logic_error;
};
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};
struct RangeError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

i64 gcd64(i64 a, i64 b);
i64 lcm64(i64 a, i64 b);
i64 mod64(i64 a, i64 m);  // result in [0, m)
i64 mulmod(i64 a, i64 b, i64 m);
i64 powmod(i64 b, i64 e, i64 m);
i64 invmod(i64 a, i64 m);  // throws DomainError when not invertible
bool is_prime(i64 n);
std::vector<std::pair<i64, int>> factorize(i64 n);
bool is_squarefree(i64 n);
i64 isqrt(i64 n);
int kronecker(i64 a, i64 n);
i64 primitive_root(i64 p);
i64 ipow(i64 b, int e);  // checked
i64 euler_phi(i64 n);
int vp(i64 n, i64 p);  // n != 0
int vp(const BigInt& n, i64 p);
std::vector<i64> primes_up_to(i64 n);
std::vector<i64> divisors(i64 n);

// Smith normal form of an integer matrix: U*A*V = diag(d). Rows/cols of U, V are unimodular.
struct SmithForm {
  std::vector<BigInt> diag;
  std::vector<std::vector<BigInt>> U, V;
};
SmithForm smith_normal_form(std::vector<std::vector<BigInt>> A);

}  // namespace acyc
