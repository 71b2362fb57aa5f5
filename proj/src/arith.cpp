#include "acyc/arith.hpp"

#include <algorithm>
#include <cmath>

namespace acyc {

i64 gcd64(i64 a, i64 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b) {
    i64 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

i64 lcm64(i64 a, i64 b) {
  if (a == 0 || b == 0) return 0;
  return (a / gcd64(a, b)) * b;
}

i64 mod64(i64 a, i64 m) {
  i64 r = a % m;
  return r < 0 ? r + m : r;
}

i64 mulmod(i64 a, i64 b, i64 m) {
  return static_cast<i64>((static_cast<__int128>(mod64(a, m)) * mod64(b, m)) % m);
}

i64 powmod(i64 b, i64 e, i64 m) {
  if (m == 1) return 0;
  i64 r = 1;
  b = mod64(b, m);
  while (e > 0) {
    if (e & 1) r = mulmod(r, b, m);
    b = mulmod(b, b, m);
    e >>= 1;
  }
  return r;
}

i64 invmod(i64 a, i64 m) {
  i64 g = m, x = 0, x1 = 1, a1 = mod64(a, m);
  while (a1) {
    i64 q = g / a1;
    std::tie(g, a1) = std::make_pair(a1, g - q * a1);
    std::tie(x, x1) = std::make_pair(x1, x - q * x1);
  }
  if (g != 1) throw DomainError("invmod: " + std::to_string(a) + " not invertible mod " + std::to_string(m));
  return mod64(x, m);
}

bool is_prime(i64 n) {
  if (n < 2) return false;
  for (i64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % p == 0) return n == p;
  }
  i64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (i64 a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    i64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool comp = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        comp = false;
        break;
      }
    }
    if (comp) return false;
  }
  return true;
}

std::vector<std::pair<i64, int>> factorize(i64 n) {
  std::vector<std::pair<i64, int>> out;
  if (n < 0) n = -n;
  for (i64 p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

bool is_squarefree(i64 n) {
  for (auto& [p, e] : factorize(n))
    if (e > 1) return false;
  return true;
}

i64 isqrt(i64 n) {
  if (n < 0) throw DomainError("isqrt of negative");
  i64 r = static_cast<i64>(std::sqrt(static_cast<long double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

int kronecker(i64 a, i64 n) {
  if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
  int res = 1;
  if (n < 0) {
    n = -n;
    if (a < 0) res = -res;
  }
  int v = 0;
  while ((n & 1) == 0) {
    n >>= 1;
    ++v;
  }
  if (v > 0) {
    if ((a & 1) == 0) return 0;
    i64 am8 = mod64(a, 8);
    if ((v & 1) && (am8 == 3 || am8 == 5)) res = -res;
  }
  // Jacobi symbol (a/n), n odd positive
  a = mod64(a, n);
  while (a != 0) {
    while ((a & 1) == 0) {
      a >>= 1;
      i64 r = n % 8;
      if (r == 3 || r == 5) res = -res;
    }
    std::swap(a, n);
    if (a % 4 == 3 && n % 4 == 3) res = -res;
    a %= n;
  }
  return n == 1 ? res : 0;
}

i64 primitive_root(i64 p) {
  if (p == 2) return 1;
  auto fs = factorize(p - 1);
  for (i64 g = 2; g < p; ++g) {
    bool ok = true;
    for (auto& [q, e] : fs)
      if (powmod(g, (p - 1) / q, p) == 1) {
        ok = false;
        break;
      }
    if (ok) return g;
  }
  throw DomainError("no primitive root");
}

i64 ipow(i64 b, int e) {
  if (e < 0) throw DomainError("ipow: negative exponent");
  i64 r = 1;
  for (int i = 0; i < e; ++i) {
    if (__builtin_mul_overflow(r, b, &r)) throw RangeError("ipow overflow");
  }
  return r;
}

i64 euler_phi(i64 n) {
  i64 r = n;
  for (auto& [p, e] : factorize(n)) r = r / p * (p - 1);
  return r;
}

int vp(i64 n, i64 p) {
  if (n == 0) throw DomainError("vp(0)");
  int v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

int vp(const BigInt& n, i64 p) {
  if (n == 0) throw DomainError("vp(0)");
  BigInt m = n;
  int v = 0;
  while (mpz_divisible_ui_p(m.get_mpz_t(), static_cast<unsigned long>(p))) {
    m /= p;
    ++v;
  }
  return v;
}

std::vector<i64> primes_up_to(i64 n) {
  std::vector<i64> out;
  if (n < 2) return out;
  std::vector<char> sieve(static_cast<size_t>(n + 1), 1);
  sieve[0] = sieve[1] = 0;
  for (i64 i = 2; i <= n; ++i) {
    if (!sieve[i]) continue;
    out.push_back(i);
    for (i64 j = i * i; j <= n; j += i) sieve[j] = 0;
  }
  return out;
}

std::vector<i64> divisors(i64 n) {
  std::vector<i64> d{1};
  for (auto& [p, e] : factorize(n)) {
    size_t sz = d.size();
    i64 pk = 1;
    for (int k = 1; k <= e; ++k) {
      pk *= p;
      for (size_t i = 0; i < sz; ++i) d.push_back(d[i] * pk);
    }
  }
  std::sort(d.begin(), d.end());
  return d;
}

namespace {

using Mat = std::vector<std::vector<BigInt>>;

Mat identity(size_t n) {
  Mat I(n, std::vector<BigInt>(n, 0));
  for (size_t i = 0; i < n; ++i) I[i][i] = 1;
  return I;
}

void swap_rows(Mat& A, size_t i, size_t j) { std::swap(A[i], A[j]); }
void swap_cols(Mat& A, size_t i, size_t j) {
  for (auto& r : A) std::swap(r[i], r[j]);
}
// row_i += c * row_j
void add_row(Mat& A, size_t i, size_t j, const BigInt& c) {
  for (size_t k = 0; k < A[i].size(); ++k) A[i][k] += c * A[j][k];
}
void add_col(Mat& A, size_t i, size_t j, const BigInt& c) {
  for (auto& r : A) r[i] += c * r[j];
}

}  // namespace

SmithForm smith_normal_form(Mat A) {
  size_t m = A.size(), n = m ? A[0].size() : 0;
  Mat U = identity(m), V = identity(n);
  size_t t = 0;
  while (t < m && t < n) {
    // pivot: smallest nonzero absolute value in the remaining block
    bool found = false;
    size_t pi = t, pj = t;
    BigInt best;
    for (size_t i = t; i < m; ++i)
      for (size_t j = t; j < n; ++j)
        if (A[i][j] != 0 && (!found || abs(A[i][j]) < best)) {
          best = abs(A[i][j]);
          pi = i;
          pj = j;
          found = true;
        }
    if (!found) break;
    swap_rows(A, t, pi);
    swap_rows(U, t, pi);
    swap_cols(A, t, pj);
    swap_cols(V, t, pj);
    bool dirty = true;
    while (dirty) {
      dirty = false;
      for (size_t i = t + 1; i < m; ++i) {
        if (A[i][t] == 0) continue;
        BigInt q;
        mpz_fdiv_q(q.get_mpz_t(), A[i][t].get_mpz_t(), A[t][t].get_mpz_t());
        add_row(A, i, t, -q);
        add_row(U, i, t, -q);
        if (A[i][t] != 0) {
          swap_rows(A, t, i);
          swap_rows(U, t, i);
          dirty = true;
        }
      }
      for (size_t j = t + 1; j < n; ++j) {
        if (A[t][j] == 0) continue;
        BigInt q;
        mpz_fdiv_q(q.get_mpz_t(), A[t][j].get_mpz_t(), A[t][t].get_mpz_t());
        add_col(A, j, t, -q);
        add_col(V, j, t, -q);
        if (A[t][j] != 0) {
          swap_cols(A, t, j);
          swap_cols(V, t, j);
          dirty = true;
        }
      }
      if (dirty) continue;
      // divisibility: pivot must divide the whole remaining block
      for (size_t i = t + 1; i < m && !dirty; ++i)
        for (size_t j = t + 1; j < n; ++j)
          if (A[i][j] % A[t][t] != 0) {
            add_row(A, t, i, 1);
            add_row(U, t, i, 1);
            dirty = true;
            break;
          }
    }
    if (A[t][t] < 0) {
      for (auto& x : A[t]) x = -x;
      for (auto& x : U[t]) x = -x;
    }
    ++t;
  }
  SmithForm sf;
  for (size_t i = 0; i < std::min(m, n); ++i) sf.diag.push_back(A[i][i]);
  sf.U = std::move(U);
  sf.V = std::move(V);
  return sf;
}

}  // namespace acyc
