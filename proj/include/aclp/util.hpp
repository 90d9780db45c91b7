#pragma once

// Shared exact-arithmetic helpers and the error taxonomy used across the
// library. Everything here is deterministic; no floating point anywhere.

#include <gmpxx.h>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace aclp {

using Int = mpz_class;
using Rat = mpq_class;

// ---------------------------------------------------------------------------
// Errors. The CLI maps kinds to exit codes: hypothesis -> 2, precision -> 3,
// invariant -> 4. `where` names the module that raised.
enum class ErrKind { hypothesis, precision, invariant, unsupported, bad_input };

class Error : public std::runtime_error {
 public:
  Error(ErrKind k, std::string where, const std::string& what)
      : std::runtime_error(where + ": " + what), kind(k), module(std::move(where)) {}
  ErrKind kind;
  std::string module;
};

[[noreturn]] inline void fail(ErrKind k, const std::string& where, const std::string& what) {
  throw Error(k, where, what);
}

// Internal invariant check that survives NDEBUG builds.
inline void require(bool ok, const std::string& where, const std::string& what) {
  if (!ok) fail(ErrKind::invariant, where, what);
}

// ---------------------------------------------------------------------------
// Integer helpers.

inline Int pow_int(long b, long e) {
  Int r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(b), static_cast<unsigned long>(e));
  return r;
}

inline Int pow_int(const Int& b, long e) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), static_cast<unsigned long>(e));
  return r;
}

// p-adic valuation of a nonzero integer.
inline long val_p(const Int& n, long p) {
  if (n == 0) fail(ErrKind::invariant, "util", "val_p of 0");
  Int m = n, q;
  long v = 0;
  while (mpz_divisible_ui_p(m.get_mpz_t(), static_cast<unsigned long>(p))) {
    mpz_divexact_ui(q.get_mpz_t(), m.get_mpz_t(), static_cast<unsigned long>(p));
    m = q;
    ++v;
  }
  return v;
}

inline long val_p(const Rat& x, long p) {
  return val_p(Int(x.get_num()), p) - val_p(Int(x.get_den()), p);
}

// Nonnegative remainder.
inline Int mod_pos(const Int& a, const Int& m) {
  Int r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

inline Int mul_mod(const Int& a, const Int& b, const Int& m) { return mod_pos(a * b, m); }

inline Int pow_mod(const Int& b, const Int& e, const Int& m) {
  Int r;
  mpz_powm(r.get_mpz_t(), b.get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
  return r;
}

// Inverse of a mod m; m > 1 and gcd(a, m) = 1 required.
inline Int inv_mod(const Int& a, const Int& m) {
  Int r;
  if (!mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()))
    fail(ErrKind::invariant, "util", "inv_mod: not invertible");
  return r;
}

inline Int isqrt(const Int& n) {
  Int r;
  mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
  return r;
}

inline bool is_perfect_square(const Int& n) {
  return n >= 0 && mpz_perfect_square_p(n.get_mpz_t()) != 0;
}

inline Int rat_floor(const Rat& x) {
  Int num = x.get_num(), den = x.get_den(), q;
  mpz_fdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  return q;
}

inline Int rat_ceil(const Rat& x) {
  Int num = x.get_num(), den = x.get_den(), q;
  mpz_cdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  return q;
}

inline int kronecker(const Int& a, const Int& n) { return mpz_kronecker(a.get_mpz_t(), n.get_mpz_t()); }
inline int kronecker(long a, long n) { return kronecker(Int(a), Int(n)); }

inline bool is_prime(const Int& n) { return mpz_probab_prime_p(n.get_mpz_t(), 40) != 0; }
inline bool is_prime(long n) { return is_prime(Int(n)); }

// Trial-division factorization, (prime, exponent) pairs in increasing order.
inline std::vector<std::pair<long, long>> factor(long n) {
  require(n > 0, "util", "factor: positive argument expected");
  std::vector<std::pair<long, long>> out;
  for (long q = 2; q * q <= n; q += (q == 2 ? 1 : 2)) {
    if (n % q) continue;
    long e = 0;
    while (n % q == 0) n /= q, ++e;
    out.emplace_back(q, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

inline std::vector<long> prime_divisors(long n) {
  std::vector<long> out;
  for (auto [q, e] : factor(n)) out.push_back(q);
  return out;
}

inline bool is_squarefree(long n) {
  for (auto [q, e] : factor(n < 0 ? -n : n))
    if (e > 1) return false;
  return true;
}

// Primes up to and including `limit`, increasing.
inline std::vector<long> primes_upto(long limit) {
  std::vector<long> ps;
  std::vector<bool> comp(static_cast<size_t>(limit < 1 ? 1 : limit) + 1, false);
  for (long i = 2; i <= limit; ++i) {
    if (comp[static_cast<size_t>(i)]) continue;
    ps.push_back(i);
    for (long j = i * i; j <= limit; j += i) comp[static_cast<size_t>(j)] = true;
  }
  return ps;
}

// Square root of a mod odd prime p (Tonelli-Shanks). a need not be reduced.
// Returns the root in [0, p) with even... no canonical parity exists; returns
// min(r, p - r) so the choice is reproducible. Throws if a is a nonresidue.
inline Int sqrt_mod_p(const Int& a0, long p) {
  Int P(p), a = mod_pos(a0, P);
  if (a == 0) return 0;
  if (p == 2) return a;
  if (mpz_legendre(a.get_mpz_t(), P.get_mpz_t()) != 1)
    fail(ErrKind::invariant, "util", "sqrt_mod_p: nonresidue");
  Int r;
  if (p % 4 == 3) {
    r = pow_mod(a, (P + 1) / 4, P);
  } else {
    // Tonelli-Shanks. q odd with p - 1 = q * 2^s.
    Int q = P - 1;
    long s = 0;
    while (q % 2 == 0) q /= 2, ++s;
    Int z = 2;
    while (mpz_legendre(z.get_mpz_t(), P.get_mpz_t()) != -1) ++z;
    Int c = pow_mod(z, q, P);
    Int t = pow_mod(a, q, P);
    r = pow_mod(a, (q + 1) / 2, P);
    long m = s;
    while (t != 1) {
      Int tt = t;
      long i = 0;
      while (tt != 1) {
        tt = mul_mod(tt, tt, P);
        ++i;
      }
      Int b = c;
      for (long j = 0; j < m - i - 1; ++j) b = mul_mod(b, b, P);
      r = mul_mod(r, b, P);
      c = mul_mod(b, b, P);
      t = mul_mod(t, c, P);
      m = i;
    }
  }
  Int other = P - r;
  return r <= other ? r : other;
}

// Hensel lift of a square root: unit a mod p^n, p odd. Start from sqrt mod p.
inline Int sqrt_mod_pk_odd(const Int& a, long p, long n) {
  Int x = sqrt_mod_p(a, p);
  require(x != 0, "util", "sqrt_mod_pk_odd: argument divisible by p");
  long k = 1;
  Int pk(p);
  while (k < n) {
    k = std::min(2 * k, n);
    pk = pow_int(p, k);
    // Newton: x <- (x + a/x)/2
    Int xi = inv_mod(x, pk);
    x = mod_pos((x + mul_mod(a, xi, pk)) * inv_mod(Int(2), pk), pk);
  }
  Int other = pk - x;
  return x <= other ? x : other;
}

// Square root of a mod 2^n for a = 1 (mod 8); returns root = 1 (mod 4).
inline Int sqrt_mod_2k(const Int& a, long n) {
  require(mod_pos(a, Int(8)) == 1, "util", "sqrt_mod_2k: argument not 1 mod 8");
  if (n <= 3) return 1;
  Int x = 1;
  for (long k = 3; k < n; ++k) {
    Int mod_next = pow_int(2, k + 1);
    if (mod_pos(x * x - a, mod_next) != 0) x += pow_int(2, k - 1);
  }
  // Normalize: the four roots are ±x, ±x + 2^(n-1); pick the one = 1 mod 4.
  Int m = pow_int(2, n);
  if (mod_pos(x, Int(4)) != 1) x = m - x;
  return mod_pos(x, m);
}

// Smallest primitive root mod an odd prime p.
inline long primitive_root_mod(long p) {
  require(p >= 3 && is_prime(p), "util", "primitive_root_mod: odd prime expected");
  std::vector<long> qs = prime_divisors(p - 1);
  for (long r = 2; r < p; ++r) {
    bool ok = true;
    for (long q : qs)
      if (pow_mod(Int(r), Int((p - 1) / q), Int(p)) == 1) {
        ok = false;
        break;
      }
    if (ok) return r;
  }
  fail(ErrKind::invariant, "util", "no primitive root found");
}

// ---------------------------------------------------------------------------
// FNV-1a 64-bit, used for cache/report checksums.
inline uint64_t fnv1a64(const std::string& s, uint64_t h = 1469598103934665603ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hex64(uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return s;
}

// Deterministic RNG for randomized self-checks; mt19937_64 with fixed seed.
class Rng {
 public:
  explicit Rng(uint64_t seed) : g_(seed) {}
  // Uniform in [0, n).
  Int below(const Int& n) {
    require(n > 0, "util", "Rng::below: empty range");
    size_t bits = mpz_sizeinbase(n.get_mpz_t(), 2);
    while (true) {
      Int r = 0;
      for (size_t i = 0; i < bits; i += 32) {
        r <<= 32;
        r += static_cast<unsigned long>(g_() & 0xffffffffULL);
      }
      r = mod_pos(r, Int(1) << bits);
      if (r < n) return r;
    }
  }
  long below(long n) { return static_cast<long>(below(Int(n)).get_si()); }
  uint64_t raw() { return g_(); }

 private:
  std::mt19937_64 g_;
};

}  // namespace aclp
