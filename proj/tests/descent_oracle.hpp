#pragma once

// Test-only oracles for residue symbols and the C_k coefficients, in plain long arithmetic.

#include <stdexcept>

namespace oracle {

inline long pmod(long x, long p) { return ((x % p) + p) % p; }

inline long inv(long x, long p) {
    x = pmod(x, p);
    for (long y = 1; y < p; ++y) {
        if (x * y % p == 1) return y;
    }
    throw std::logic_error("not invertible");
}

inline int brute_symbol(long n, long p) {
    n = pmod(n, p);
    if (n == 0) return 0;
    for (long x = 1; x < p; ++x) {
        if (x * x % p == n) return 1;
    }
    return -1;
}

// C_k mod p from the truncated expansion of eps^k (a + c w^2)^m, where w = pi^iota and
// w^3 = 0 mod p. With eps = alpha (1 + s w + t w^2):
// C_k = alpha^k (A s^2/2 k^2 + A (t - s^2/2) k + m a^(m-1) c), A = a^m.
inline long closed_ck(long p, long alpha, long s, long t, long a, long c, long m, long k) {
    long A = 1, am1 = 1;
    for (long i = 0; i < m; ++i) A = A * pmod(a, p) % p;
    for (long i = 0; i + 1 < m; ++i) am1 = am1 * pmod(a, p) % p;
    long half = inv(2, p);
    long s2h = s * s % p * half % p;
    long kk = pmod(k, p);
    long q = A * s2h % p * kk % p * kk % p + A * pmod(t - s2h, p) % p * kk % p + pmod(m, p) * am1 % p * pmod(c, p) % p;
    long ak = 1;
    for (long i = 0; i < k; ++i) ak = ak * pmod(alpha, p) % p;
    return q % p * ak % p;
}

}  // namespace oracle
